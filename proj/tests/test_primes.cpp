#include <cmath>
#include <cstdint>

#include <stdexcept>

#include "doctest.h"
#include "lcmsim/primes.hpp"

using lcmsim::ExponentMap;
using lcmsim::FactorizationTable;

namespace {

// Independent primality oracle: trial division.
bool trial_division_prime(std::uint32_t k) {
    if (k < 2) return false;
    for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= k; ++d) {
        if (k % d == 0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("smallest prime factors on small inputs") {
    const FactorizationTable table(10);
    CHECK(table.smallest_prime_factor(9) == 3);
    CHECK(table.smallest_prime_factor(7) == 7);
    CHECK(table.smallest_prime_factor(2) == 2);
    CHECK(table.smallest_prime_factor(10) == 2);
}

TEST_CASE("table construction rejects bad sizes") {
    CHECK_THROWS_AS(FactorizationTable(1), std::invalid_argument);
    CHECK_THROWS_AS(FactorizationTable(FactorizationTable::kMaxNmax + 1), std::length_error);
}

TEST_CASE("factorize reconstructs exactly") {
    const FactorizationTable table(100000);

    const ExponentMap twelve = table.factorize(12);
    REQUIRE(twelve.entries().size() == 2);
    CHECK(twelve.entries()[0] == lcmsim::PrimePower{2, 2});
    CHECK(twelve.entries()[1] == lcmsim::PrimePower{3, 1});

    CHECK(table.factorize(97).entries() ==
          std::vector<lcmsim::PrimePower>{{97, 1}});
    CHECK(table.factorize(360).entries() ==
          std::vector<lcmsim::PrimePower>{{2, 3}, {3, 2}, {5, 1}});

    for (std::uint32_t k = 2; k <= 100000; ++k) {
        if (table.factorize(k).value() != k) {
            FAIL("reconstruction failed at " << k);
        }
    }

    CHECK_THROWS_AS(table.factorize(1), std::out_of_range);
    CHECK_THROWS_AS(table.factorize(100001), std::out_of_range);
}

TEST_CASE("prime enumeration matches trial division") {
    const FactorizationTable table(10000);
    const auto primes = table.primes_up_to(10000);
    std::size_t i = 0;
    for (std::uint32_t k = 0; k <= 10000; ++k) {
        const bool listed = i < primes.size() && primes[i] == k;
        CHECK(listed == trial_division_prime(k));
        if (listed) ++i;
    }
    CHECK(i == primes.size());
}

TEST_CASE("primes_up_to small values") {
    const FactorizationTable table(100);
    const auto primes = table.primes_up_to(10);
    CHECK(std::vector<std::uint32_t>(primes.begin(), primes.end()) ==
          std::vector<std::uint32_t>{2, 3, 5, 7});
    CHECK(table.primes_up_to(1).empty());
    CHECK_THROWS_AS(table.primes_up_to(101), std::out_of_range);
}

TEST_CASE("prime count at one million") {
    const FactorizationTable table(1000000);
    // independent count via trial division
    std::size_t count = 0;
    for (std::uint32_t k = 2; k <= 1000000; ++k) {
        if (trial_division_prime(k)) ++count;
    }
    CHECK(count == 78498);
    CHECK(table.primes_up_to(1000000).size() == count);

    std::size_t fixed_points = 0;
    for (std::uint32_t k = 2; k <= 1000000; ++k) {
        if (table.smallest_prime_factor(k) == k) ++fixed_points;
    }
    CHECK(fixed_points == 78498);
}

TEST_CASE("prime counting stays near x / log x") {
    const FactorizationTable table(10000000);
    for (const std::uint32_t x : {100000u, 1000000u, 10000000u}) {
        const double pi_x = static_cast<double>(table.primes_up_to(x).size());
        const double ratio = pi_x * std::log(static_cast<double>(x)) / static_cast<double>(x);
        CHECK(ratio > 0.9);
        CHECK(ratio < 1.25);
    }
}

TEST_CASE("mertens log sums") {
    const FactorizationTable table(1000000);

    // single term: log(2)/2
    CHECK(table.mertens_log_sum(2, 1) == doctest::Approx(0.34657359027997264).epsilon(1e-12));
    // hand sum over {2,3,5,7}: log2/2 + log3/3 + log5/5 + log7/7
    CHECK(table.mertens_log_sum(10, 1) == doctest::Approx(1.312652433140255).epsilon(1e-12));

    // second-power sum near its leading term log^2(x)/2
    const double x = 1000000.0;
    const double ratio = table.mertens_log_sum(1000000, 2) / (0.5 * std::log(x) * std::log(x));
    CHECK(ratio > 0.8);
    CHECK(ratio < 1.2);

    // nondecreasing in x
    double previous = 0.0;
    for (std::uint32_t cut = 2; cut <= 1000; ++cut) {
        const double value = table.mertens_log_sum(cut, 1);
        CHECK(value >= previous);
        previous = value;
    }

    CHECK_THROWS_AS(table.mertens_log_sum(10, 5), std::invalid_argument);
    CHECK_THROWS_AS(table.mertens_log_sum(1, 1), std::out_of_range);
}

TEST_CASE("exponent map invariants") {
    CHECK_THROWS_AS(ExponentMap({{2, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(ExponentMap({{3, 1}, {2, 1}}), std::invalid_argument);
    CHECK(ExponentMap{}.value() == 1);
    CHECK(ExponentMap{}.log_value() == 0.0);
    const ExponentMap m({{2, 3}, {3, 2}, {5, 1}});
    CHECK(m.value() == 360);
    CHECK(m.log_value() == doctest::Approx(std::log(360.0)).epsilon(1e-14));
}
