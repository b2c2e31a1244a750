// Internal: tracks which values of [n] have appeared along a draw sequence.
// Bitset backing for n up to 2^24, hash set above; a coupon walk touches
// only about m distinct values, so memory stays O(n/8) or O(m).

#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

namespace lcmsim::detail {

class DistinctTracker {
public:
    explicit DistinctTracker(std::uint32_t n) {
        if (n <= (1u << 24)) {
            words_.assign((static_cast<std::size_t>(n) >> 6) + 1, 0);
        }
    }

    // Returns true the first time a value is inserted.
    bool insert(std::uint32_t value) {
        if (!words_.empty()) {
            std::uint64_t& word = words_[value >> 6];
            const std::uint64_t bit = 1ull << (value & 63);
            if (word & bit) return false;
            word |= bit;
            return true;
        }
        return seen_.insert(value).second;
    }

private:
    std::vector<std::uint64_t> words_;
    std::unordered_set<std::uint32_t> seen_;
};

}  // namespace lcmsim::detail
