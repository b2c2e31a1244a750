// Compensated (Kahan/Neumaier) accumulation used by all prime sums and
// moment statistics, so results are stable to ~1e-12 relative error across
// sums with millions of terms.

#pragma once

#include <cmath>

namespace lcmsim {

class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    void merge(const KahanSum& other) {
        add(other.sum_);
        comp_ += other.comp_;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace lcmsim
