#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace payoff_forge {

// Compensated (Neumaier) summation for long reductions.
class NeumaierSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double neumaier_total(const std::vector<double>& xs) noexcept {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

// Standard normal mass on [z1, z2]. Differencing the CDF directly loses all
// precision once both edges sit deep in the upper tail, so each tail is
// resolved through the side of erf/erfc that stays well scaled.
inline double normal_interval_mass(double z1, double z2) noexcept {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    if (z1 >= 0.0)
        return 0.5 * (std::erfc(z1 * inv_sqrt2) - std::erfc(z2 * inv_sqrt2));
    if (z2 <= 0.0)
        return 0.5 * (std::erfc(-z2 * inv_sqrt2) - std::erfc(-z1 * inv_sqrt2));
    return 0.5 * (std::erf(z2 * inv_sqrt2) + std::erf(-z1 * inv_sqrt2));
}

inline double normal_cdf(double z) noexcept {
    return 0.5 * std::erfc(-z * 0.70710678118654752440);
}

} // namespace payoff_forge
