#pragma once

#include "ext_real.hpp"
#include "grid.hpp"
#include "numerics.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace payoff_forge {

inline constexpr double kMassSumTol = 1e-12;
inline constexpr double kCoverageWarnThreshold = 0.99;

namespace detail {
// Sums within a few ulps of 1 are taken as already normalized; rescaling them
// would perturb values that are bitwise-meaningful to callers.
inline constexpr double kExactSumWindow = 1e-15;
}

// Probability distribution as per-bin masses; the density at a point inside
// bin i is masses[i] / width(i).
class ProbMass {
public:
    ProbMass(Grid grid, std::vector<double> masses)
        : grid_(std::move(grid)), masses_(std::move(masses)) {
        if (masses_.size() != grid_.bins())
            throw std::domain_error("ProbMass: mass count must equal bin count");
        NeumaierSum s;
        for (std::size_t i = 0; i < masses_.size(); ++i) {
            if (!std::isfinite(masses_[i]) || masses_[i] < 0.0)
                throw std::domain_error("ProbMass: mass " + std::to_string(i) +
                                        " must be finite and nonnegative");
            s.add(masses_[i]);
        }
        const double total = s.value();
        if (std::abs(total - 1.0) > kMassSumTol)
            throw std::domain_error("ProbMass: masses sum to " + std::to_string(total) +
                                    ", outside the unit-sum tolerance");
        if (std::abs(total - 1.0) > detail::kExactSumWindow)
            for (double& m : masses_) m /= total;
    }

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<double>& masses() const noexcept { return masses_; }
    double operator[](std::size_t i) const { return masses_[i]; }
    std::size_t size() const noexcept { return masses_.size(); }

private:
    Grid grid_;
    std::vector<double> masses_;
};

inline ProbMass normalize(std::vector<double> masses, const Grid& grid) {
    if (masses.size() != grid.bins())
        throw std::domain_error("normalize: entry count must equal bin count");
    NeumaierSum s;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (!std::isfinite(masses[i]) || masses[i] < 0.0)
            throw std::domain_error("normalize: entry " + std::to_string(i) +
                                    " must be finite and nonnegative");
        s.add(masses[i]);
    }
    const double total = s.value();
    if (!(total > 0.0))
        throw std::domain_error("normalize: entries sum to zero");
    if (std::abs(total - 1.0) > detail::kExactSumWindow)
        for (double& m : masses) m /= total;
    return ProbMass(grid, std::move(masses));
}

struct LognormalParams {
    double mu;
    double sigma;

    LognormalParams(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
        if (!std::isfinite(mu) || !std::isfinite(sigma) || !(sigma > 0.0))
            throw std::domain_error("LognormalParams: sigma must be positive and finite");
    }
};

struct DiscretizeResult {
    ProbMass dist;
    double coverage;        // untruncated mass captured by the grid span
    bool coverage_warning;  // coverage below 99%
};

inline DiscretizeResult discretize_lognormal(const LognormalParams& params, const Grid& grid) {
    if (!grid.all_positive())
        throw std::domain_error("discretize_lognormal: all grid edges must be positive");
    const std::size_t n = grid.bins();
    std::vector<double> masses(n);
    NeumaierSum captured;
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = (std::log(grid.left(i)) - params.mu) / params.sigma;
        const double z2 = (std::log(grid.right(i)) - params.mu) / params.sigma;
        masses[i] = std::max(normal_interval_mass(z1, z2), 0.0);
        captured.add(masses[i]);
    }
    const double coverage = captured.value();
    if (!(coverage > 0.0))
        throw std::domain_error("discretize_lognormal: grid captures no mass");
    for (double& m : masses) m /= coverage;
    return DiscretizeResult{ProbMass(grid, std::move(masses)), coverage,
                            coverage < kCoverageWarnThreshold};
}

struct Moments {
    double mean_x;
    double var_x;
    double mean_log_x;
    double var_log_x;
};

inline Moments moments(const ProbMass& dist) {
    if (!dist.grid().all_positive())
        throw std::domain_error("moments: log moments require positive grid edges");
    const std::size_t n = dist.size();
    NeumaierSum mx, ml;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = dist.grid().midpoint(i);
        mx.add(dist[i] * x);
        ml.add(dist[i] * std::log(x));
    }
    const double mean_x = mx.value();
    const double mean_l = ml.value();
    NeumaierSum vx, vl;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = dist.grid().midpoint(i);
        const double dx = x - mean_x;
        const double dl = std::log(x) - mean_l;
        vx.add(dist[i] * dx * dx);
        vl.add(dist[i] * dl * dl);
    }
    return Moments{mean_x, std::max(vx.value(), 0.0), mean_l, std::max(vl.value(), 0.0)};
}

// Mean of the underlying itself; unlike moments() this stays valid on grids
// that extend to nonpositive strikes.
inline double mean_x(const ProbMass& dist) {
    NeumaierSum s;
    for (std::size_t i = 0; i < dist.size(); ++i)
        s.add(dist[i] * dist.grid().midpoint(i));
    return s.value();
}

inline ExtReal relative_entropy(const ProbMass& p, const ProbMass& q) {
    require_same_grid(p.grid(), q.grid(), "relative_entropy");
    NeumaierSum s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p[i];
        if (pi == 0.0) continue;
        const double qi = q[i];
        if (qi == 0.0) return ExtReal::plus_infinity();
        s.add(pi * std::log(pi / qi));
    }
    return ExtReal(s.value());
}

} // namespace payoff_forge
