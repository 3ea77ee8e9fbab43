#pragma once

#include "distribution.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace payoff_forge {

// Per-bin gross payoff multiples of invested notional.
class Payoff {
public:
    Payoff(Grid grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.bins())
            throw std::domain_error("Payoff: value count must equal bin count");
        bool any_positive = false;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]) || values_[i] < 0.0)
                throw std::domain_error("Payoff: value " + std::to_string(i) +
                                        " must be finite and nonnegative");
            if (values_[i] > 0.0) any_positive = true;
        }
        if (!any_positive)
            throw std::domain_error("Payoff: at least one value must be positive");
    }

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    Grid grid_;
    std::vector<double> values_;
};

inline Payoff payoff_from_belief(const ProbMass& b, const ProbMass& m, double reference_return) {
    require_same_grid(b.grid(), m.grid(), "payoff_from_belief");
    if (!std::isfinite(reference_return) || !(reference_return > 0.0))
        throw std::domain_error("payoff_from_belief: reference return must be positive");
    std::vector<double> values(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] == 0.0) {
            values[i] = 0.0;
        } else {
            if (m[i] == 0.0)
                throw std::domain_error("payoff_from_belief: bin " + std::to_string(i) +
                                        " is believed possible but not bettable");
            values[i] = reference_return * (b[i] / m[i]);
        }
    }
    return Payoff(b.grid(), std::move(values));
}

struct BeliefResult {
    ProbMass belief;
    double implied_scale; // sum of f_i m_i before renormalization
};

inline BeliefResult belief_from_payoff(const Payoff& f, const ProbMass& m) {
    require_same_grid(f.grid(), m.grid(), "belief_from_payoff");
    std::vector<double> w(f.size());
    NeumaierSum s;
    for (std::size_t i = 0; i < f.size(); ++i) {
        w[i] = f[i] * m[i];
        s.add(w[i]);
    }
    const double scale = s.value();
    if (!(scale > 0.0))
        throw std::domain_error("belief_from_payoff: payoff has zero market-implied cost");
    return BeliefResult{normalize(std::move(w), f.grid()), scale};
}

struct DiagnosticReport {
    std::optional<bool> boundary_ok;   // set by boundary_check
    double max_outside_deviation = 0.0;
    std::optional<bool> bounded_ok;    // set by likelihood_bound_check
    double max_leverage = 0.0;
    std::vector<std::size_t> flagged_bins;
};

inline DiagnosticReport boundary_check(const Payoff& f, double a, double b, double tol) {
    if (!(a < b))
        throw std::domain_error("boundary_check: degenerate interval (a >= b)");
    if (!(tol >= 0.0))
        throw std::domain_error("boundary_check: tolerance must be nonnegative");
    DiagnosticReport rep;
    double max_dev = 0.0;
    double max_lev = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        max_lev = std::max(max_lev, f[i]);
        const double x = f.grid().midpoint(i);
        if (x < a || x > b) {
            const double dev = std::abs(f[i] - 1.0);
            max_dev = std::max(max_dev, dev);
            if (dev > tol) rep.flagged_bins.push_back(i);
        }
    }
    rep.boundary_ok = max_dev <= tol;
    rep.max_outside_deviation = max_dev;
    rep.max_leverage = max_lev;
    return rep;
}

inline DiagnosticReport likelihood_bound_check(const Payoff& f, double cap) {
    if (!(cap > 0.0))
        throw std::domain_error("likelihood_bound_check: cap must be positive");
    DiagnosticReport rep;
    double max_lev = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        max_lev = std::max(max_lev, f[i]);
        if (f[i] > cap) rep.flagged_bins.push_back(i);
    }
    rep.bounded_ok = max_lev <= cap;
    rep.max_leverage = max_lev;
    return rep;
}

inline Payoff risk_aversion_blend(const Payoff& f, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::domain_error("risk_aversion_blend: lambda must lie in [0, 1]");
    std::vector<double> g(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        g[i] = (1.0 - lambda) + lambda * f[i];
    return Payoff(f.grid(), std::move(g));
}

enum class VanillaKind { call, digital_call, forward };

struct VanillaResult {
    Payoff payoff;
    bool floored; // forward values below the strike were clipped to zero
};

// Raw option payoff at bin midpoints, rescaled to unit market-implied cost so
// the result reads as a gross-return multiple.
inline VanillaResult vanilla_payoff(const Grid& grid, VanillaKind kind, double strike,
                                    const ProbMass& m) {
    require_same_grid(grid, m.grid(), "vanilla_payoff");
    if (!(strike >= grid.span_left() && strike <= grid.span_right()))
        throw std::domain_error("vanilla_payoff: strike outside grid span");
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i] <= 0.0)
            throw std::domain_error("vanilla_payoff: normalizer must be strictly positive");
    std::vector<double> raw(grid.bins());
    bool floored = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double x = grid.midpoint(i);
        switch (kind) {
        case VanillaKind::call:
            raw[i] = std::max(x - strike, 0.0);
            break;
        case VanillaKind::digital_call:
            raw[i] = x > strike ? 1.0 : 0.0;
            break;
        case VanillaKind::forward:
            raw[i] = x - strike;
            if (raw[i] < 0.0) {
                raw[i] = 0.0;
                floored = true;
            }
            break;
        }
    }
    NeumaierSum cost;
    for (std::size_t i = 0; i < raw.size(); ++i) cost.add(m[i] * raw[i]);
    const double s = cost.value();
    if (!(s > 0.0))
        throw std::domain_error("vanilla_payoff: payoff is zero on every bin");
    for (double& v : raw) v /= s;
    return VanillaResult{Payoff(grid, std::move(raw)), floored};
}

inline Payoff variance_view_payoff(double mu, double sigma_m, double sigma_b, const Grid& grid) {
    if (!std::isfinite(mu) || !(sigma_m > 0.0) || !(sigma_b > 0.0))
        throw std::domain_error("variance_view_payoff: sigmas must be positive");
    if (!grid.all_positive())
        throw std::domain_error("variance_view_payoff: grid edges must be positive");
    const double c = 1.0 / (sigma_m * sigma_m) - 1.0 / (sigma_b * sigma_b);
    const double ratio = sigma_m / sigma_b;
    std::vector<double> values(grid.bins());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = std::log(grid.midpoint(i)) - mu;
        values[i] = ratio * std::exp(0.5 * c * d * d);
    }
    return Payoff(grid, std::move(values));
}

inline double variance_view_rate(double sigma_m, double sigma_b, double sigma_p) {
    if (!(sigma_m > 0.0) || !(sigma_b > 0.0) || !(sigma_p > 0.0))
        throw std::domain_error("variance_view_rate: sigmas must be positive");
    const double c = 1.0 / (sigma_m * sigma_m) - 1.0 / (sigma_b * sigma_b);
    return std::log(sigma_m / sigma_b) + 0.5 * c * sigma_p * sigma_p;
}

} // namespace payoff_forge
