#pragma once

#include "market.hpp"
#include "payoff.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace payoff_forge {

inline constexpr double kKktTol = 1e-8;

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Capital fractions per bin plus a cash fraction; fractions sum to one.
class Allocation {
public:
    Allocation(Grid grid, std::vector<double> alphas, double alpha0)
        : grid_(std::move(grid)), alphas_(std::move(alphas)), alpha0_(alpha0) {
        if (alphas_.size() != grid_.bins())
            throw std::domain_error("Allocation: fraction count must equal bin count");
        if (!std::isfinite(alpha0_) || alpha0_ < 0.0)
            throw std::domain_error("Allocation: cash fraction must be finite and nonnegative");
        NeumaierSum s;
        for (std::size_t i = 0; i < alphas_.size(); ++i) {
            if (!std::isfinite(alphas_[i]) || alphas_[i] < 0.0)
                throw std::domain_error("Allocation: fraction " + std::to_string(i) +
                                        " must be finite and nonnegative");
            s.add(alphas_[i]);
        }
        s.add(alpha0_);
        const double total = s.value();
        if (std::abs(total - 1.0) > kMassSumTol)
            throw std::domain_error("Allocation: fractions sum to " + std::to_string(total) +
                                    ", outside the unit-sum tolerance");
        if (std::abs(total - 1.0) > detail::kExactSumWindow) {
            for (double& a : alphas_) a /= total;
            alpha0_ /= total;
        }
    }

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<double>& alphas() const noexcept { return alphas_; }
    double alpha(std::size_t i) const { return alphas_[i]; }
    double alpha0() const noexcept { return alpha0_; }
    std::size_t size() const noexcept { return alphas_.size(); }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < alphas_.size(); ++i)
            if (alphas_[i] > 0.0) s.push_back(i);
        return s;
    }

private:
    Grid grid_;
    std::vector<double> alphas_;
    double alpha0_;
};

inline Allocation kelly_fair(const ProbMass& b) {
    return Allocation(b.grid(), b.masses(), 0.0);
}

inline ExtReal believed_rate(const ProbMass& b, const MarketQuotes& quotes,
                             const Allocation& alloc) {
    require_same_grid(b.grid(), quotes.grid(), "believed_rate");
    require_same_grid(b.grid(), alloc.grid(), "believed_rate");
    const double cash_leg = alloc.alpha0() * quotes.risk_free();
    NeumaierSum s;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] == 0.0) continue;
        const double f = alloc.alpha(i) * quotes.ret(i) + cash_leg;
        if (f <= 0.0) return ExtReal::minus_infinity();
        s.add(b[i] * std::log(f));
    }
    return ExtReal(s.value());
}

// Expected log growth of holding payoff f when outcomes follow p. A possible
// outcome paying zero means certain ruin, which dominates everything else.
inline ExtReal expected_log_payoff(const ProbMass& p, const Payoff& f) {
    require_same_grid(p.grid(), f.grid(), "expected_log_payoff");
    NeumaierSum s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (f[i] <= 0.0) return ExtReal::minus_infinity();
        s.add(p[i] * std::log(f[i]));
    }
    return ExtReal(s.value());
}

inline ExtReal realized_rate(const ProbMass& p, const ProbMass& b, const ProbMass& m) {
    require_same_grid(p.grid(), b.grid(), "realized_rate");
    require_same_grid(p.grid(), m.grid(), "realized_rate");
    bool plus = false;
    NeumaierSum s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (b[i] == 0.0) return ExtReal::minus_infinity();
        if (m[i] == 0.0) {
            plus = true;
            continue;
        }
        s.add(p[i] * std::log(b[i] / m[i]));
    }
    return plus ? ExtReal::plus_infinity() : ExtReal(s.value());
}

inline Payoff allocation_payoff(const Allocation& alloc, const MarketQuotes& quotes) {
    require_same_grid(alloc.grid(), quotes.grid(), "allocation_payoff");
    const double cash_leg = alloc.alpha0() * quotes.risk_free();
    std::vector<double> f(alloc.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = alloc.alpha(i) * quotes.ret(i) + cash_leg;
    return Payoff(alloc.grid(), std::move(f));
}

// Max violation of the optimality conditions at multiplier 1 (the value the
// budget constraint forces at any optimum): per-bin b_i R_i / f_i <= 1 with
// equality on funded bins, R0 * sum b_j / f_j <= 1 with equality when cash is
// held, plus the budget residual. Infinity when a believed outcome pays zero.
inline double kkt_residual(const ProbMass& b, const MarketQuotes& quotes,
                           const Allocation& alloc) {
    require_same_grid(b.grid(), quotes.grid(), "kkt_residual");
    require_same_grid(b.grid(), alloc.grid(), "kkt_residual");
    const double r0 = quotes.risk_free();
    const double cash_leg = alloc.alpha0() * r0;
    double res = 0.0;
    NeumaierSum cash_grad;
    NeumaierSum budget;
    for (std::size_t i = 0; i < b.size(); ++i) {
        budget.add(alloc.alpha(i));
        if (b[i] == 0.0) {
            if (alloc.alpha(i) > 0.0) res = std::max(res, 1.0);
            continue;
        }
        const double f = alloc.alpha(i) * quotes.ret(i) + cash_leg;
        if (f <= 0.0) return std::numeric_limits<double>::infinity();
        const double g = b[i] * quotes.ret(i) / f;
        res = std::max(res, alloc.alpha(i) > 0.0 ? std::abs(g - 1.0) : std::max(0.0, g - 1.0));
        cash_grad.add(b[i] / f);
    }
    const double g0 = r0 * cash_grad.value();
    res = std::max(res, alloc.alpha0() > 0.0 ? std::abs(g0 - 1.0) : std::max(0.0, g0 - 1.0));
    budget.add(alloc.alpha0());
    res = std::max(res, std::abs(budget.value() - 1.0));
    return res;
}

struct KellyResult {
    Allocation alloc;
    std::vector<std::size_t> support;   // funded bins
    std::vector<double> implied_market; // prior the allocation behaves as if quoted against:
                                        // R0/R_i on funded bins, b_i/alpha0 elsewhere
    double kkt_residual;
};

namespace detail {

// Damped multiplicative ascent on the simplex; only reached if the direct
// construction ever fails its own optimality check. Coordinates that decay
// below the inactivity floor while their gradient sits under the multiplier
// are pinned to zero, otherwise they would keep the two-sided stationarity
// residual from ever closing.
inline bool kelly_fixed_point(const ProbMass& b, const MarketQuotes& quotes,
                              std::vector<double>& alphas, double& alpha0) {
    const std::size_t n = b.size();
    const double r0 = quotes.risk_free();
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (b[i] > 0.0) ++positive;
    const double start = 1.0 / static_cast<double>(positive + 1);
    alphas.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (b[i] > 0.0) alphas[i] = start;
    alpha0 = start;
    constexpr double damping = 0.5;
    constexpr double inactive_floor = 1e-12;
    for (int iter = 0; iter < 200000; ++iter) {
        const double cash_leg = alpha0 * r0;
        double cash_grad = 0.0;
        double res = 0.0;
        std::vector<double> grad(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (b[i] == 0.0) continue;
            const double f = alphas[i] * quotes.ret(i) + cash_leg;
            grad[i] = b[i] * quotes.ret(i) / f;
            cash_grad += b[i] / f;
            res = std::max(res, alphas[i] > 0.0 ? std::abs(grad[i] - 1.0)
                                                : std::max(0.0, grad[i] - 1.0));
        }
        const double g0 = r0 * cash_grad;
        res = std::max(res, alpha0 > 0.0 ? std::abs(g0 - 1.0) : std::max(0.0, g0 - 1.0));
        if (res <= kKktTol * 0.1) return true;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (b[i] == 0.0) continue;
            alphas[i] *= 1.0 - damping + damping * grad[i];
            if (alphas[i] < inactive_floor && grad[i] < 1.0) alphas[i] = 0.0;
            total += alphas[i];
        }
        alpha0 *= 1.0 - damping + damping * g0;
        if (alpha0 < inactive_floor && g0 < 1.0) alpha0 = 0.0;
        total += alpha0;
        if (!(total > 0.0)) return false;
        for (std::size_t i = 0; i < n; ++i) alphas[i] /= total;
        alpha0 /= total;
    }
    return false;
}

} // namespace detail

// Growth-optimal allocation with a risk-free leg: maximizes
// sum_i b_i ln(alpha_i R_i + alpha0 R0) over the full simplex.
//
// Water-filling construction. At any optimum the funded set is
// { i : b_i R_i > alpha0 R0 }, funded bins satisfy alpha_i R_i + alpha0 R0 =
// b_i R_i, and when cash is held alpha0 = (1 - B) / (1 - R0 S) with B, S the
// funded-set sums of b_i and 1/R_i. Scanning bins by b_i R_i descending and
// growing the funded set while the next bin clears the running threshold
// alpha0 R0 reaches that fixed point directly; the threshold strictly falls
// at every step, so the scan never revisits a decision.
inline KellyResult kelly_general(const ProbMass& b, const MarketQuotes& quotes) {
    require_same_grid(b.grid(), quotes.grid(), "kelly_general");
    const std::size_t n = b.size();
    const double r0 = quotes.risk_free();

    std::vector<double> alphas(n, 0.0);
    double alpha0 = 0.0;

    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) vmax = std::max(vmax, b[i] * quotes.ret(i));

    if (vmax <= r0) {
        // no bin beats the bond
        alpha0 = 1.0;
    } else {
        NeumaierSum inv;
        for (std::size_t i = 0; i < n; ++i)
            if (b[i] > 0.0) inv.add(1.0 / quotes.ret(i));
        const double s_plus = inv.value();
        if (r0 * s_plus <= 1.0) {
            // cash is worthless even as a floor: bet the believed proportions
            alphas = b.masses();
        } else {
            std::vector<std::size_t> order;
            order.reserve(n);
            for (std::size_t i = 0; i < n; ++i)
                if (b[i] > 0.0) order.push_back(i);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                return b[x] * quotes.ret(x) > b[y] * quotes.ret(y);
            });
            double bsum = 0.0;
            double ssum = 0.0;
            std::size_t k = 0;
            while (k < order.size()) {
                const double t = r0 * (1.0 - bsum) / (1.0 - r0 * ssum);
                const std::size_t j = order[k];
                if (!(b[j] * quotes.ret(j) > t)) break;
                bsum += b[j];
                ssum += 1.0 / quotes.ret(j);
                ++k;
            }
            const double denom = 1.0 - r0 * ssum;
            alpha0 = denom != 0.0 ? std::clamp((1.0 - bsum) / denom, 0.0, 1.0) : 0.0;
            for (std::size_t idx = 0; idx < k; ++idx) {
                const std::size_t j = order[idx];
                alphas[j] = std::max(b[j] - alpha0 * r0 / quotes.ret(j), 0.0);
            }
        }
    }

    Allocation alloc(b.grid(), alphas, alpha0);
    double res = kkt_residual(b, quotes, alloc);
    if (res > kKktTol) {
        if (!detail::kelly_fixed_point(b, quotes, alphas, alpha0))
            throw SolverError("kelly_general: solver did not reach the optimality tolerance");
        alloc = Allocation(b.grid(), alphas, alpha0);
        res = kkt_residual(b, quotes, alloc);
        if (res > kKktTol)
            throw SolverError("kelly_general: solver did not reach the optimality tolerance");
    }

    std::vector<std::size_t> support = alloc.support();
    std::vector<double> implied(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (alloc.alpha(i) > 0.0)
            implied[i] = r0 / quotes.ret(i);
        else if (alloc.alpha0() > 0.0)
            implied[i] = b[i] / alloc.alpha0();
    }
    return KellyResult{std::move(alloc), std::move(support), std::move(implied), res};
}

struct GrowthReport {
    ExtReal believed_rate;
    std::vector<double> per_bin_log_return; // ln f_i; -inf marks a zero payoff
    std::optional<ExtReal> realized_rate;
};

inline GrowthReport make_growth_report(const ProbMass& b, const MarketQuotes& quotes,
                                       const Allocation& alloc,
                                       const std::optional<ProbMass>& realized = std::nullopt) {
    const Payoff f = allocation_payoff(alloc, quotes);
    std::vector<double> logs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        logs[i] = f[i] > 0.0 ? std::log(f[i]) : -std::numeric_limits<double>::infinity();
    std::optional<ExtReal> realized_growth;
    if (realized) realized_growth = expected_log_payoff(*realized, f);
    return GrowthReport{believed_rate(b, quotes, alloc), std::move(logs), realized_growth};
}

} // namespace payoff_forge
