#pragma once

#include "distribution.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace payoff_forge {

inline constexpr double kFairOddsTol = 1e-9;

// Per-bin gross returns plus the gross risk-free return over the same horizon.
class MarketQuotes {
public:
    MarketQuotes(Grid grid, std::vector<double> returns, double risk_free)
        : grid_(std::move(grid)), returns_(std::move(returns)), risk_free_(risk_free) {
        if (returns_.size() != grid_.bins())
            throw std::domain_error("MarketQuotes: return count must equal bin count");
        for (std::size_t i = 0; i < returns_.size(); ++i)
            if (!std::isfinite(returns_[i]) || !(returns_[i] > 0.0))
                throw std::domain_error("MarketQuotes: return " + std::to_string(i) +
                                        " must be positive and finite");
        if (!std::isfinite(risk_free_) || !(risk_free_ > 0.0))
            throw std::domain_error("MarketQuotes: risk_free must be positive and finite");
    }

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<double>& returns() const noexcept { return returns_; }
    double ret(std::size_t i) const { return returns_[i]; }
    double risk_free() const noexcept { return risk_free_; }
    std::size_t size() const noexcept { return returns_.size(); }

private:
    Grid grid_;
    std::vector<double> returns_;
    double risk_free_;
};

struct ImpliedResult {
    ProbMass dist;           // market-implied distribution, masses R / R_i
    double reference_return; // R with 1/R = sum of 1/R_i
    bool fair_odds;          // |sum 1/R_i - 1| within tolerance
};

inline ImpliedResult implied_distribution(const MarketQuotes& quotes) {
    NeumaierSum s;
    for (double r : quotes.returns()) s.add(1.0 / r);
    const double inv_sum = s.value();
    const double reference_return = 1.0 / inv_sum;
    std::vector<double> m(quotes.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = reference_return / quotes.ret(i);
    const bool fair = std::abs(inv_sum - 1.0) <= kFairOddsTol;
    return ImpliedResult{ProbMass(quotes.grid(), std::move(m)), reference_return, fair};
}

inline MarketQuotes returns_from_distribution(const ProbMass& m, double reference_return,
                                              double risk_free = 1.0) {
    if (!std::isfinite(reference_return) || !(reference_return > 0.0))
        throw std::domain_error("returns_from_distribution: reference return must be positive");
    std::vector<double> returns(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] <= 0.0)
            throw std::domain_error("returns_from_distribution: bin " + std::to_string(i) +
                                    " has zero mass, its return is not representable");
        returns[i] = reference_return / m[i];
    }
    return MarketQuotes(m.grid(), std::move(returns), risk_free);
}

} // namespace payoff_forge
