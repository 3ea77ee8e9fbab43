#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace payoff_forge {

// Strictly ascending strike levels; bin i spans [edges[i], edges[i+1]).
class Grid {
public:
    explicit Grid(std::vector<double> edges) : edges_(std::move(edges)) {
        if (edges_.size() < 2)
            throw std::domain_error("Grid: need at least 2 edges");
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            if (!std::isfinite(edges_[i]))
                throw std::domain_error("Grid: edge " + std::to_string(i) + " is not finite");
            if (i > 0 && !(edges_[i - 1] < edges_[i]))
                throw std::domain_error("Grid: edges must be strictly increasing (index " +
                                        std::to_string(i) + ")");
        }
    }

    std::size_t bins() const noexcept { return edges_.size() - 1; }
    const std::vector<double>& edges() const noexcept { return edges_; }
    double left(std::size_t i) const { return edges_[i]; }
    double right(std::size_t i) const { return edges_[i + 1]; }
    double width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }
    double midpoint(std::size_t i) const { return 0.5 * (edges_[i] + edges_[i + 1]); }
    double span_left() const noexcept { return edges_.front(); }
    double span_right() const noexcept { return edges_.back(); }
    bool all_positive() const noexcept { return edges_.front() > 0.0; }

    std::vector<double> midpoints() const {
        std::vector<double> m(bins());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = midpoint(i);
        return m;
    }

    friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.edges_ == b.edges_; }
    friend bool operator!=(const Grid& a, const Grid& b) noexcept { return !(a == b); }

private:
    std::vector<double> edges_;
};

inline Grid uniform_grid(double lo, double hi, std::size_t bins) {
    if (bins == 0) throw std::domain_error("uniform_grid: need at least one bin");
    if (!(lo < hi)) throw std::domain_error("uniform_grid: lo must be below hi");
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        e[i] = lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(bins));
    e.front() = lo;
    e.back() = hi;
    return Grid(std::move(e));
}

inline Grid log_uniform_grid(double lo, double hi, std::size_t bins) {
    if (bins == 0) throw std::domain_error("log_uniform_grid: need at least one bin");
    if (!(lo > 0.0)) throw std::domain_error("log_uniform_grid: lo must be positive");
    if (!(lo < hi)) throw std::domain_error("log_uniform_grid: lo must be below hi");
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        e[i] = std::exp(llo + (lhi - llo) * (static_cast<double>(i) / static_cast<double>(bins)));
    e.front() = lo;
    e.back() = hi;
    return Grid(std::move(e));
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b) throw std::domain_error(std::string(where) + ": grids do not match");
}

} // namespace payoff_forge
