#pragma once

#include "allocation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <utility>
#include <vector>

namespace payoff_forge {

inline constexpr double kZPassThreshold = 4.0;

class SimConfig {
public:
    SimConfig(std::uint64_t rounds, std::uint64_t paths, std::uint64_t seed, ProbMass realized,
              ProbMass belief, MarketQuotes quotes)
        : rounds_(rounds), paths_(paths), seed_(seed), realized_(std::move(realized)),
          belief_(std::move(belief)), quotes_(std::move(quotes)) {
        if (rounds_ < 1) throw std::domain_error("SimConfig: rounds must be at least 1");
        if (paths_ < 1) throw std::domain_error("SimConfig: paths must be at least 1");
        require_same_grid(realized_.grid(), belief_.grid(), "SimConfig");
        require_same_grid(realized_.grid(), quotes_.grid(), "SimConfig");
    }

    std::uint64_t rounds() const noexcept { return rounds_; }
    std::uint64_t paths() const noexcept { return paths_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const ProbMass& realized() const noexcept { return realized_; }
    const ProbMass& belief() const noexcept { return belief_; }
    const MarketQuotes& quotes() const noexcept { return quotes_; }

private:
    std::uint64_t rounds_;
    std::uint64_t paths_;
    std::uint64_t seed_;
    ProbMass realized_;
    ProbMass belief_;
    MarketQuotes quotes_;
};

struct SimResult {
    double mean_log_rate; // nats per round, surviving paths only
    double std_error;     // sample std of per-path rates / sqrt(surviving paths)
    std::vector<double> per_path_terminal_log_wealth; // -inf marks a ruined path
    ExtReal target_rate;  // sum p_i ln f_i
    std::uint64_t ruined_paths;
};

namespace detail {

// Each path gets its own engine keyed by (seed, path index), so results do
// not depend on how paths are distributed over threads.
inline std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    return std::mt19937_64(seq);
}

inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

} // namespace detail

inline SimResult simulate_reinvestment(const SimConfig& cfg, unsigned threads = 0) {
    const KellyResult kelly = kelly_general(cfg.belief(), cfg.quotes());
    const Payoff payoff = allocation_payoff(kelly.alloc, cfg.quotes());
    const std::size_t n = payoff.size();
    const double neg_inf = -std::numeric_limits<double>::infinity();

    std::vector<double> log_payoff(n);
    for (std::size_t i = 0; i < n; ++i)
        log_payoff[i] = payoff[i] > 0.0 ? std::log(payoff[i]) : neg_inf;

    std::vector<double> cum(n);
    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        running += cfg.realized()[i];
        cum[i] = std::min(running, 1.0);
    }
    cum.back() = 1.0;

    const std::uint64_t paths = cfg.paths();
    const std::uint64_t rounds = cfg.rounds();
    std::vector<double> per_path(paths);

    auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t j = lo; j < hi; ++j) {
            std::mt19937_64 eng = detail::path_engine(cfg.seed(), j);
            double log_wealth = 0.0;
            for (std::uint64_t r = 0; r < rounds; ++r) {
                const double u = detail::uniform01(eng);
                const std::size_t idx = static_cast<std::size_t>(
                    std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
                const double lf = log_payoff[idx];
                if (lf == neg_inf) {
                    log_wealth = neg_inf;
                    break;
                }
                log_wealth += lf;
            }
            per_path[j] = log_wealth;
        }
    };

    unsigned hw = threads != 0 ? threads : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::uint64_t workers = std::min<std::uint64_t>(hw, paths);
    if (workers <= 1) {
        run_range(0, paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::uint64_t chunk = (paths + workers - 1) / workers;
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t lo = w * chunk;
            const std::uint64_t hi = std::min(lo + chunk, paths);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    // reduce sequentially in path order so the result is schedule-independent
    NeumaierSum rate_sum;
    std::uint64_t ruined = 0;
    const double inv_rounds = 1.0 / static_cast<double>(rounds);
    for (std::uint64_t j = 0; j < paths; ++j) {
        if (per_path[j] == neg_inf)
            ++ruined;
        else
            rate_sum.add(per_path[j] * inv_rounds);
    }
    const std::uint64_t surviving = paths - ruined;
    const double mean = surviving > 0 ? rate_sum.value() / static_cast<double>(surviving) : 0.0;

    double std_error = 0.0;
    if (surviving > 1) {
        NeumaierSum sq;
        for (std::uint64_t j = 0; j < paths; ++j) {
            if (per_path[j] == neg_inf) continue;
            const double d = per_path[j] * inv_rounds - mean;
            sq.add(d * d);
        }
        const double sample_var = sq.value() / static_cast<double>(surviving - 1);
        std_error = std::sqrt(std::max(sample_var, 0.0) / static_cast<double>(surviving));
    }

    ExtReal target = expected_log_payoff(cfg.realized(), payoff);
    return SimResult{mean, std_error, std::move(per_path), target, ruined};
}

struct WealthQuantiles {
    double min = 0.0;
    double p05 = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double p95 = 0.0;
    double max = 0.0;
};

struct ConvergenceReport {
    ExtReal z;
    bool pass;
    bool inconsistent; // zero spread (or infinite target) with mean != target
    std::uint64_t ruined_paths;
    WealthQuantiles quantiles; // of surviving terminal log wealth
};

inline ConvergenceReport convergence_report(const SimResult& result) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> surviving;
    surviving.reserve(result.per_path_terminal_log_wealth.size());
    for (double w : result.per_path_terminal_log_wealth)
        if (w != neg_inf) surviving.push_back(w);
    std::sort(surviving.begin(), surviving.end());

    WealthQuantiles q;
    if (!surviving.empty()) {
        auto at = [&](double p) {
            const double h = p * static_cast<double>(surviving.size() - 1);
            const std::size_t lo = static_cast<std::size_t>(h);
            const std::size_t hi = std::min(lo + 1, surviving.size() - 1);
            const double frac = h - static_cast<double>(lo);
            return surviving[lo] + frac * (surviving[hi] - surviving[lo]);
        };
        q = WealthQuantiles{surviving.front(), at(0.05), at(0.25), at(0.50),
                            at(0.75), at(0.95), surviving.back()};
    }

    if (!result.target_rate.is_finite()) {
        return ConvergenceReport{result.target_rate.is_minus_infinity()
                                     ? ExtReal::plus_infinity()
                                     : ExtReal::minus_infinity(),
                                 false, true, result.ruined_paths, q};
    }
    const double diff = result.mean_log_rate - result.target_rate.value();
    if (result.std_error > 0.0) {
        const double zval = diff / result.std_error;
        if (std::isfinite(zval)) {
            const ExtReal z(zval);
            return ConvergenceReport{z, std::abs(zval) <= kZPassThreshold, false,
                                     result.ruined_paths, q};
        }
        return ConvergenceReport{zval > 0.0 ? ExtReal::plus_infinity() : ExtReal::minus_infinity(),
                                 false, false, result.ruined_paths, q};
    }
    if (diff == 0.0)
        return ConvergenceReport{ExtReal(0.0), true, false, result.ruined_paths, q};
    return ConvergenceReport{diff > 0.0 ? ExtReal::plus_infinity() : ExtReal::minus_infinity(),
                             false, true, result.ruined_paths, q};
}

} // namespace payoff_forge
