#include <catch2/catch_amalgamated.hpp>

#include <payoff_forge/payoff_forge.hpp>

#include "oracles.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

using namespace payoff_forge;

namespace {

const Grid kCoinGrid({0.0, 1.0, 2.0});

Grid lognormal_grid(double mu, double sigma, double half_width_sigmas, std::size_t bins) {
    return log_uniform_grid(std::exp(mu - half_width_sigmas * sigma),
                            std::exp(mu + half_width_sigmas * sigma), bins);
}

} // namespace

TEST_CASE("payoff validation") {
    REQUIRE_NOTHROW(Payoff(kCoinGrid, {0.0, 2.0}));
    REQUIRE_THROWS_AS(Payoff(kCoinGrid, {0.0, 0.0}), std::domain_error);
    REQUIRE_THROWS_AS(Payoff(kCoinGrid, {-0.5, 2.0}), std::domain_error);
    REQUIRE_THROWS_AS(Payoff(kCoinGrid, {1.0}), std::domain_error);
    REQUIRE_THROWS_AS(Payoff(kCoinGrid, {std::numeric_limits<double>::infinity(), 1.0}),
                      std::domain_error);
}

TEST_CASE("no view buys the reference return in every bin") {
    const ProbMass m(kCoinGrid, {0.5, 0.5});
    const Payoff flat = payoff_from_belief(m, m, 1.0);
    REQUIRE(flat.values() == std::vector<double>{1.0, 1.0});

    const Payoff discounted = payoff_from_belief(m, m, 0.9);
    REQUIRE(discounted.values() == std::vector<double>{0.9, 0.9});

    std::mt19937_64 rng(301);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 40);
        const Grid g = uniform_grid(0.0, 1.0, n);
        const ProbMass any = normalize(oracles::random_simplex(rng, n, 0.001), g);
        const Payoff f = payoff_from_belief(any, any, 1.0);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(f[i] == 1.0);
    }
}

TEST_CASE("a payoff is the belief-to-market density ratio") {
    const ProbMass b(kCoinGrid, {0.75, 0.25});
    const ProbMass m(kCoinGrid, {0.5, 0.5});
    const Payoff f = payoff_from_belief(b, m, 1.0);
    REQUIRE(f.values() == std::vector<double>{1.5, 0.5});

    const ProbMass heavy(kCoinGrid, {1.0, 0.0});
    REQUIRE_NOTHROW(payoff_from_belief(heavy, m, 1.0));
    REQUIRE_THROWS_AS(payoff_from_belief(m, heavy, 1.0), std::domain_error);
    REQUIRE_THROWS_AS(payoff_from_belief(b, m, 0.0), std::domain_error);
}

TEST_CASE("belief recovery from a payoff") {
    const ProbMass m(kCoinGrid, {0.5, 0.5});

    const BeliefResult flat = belief_from_payoff(Payoff(kCoinGrid, {1.0, 1.0}), m);
    REQUIRE(flat.belief.masses() == m.masses());
    REQUIRE(flat.implied_scale == 1.0);

    const BeliefResult skew = belief_from_payoff(Payoff(kCoinGrid, {1.5, 0.5}), m);
    REQUIRE(skew.belief[0] == Catch::Approx(0.75).margin(1e-15));
    REQUIRE(skew.belief[1] == Catch::Approx(0.25).margin(1e-15));
    REQUIRE(skew.implied_scale == Catch::Approx(1.0).margin(1e-15));

    const BeliefResult digital = belief_from_payoff(Payoff(kCoinGrid, {0.0, 2.0}), m);
    REQUIRE(digital.belief.masses() == std::vector<double>{0.0, 1.0});
    REQUIRE(digital.implied_scale == 1.0);
}

TEST_CASE("payoff and belief are inverse up to the implied scale") {
    std::mt19937_64 rng(302);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 40);
        const Grid g = uniform_grid(0.0, 1.0, n);
        const ProbMass b = normalize(oracles::random_simplex(rng, n, 0.001), g);
        const ProbMass m = normalize(oracles::random_simplex(rng, n, 0.001), g);

        const Payoff f = payoff_from_belief(b, m, 1.0);
        const BeliefResult back = belief_from_payoff(f, m);
        for (std::size_t i = 0; i < n; ++i)
            REQUIRE(back.belief[i] == Catch::Approx(b[i]).margin(1e-10));
        REQUIRE(back.implied_scale == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("scaling a payoff moves the scale and not the belief") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 20);
        const Grid g = uniform_grid(0.0, 1.0, n);
        const ProbMass m = normalize(oracles::random_simplex(rng, n, 0.001), g);
        std::vector<double> values(n);
        for (double& v : values) v = 0.05 + 5.0 * oracles::uniform01(rng);
        const double c = 0.1 + 10.0 * oracles::uniform01(rng);
        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = c * values[i];

        const BeliefResult base = belief_from_payoff(Payoff(g, values), m);
        const BeliefResult bumped = belief_from_payoff(Payoff(g, scaled), m);
        for (std::size_t i = 0; i < n; ++i)
            REQUIRE(bumped.belief[i] == Catch::Approx(base.belief[i]).margin(1e-12));
        REQUIRE(bumped.implied_scale ==
                Catch::Approx(c * base.implied_scale).epsilon(1e-12));
    }
}

TEST_CASE("boundary check accepts agreement outside the research interval") {
    const Grid g = uniform_grid(50.0, 150.0, 100);
    std::vector<double> values(g.bins(), 1.0);
    for (std::size_t i = 0; i < g.bins(); ++i) {
        const double x = g.midpoint(i);
        if (x >= 90.0 && x <= 110.0) values[i] = 1.4;
    }
    const DiagnosticReport rep = boundary_check(Payoff(g, values), 90.0, 110.0, 1e-9);
    REQUIRE(rep.boundary_ok.has_value());
    REQUIRE(*rep.boundary_ok);
    REQUIRE(rep.max_outside_deviation <= 1e-9);
    REQUIRE(rep.max_leverage == 1.4);
    REQUIRE(rep.flagged_bins.empty());

    const DiagnosticReport flat =
        boundary_check(Payoff(kCoinGrid, {1.0, 1.0}), 0.2, 0.8, 1e-9);
    REQUIRE(*flat.boundary_ok);

    REQUIRE_THROWS_AS(boundary_check(Payoff(kCoinGrid, {1.0, 1.0}), 0.8, 0.8, 1e-9),
                      std::domain_error);
    REQUIRE_THROWS_AS(boundary_check(Payoff(kCoinGrid, {1.0, 1.0}), 0.9, 0.2, 1e-9),
                      std::domain_error);
}

TEST_CASE("the variance view fails every finite research interval") {
    const Grid g = lognormal_grid(0.0, 0.3, 8.0, 500);
    const Payoff f = variance_view_payoff(0.0, 0.2, 0.3, g);
    for (const auto& [a, b] : std::vector<std::pair<double, double>>{
             {0.8, 1.25}, {0.5, 2.0}, {g.span_left() * 1.05, g.span_right() * 0.95}}) {
        const DiagnosticReport rep = boundary_check(f, a, b, 1e-6);
        REQUIRE_FALSE(*rep.boundary_ok);
        REQUIRE_FALSE(rep.flagged_bins.empty());
        REQUIRE(rep.max_outside_deviation > 1.0);
    }
}

TEST_CASE("likelihood cap check") {
    const DiagnosticReport flat = likelihood_bound_check(Payoff(kCoinGrid, {1.0, 1.0}), 10.0);
    REQUIRE(flat.bounded_ok.has_value());
    REQUIRE(*flat.bounded_ok);
    REQUIRE(flat.max_leverage == 1.0);

    const DiagnosticReport coin = likelihood_bound_check(Payoff(kCoinGrid, {1.5, 0.5}), 2.0);
    REQUIRE(*coin.bounded_ok);

    const Grid g = lognormal_grid(0.0, 0.2, 6.0, 400);
    const ProbMass m = discretize_lognormal(LognormalParams(0.0, 0.2), g).dist;
    const Payoff call = vanilla_payoff(g, VanillaKind::call, 1.0, m).payoff;
    const DiagnosticReport rep = likelihood_bound_check(call, 10.0);
    REQUIRE_FALSE(*rep.bounded_ok);
    REQUIRE(rep.max_leverage > 10.0);
    for (std::size_t i : rep.flagged_bins) REQUIRE(g.midpoint(i) > 1.0);

    REQUIRE_THROWS_AS(likelihood_bound_check(Payoff(kCoinGrid, {1.0, 1.0}), 0.0),
                      std::domain_error);
}

TEST_CASE("risk aversion blend interpolates toward the risk-free line") {
    const Payoff f(kCoinGrid, {1.5, 0.5});
    REQUIRE(risk_aversion_blend(f, 0.0).values() == std::vector<double>{1.0, 1.0});
    REQUIRE(risk_aversion_blend(f, 1.0).values() == f.values());
    REQUIRE(risk_aversion_blend(f, 0.5).values() == std::vector<double>{1.25, 0.75});
    REQUIRE_THROWS_AS(risk_aversion_blend(f, -0.01), std::domain_error);
    REQUIRE_THROWS_AS(risk_aversion_blend(f, 1.01), std::domain_error);

    std::mt19937_64 rng(304);
    const Grid g = uniform_grid(0.0, 1.0, 30);
    std::vector<double> values(30);
    for (double& v : values) v = 4.0 * oracles::uniform01(rng);
    const Payoff wild(g, values);
    for (int trial = 0; trial < 50; ++trial) {
        const double lambda = oracles::uniform01(rng);
        const Payoff blended = risk_aversion_blend(wild, lambda);
        for (std::size_t i = 0; i < blended.size(); ++i) {
            REQUIRE(blended[i] >= std::min(1.0, wild[i]) - 1e-15);
            REQUIRE(blended[i] <= std::max(1.0, wild[i]) + 1e-15);
        }
    }
}

TEST_CASE("digital at the market median pays double above the strike") {
    const Grid g({0.0, 1.0, 2.0, 3.0, 4.0});
    const ProbMass m(g, {0.25, 0.25, 0.25, 0.25});
    const VanillaResult r = vanilla_payoff(g, VanillaKind::digital_call, 2.0, m);
    REQUIRE(r.payoff.values() == std::vector<double>{0.0, 0.0, 2.0, 2.0});
    REQUIRE_FALSE(r.floored);
}

TEST_CASE("a call struck at the left edge is the normalized forward") {
    const Grid g = uniform_grid(1.0, 2.0, 25);
    std::mt19937_64 rng(305);
    const ProbMass m = normalize(oracles::random_simplex(rng, 25, 0.002), g);
    const VanillaResult call = vanilla_payoff(g, VanillaKind::call, 1.0, m);
    const VanillaResult fwd = vanilla_payoff(g, VanillaKind::forward, 1.0, m);
    REQUIRE(call.payoff.values() == fwd.payoff.values());
    REQUIRE_FALSE(call.floored);
    REQUIRE_FALSE(fwd.floored);

    const VanillaResult clipped = vanilla_payoff(g, VanillaKind::forward, 1.5, m);
    REQUIRE(clipped.floored);
}

TEST_CASE("an at-the-money call implies a right-shifted belief") {
    const Grid g = lognormal_grid(0.0, 0.2, 6.0, 400);
    const ProbMass m = discretize_lognormal(LognormalParams(0.0, 0.2), g).dist;
    const VanillaResult call = vanilla_payoff(g, VanillaKind::call, 1.0, m);

    double cost = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) cost += m[i] * call.payoff[i];
    REQUIRE(cost == Catch::Approx(1.0).margin(1e-12));

    const BeliefResult implied = belief_from_payoff(call.payoff, m);
    REQUIRE(mean_x(implied.belief) > mean_x(m));

    const VanillaResult digital = vanilla_payoff(g, VanillaKind::digital_call, 1.0, m);
    const BeliefResult dig = belief_from_payoff(digital.payoff, m);
    for (std::size_t i = 0; i < g.bins(); ++i)
        if (g.midpoint(i) <= 1.0) REQUIRE(dig.belief[i] == 0.0);
    REQUIRE(mean_x(dig.belief) > mean_x(m));
}

TEST_CASE("vanilla payoff rejects impossible constructions") {
    const Grid g = uniform_grid(1.0, 2.0, 10);
    std::mt19937_64 rng(306);
    const ProbMass m = normalize(oracles::random_simplex(rng, 10, 0.002), g);
    REQUIRE_THROWS_AS(vanilla_payoff(g, VanillaKind::call, 0.5, m), std::domain_error);
    REQUIRE_THROWS_AS(vanilla_payoff(g, VanillaKind::call, 2.5, m), std::domain_error);
    REQUIRE_THROWS_AS(vanilla_payoff(g, VanillaKind::call, 2.0, m), std::domain_error);

    const Grid coarse({0.0, 1.0, 2.0});
    const ProbMass holey(coarse, {1.0, 0.0});
    REQUIRE_THROWS_AS(vanilla_payoff(coarse, VanillaKind::call, 1.0, holey),
                      std::domain_error);
}

TEST_CASE("variance view payoff closed form") {
    const Grid g = lognormal_grid(0.0, 0.3, 6.0, 200);
    const Payoff same = variance_view_payoff(0.0, 0.25, 0.25, g);
    for (std::size_t i = 0; i < same.size(); ++i) REQUIRE(same[i] == 1.0);

    const Grid pin({std::exp(0.5) - 0.01, std::exp(0.5) + 0.01});
    const Payoff at = variance_view_payoff(0.0, 0.2, 0.3, pin);
    REQUIRE(at[0] == Catch::Approx(oracles::kVarViewPayoffAtHalf).epsilon(1e-10));

    const Grid atm({1.0 - 0.25, 1.0 + 0.25});
    const Payoff center = variance_view_payoff(0.0, 0.2, 0.3, atm);
    REQUIRE(center[0] == Catch::Approx(2.0 / 3.0).margin(1e-15));

    REQUIRE_THROWS_AS(variance_view_payoff(0.0, 0.0, 0.3, g), std::domain_error);
    REQUIRE_THROWS_AS(variance_view_payoff(0.0, 0.2, -0.3, g), std::domain_error);
    REQUIRE_THROWS_AS(variance_view_payoff(0.0, 0.2, 0.3, Grid({-1.0, 1.0})),
                      std::domain_error);
}

TEST_CASE("both variance view routes agree on a fine grid") {
    std::mt19937_64 rng(307);
    for (int trial = 0; trial < 6; ++trial) {
        const double sigma_m = 0.1 + 0.3 * oracles::uniform01(rng);
        const double ratio = 0.5 + 2.0 * oracles::uniform01(rng);
        const double sigma_b = sigma_m * ratio;
        const double mu = -0.2 + 0.4 * oracles::uniform01(rng);
        const double width = 6.0 * std::max(sigma_m, sigma_b);
        const Grid g = log_uniform_grid(std::exp(mu - width), std::exp(mu + width), 10000);

        const ProbMass m = discretize_lognormal(LognormalParams(mu, sigma_m), g).dist;
        const ProbMass b = discretize_lognormal(LognormalParams(mu, sigma_b), g).dist;
        const Payoff ratio_route = payoff_from_belief(b, m, 1.0);
        const Payoff closed = variance_view_payoff(mu, sigma_m, sigma_b, g);

        double worst = 0.0;
        for (std::size_t i = 0; i < g.bins(); ++i)
            worst = std::max(worst, std::abs(ratio_route[i] - closed[i]) / closed[i]);
        REQUIRE(worst <= 1e-3);
    }
}

TEST_CASE("variance view growth rate closed form") {
    REQUIRE(variance_view_rate(0.2, 0.2, 0.2) == 0.0);
    REQUIRE(variance_view_rate(0.3, 0.3, 0.7) == 0.0);
    REQUIRE(variance_view_rate(0.2, 0.3, 0.25) ==
            Catch::Approx(oracles::kVarViewRateRef).margin(1e-15));
    REQUIRE_THROWS_AS(variance_view_rate(0.0, 0.3, 0.25), std::domain_error);
    REQUIRE_THROWS_AS(variance_view_rate(0.2, 0.3, 0.0), std::domain_error);
}

TEST_CASE("variance view rate is affine in realized variance") {
    const double s1 = 0.15, s2 = 0.25, s3 = 0.40;
    const double r1 = variance_view_rate(0.2, 0.3, s1);
    const double r2 = variance_view_rate(0.2, 0.3, s2);
    const double r3 = variance_view_rate(0.2, 0.3, s3);
    const double slope12 = (r2 - r1) / (s2 * s2 - s1 * s1);
    const double slope13 = (r3 - r1) / (s3 * s3 - s1 * s1);
    REQUIRE(slope12 == Catch::Approx(oracles::kVarViewSlope).margin(1e-8));
    REQUIRE(slope13 == Catch::Approx(oracles::kVarViewSlope).margin(1e-8));
    REQUIRE(slope12 > 0.0);

    const double short_side = (variance_view_rate(0.3, 0.2, s2) -
                               variance_view_rate(0.3, 0.2, s1)) /
                              (s2 * s2 - s1 * s1);
    REQUIRE(short_side < 0.0);
}

TEST_CASE("the closed-form rate matches the discretized expectation") {
    const double mu = 0.0, sigma_m = 0.2, sigma_b = 0.3, sigma_p = 0.25;
    const double width = 6.0 * sigma_b;
    const Grid g = log_uniform_grid(std::exp(mu - width), std::exp(mu + width), 10000);
    const ProbMass m = discretize_lognormal(LognormalParams(mu, sigma_m), g).dist;
    const ProbMass b = discretize_lognormal(LognormalParams(mu, sigma_b), g).dist;
    const ProbMass p = discretize_lognormal(LognormalParams(mu, sigma_p), g).dist;

    const ExtReal quadrature = realized_rate(p, b, m);
    REQUIRE(quadrature.is_finite());
    REQUIRE(quadrature.value() ==
            Catch::Approx(variance_view_rate(sigma_m, sigma_b, sigma_p)).margin(1e-6));
}
