// payoff-forge: design, price, and stress growth-optimal payoffs from the
// command line. Every command reads schema-validated files, computes, and
// only then writes, so a failed run never leaves a partial output behind.

#include <payoff_forge/payoff_forge.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace pf = payoff_forge;

namespace {

struct MarketSide {
    pf::ProbMass dist;
    double reference_return;
    bool from_quotes;
};

MarketSide load_market_side(const std::string& path, std::optional<double> ref_flag) {
    const pf::MarketFileKind kind = pf::detect_market_file(path);
    if (kind == pf::MarketFileKind::quotes) {
        if (ref_flag)
            throw pf::SchemaError(
                "--reference-return conflicts with a quotes file; the reference "
                "return is computed from the quoted returns");
        const pf::ImpliedResult implied = pf::implied_distribution(pf::load_quotes(path));
        return MarketSide{implied.dist, implied.reference_return, true};
    }
    return MarketSide{pf::load_distribution(path), ref_flag.value_or(1.0), false};
}

pf::json diagnostics_json(const pf::DiagnosticReport& rep) {
    pf::json d;
    if (rep.boundary_ok) {
        d["boundary_ok"] = *rep.boundary_ok;
        d["max_outside_deviation"] = rep.max_outside_deviation;
    }
    if (rep.bounded_ok) d["bounded_ok"] = *rep.bounded_ok;
    d["max_leverage"] = rep.max_leverage;
    d["flagged_bins"] = rep.flagged_bins;
    return d;
}

pf::json growth_json(const pf::GrowthReport& growth) {
    pf::json g;
    g["believed_rate"] = pf::rate_json(growth.believed_rate);
    pf::json logs = pf::json::array();
    for (double v : growth.per_bin_log_return) logs.push_back(pf::log_return_json(v));
    g["per_bin_log_return"] = std::move(logs);
    if (growth.realized_rate) g["realized_rate"] = pf::rate_json(*growth.realized_rate);
    return g;
}

pf::Grid figure_grid(double mu, double sigma, double lo, double hi, std::size_t bins) {
    if (lo <= 0.0) lo = std::exp(mu - 6.0 * sigma);
    if (hi <= 0.0) hi = std::exp(mu + 6.0 * sigma);
    return pf::log_uniform_grid(lo, hi, bins);
}

std::string curves_csv(const pf::Grid& grid, const pf::ProbMass& m, const pf::ProbMass& b,
                       const pf::Payoff& f) {
    std::string out = "x,m,b,f\n";
    for (std::size_t i = 0; i < grid.bins(); ++i) {
        out += pf::format_double(grid.midpoint(i)) + "," + pf::format_double(m[i]) + "," +
               pf::format_double(b[i]) + "," + pf::format_double(f[i]) + "\n";
    }
    return out;
}

void write_curves(const std::string& path, const pf::Grid& grid, const pf::ProbMass& m,
                  const pf::ProbMass& b, const pf::Payoff& f, pf::json settings) {
    if (pf::is_csv_path(path)) {
        pf::write_text_file(path, curves_csv(grid, m, b, f));
        return;
    }
    pf::json j;
    j["x"] = grid.midpoints();
    j["m"] = m.masses();
    j["b"] = b.masses();
    j["f"] = f.values();
    j["settings"] = std::move(settings);
    pf::write_text_file(path, pf::dump_json(j));
}

int run_implied(const std::string& quotes_path, const std::string& out_path) {
    const pf::ImpliedResult implied = pf::implied_distribution(pf::load_quotes(quotes_path));
    if (pf::is_csv_path(out_path)) {
        pf::save_distribution(implied.dist, out_path);
    } else {
        pf::json j;
        j["edges"] = implied.dist.grid().edges();
        j["masses"] = implied.dist.masses();
        j["reference_return"] = implied.reference_return;
        j["fair_odds"] = implied.fair_odds;
        pf::write_text_file(out_path, pf::dump_json(j));
    }
    std::cout << "reference_return=" << pf::format_double(implied.reference_return)
              << " fair_odds=" << (implied.fair_odds ? "true" : "false") << " wrote " << out_path
              << "\n";
    return 0;
}

int run_design(const std::string& belief_path, const std::string& market_path,
               const std::string& out_path, const std::vector<double>& interval, double cap,
               double boundary_tol, std::optional<double> ref_flag) {
    const pf::ProbMass belief = pf::load_distribution(belief_path);
    const MarketSide market = load_market_side(market_path, ref_flag);
    const pf::Payoff payoff =
        pf::payoff_from_belief(belief, market.dist, market.reference_return);

    pf::DiagnosticReport diag = pf::likelihood_bound_check(payoff, cap);
    if (!interval.empty()) {
        pf::DiagnosticReport band =
            pf::boundary_check(payoff, interval[0], interval[1], boundary_tol);
        diag.boundary_ok = band.boundary_ok;
        diag.max_outside_deviation = band.max_outside_deviation;
        for (std::size_t bin : band.flagged_bins) diag.flagged_bins.push_back(bin);
    }

    pf::json j;
    j["edges"] = payoff.grid().edges();
    j["values"] = payoff.values();
    j["diagnostics"] = diagnostics_json(diag);
    pf::json settings;
    settings["reference_return"] = market.reference_return;
    settings["cap"] = cap;
    settings["boundary_tol"] = boundary_tol;
    if (!interval.empty()) settings["interval"] = interval;
    j["settings"] = std::move(settings);
    pf::write_text_file(out_path, pf::dump_json(j));

    std::cout << "max_leverage=" << pf::format_double(diag.max_leverage);
    if (diag.boundary_ok)
        std::cout << " boundary_ok=" << (*diag.boundary_ok ? "true" : "false");
    std::cout << " bounded_ok=" << (*diag.bounded_ok ? "true" : "false") << " wrote " << out_path
              << "\n";
    return 0;
}

int run_imply(const std::string& payoff_path, const std::string& market_path,
              const std::string& out_path, std::optional<double> ref_flag) {
    const pf::Payoff payoff = pf::load_payoff(payoff_path);
    const MarketSide market = load_market_side(market_path, ref_flag);
    const pf::BeliefResult result = pf::belief_from_payoff(payoff, market.dist);
    const double eb = pf::mean_x(result.belief);
    const double em = pf::mean_x(market.dist);

    if (pf::is_csv_path(out_path)) {
        pf::save_distribution(result.belief, out_path);
    } else {
        pf::json j;
        j["edges"] = result.belief.grid().edges();
        j["masses"] = result.belief.masses();
        j["implied_scale"] = result.implied_scale;
        j["mean_x_belief"] = eb;
        j["mean_x_market"] = em;
        pf::write_text_file(out_path, pf::dump_json(j));
    }
    std::cout << "implied_scale=" << pf::format_double(result.implied_scale)
              << " mean_x_belief=" << pf::format_double(eb)
              << " mean_x_market=" << pf::format_double(em) << " wrote " << out_path << "\n";
    return 0;
}

int run_allocate(const std::string& belief_path, const std::string& quotes_path,
                 const std::string& out_path, const std::optional<std::string>& realized_path) {
    const pf::ProbMass belief = pf::load_distribution(belief_path);
    const pf::MarketQuotes quotes = pf::load_quotes(quotes_path);
    const pf::KellyResult result = pf::kelly_general(belief, quotes);

    std::optional<pf::ProbMass> realized;
    if (realized_path) realized = pf::load_distribution(*realized_path);
    const pf::GrowthReport growth =
        pf::make_growth_report(belief, quotes, result.alloc, realized);

    pf::json j;
    j["edges"] = result.alloc.grid().edges();
    j["alphas"] = result.alloc.alphas();
    j["alpha0"] = result.alloc.alpha0();
    j["support"] = result.support;
    j["implied_market"] = result.implied_market;
    j["kkt_residual"] = result.kkt_residual;
    j["growth"] = growth_json(growth);
    pf::write_text_file(out_path, pf::dump_json(j));

    std::cout << "alpha0=" << pf::format_double(result.alloc.alpha0())
              << " funded_bins=" << result.support.size()
              << " kkt_residual=" << pf::format_double(result.kkt_residual) << " wrote "
              << out_path << "\n";
    return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> rounds, std::optional<std::uint64_t> paths,
                 std::optional<std::uint64_t> seed, unsigned threads) {
    const pf::SimConfig cfg = pf::load_sim_config(config_path, rounds, paths, seed);
    const pf::SimResult result = pf::simulate_reinvestment(cfg, threads);
    const pf::ConvergenceReport report = pf::convergence_report(result);

    pf::json j;
    j["mean_log_rate"] = result.mean_log_rate;
    j["std_error"] = result.std_error;
    j["target_rate"] = pf::rate_json(result.target_rate);
    j["z"] = pf::rate_json(report.z);
    j["pass"] = report.pass;
    j["inconsistent"] = report.inconsistent;
    j["ruined_paths"] = result.ruined_paths;
    pf::json q;
    q["min"] = report.quantiles.min;
    q["p05"] = report.quantiles.p05;
    q["p25"] = report.quantiles.p25;
    q["p50"] = report.quantiles.p50;
    q["p75"] = report.quantiles.p75;
    q["p95"] = report.quantiles.p95;
    q["max"] = report.quantiles.max;
    j["quantiles"] = std::move(q);
    pf::json wealth = pf::json::array();
    for (double w : result.per_path_terminal_log_wealth)
        wealth.push_back(pf::log_return_json(w));
    j["per_path_terminal_log_wealth"] = std::move(wealth);
    pf::json settings;
    settings["rounds"] = cfg.rounds();
    settings["paths"] = cfg.paths();
    settings["seed"] = cfg.seed();
    j["settings"] = std::move(settings);
    pf::write_text_file(out_path, pf::dump_json(j));

    std::cout << "mean_log_rate=" << pf::format_double(result.mean_log_rate)
              << " std_error=" << pf::format_double(result.std_error)
              << " pass=" << (report.pass ? "true" : "false") << " wrote " << out_path << "\n";
    return 0;
}

int run_figures(const std::string& fig_case, const std::string& out_path, double mu, double sigma,
                double grid_lo, double grid_hi, std::size_t bins,
                const std::vector<double>& interval, double tilt, double lambda,
                const std::string& kind_name, double strike, double sigma_m, double sigma_b) {
    if (fig_case == "variance_view") {
        const pf::Grid grid =
            figure_grid(mu, std::max(sigma_m, sigma_b), grid_lo, grid_hi, bins);
        const pf::ProbMass m = pf::discretize_lognormal({mu, sigma_m}, grid).dist;
        const pf::Payoff f = pf::variance_view_payoff(mu, sigma_m, sigma_b, grid);
        const pf::ProbMass b = pf::belief_from_payoff(f, m).belief;
        pf::json settings{{"mu", mu}, {"sigma_m", sigma_m}, {"sigma_b", sigma_b}};
        write_curves(out_path, grid, m, b, f, std::move(settings));
        std::cout << "case=variance_view bins=" << grid.bins() << " wrote " << out_path << "\n";
        return 0;
    }

    const pf::Grid grid = figure_grid(mu, sigma, grid_lo, grid_hi, bins);
    const pf::ProbMass m = pf::discretize_lognormal({mu, sigma}, grid).dist;

    if (fig_case == "fig1") {
        const double a = interval.empty() ? 0.8 : interval[0];
        const double b_edge = interval.empty() ? 1.25 : interval[1];
        std::vector<double> w(grid.bins(), 0.0);
        for (std::size_t i = 0; i < grid.bins(); ++i) {
            const double x = grid.midpoint(i);
            if (x >= a && x <= b_edge) w[i] = m[i];
        }
        const pf::ProbMass b = pf::normalize(std::move(w), grid);
        const pf::Payoff f = pf::payoff_from_belief(b, m, 1.0);
        pf::json settings{{"mu", mu}, {"sigma", sigma}, {"interval", {a, b_edge}}};
        write_curves(out_path, grid, m, b, f, std::move(settings));
        std::cout << "case=fig1 bins=" << grid.bins() << " wrote " << out_path << "\n";
        return 0;
    }

    if (fig_case == "fig2") {
        const double a = interval.empty() ? 0.8 : interval[0];
        const double b_edge = interval.empty() ? 1.25 : interval[1];
        pf::NeumaierSum inside_mass;
        pf::NeumaierSum inside_mean;
        for (std::size_t i = 0; i < grid.bins(); ++i) {
            const double x = grid.midpoint(i);
            if (x >= a && x <= b_edge) {
                inside_mass.add(m[i]);
                inside_mean.add(m[i] * x);
            }
        }
        if (!(inside_mass.value() > 0.0))
            throw std::domain_error("fig2: the interval contains no probability mass");
        const double center = inside_mean.value() / inside_mass.value();
        double max_abs = 0.0;
        for (std::size_t i = 0; i < grid.bins(); ++i) {
            const double x = grid.midpoint(i);
            if (x >= a && x <= b_edge) max_abs = std::max(max_abs, std::abs(x - center));
        }
        if (!(max_abs > 0.0))
            throw std::domain_error("fig2: the interval must span more than one bin");
        std::vector<double> w(grid.bins());
        for (std::size_t i = 0; i < grid.bins(); ++i) {
            const double x = grid.midpoint(i);
            w[i] = (x >= a && x <= b_edge) ? m[i] * (1.0 + tilt * (x - center) / max_abs)
                                           : m[i];
        }
        const pf::ProbMass b = pf::normalize(std::move(w), grid);
        const pf::Payoff f =
            pf::risk_aversion_blend(pf::payoff_from_belief(b, m, 1.0), lambda);
        pf::json settings{{"mu", mu},
                          {"sigma", sigma},
                          {"interval", {a, b_edge}},
                          {"tilt", tilt},
                          {"lambda", lambda}};
        write_curves(out_path, grid, m, b, f, std::move(settings));
        std::cout << "case=fig2 bins=" << grid.bins() << " wrote " << out_path << "\n";
        return 0;
    }

    if (fig_case == "fig3") {
        const pf::VanillaKind kind = kind_name == "digital_call" ? pf::VanillaKind::digital_call
                                     : kind_name == "forward"    ? pf::VanillaKind::forward
                                                                 : pf::VanillaKind::call;
        const pf::VanillaResult vanilla = pf::vanilla_payoff(grid, kind, strike, m);
        const pf::ProbMass b = pf::belief_from_payoff(vanilla.payoff, m).belief;
        pf::json settings{
            {"mu", mu}, {"sigma", sigma}, {"kind", kind_name}, {"strike", strike}};
        write_curves(out_path, grid, m, b, vanilla.payoff, std::move(settings));
        std::cout << "case=fig3 kind=" << kind_name << " bins=" << grid.bins() << " wrote "
                  << out_path << "\n";
        return 0;
    }

    throw pf::SchemaError("unknown figures case: " + fig_case);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"growth-optimal payoff design toolkit"};
    app.require_subcommand(1);

    std::string belief_path, market_path, quotes_path, payoff_path, config_path, out_path;
    std::string fig_case, kind_name = "call";
    std::vector<double> interval;
    double cap = 1e6, boundary_tol = 1e-9;
    double mu = 0.0, sigma = 0.2, grid_lo = 0.0, grid_hi = 0.0;
    double tilt = 0.5, lambda = 1.0, strike = 1.0, sigma_m = 0.2, sigma_b = 0.3;
    std::size_t bins = 400;
    unsigned threads = 0;
    std::optional<double> ref_flag;
    std::optional<std::string> realized_path;
    std::optional<std::uint64_t> rounds_flag, paths_flag, seed_flag;

    CLI::App* implied = app.add_subcommand(
        "implied", "recover the market-implied distribution from quoted returns");
    implied->add_option("quotes", quotes_path, "quotes file (JSON or CSV)")->required();
    implied->add_option("-o,--output", out_path, "output file")->required();

    CLI::App* design = app.add_subcommand(
        "design", "turn a belief and a market view into a unit-cost payoff");
    design->add_option("belief", belief_path, "belief distribution file")->required();
    design->add_option("market", market_path, "market distribution or quotes file")->required();
    design->add_option("-o,--output", out_path, "output payoff file (JSON)")->required();
    design->add_option("--interval", interval, "boundary band [a b]")->expected(2);
    design->add_option("--cap", cap, "leverage cap for the boundedness check");
    design->add_option("--boundary-tol", boundary_tol, "allowed |f-1| outside the interval");
    design->add_option("--reference-return", ref_flag,
                       "reference gross return (distribution-style market files only)");

    CLI::App* imply = app.add_subcommand(
        "imply", "read the belief a quoted payoff implies against the market");
    imply->add_option("payoff", payoff_path, "payoff file (JSON)")->required();
    imply->add_option("market", market_path, "market distribution or quotes file")->required();
    imply->add_option("-o,--output", out_path, "output distribution file")->required();
    imply->add_option("--reference-return", ref_flag,
                      "reference gross return (distribution-style market files only)");

    CLI::App* allocate = app.add_subcommand(
        "allocate", "growth-optimal allocation against quoted returns");
    allocate->add_option("belief", belief_path, "belief distribution file")->required();
    allocate->add_option("quotes", quotes_path, "quotes file (JSON or CSV)")->required();
    allocate->add_option("-o,--output", out_path, "output allocation file (JSON)")->required();
    allocate->add_option("--realized", realized_path,
                         "realized distribution for an out-of-belief growth line");

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo reinvestment against the believed-optimal payoff");
    simulate->add_option("config", config_path, "simulation config file (JSON)")->required();
    simulate->add_option("-o,--output", out_path, "output result file (JSON)")->required();
    simulate->add_option("--rounds", rounds_flag, "override config rounds");
    simulate->add_option("--paths", paths_flag, "override config paths");
    simulate->add_option("--seed", seed_flag, "override config seed");
    simulate->add_option("--threads", threads, "worker threads (0 = hardware)");

    CLI::App* figures = app.add_subcommand(
        "figures", "plot-ready x,m,b,f curves for the stock scenarios");
    figures->add_option("case", fig_case, "fig1 | fig2 | fig3 | variance_view")->required();
    figures->add_option("-o,--output", out_path, "output curves file (CSV or JSON)")->required();
    figures->add_option("--mu", mu, "lognormal log-mean of the market");
    figures->add_option("--sigma", sigma, "lognormal log-sd of the market");
    figures->add_option("--grid-lo", grid_lo, "left grid edge (default exp(mu-6 sigma))");
    figures->add_option("--grid-hi", grid_hi, "right grid edge (default exp(mu+6 sigma))");
    figures->add_option("--bins", bins, "grid bins");
    figures->add_option("--interval", interval, "certainty band [a b] for fig1/fig2")
        ->expected(2);
    figures->add_option("--tilt", tilt, "fig2 tilt strength in (-1, 1)");
    figures->add_option("--lambda", lambda, "fig2 risk-aversion blend weight in [0, 1]");
    figures->add_option("--kind", kind_name, "fig3 payoff kind: call | digital_call | forward");
    figures->add_option("--strike", strike, "fig3 strike");
    figures->add_option("--sigma-m", sigma_m, "variance_view market log-sd");
    figures->add_option("--sigma-b", sigma_b, "variance_view believed log-sd");

    try {
        app.parse(argc, argv);
        if (implied->parsed()) return run_implied(quotes_path, out_path);
        if (design->parsed())
            return run_design(belief_path, market_path, out_path, interval, cap, boundary_tol,
                              ref_flag);
        if (imply->parsed()) return run_imply(payoff_path, market_path, out_path, ref_flag);
        if (allocate->parsed())
            return run_allocate(belief_path, quotes_path, out_path, realized_path);
        if (simulate->parsed())
            return run_simulate(config_path, out_path, rounds_flag, paths_flag, seed_flag,
                                threads);
        if (figures->parsed())
            return run_figures(fig_case, out_path, mu, sigma, grid_lo, grid_hi, bins, interval,
                               tilt, lambda, kind_name, strike, sigma_m, sigma_b);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const pf::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const pf::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
