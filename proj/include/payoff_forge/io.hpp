#pragma once

#include "simulation.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace payoff_forge {

using json = nlohmann::ordered_json;

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_csv_path(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

// Shortest representation that round-trips the exact double.
inline std::string format_double(double v) {
    char buf[40];
    const std::to_chars_result r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

inline json parse_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline const json& require_field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path + ": expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end()) throw SchemaError(path + ": missing \"" + key + "\" key");
    return *it;
}

inline std::vector<double> number_array_field(const json& j, const char* key,
                                              const std::string& path) {
    const json& a = require_field(j, key, path);
    if (!a.is_array())
        throw SchemaError(path + ": \"" + std::string(key) + "\" must be an array");
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto& v : a) {
        if (!v.is_number())
            throw SchemaError(path + ": \"" + std::string(key) +
                              "\" must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline double number_field(const json& j, const char* key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_number())
        throw SchemaError(path + ": \"" + std::string(key) + "\" must be a number");
    return v.get<double>();
}

inline std::uint64_t unsigned_field(const json& j, const char* key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_number_unsigned())
        throw SchemaError(path + ": \"" + std::string(key) +
                          "\" must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

// Rates may be infinite; JSON has no literal for that, so infinities are
// serialized as the strings "-inf" / "+inf".
inline json rate_json(const ExtReal& x) {
    if (x.is_plus_infinity()) return json("+inf");
    if (x.is_minus_infinity()) return json("-inf");
    return json(x.value());
}

inline json log_return_json(double v) {
    if (std::isfinite(v)) return json(v);
    return json(v > 0.0 ? "+inf" : "-inf");
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write file: " + path);
    out << content;
    out.flush();
    if (!out) throw SchemaError("write failed: " + path);
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV helpers

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

inline double parse_csv_number(const std::string& s, const std::string& path, std::size_t line) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const std::from_chars_result r = std::from_chars(first, last, v);
    if (r.ec != std::errc() || r.ptr != last)
        throw SchemaError(path + ": line " + std::to_string(line) + ": not a number: \"" + s +
                          "\"");
    return v;
}

// Rows are "left,value"; the final row carries the closing right edge with an
// empty value field.
inline std::pair<Grid, std::vector<double>> parse_edge_value_csv(
    const std::vector<std::string>& lines, std::size_t first_row, const std::string& header,
    const std::string& path) {
    if (lines.size() <= first_row || lines[first_row] != header)
        throw SchemaError(path + ": expected header \"" + header + "\"");
    std::vector<double> edges;
    std::vector<double> values;
    bool closed = false;
    for (std::size_t i = first_row + 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw SchemaError(path + ": line " + std::to_string(i + 1) + ": expected two fields");
        if (closed)
            throw SchemaError(path + ": line " + std::to_string(i + 1) +
                              ": rows after the closing edge row");
        const std::string left = line.substr(0, comma);
        const std::string right = line.substr(comma + 1);
        edges.push_back(parse_csv_number(left, path, i + 1));
        if (right.empty()) {
            closed = true;
        } else {
            values.push_back(parse_csv_number(right, path, i + 1));
        }
    }
    if (!closed)
        throw SchemaError(path + ": missing closing right-edge row");
    try {
        return {Grid(std::move(edges)), std::move(values)};
    } catch (const std::domain_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline std::string edge_value_csv(const Grid& grid, const std::vector<double>& values,
                                  const std::string& header) {
    std::string out = header + "\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out += format_double(grid.left(i)) + "," + format_double(values[i]) + "\n";
    out += format_double(grid.span_right()) + ",\n";
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Loaders and savers

inline Grid load_grid(const std::string& path) {
    const json j = parse_json_file(path);
    try {
        return Grid(number_array_field(j, "edges", path));
    } catch (const std::domain_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline ProbMass load_distribution(const std::string& path) {
    try {
        if (is_csv_path(path)) {
            auto [grid, masses] =
                detail::parse_edge_value_csv(detail::read_lines(path), 0, "bin_left,mass", path);
            return ProbMass(std::move(grid), std::move(masses));
        }
        const json j = parse_json_file(path);
        Grid grid(number_array_field(j, "edges", path));
        return ProbMass(std::move(grid), number_array_field(j, "masses", path));
    } catch (const std::domain_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline MarketQuotes load_quotes(const std::string& path) {
    try {
        if (is_csv_path(path)) {
            const std::vector<std::string> lines = detail::read_lines(path);
            if (lines.empty() || lines[0].rfind("# risk_free=", 0) != 0)
                throw SchemaError(path + ": expected leading \"# risk_free=<value>\" line");
            const double risk_free =
                detail::parse_csv_number(lines[0].substr(12), path, 1);
            auto [grid, returns] =
                detail::parse_edge_value_csv(lines, 1, "bin_left,return", path);
            return MarketQuotes(std::move(grid), std::move(returns), risk_free);
        }
        const json j = parse_json_file(path);
        Grid grid(number_array_field(j, "edges", path));
        return MarketQuotes(std::move(grid), number_array_field(j, "returns", path),
                            number_field(j, "risk_free", path));
    } catch (const std::domain_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline Payoff load_payoff(const std::string& path) {
    try {
        const json j = parse_json_file(path);
        Grid grid(number_array_field(j, "edges", path));
        return Payoff(std::move(grid), number_array_field(j, "values", path));
    } catch (const std::domain_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline Allocation load_allocation(const std::string& path) {
    try {
        const json j = parse_json_file(path);
        Grid grid(number_array_field(j, "edges", path));
        return Allocation(std::move(grid), number_array_field(j, "alphas", path),
                          number_field(j, "alpha0", path));
    } catch (const std::domain_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline void save_distribution(const ProbMass& dist, const std::string& path) {
    if (is_csv_path(path)) {
        write_text_file(path, detail::edge_value_csv(dist.grid(), dist.masses(), "bin_left,mass"));
        return;
    }
    json j;
    j["edges"] = dist.grid().edges();
    j["masses"] = dist.masses();
    write_text_file(path, dump_json(j));
}

inline void save_quotes(const MarketQuotes& quotes, const std::string& path) {
    if (is_csv_path(path)) {
        write_text_file(path, "# risk_free=" + format_double(quotes.risk_free()) + "\n" +
                                  detail::edge_value_csv(quotes.grid(), quotes.returns(),
                                                         "bin_left,return"));
        return;
    }
    json j;
    j["edges"] = quotes.grid().edges();
    j["returns"] = quotes.returns();
    j["risk_free"] = quotes.risk_free();
    write_text_file(path, dump_json(j));
}

inline void save_payoff(const Payoff& payoff, const std::string& path) {
    if (is_csv_path(path))
        throw SchemaError("payoff files are JSON only: " + path);
    json j;
    j["edges"] = payoff.grid().edges();
    j["values"] = payoff.values();
    write_text_file(path, dump_json(j));
}

inline void save_allocation(const Allocation& alloc, const std::string& path) {
    if (is_csv_path(path))
        throw SchemaError("allocation files are JSON only: " + path);
    json j;
    j["edges"] = alloc.grid().edges();
    j["alphas"] = alloc.alphas();
    j["alpha0"] = alloc.alpha0();
    write_text_file(path, dump_json(j));
}

// A market-side input is either a quoted-returns file or a distribution file.
enum class MarketFileKind { distribution, quotes };

inline MarketFileKind detect_market_file(const std::string& path) {
    if (is_csv_path(path)) {
        const std::vector<std::string> lines = detail::read_lines(path);
        return (!lines.empty() && lines[0].rfind("# risk_free=", 0) == 0)
                   ? MarketFileKind::quotes
                   : MarketFileKind::distribution;
    }
    const json j = parse_json_file(path);
    if (j.is_object() && j.contains("returns")) return MarketFileKind::quotes;
    if (j.is_object() && j.contains("masses")) return MarketFileKind::distribution;
    throw SchemaError(path + ": expected either a \"returns\" or a \"masses\" key");
}

inline SimConfig load_sim_config(const std::string& path,
                                 std::optional<std::uint64_t> rounds_override = std::nullopt,
                                 std::optional<std::uint64_t> paths_override = std::nullopt,
                                 std::optional<std::uint64_t> seed_override = std::nullopt) {
    const json j = parse_json_file(path);
    try {
        Grid grid(number_array_field(j, "edges", path));
        ProbMass realized(grid, number_array_field(j, "realized", path));
        ProbMass belief(grid, number_array_field(j, "belief", path));
        MarketQuotes quotes(grid, number_array_field(j, "returns", path),
                            number_field(j, "risk_free", path));
        const std::uint64_t rounds =
            rounds_override ? *rounds_override : unsigned_field(j, "rounds", path);
        const std::uint64_t paths =
            paths_override ? *paths_override : unsigned_field(j, "paths", path);
        const std::uint64_t seed =
            seed_override ? *seed_override : unsigned_field(j, "seed", path);
        return SimConfig(rounds, paths, seed, std::move(realized), std::move(belief),
                         std::move(quotes));
    } catch (const std::domain_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

} // namespace payoff_forge
