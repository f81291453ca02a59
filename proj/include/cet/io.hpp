#pragma once

// File formats: the two-group CSV input, JSON reports and CSV tables.
// Every output carries schema_version; doubles are written with 17
// significant digits so they round-trip exactly.

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cet/bayes.hpp"
#include "cet/core.hpp"
#include "cet/operating_chars.hpp"
#include "cet/sim.hpp"

namespace cet::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// Input data: CSV with header "group,value", group in {1, 2}.

struct TwoGroupData {
    std::vector<double> group1;
    std::vector<double> group2;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::size_t used = 0;
    try {
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace detail

inline TwoGroupData parse_data(std::istream& in, const std::string& source = "<input>") {
    auto fail = [&](long line, const std::string& what) {
        std::ostringstream msg;
        msg << source << ":" << line << ": " << what;
        throw InputError(msg.str());
    };
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    TwoGroupData data;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        const std::string row = detail::trim(line);
        if (row.empty()) continue;
        if (!header_seen) {
            std::string compact;
            for (char c : row)
                if (c != ' ' && c != '\t') compact += c;
            if (compact != "group,value") fail(line_no, "expected header 'group,value', got '" + row + "'");
            header_seen = true;
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos)
            fail(line_no, "expected two comma-separated fields");
        const std::string group = detail::trim(row.substr(0, comma));
        const auto value = detail::parse_number(detail::trim(row.substr(comma + 1)));
        if (!value) fail(line_no, "value is not a finite number");
        if (group == "1") {
            data.group1.push_back(*value);
        } else if (group == "2") {
            data.group2.push_back(*value);
        } else {
            fail(line_no, "group must be 1 or 2, got '" + group + "'");
        }
    }
    if (!header_seen) fail(line_no, "empty file (missing header 'group,value')");
    if (data.group1.size() < 2 || data.group2.size() < 2) {
        std::ostringstream msg;
        msg << "each group needs at least two rows (group 1: " << data.group1.size()
            << ", group 2: " << data.group2.size() << ")";
        fail(line_no, msg.str());
    }
    return data;
}

inline void write_data(std::ostream& out, const TwoGroupData& data) {
    out << "group,value\n";
    for (double x : data.group1) out << "1," << format_double(x) << '\n';
    for (double x : data.group2) out << "2," << format_double(x) << '\n';
}

// ---------------------------------------------------------------------------
// Verdict report of the two-sample test.

struct VerdictReport {
    Decision decision = Decision::Inconclusive;
    double p1 = 1.0;
    std::optional<double> p2;  // omitted (null) for positive verdicts unless requested
    double p_cet = 0.0;
    Interval ci_wide;
    Interval ci_narrow;
    double delta_resolved = 0.0;
    double alpha1 = 0.05;
    double alpha2 = 0.10;
    long n1 = 0;
    long n2 = 0;
    double mu_hat_d = 0.0;
    double s_p = 0.0;

    friend bool operator==(const VerdictReport&, const VerdictReport&) = default;
};

inline VerdictReport make_report(const SummaryStats& stats, const CetOutcome& out, const Alphas& alphas,
                                 bool show_p2_for_positive = false) {
    VerdictReport r;
    r.decision = out.decision;
    r.p1 = out.p1;
    if (out.decision != Decision::Positive || show_p2_for_positive) r.p2 = out.p2;
    r.p_cet = out.p_cet;
    r.ci_wide = out.ci_wide;
    r.ci_narrow = out.ci_narrow;
    r.delta_resolved = out.resolved_delta;
    r.alpha1 = alphas.alpha1();
    r.alpha2 = alphas.alpha2();
    r.n1 = stats.n1;
    r.n2 = stats.n2;
    r.mu_hat_d = stats.mean_diff();
    r.s_p = stats.pooled_sd;
    return r;
}

inline json to_json(const Interval& i) { return json::array({i.lo, i.hi}); }

inline Interval interval_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw InputError("interval must be a two-element array");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json to_json(const VerdictReport& r) {
    return json{{"schema_version", kSchemaVersion},
                {"kind", "verdict"},
                {"decision", std::string(to_string(r.decision))},
                {"p1", r.p1},
                {"p2", r.p2 ? json(*r.p2) : json(nullptr)},
                {"p_cet", r.p_cet},
                {"ci_wide", to_json(r.ci_wide)},
                {"ci_narrow", to_json(r.ci_narrow)},
                {"delta_resolved", r.delta_resolved},
                {"alpha1", r.alpha1},
                {"alpha2", r.alpha2},
                {"n1", r.n1},
                {"n2", r.n2},
                {"mu_hat_d", r.mu_hat_d},
                {"s_p", r.s_p}};
}

inline VerdictReport verdict_from_json(const json& j) {
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw InputError("unsupported schema_version");
    VerdictReport r;
    const auto decision = parse_decision(j.at("decision").get<std::string>());
    if (!decision) throw InputError("unknown decision in report");
    r.decision = *decision;
    r.p1 = j.at("p1").get<double>();
    if (!j.at("p2").is_null()) r.p2 = j.at("p2").get<double>();
    r.p_cet = j.at("p_cet").get<double>();
    r.ci_wide = interval_from_json(j.at("ci_wide"));
    r.ci_narrow = interval_from_json(j.at("ci_narrow"));
    r.delta_resolved = j.at("delta_resolved").get<double>();
    r.alpha1 = j.at("alpha1").get<double>();
    r.alpha2 = j.at("alpha2").get<double>();
    r.n1 = j.at("n1").get<long>();
    r.n2 = j.at("n2").get<long>();
    r.mu_hat_d = j.at("mu_hat_d").get<double>();
    r.s_p = j.at("s_p").get<double>();
    return r;
}

// ---------------------------------------------------------------------------
// Other JSON outputs.

inline json margin_json(const Margin& m) {
    if (const auto* raw = std::get_if<Margin::RawSymmetric>(&m.kind()))
        return {{"type", "raw"}, {"delta", raw->delta}};
    if (const auto* s = std::get_if<Margin::Standardized>(&m.kind())) return {{"type", "standardized"}, {"q", s->q}};
    const auto& g = std::get<Margin::General>(m.kind());
    return {{"type", "general"}, {"lower", g.lower}, {"upper", g.upper}};
}

inline json to_json(const DesignPoint& dp, const OperatingChars& oc, const McConfig& mc) {
    return json{{"schema_version", kSchemaVersion},
                {"kind", "operating_chars"},
                {"design",
                 {{"mu_d", dp.mu_d},
                  {"sigma", dp.sigma},
                  {"n1", dp.n1},
                  {"n2", dp.n2},
                  {"margin", margin_json(dp.margin)},
                  {"alpha1", dp.alphas.alpha1()},
                  {"alpha2", dp.alphas.alpha2()}}},
                {"pr_positive", oc.pr_positive},
                {"pr_negative", oc.pr_negative},
                {"pr_inconclusive", oc.pr_inconclusive},
                {"mc_stderr", oc.mc_stderr},
                {"draws", mc.draws},
                {"seed", mc.seed}};
}

inline json to_json(const SampleSizeResult& r, const std::string& criterion, double target) {
    return json{{"schema_version", kSchemaVersion},
                {"kind", "sample_size"},
                {"criterion", criterion},
                {"target", target},
                {"n", r.n},
                {"n1", r.n / 2},
                {"n2", r.n / 2},
                {"achieved", r.achieved},
                {"previous", std::isnan(r.previous) ? json(nullptr) : json(r.previous)},
                {"evaluations", r.evaluations},
                {"non_monotone", r.non_monotone}};
}

inline json to_json(const BfResult& r, double t, long n1, long n2, JzsForm form) {
    return json{{"schema_version", kSchemaVersion},
                {"kind", "bayes_factor"},
                {"t", t},
                {"n1", n1},
                {"n2", n2},
                {"form", form == JzsForm::Printed ? "printed" : "canonical"},
                {"b01", r.b01},
                {"posterior_h0", r.posterior_h0},
                {"decision", std::string(to_string(r.decision))},
                {"threshold", r.threshold}};
}

// ---------------------------------------------------------------------------
// Simulation grid: JSON configuration in, CSV rows and JSON summary out.

inline sim::SimGrid grid_from_json(const json& j) {
    static const std::vector<std::string> known = {"mu_d_values", "n_values", "sigma", "reps", "delta", "q",
                                                   "alpha1", "alpha2", "bf_threshold", "seed", "form",
                                                   "schema_version"};
    if (!j.is_object()) throw InputError("simulation config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw InputError("unknown simulation config key '" + key + "'");
    auto grid = sim::SimGrid::defaults();
    if (j.contains("mu_d_values")) grid.mu_d_values = j["mu_d_values"].get<std::vector<double>>();
    if (j.contains("n_values")) grid.n_values = j["n_values"].get<std::vector<long>>();
    if (j.contains("sigma")) grid.sigma = j["sigma"].get<double>();
    if (j.contains("reps")) grid.reps = j["reps"].get<long>();
    if (j.contains("delta") && j.contains("q")) throw InputError("config may set delta or q, not both");
    if (j.contains("delta")) grid.margin = Margin::symmetric(j["delta"].get<double>());
    if (j.contains("q")) grid.margin = Margin::standardized(j["q"].get<double>());
    grid.alphas = Alphas(j.value("alpha1", grid.alphas.alpha1()), j.value("alpha2", grid.alphas.alpha2()));
    if (j.contains("bf_threshold")) grid.bf_threshold = j["bf_threshold"].get<double>();
    if (j.contains("seed")) grid.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("form")) {
        const auto form = j["form"].get<std::string>();
        if (form == "printed") grid.form = JzsForm::Printed;
        else if (form == "canonical") grid.form = JzsForm::Canonical;
        else throw InputError("form must be 'printed' or 'canonical'");
    }
    grid.validate();
    return grid;
}

inline void write_grid_csv(std::ostream& out, const std::vector<sim::CellResult>& cells) {
    out << "schema_version,mu_d,n,reps,method,pr_positive,pr_negative,pr_inconclusive\n";
    for (const auto& c : cells) {
        for (const auto& [method, tally] : {std::pair{"cet", c.cet}, std::pair{"bf", c.bf}}) {
            out << kSchemaVersion << ',' << format_double(c.mu_d) << ',' << c.n << ',' << c.reps << ',' << method
                << ',' << format_double(tally.pr_positive()) << ',' << format_double(tally.pr_negative()) << ','
                << format_double(tally.pr_inconclusive()) << '\n';
        }
    }
}

inline json grid_summary(const sim::SimGrid& grid, const std::vector<sim::CellResult>& cells) {
    json rows = json::array();
    for (const auto& c : cells) {
        auto tally = [](const sim::Tally& t) {
            return json{{"positive", t.positive}, {"negative", t.negative}, {"inconclusive", t.inconclusive}};
        };
        rows.push_back({{"mu_d", c.mu_d}, {"n", c.n}, {"reps", c.reps}, {"cet", tally(c.cet)}, {"bf", tally(c.bf)}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"kind", "simulation"},
                {"seed", grid.seed},
                {"reps", grid.reps},
                {"sigma", grid.sigma},
                {"margin", margin_json(grid.margin)},
                {"alpha1", grid.alphas.alpha1()},
                {"alpha2", grid.alphas.alpha2()},
                {"bf_threshold", grid.bf_threshold},
                {"form", grid.form == JzsForm::Printed ? "printed" : "canonical"},
                {"cells", rows}};
}

inline void write_scatter_csv(std::ostream& out, const std::vector<sim::ScatterRow>& rows) {
    out << "schema_version,mu_d,p_nhst,p_cet,decision\n";
    for (const auto& r : rows)
        out << kSchemaVersion << ',' << format_double(r.mu_d) << ',' << format_double(r.p_nhst) << ','
            << format_double(r.p_cet) << ',' << to_string(r.decision) << '\n';
}

// ---------------------------------------------------------------------------
// Decision regions on a (mean difference, s*) grid.

struct RegionPoint {
    double mu_hat;
    double s_star;
    Decision decision;
};

inline std::vector<RegionPoint> region_grid(const RegionClassifier& region, double step, double mu_max,
                                            double s_max) {
    if (!(step > 0.0) || !(mu_max > 0.0) || !(s_max > 0.0))
        throw InputError("region grid needs positive step and extents");
    const long mu_steps = static_cast<long>(std::floor(mu_max / step + 1e-9));
    const long s_steps = static_cast<long>(std::floor(s_max / step + 1e-9));
    std::vector<RegionPoint> points;
    points.reserve(static_cast<std::size_t>((2 * mu_steps + 1) * s_steps));
    for (long j = 1; j <= s_steps; ++j) {
        const double s_star = j * step;
        for (long i = -mu_steps; i <= mu_steps; ++i) {
            const double mu_hat = i * step;
            points.push_back({mu_hat, s_star, region(mu_hat, s_star)});
        }
    }
    return points;
}

inline void write_region_csv(std::ostream& out, const std::vector<RegionPoint>& points) {
    out << "schema_version,mu_hat_d,s_star,decision\n";
    for (const auto& p : points)
        out << kSchemaVersion << ',' << format_double(p.mu_hat) << ',' << format_double(p.s_star) << ','
            << to_string(p.decision) << '\n';
}

}  // namespace cet::io
