#pragma once

// Command-line front end. `run` is separate from main() so the commands can
// be exercised in-process.
//
// Exit codes: 0/1/2 = positive/negative/inconclusive for `test` (0 for other
// successful commands); anything above 2 is an error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cet/bayes.hpp"
#include "cet/core.hpp"
#include "cet/io.hpp"
#include "cet/operating_chars.hpp"
#include "cet/sim.hpp"

namespace cet::cli {

enum ExitCode : int {
    kPositive = 0,
    kNegative = 1,
    kInconclusive = 2,
    kUsage = 3,
    kBadInput = 4,
    kNumerical = 5,
    kSearchFailed = 6,
    kInternal = 7,
};

inline constexpr const char* kSeedEnv = "CET_SEED";

inline int exit_code(Decision d) {
    switch (d) {
        case Decision::Positive: return kPositive;
        case Decision::Negative: return kNegative;
        case Decision::Inconclusive: return kInconclusive;
    }
    return kInternal;
}

// Seed used when --seed is absent: $CET_SEED if set, else the library default.
inline std::uint64_t default_seed() {
    const char* env = std::getenv(kSeedEnv);
    if (env == nullptr || *env == '\0') return kDefaultSeed;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
        return v;
    } catch (const std::exception&) {
        throw InputError(std::string(kSeedEnv) + " is not an unsigned integer: '" + env + "'");
    }
}

namespace detail {

struct AlphaFlags {
    double alpha1 = 0.05;
    double alpha2 = 0.10;
    bool strict = false;

    void attach(CLI::App* cmd) {
        auto* a1 = cmd->add_option("--alpha1", alpha1, "max type I error of the NHST step")->capture_default_str();
        auto* a2 = cmd->add_option("--alpha2", alpha2, "max type E error of the TOST step")->capture_default_str();
        cmd->add_flag("--strict", strict, "use alpha1 = 0.01, alpha2 = 0.05")->excludes(a1)->excludes(a2);
    }
    Alphas get() const { return strict ? Alphas::strict() : Alphas(alpha1, alpha2); }
};

struct MarginFlags {
    double delta = 0.0;
    double q = 0.0;
    CLI::Option* delta_opt = nullptr;
    CLI::Option* q_opt = nullptr;

    void attach(CLI::App* cmd) {
        delta_opt = cmd->add_option("--delta", delta, "raw margin half-width: equivalence means |mu_d| < delta");
        q_opt = cmd->add_option("--q", q, "standardized margin: delta = q * pooled SD");
        delta_opt->excludes(q_opt);
    }
    bool given() const { return delta_opt->count() > 0 || q_opt->count() > 0; }
    Margin get() const {
        if (delta_opt->count() > 0) return Margin::symmetric(delta);
        if (q_opt->count() > 0) return Margin::standardized(q);
        throw CLI::RequiredError("exactly one of --delta or --q");
    }
};

inline void write_json(std::ostream& out, const io::json& j) { out << j.dump(2) << '\n'; }

inline std::ofstream open_output(const std::string& path) {
    std::ofstream file(path);
    if (!file) throw InputError("cannot open output file '" + path + "'");
    return file;
}

inline io::TwoGroupData read_data(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw InputError("cannot open data file '" + path + "'");
    return io::parse_data(file, path);
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conditional equivalence testing: NHST followed by TOST, operating characteristics, "
                 "sample sizes and JZS Bayes factors"};
    app.require_subcommand(1);

    // test
    std::string test_data;
    detail::AlphaFlags test_alphas;
    detail::MarginFlags test_margin;
    bool show_p2 = false;
    auto* test = app.add_subcommand("test", "run the two-sample CET on a group,value CSV file");
    test->add_option("data", test_data, "CSV file with header group,value")->required();
    test_margin.attach(test);
    test_alphas.attach(test);
    test->add_flag("--show-p2", show_p2, "report p2 for positive verdicts too");

    // oc
    double oc_mu = 0.0, oc_sigma = 1.0;
    long oc_n1 = 0, oc_n2 = 0, oc_draws = 100'000;
    std::uint64_t oc_seed = 0;
    detail::AlphaFlags oc_alphas;
    detail::MarginFlags oc_margin;
    auto* oc = app.add_subcommand("oc", "probabilities of positive, negative and inconclusive results");
    oc->add_option("--mu-d", oc_mu, "true mean difference")->required();
    oc->add_option("--sigma", oc_sigma, "true common SD")->capture_default_str();
    oc->add_option("--n1", oc_n1, "group 1 size")->required();
    oc->add_option("--n2", oc_n2, "group 2 size")->required();
    oc_margin.attach(oc);
    oc_alphas.attach(oc);
    oc->add_option("--draws", oc_draws, "Monte Carlo draws")->capture_default_str();
    auto* oc_seed_opt = oc->add_option("--seed", oc_seed, "Monte Carlo seed (default $CET_SEED)");

    // samplesize
    double ss_power = 0.0, ss_success = 0.0, ss_mu = 0.0, ss_sigma = 1.0, ss_weight = 0.5;
    long ss_draws = 100'000, ss_max_n = 1'000'000;
    std::uint64_t ss_seed = 0;
    detail::AlphaFlags ss_alphas;
    detail::MarginFlags ss_margin;
    auto* ss = app.add_subcommand("samplesize", "smallest balanced n reaching a power or success target");
    auto* power_opt = ss->add_option("--power", ss_power, "target Pr(positive) under mu_d");
    auto* success_opt = ss->add_option("--success", ss_success, "target probability of a conclusive study");
    power_opt->excludes(success_opt);
    ss->add_option("--mu-d", ss_mu, "anticipated mean difference")->required();
    ss->add_option("--sigma", ss_sigma, "anticipated SD")->capture_default_str();
    ss_margin.attach(ss);
    ss_alphas.attach(ss);
    ss->add_option("--weight", ss_weight, "prior weight on the anticipated effect")->capture_default_str();
    ss->add_option("--draws", ss_draws, "Monte Carlo draws per evaluation")->capture_default_str();
    auto* ss_seed_opt = ss->add_option("--seed", ss_seed, "Monte Carlo seed (default $CET_SEED)");
    ss->add_option("--max-n", ss_max_n, "largest total n searched")->capture_default_str();

    // bf
    double bf_t = 0.0, bf_threshold = 3.0, bf_prior_odds = 1.0;
    long bf_n1 = 0, bf_n2 = 0;
    std::string bf_data, bf_form = "printed";
    auto* bf = app.add_subcommand("bf", "JZS Bayes factor B01 from a t statistic or a data file");
    auto* bf_t_opt = bf->add_option("--t", bf_t, "pooled two-sample t statistic");
    auto* bf_n1_opt = bf->add_option("--n1", bf_n1, "group 1 size");
    auto* bf_n2_opt = bf->add_option("--n2", bf_n2, "group 2 size");
    auto* bf_data_opt = bf->add_option("--data", bf_data, "CSV file with header group,value");
    bf_data_opt->excludes(bf_t_opt)->excludes(bf_n1_opt)->excludes(bf_n2_opt);
    bf->add_option("--threshold", bf_threshold, "evidence threshold (> 1)")->capture_default_str();
    bf->add_option("--prior-odds", bf_prior_odds, "prior odds Pr(H0)/Pr(H1)")->capture_default_str();
    bf->add_option("--form", bf_form, "printed (n* exponents) or canonical (nu = n - 2)")
        ->check(CLI::IsMember({"printed", "canonical"}))
        ->capture_default_str();

    // simulate
    std::string sim_config, sim_out;
    unsigned sim_threads = 0;
    auto* simulate = app.add_subcommand("simulate", "CET vs Bayes factor simulation over a grid");
    simulate->add_option("--config", sim_config, "JSON grid configuration (defaults if omitted)");
    simulate->add_option("--out", sim_out, "CSV output path")->required();
    simulate->add_option("--threads", sim_threads, "worker threads (0 = hardware)")->capture_default_str();

    // region
    long rg_n = 90;
    double rg_step = 0.0, rg_mu_max = 0.0, rg_s_max = 0.0, rg_delta = 0.5;
    std::string rg_out;
    detail::AlphaFlags rg_alphas;
    auto* region = app.add_subcommand("region", "decision regions on a (mean difference, s*) grid");
    region->add_option("--n", rg_n, "total sample size (df = n - 2)")->capture_default_str();
    region->add_option("--delta", rg_delta, "margin half-width")->capture_default_str();
    rg_alphas.attach(region);
    region->add_option("--grid-step", rg_step, "grid spacing (default delta / 100)");
    region->add_option("--mu-max", rg_mu_max, "largest |mean difference| (default 2 delta)");
    region->add_option("--s-max", rg_s_max, "largest s* (default delta)");
    region->add_option("--out", rg_out, "CSV output path")->required();

    // scatter
    long sc_n = 0, sc_reps = 10'000;
    double sc_mu_min = -2.0, sc_mu_max = 2.0;
    std::uint64_t sc_seed = 0;
    std::string sc_out;
    detail::AlphaFlags sc_alphas;
    detail::MarginFlags sc_margin;
    auto* scatter = app.add_subcommand("scatter", "per-replicate NHST p-values and p_CET values");
    scatter->add_option("--n", sc_n, "total sample size (even)")->required();
    scatter->add_option("--reps", sc_reps, "replicates")->capture_default_str();
    scatter->add_option("--mu-min", sc_mu_min, "lower end of the uniform mu_d range")->capture_default_str();
    scatter->add_option("--mu-max", sc_mu_max, "upper end of the uniform mu_d range")->capture_default_str();
    sc_margin.attach(scatter);
    sc_alphas.attach(scatter);
    auto* sc_seed_opt = scatter->add_option("--seed", sc_seed, "seed (default $CET_SEED)");
    scatter->add_option("--out", sc_out, "CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    auto seed_or_default = [](CLI::Option* opt, std::uint64_t value) {
        return opt->count() > 0 ? value : default_seed();
    };

    try {
        if (test->parsed()) {
            const auto data = detail::read_data(test_data);
            const auto stats = summarize(data.group1, data.group2);
            const auto alphas = test_alphas.get();
            const auto outcome = cet_two_sample(stats, test_margin.get(), alphas);
            detail::write_json(out, io::to_json(io::make_report(stats, outcome, alphas, show_p2)));
            return exit_code(outcome.decision);
        }
        if (oc->parsed()) {
            const DesignPoint dp{oc_mu, oc_sigma, oc_n1, oc_n2, oc_margin.get(), oc_alphas.get()};
            const McConfig mc{oc_draws, seed_or_default(oc_seed_opt, oc_seed)};
            detail::write_json(out, io::to_json(dp, operating_chars(dp, mc), mc));
            return 0;
        }
        if (ss->parsed()) {
            const SearchOptions opt{ss_max_n};
            if (power_opt->count() > 0) {
                const auto r = sample_size_for_power(ss_power, ss_mu, ss_sigma, ss_alphas.get(), opt);
                detail::write_json(out, io::to_json(r, "power", ss_power));
                return 0;
            }
            if (success_opt->count() > 0) {
                if (!ss_margin.given()) throw CLI::RequiredError("--delta or --q (needed for --success)");
                const McConfig mc{ss_draws, seed_or_default(ss_seed_opt, ss_seed)};
                const auto r = sample_size_for_success(ss_success, ss_mu, ss_sigma, ss_margin.get(),
                                                       ss_alphas.get(), mc, opt, ss_weight);
                auto j = io::to_json(r, "success", ss_success);
                j["draws"] = mc.draws;
                j["seed"] = mc.seed;
                detail::write_json(out, j);
                return 0;
            }
            throw CLI::RequiredError("--power or --success");
        }
        if (bf->parsed()) {
            const JzsForm form = bf_form == "canonical" ? JzsForm::Canonical : JzsForm::Printed;
            double t = bf_t;
            long n1 = bf_n1, n2 = bf_n2;
            if (bf_data_opt->count() > 0) {
                const auto data = detail::read_data(bf_data);
                const auto stats = summarize(data.group1, data.group2);
                if (stats.degenerate()) throw DegenerateDataError();
                t = stats.mean_diff() / stats.std_error();
                n1 = stats.n1;
                n2 = stats.n2;
            } else if (bf_t_opt->count() == 0 || bf_n1_opt->count() == 0 || bf_n2_opt->count() == 0) {
                throw CLI::RequiredError("--t with --n1 and --n2, or --data");
            }
            const auto r = bayes_factor_test(t, n1, n2, bf_threshold, bf_prior_odds, form);
            detail::write_json(out, io::to_json(r, t, n1, n2, form));
            return 0;
        }
        if (simulate->parsed()) {
            auto grid = sim::SimGrid::defaults();
            grid.seed = default_seed();
            if (!sim_config.empty()) {
                std::ifstream file(sim_config);
                if (!file) throw InputError("cannot open config file '" + sim_config + "'");
                auto j = io::json::parse(file);
                if (!j.contains("seed")) j["seed"] = grid.seed;
                grid = io::grid_from_json(j);
            }
            const auto cells = sim::run_grid(grid, sim_threads);
            auto file = detail::open_output(sim_out);
            io::write_grid_csv(file, cells);
            detail::write_json(out, io::grid_summary(grid, cells));
            return 0;
        }
        if (region->parsed()) {
            if (rg_n < 4 || rg_n % 2 != 0) throw InputError("--n must be an even total >= 4");
            const Alphas alphas = rg_alphas.get();
            const RegionClassifier classifier(rg_delta, alphas, Df(static_cast<double>(rg_n - 2)));
            const double step = rg_step > 0.0 ? rg_step : rg_delta / 100.0;
            const double mu_max = rg_mu_max > 0.0 ? rg_mu_max : 2.0 * rg_delta;
            const double s_max = rg_s_max > 0.0 ? rg_s_max : rg_delta;
            const auto points = io::region_grid(classifier, step, mu_max, s_max);
            auto file = detail::open_output(rg_out);
            io::write_region_csv(file, points);
            long counts[3] = {0, 0, 0};
            for (const auto& p : points) ++counts[static_cast<int>(p.decision)];
            const auto d = classifier.diamond();
            auto corner = [](const Diamond::Point& p) { return io::json::array({p.mu_hat, p.s_star}); };
            detail::write_json(out, {{"schema_version", io::kSchemaVersion},
                                     {"kind", "region"},
                                     {"n", rg_n},
                                     {"delta", rg_delta},
                                     {"alpha1", alphas.alpha1()},
                                     {"alpha2", alphas.alpha2()},
                                     {"t_alpha1_half", classifier.critical_values().nhst},
                                     {"t_alpha2", classifier.critical_values().tost},
                                     {"diamond",
                                      {{"bottom", corner(d.bottom)},
                                       {"left", corner(d.left)},
                                       {"top", corner(d.top)},
                                       {"right", corner(d.right)}}},
                                     {"points", points.size()},
                                     {"positive", counts[0]},
                                     {"negative", counts[1]},
                                     {"inconclusive", counts[2]}});
            return 0;
        }
        if (scatter->parsed()) {
            const Margin margin = sc_margin.given() ? sc_margin.get() : Margin::symmetric(0.5);
            const auto rows = sim::pvalue_scatter(sc_n, sc_reps, {sc_mu_min, sc_mu_max}, margin, sc_alphas.get(),
                                                  seed_or_default(sc_seed_opt, sc_seed));
            auto file = detail::open_output(sc_out);
            io::write_scatter_csv(file, rows);
            long counts[3] = {0, 0, 0};
            for (const auto& r : rows) ++counts[static_cast<int>(r.decision)];
            detail::write_json(out, {{"schema_version", io::kSchemaVersion},
                                     {"kind", "scatter"},
                                     {"rows", rows.size()},
                                     {"positive", counts[0]},
                                     {"negative", counts[1]},
                                     {"inconclusive", counts[2]}});
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        err << "error: missing " << e.what() << '\n';
        return kUsage;
    } catch (const SearchFailure& e) {
        err << "error: " << e.what() << '\n';
        return kSearchFailed;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const io::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}

}  // namespace cet::cli
