#pragma once

// Seeded simulation of two-sample normal data scored by both CET and the JZS
// Bayes factor, plus the per-replicate p-value scatter.

#include <algorithm>
#include <atomic>
#include <exception>
#include <cstdint>
#include <thread>
#include <vector>

#include "cet/bayes.hpp"
#include "cet/core.hpp"
#include "cet/operating_chars.hpp"

namespace cet::sim {

struct Tally {
    long positive = 0;
    long negative = 0;
    long inconclusive = 0;

    void add(Decision d) {
        switch (d) {
            case Decision::Positive: ++positive; break;
            case Decision::Negative: ++negative; break;
            case Decision::Inconclusive: ++inconclusive; break;
        }
    }
    long total() const { return positive + negative + inconclusive; }
    double pr_positive() const { return static_cast<double>(positive) / total(); }
    double pr_negative() const { return static_cast<double>(negative) / total(); }
    double pr_inconclusive() const { return static_cast<double>(inconclusive) / total(); }
    friend bool operator==(const Tally&, const Tally&) = default;
};

struct SimGrid {
    std::vector<double> mu_d_values;
    std::vector<long> n_values;  // balanced totals, n1 = n2 = n / 2
    double sigma = 1.0;
    long reps = 5000;
    Margin margin = Margin::symmetric(0.5);
    Alphas alphas;
    double bf_threshold = 3.0;
    std::uint64_t seed = kDefaultSeed;
    JzsForm form = JzsForm::Printed;

    // Mean differences of the comparison study; the 14 sample sizes are a
    // log-spaced reconstruction of "10 to 5,000".
    static SimGrid defaults() {
        SimGrid g;
        g.mu_d_values = {0.0, 0.07, 0.09, 0.13, 0.18, 0.25, 0.35, 0.48, 0.67};
        g.n_values = {10, 20, 30, 50, 80, 110, 160, 240, 380, 620, 1000, 1700, 2900, 5000};
        return g;
    }

    void validate() const {
        if (mu_d_values.empty() || n_values.empty()) throw InputError("simulation grid is empty");
        if (reps < 1) throw InputError("reps must be at least 1");
        if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
        if (!(bf_threshold > 1.0)) throw DomainError("Bayes factor threshold must exceed 1");
        for (long n : n_values)
            if (n < 4 || n % 2 != 0) throw InputError("simulation sample sizes must be even and >= 4");
    }
    std::size_t cell_count() const { return mu_d_values.size() * n_values.size(); }
};

struct CellResult {
    double mu_d = 0.0;
    long n = 0;
    long reps = 0;
    Tally cet;
    Tally bf;
    friend bool operator==(const CellResult&, const CellResult&) = default;
};

// Two balanced normal samples; group 1 is shifted by mu_d.
class DataGenerator {
public:
    DataGenerator(std::uint64_t seed, std::uint64_t stream) : rng_(make_rng(seed, stream)) {}

    SummaryStats draw(double mu_d, double sigma, long n1, long n2) {
        std::normal_distribution<double> g1(mu_d, sigma);
        std::normal_distribution<double> g2(0.0, sigma);
        x1_.resize(static_cast<std::size_t>(n1));
        x2_.resize(static_cast<std::size_t>(n2));
        for (auto& x : x1_) x = g1(rng_);
        for (auto& x : x2_) x = g2(rng_);
        return summarize(x1_, x2_);
    }
    Rng& rng() { return rng_; }

private:
    Rng rng_;
    std::vector<double> x1_, x2_;
};

inline CellResult simulate_cell(const SimGrid& grid, std::size_t cell_index) {
    const std::size_t i_mu = cell_index / grid.n_values.size();
    const std::size_t i_n = cell_index % grid.n_values.size();
    CellResult cell;
    cell.mu_d = grid.mu_d_values[i_mu];
    cell.n = grid.n_values[i_n];
    cell.reps = grid.reps;
    const long half = cell.n / 2;
    DataGenerator gen(grid.seed, cell_index);
    const auto crit = CriticalValues::t(grid.alphas, Df(static_cast<double>(cell.n - 2)));
    for (long r = 0; r < grid.reps; ++r) {
        const SummaryStats stats = gen.draw(cell.mu_d, grid.sigma, half, half);
        const CetOutcome outcome = cet_two_sample(stats, grid.margin, crit);
        cell.cet.add(outcome.decision);
        const double b01 = jzs_bf01(outcome.t_stat, half, half, grid.form);
        cell.bf.add(bf_decision(b01, grid.bf_threshold));
    }
    return cell;
}

// Every cell draws from its own generator (master seed, cell index), so the
// output does not depend on the number of threads.
inline std::vector<CellResult> run_grid(const SimGrid& grid, unsigned threads = 0) {
    grid.validate();
    const std::size_t cells = grid.cell_count();
    std::vector<CellResult> results(cells);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));

    if (threads <= 1) {
        for (std::size_t i = 0; i < cells; ++i) results[i] = simulate_cell(grid, i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < cells; i = next++) results[i] = simulate_cell(grid, i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

struct ScatterRow {
    double mu_d;
    double p_nhst;  // two-sided p-value of the t test
    double p_cet;
    Decision decision;
};

// One row per replicate with mu_d ~ Uniform(mu_range), n1 = n2 = n / 2.
inline std::vector<ScatterRow> pvalue_scatter(long n, long reps, Interval mu_range, const Margin& margin,
                                              const Alphas& alphas, std::uint64_t seed, double sigma = 1.0) {
    if (n < 4 || n % 2 != 0) throw InputError("pvalue_scatter: n must be even and >= 4");
    if (reps < 1) throw InputError("pvalue_scatter: reps must be at least 1");
    if (!(mu_range.lo <= mu_range.hi)) throw InputError("pvalue_scatter: empty mu_d range");
    DataGenerator gen(seed, 0);
    std::uniform_real_distribution<double> prior(mu_range.lo, mu_range.hi);
    const auto crit = CriticalValues::t(alphas, Df(static_cast<double>(n - 2)));
    std::vector<ScatterRow> rows;
    rows.reserve(static_cast<std::size_t>(reps));
    for (long r = 0; r < reps; ++r) {
        const double mu_d = prior(gen.rng());
        const auto stats = gen.draw(mu_d, sigma, n / 2, n / 2);
        const auto out = cet_two_sample(stats, margin, crit);
        rows.push_back({mu_d, out.p1, out.p_cet, out.decision});
    }
    return rows;
}

}  // namespace cet::sim
