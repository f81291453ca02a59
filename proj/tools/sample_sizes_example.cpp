// Sample sizes for 90% power versus a 61% probability of success when the
// anticipated effect and variance are misjudged.

#include <cstdio>

#include "cet/operating_chars.hpp"

int main() {
    using namespace cet;
    const Alphas alphas = Alphas::standard();
    const Margin margin = Margin::symmetric(0.1025);
    const McConfig mc{200'000, kDefaultSeed};

    struct Scenario {
        const char* label;
        double mu_d;
        double variance;
    };
    const Scenario scenarios[] = {
        {"anticipated", 0.205, 1.0}, {"smaller effect", 0.123, 1.25}, {"larger effect", 0.33, 0.75}};

    std::printf("%-16s %8s %8s %12s %12s\n", "scenario", "mu_d", "sigma^2", "n(power=.9)", "n(succ=.61)");
    for (const auto& s : scenarios) {
        const double sigma = std::sqrt(s.variance);
        const auto power = sample_size_for_power(0.90, s.mu_d, sigma, alphas);
        const auto success = sample_size_for_success(0.61, s.mu_d, sigma, margin, alphas, mc);
        std::printf("%-16s %8.3f %8.2f %12ld %12ld\n", s.label, s.mu_d, s.variance, power.n, success.n);
    }
}
