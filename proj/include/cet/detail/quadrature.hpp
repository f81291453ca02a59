#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "cet/error.hpp"

namespace cet::detail {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int initial_intervals = 16;
    int max_intervals = 4000;
};

namespace gk15 {

// Gauss-Kronrod 7/15 nodes on [-1, 1] (positive half, centre last).
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel evaluate(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kKronrod[7];
    double gauss = fc * kGauss[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kNodes[i];
        const double f1 = f(centre - dx);
        const double f2 = f(centre + dx);
        kronrod += kKronrod[i] * (f1 + f2);
        if (i % 2 == 1) gauss += kGauss[i / 2] * (f1 + f2);
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace gk15

// Globally adaptive Gauss-Kronrod quadrature on a finite interval.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    std::priority_queue<gk15::Panel> panels;
    double total = 0.0;
    double error = 0.0;
    const double width = (b - a) / opt.initial_intervals;
    for (int i = 0; i < opt.initial_intervals; ++i) {
        const double lo = a + i * width;
        const double hi = (i + 1 == opt.initial_intervals) ? b : lo + width;
        auto p = gk15::evaluate(f, lo, hi);
        total += p.value;
        error += p.error;
        panels.push(p);
    }
    while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (static_cast<int>(panels.size()) >= opt.max_intervals || !std::isfinite(total)) {
            std::ostringstream msg;
            msg << "adaptive quadrature did not converge on [" << a << ", " << b << "]: estimate "
                << total << ", error estimate " << error << " after " << panels.size()
                << " intervals";
            throw NumericalError(msg.str());
        }
        const auto worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = gk15::evaluate(f, worst.a, mid);
        auto right = gk15::evaluate(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    double value = 0.0;
    double err = 0.0;
    const int count = static_cast<int>(panels.size());
    while (!panels.empty()) {
        value += panels.top().value;
        err += panels.top().error;
        panels.pop();
    }
    return {value, err, count};
}

}  // namespace cet::detail
