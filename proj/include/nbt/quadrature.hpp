#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace nbt {

struct QuadratureSpec {
    double rel_tol = 1e-12;
    double abs_tol = 1e-300;
    int max_intervals = 4000;
};

struct QuadratureResult {
    double value;
    double error;
    int intervals;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(double estimate, double error_bound, int intervals)
        : std::runtime_error(describe(estimate, error_bound, intervals)),
          estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const { return estimate_; }
    double error_bound() const { return error_bound_; }

private:
    static std::string describe(double estimate, double error_bound, int intervals) {
        std::ostringstream os;
        os.precision(17);
        os << "quadrature did not converge after " << intervals << " intervals: estimate "
           << estimate << ", error bound " << error_bound;
        return os.str();
    }
    double estimate_;
    double error_bound_;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_center = f(center);
    double kronrod = kronrod_weights[7] * f_center;
    double gauss = gauss_weights[3] * f_center;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[j] * pair;
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::fabs(kronrod - gauss)};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (G7/K15) quadrature on [a, b]. Optional interior
/// breakpoints seed the initial partition. The worst segment is bisected
/// until the summed |K15 - G7| estimate is below max(abs_tol, rel_tol*|I|).
template <std::invocable<double> F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {},
                           std::vector<double> breakpoints = {}) {
    if (a == b) return {0.0, 0.0, 0};
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    breakpoints.erase(std::remove_if(breakpoints.begin(), breakpoints.end(),
                                     [&](double x) { return !(x > a && x < b); }),
                      breakpoints.end());
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.insert(breakpoints.begin(), a);
    breakpoints.push_back(b);

    std::priority_queue<detail::Segment> heap;
    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        auto seg = detail::gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1]);
        total += seg.value;
        total_error += seg.error;
        heap.push(seg);
    }

    int intervals = static_cast<int>(heap.size());
    while (total_error > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total))) {
        if (intervals >= spec.max_intervals) throw QuadratureError(sign * total, total_error, intervals);
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // segment is down to adjacent doubles; nothing left to refine
            throw QuadratureError(sign * total, total_error, intervals);
        }
        auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
        if (total_error < 0.0) total_error = 0.0;
    }
    // re-sum from scratch; the running totals drift after many updates
    double value = 0.0;
    double error = 0.0;
    for (; !heap.empty(); heap.pop()) {
        value += heap.top().value;
        error += heap.top().error;
    }
    return {sign * value, error, intervals};
}

}  // namespace nbt
