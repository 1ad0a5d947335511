// quadrature.hpp - adaptive Gauss-Kronrod (10/21 point) and Gauss-Legendre rules

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace meanforce {

struct QuadratureOptions {
    double abs_tol{1e-9};
    double rel_tol{1e-8};
    int max_intervals{4000};
};

struct QuadResult {
    double value{0};
    double error{0};
    bool converged{true};

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        converged = converged && o.converged;
        return *this;
    }
};

namespace detail {

// QUADPACK qk21 abscissae/weights
inline constexpr double xgk21[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr double wgk21[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208289429255, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double wg10[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

template <class F>
Piece gk21(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * wgk21[10], rg = 0.0;
    double fv1[10], fv2[10];
    for (int j = 0; j < 10; ++j) {
        const double x = h * xgk21[j];
        fv1[j] = f(c - x);
        fv2[j] = f(c + x);
        rk += wgk21[j] * (fv1[j] + fv2[j]);
        if (j % 2 == 1) rg += wg10[j / 2] * (fv1[j] + fv2[j]);
    }
    const double mean = 0.5 * rk;
    double asc = wgk21[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) asc += wgk21[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    asc *= std::abs(h);
    double err = std::abs((rk - rg) * h);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    // roundoff floor, as in QUADPACK
    double resabs = 0;
    resabs += wgk21[10] * std::abs(fc);
    for (int j = 0; j < 10; ++j) resabs += wgk21[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    resabs *= std::abs(h);
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50 * eps))
        err = std::max(50 * eps * resabs, err);
    return {a, b, rk * h, err};
}

}  // namespace detail

// Globally adaptive bisection on [a, b]; the interval with the largest error
// estimate is split until the total meets max(abs_tol, rel_tol*|I|).
template <class F>
QuadResult integrate(F f, double a, double b, const QuadratureOptions& opt = {}) {
    if (a == b) return {0.0, 0.0, true};
    std::priority_queue<detail::Piece> heap;
    auto first = detail::gk21(f, a, b);
    double total = first.value, err = first.error;
    heap.push(first);
    int n = 1;
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (n >= opt.max_intervals) return {total, err, false};
        auto p = heap.top();
        const double m = 0.5 * (p.a + p.b);
        // interval too small to split further
        if (!(m > std::min(p.a, p.b) && m < std::max(p.a, p.b))) return {total, err, false};
        heap.pop();
        auto l = detail::gk21(f, p.a, m), r = detail::gk21(f, m, p.b);
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++n;
    }
    // re-sum to shed the drift of incremental updates
    double s = 0, e = 0;
    while (!heap.empty()) {
        s += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    return {s, e, true};
}

struct GaussLegendre {
    std::vector<double> nodes, weights;
};

// n-point rule mapped to [a, b], nodes ascending
GaussLegendre gauss_legendre(int n, double a, double b);

}  // namespace meanforce
