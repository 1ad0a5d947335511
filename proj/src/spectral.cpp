#include "meanforce/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "meanforce/errors.hpp"

namespace meanforce {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_converged(const QuadResult& r, const char* what) {
    if (!r.converged)
        throw QuadratureNotConverged(std::string(what) + ": error estimate " + std::to_string(r.error) +
                                     " above tolerance");
}

// Pieces of [0, upper] split at the tabulated grid ends, where J has kinks.
std::vector<double> breakpoints(const SpectralDensity& j, double upper) {
    std::vector<double> b{0.0};
    if (auto t = std::get_if<Tabulated>(&j.form()))
        for (double x : {t->grid.front(), t->grid.back()})
            if (x > 0 && x < upper) b.push_back(x);
    b.push_back(upper);
    return b;
}

template <class F>
QuadResult integrate_pieces(F f, const std::vector<double>& pts, const QuadratureOptions& opt) {
    QuadResult r{0, 0, true};
    QuadratureOptions o = opt;
    o.abs_tol = opt.abs_tol / double(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) r += integrate(f, pts[i], pts[i + 1], o);
    return r;
}

double upper_limit(const SpectralDensity& j, const std::function<double(double)>& g, double min_upper,
                   const QuadratureOptions& opt) {
    return integration_upper_limit(j, g, min_upper, opt);
}

struct DiscreteParts {
    double c, e, dc, de;
};

DiscreteParts discrete_parts(const DiscreteModes& d, double beta, double a) {
    DiscreteParts p{0, 0, 0, 0};
    for (std::size_t k = 0; k < d.omega.size(); ++k) {
        const double w = d.omega[k], g2 = d.g[k] * d.g[k];
        const double den = w * w - a * a;
        if (std::abs(den) < 1e-12 * w * w)
            throw InvalidParameter("Bohr frequency resonant with a discrete bath mode");
        const double ct = 1.0 / std::tanh(0.5 * beta * w);
        p.c += g2 * ct / den;
        p.e += g2 * w / den;
        p.dc += g2 * ct * 2 * a / (den * den);
        p.de += g2 * w * 2 * a / (den * den);
    }
    return p;
}

LambParts lamb_parts_at(const SpectralDensity& j, double beta, double a, double upper,
                        const QuadratureOptions& opt) {
    auto fc = [&](double w) { return j_coth(j, beta, w) / (w + a); };
    auto fe = [&](double w) { return j(w) * w / (w + a); };
    auto rc = principal_value(fc, a, upper, opt);
    auto re = principal_value(fe, a, upper, opt);
    require_converged(rc, "lamb coefficient");
    require_converged(re, "lamb coefficient");
    return {rc.value, re.value, rc.error, re.error};
}

double lamb_upper(const SpectralDensity& j, double beta, double a, const QuadratureOptions& opt) {
    auto tail = [&](double w) {
        return (std::abs(j_coth(j, beta, w)) + j(w) * w) / std::abs(w * w - a * a);
    };
    return upper_limit(j, tail, 4.0 * a, opt);
}

}  // namespace

// ---------------------------------------------------------------- densities

SpectralDensity::SpectralDensity(Form f) : form_(std::move(f)) {
    std::visit(overloaded{
                   [](const OhmicExponential& o) {
                       if (!(o.q > 0) || !(o.tau_c > 0) || !std::isfinite(o.q) || !std::isfinite(o.tau_c))
                           throw InvalidParameter("ohmic_exponential needs q > 0 and tau_c > 0");
                   },
                   [this](const Tabulated& t) {
                       const auto n = t.grid.size();
                       if (n < 2 || t.values.size() != n)
                           throw InvalidParameter("tabulated J needs >= 2 grid points and matching values");
                       if (!(t.s >= 1) || !std::isfinite(t.s))
                           throw InvalidParameter("tabulated J needs low-frequency exponent s >= 1");
                       for (std::size_t i = 0; i < n; ++i) {
                           if (!(t.grid[i] > 0) || !std::isfinite(t.grid[i]))
                               throw InvalidParameter("tabulated grid must be positive");
                           if (i && !(t.grid[i] > t.grid[i - 1]))
                               throw InvalidParameter("tabulated grid must be strictly increasing");
                           if (!(t.values[i] >= 0) || !std::isfinite(t.values[i]))
                               throw InvalidParameter("tabulated values must be finite and >= 0");
                       }
                       // monotone cubic Hermite slopes (PCHIP)
                       std::vector<double> h(n - 1), d(n - 1);
                       for (std::size_t i = 0; i + 1 < n; ++i) {
                           h[i] = t.grid[i + 1] - t.grid[i];
                           d[i] = (t.values[i + 1] - t.values[i]) / h[i];
                       }
                       slopes_.assign(n, 0.0);
                       slopes_[0] = d[0];
                       slopes_[n - 1] = d[n - 2];
                       for (std::size_t i = 1; i + 1 < n; ++i) {
                           if (d[i - 1] * d[i] <= 0) continue;
                           const double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
                           slopes_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
                       }
                   },
                   [](const DiscreteModes& d) {
                       if (d.omega.empty() || d.omega.size() != d.g.size())
                           throw InvalidParameter("discrete modes need matching, non-empty omega and g");
                       for (std::size_t i = 0; i < d.omega.size(); ++i) {
                           if (!(d.omega[i] > 0) || !std::isfinite(d.omega[i]) || !std::isfinite(d.g[i]))
                               throw InvalidParameter("discrete mode frequencies must be positive");
                           if (i && !(d.omega[i] > d.omega[i - 1]))
                               throw InvalidParameter("discrete mode frequencies must be strictly increasing");
                       }
                   }},
               form_);
}

double SpectralDensity::operator()(double w) const {
    if (w <= 0) return 0.0;
    return over_omega(w) * w;
}

double SpectralDensity::over_omega(double w) const {
    return std::visit(
        overloaded{
            [w](const OhmicExponential& o) { return o.q * o.tau_c * std::exp(-o.tau_c * std::max(w, 0.0)); },
            [w, this](const Tabulated& t) {
                const double g0 = t.grid.front();
                if (w <= g0) return t.values.front() / g0 * std::pow(std::max(w, 0.0) / g0, t.s - 1);
                if (w >= t.grid.back()) return w == t.grid.back() ? t.values.back() / w : 0.0;
                const auto it = std::upper_bound(t.grid.begin(), t.grid.end(), w);
                const std::size_t i = std::size_t(it - t.grid.begin()) - 1;
                const double h = t.grid[i + 1] - t.grid[i], s = (w - t.grid[i]) / h;
                const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
                const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
                const double v = h00 * t.values[i] + h10 * h * slopes_[i] + h01 * t.values[i + 1] +
                                 h11 * h * slopes_[i + 1];
                return std::max(v, 0.0) / w;
            },
            [](const DiscreteModes&) -> double {
                throw UnsupportedCombination("discrete modes have no pointwise J");
            }},
        form_);
}

double SpectralDensity::support_hint() const {
    return std::visit(overloaded{[](const OhmicExponential& o) { return 10.0 / o.tau_c; },
                                 [](const Tabulated& t) { return t.grid.back(); },
                                 [](const DiscreteModes& d) { return d.omega.back(); }},
                      form_);
}

SpectralDensity SpectralDensity::scaled(double c) const {
    if (!(c > 0)) throw InvalidParameter("scale must be positive");
    return std::visit(overloaded{[c](OhmicExponential o) {
                                     o.q *= c;
                                     return SpectralDensity(o);
                                 },
                                 [c](Tabulated t) {
                                     for (auto& v : t.values) v *= c;
                                     return SpectralDensity(t);
                                 },
                                 [c](DiscreteModes d) {
                                     for (auto& g : d.g) g *= std::sqrt(c);
                                     return SpectralDensity(d);
                                 }},
                      form_);
}

// ---------------------------------------------------------------- scalars

// written as (J/w)(w coth) to stay finite at w = 0
double j_coth(const SpectralDensity& j, double beta, double w) {
    return j.over_omega(w) * (2.0 / beta) * x_coth_x(0.5 * beta * w);
}

double integration_upper_limit(const SpectralDensity& j, const std::function<double(double)>& g,
                               double min_upper, const QuadratureOptions& opt) {
    if (j.compact_support()) return std::max(j.support_hint(), min_upper);
    return tail_cutoff(g, std::max(j.support_hint(), min_upper), opt);
}

double x_coth_x(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) return 1.0 + ax * ax / 3.0 - ax * ax * ax * ax / 45.0;
    return ax / std::tanh(ax);
}

double bose_occupation(double beta, double omega) {
    const double x = beta * omega;
    if (!(x > 0)) throw InvalidParameter("bose_occupation needs beta*omega > 0");
    return 1.0 / std::expm1(x);
}

double tail_cutoff(const std::function<double(double)>& g, double start, const QuadratureOptions& opt) {
    double upper = start;
    QuadratureOptions o = opt;
    o.abs_tol = 1e-4 * opt.abs_tol;
    o.rel_tol = 1e-2;
    for (int i = 0; i < 40; ++i) {
        auto t = integrate([&](double w) { return std::abs(g(w)); }, upper, 2 * upper, o);
        if (t.value <= 1e-3 * opt.abs_tol) return upper;
        upper *= 2;
    }
    throw IntegralDiverges("integrand tail does not decay");
}

double reorganization_energy(const SpectralDensity& j, const QuadratureOptions& opt) {
    if (auto o = std::get_if<OhmicExponential>(&j.form())) return o->q;
    return spectral_integral(j, [](double) { return 1.0; }, opt, true).value;
}

Coefficient spectral_integral(const SpectralDensity& j, const std::function<double(double)>& u,
                              const QuadratureOptions& opt, bool over_omega) {
    if (auto d = std::get_if<DiscreteModes>(&j.form())) {
        double s = 0;
        for (std::size_t k = 0; k < d->omega.size(); ++k)
            s += d->g[k] * d->g[k] * u(d->omega[k]) / (over_omega ? d->omega[k] : 1.0);
        return {s, 0.0};
    }
    auto f = [&](double w) { return (over_omega ? j.over_omega(w) : j(w)) * u(w); };
    const double upper = upper_limit(j, f, 0.0, opt);
    auto r = integrate_pieces(f, breakpoints(j, upper), opt);
    require_converged(r, "spectral integral");
    return {r.value, r.error};
}

// ---------------------------------------------------------------- singular integrals

QuadResult principal_value(const std::function<double(double)>& f, double a, double upper,
                           const QuadratureOptions& opt) {
    if (!(a > 0) || upper < 2 * a) throw InvalidParameter("principal_value needs 0 < 2a <= upper");
    // Subtracting f(a) on [0, 2a] leaves ln(1) = 0 for the analytic term; folding
    // t -> a +/- t evaluates the remainder without cancellation next to the pole.
    QuadratureOptions o = opt;
    o.abs_tol = 0.5 * opt.abs_tol;
    auto near = integrate([&](double t) { return (f(a + t) - f(a - t)) / t; }, 0.0, a, o);
    auto far = integrate([&](double w) { return f(w) / (w - a); }, 2 * a, upper, o);
    near += far;
    return near;
}

QuadResult finite_part(const std::function<double(double)>& h, double a, double upper,
                       const QuadratureOptions& opt) {
    if (!(a > 0) || upper < 2 * a) throw InvalidParameter("finite_part needs 0 < 2a <= upper");
    QuadratureOptions o = opt;
    o.abs_tol = 0.5 * opt.abs_tol;
    const double ha = h(a);
    auto near = integrate([&](double t) { return (h(a + t) + h(a - t) - 2 * ha) / (t * t); }, 0.0, a, o);
    near.value -= 2 * ha / a;
    auto far = integrate([&](double w) { return h(w) / ((w - a) * (w - a)); }, 2 * a, upper, o);
    near += far;
    return near;
}

// ---------------------------------------------------------------- lamb coefficients

LambParts lamb_parts(const SpectralDensity& j, double beta, double a, const QuadratureOptions& opt) {
    if (!(beta > 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be positive and finite");
    if (!(a > 0)) throw InvalidParameter("lamb_parts needs a > 0");
    if (auto d = std::get_if<DiscreteModes>(&j.form())) {
        auto p = discrete_parts(*d, beta, a);
        return {p.c, p.e, 0, 0};
    }
    return lamb_parts_at(j, beta, a, lamb_upper(j, beta, a, opt), opt);
}

Coefficient lamb_coefficient(const SpectralDensity& j, double beta, double omega_n,
                             const QuadratureOptions& opt) {
    if (!(beta > 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be positive and finite");
    if (omega_n == 0.0) return {reorganization_energy(j, opt), 0.0};
    const double a = std::abs(omega_n);
    auto p = lamb_parts(j, beta, a, opt);
    return {omega_n * p.c + p.e, a * p.c_error + p.e_error};
}

namespace {

// dA/dx = even + sign(x) * odd, with even = C + a C' and odd = E'
struct DerivativeParts {
    double even{0}, odd{0}, error{0};
};

DerivativeParts derivative_parts(const SpectralDensity& j, double beta, double a, const QuadratureOptions& opt) {
    if (auto d = std::get_if<DiscreteModes>(&j.form())) {
        auto p = discrete_parts(*d, beta, a);
        return {p.c + a * p.dc, p.de, 0.0};
    }

    double h = std::max(1e-4, 1e-4 * a);
    if (a > 0 && a < 2 * h) h = 0.5 * a;
    // stencil values are differenced, so their quadrature error has to shrink with h
    QuadratureOptions tight = opt;
    tight.abs_tol = opt.abs_tol * h;
    tight.rel_tol = opt.rel_tol * h;
    const double upper = lamb_upper(j, beta, a + h, tight);
    auto parts = [&](double x) { return lamb_parts_at(j, beta, std::abs(x), upper, tight); };

    if (a == 0.0) {
        // (A(h) - A(-h)) / 2h = C(h) by the parity of the two parts
        auto p1 = parts(h), p2 = parts(0.5 * h);
        const double v = (4 * p2.c - p1.c) / 3;
        return {v, 0.0, std::abs(v - p2.c) + p1.c_error + p2.c_error};
    }

    auto p_m1 = parts(a - h), p_p1 = parts(a + h);
    auto p_m2 = parts(a - 0.5 * h), p_p2 = parts(a + 0.5 * h);
    auto pc = parts(a);
    auto rich = [&](double fm1, double fp1, double fm2, double fp2) {
        const double d1 = (fp1 - fm1) / (2 * h), d2 = (fp2 - fm2) / h;
        return std::pair{(4 * d2 - d1) / 3, std::abs(d2 - d1) / 3};
    };
    auto [dc, ec] = rich(p_m1.c, p_p1.c, p_m2.c, p_p2.c);
    auto [de, ee] = rich(p_m1.e, p_p1.e, p_m2.e, p_p2.e);
    const double qerr = (p_m2.c_error + p_p2.c_error) * a / h + (p_m2.e_error + p_p2.e_error) / h;
    return {pc.c + a * dc, de, pc.c_error + a * ec + ee + qerr};
}

}  // namespace

Coefficient lamb_coefficient_derivative(const SpectralDensity& j, double beta, double omega_n,
                                        const QuadratureOptions& opt) {
    if (!(beta > 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be positive and finite");
    const double sgn = omega_n > 0 ? 1.0 : (omega_n < 0 ? -1.0 : 0.0);
    auto d = derivative_parts(j, beta, std::abs(omega_n), opt);
    return {d.even + sgn * d.odd, d.error};
}

Coefficient beta_correlation(const SpectralDensity& j, double beta, double beta1, const QuadratureOptions& opt) {
    if (!(beta > 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be positive and finite");
    if (!(beta1 >= 0 && beta1 <= beta)) throw InvalidParameter("beta_correlation needs 0 <= beta1 <= beta");
    // (n+1) e^{-b1 w} + n e^{b1 w} = (e^{-b1 w} + e^{-(b-b1) w}) / (1 - e^{-b w})
    auto u = [=](double w) {
        return (std::exp(-beta1 * w) + std::exp(-(beta - beta1) * w)) * w / (-std::expm1(-beta * w));
    };
    return spectral_integral(j, u, opt, true);
}

// ---------------------------------------------------------------- tables

double BathCoefficients::a_at(double w, double tol) const {
    for (std::size_t i = 0; i < omega.size(); ++i)
        if (std::abs(omega[i] - w) <= tol * std::max(1.0, std::abs(w))) return a[i];
    throw InvalidParameter("no coefficient for requested Bohr frequency");
}

double BathCoefficients::da_at(double w, double tol) const {
    for (std::size_t i = 0; i < omega.size(); ++i)
        if (std::abs(omega[i] - w) <= tol * std::max(1.0, std::abs(w))) return da[i];
    throw InvalidParameter("no coefficient for requested Bohr frequency");
}

BathCoefficients bath_coefficients(const SpectralDensity& j, double beta, const std::vector<double>& omegas,
                                   bool with_derivative, const QuadratureOptions& opt) {
    BathCoefficients bc;
    bc.beta = beta;
    bc.q = reorganization_energy(j, opt);
    bc.omega = omegas;
    // A(+w) and A(-w) share the same two integrals
    std::map<double, LambParts> cache;
    std::map<double, DerivativeParts> dcache;
    for (double w : omegas) {
        const double a = std::abs(w);
        if (a == 0.0) {
            bc.a.push_back(bc.q);
            // A is not differentiable at 0 for Ohmic-like J; the stencil value is kept for
            // completeness but stays out of the error budget since the state weighs it by
            // [X_0, tau X_0] = 0
            if (with_derivative) bc.da.push_back(lamb_coefficient_derivative(j, beta, 0.0, opt).value);
            continue;
        }
        auto it = cache.find(a);
        if (it == cache.end()) it = cache.emplace(a, lamb_parts(j, beta, a, opt)).first;
        const auto& p = it->second;
        bc.a.push_back(w * p.c + p.e);
        bc.quadrature_error_estimate = std::max(bc.quadrature_error_estimate, a * p.c_error + p.e_error);
        if (with_derivative) {
            auto dt = dcache.find(a);
            if (dt == dcache.end()) {
                dt = dcache.emplace(a, derivative_parts(j, beta, a, opt)).first;
                bc.quadrature_error_estimate = std::max(bc.quadrature_error_estimate, dt->second.error);
            }
            bc.da.push_back(dt->second.even + (w > 0 ? 1 : -1) * dt->second.odd);
        }
    }
    return bc;
}

}  // namespace meanforce
