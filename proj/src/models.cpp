#include "meanforce/models.hpp"

#include <cmath>
#include <sstream>

namespace meanforce::models {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void finite(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) throw InvalidParameter("model parameters must be finite");
}

Matrix v_hamiltonian(const VSystem& v) {
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = v.omega_q - 0.5 * v.delta;
    h(2, 2) = v.omega_q + 0.5 * v.delta;
    return h;
}

Matrix v_coupling() {
    Matrix x = Matrix::Zero(3, 3);
    x(1, 0) = x(2, 0) = x(0, 1) = x(0, 2) = 1.0;
    return x;
}

Matrix sigma_r(double theta) {
    return std::cos(theta) * ops::sigma_z() - std::sin(theta) * ops::sigma_x();
}

void check_beta(double beta) {
    if (!(beta >= 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be finite and >= 0");
}

// Integrals that appear in the spin-boson expressions, split into simple poles
// and double poles at a = omega_q.
struct PoleIntegrals {
    double coth_simple;  // PV int J coth a/(w^2 - a^2)
    double plain_simple; // PV int J w/(w^2 - a^2)
    double coth_double;  // FP int J coth (w^2 + a^2)/(w^2 - a^2)^2
    double plain_double; // FP int J 2 w a/(w^2 - a^2)^2
};

PoleIntegrals pole_integrals(const SpectralDensity& j, double beta, double a, const QuadratureOptions& opt) {
    if (auto d = std::get_if<DiscreteModes>(&j.form())) {
        PoleIntegrals p{0, 0, 0, 0};
        for (std::size_t k = 0; k < d->omega.size(); ++k) {
            const double w = d->omega[k], g2 = d->g[k] * d->g[k], den = w * w - a * a;
            const double ct = 1.0 / std::tanh(0.5 * beta * w);
            p.coth_simple += g2 * ct * a / den;
            p.plain_simple += g2 * w / den;
            p.coth_double += g2 * ct * (w * w + a * a) / (den * den);
            p.plain_double += g2 * 2 * w * a / (den * den);
        }
        return p;
    }
    auto h = [&](double w) { return j_coth(j, beta, w); };
    auto jj = [&](double w) { return j(w); };
    auto tail = [&](double w) { return (std::abs(h(w)) + j(w)) / ((w - a) * (w - a)); };
    const double upper = integration_upper_limit(j, tail, 4 * a, opt);
    auto check = [](const QuadResult& r) {
        if (!r.converged) throw QuadratureNotConverged("spin-boson closed form integral");
        return r.value;
    };
    auto regular = [&](auto f) { return check(integrate(f, 0.0, upper, opt)); };

    const double pv_h = check(principal_value(h, a, upper, opt));
    const double pv_j = check(principal_value(jj, a, upper, opt));
    const double fp_h = check(finite_part(h, a, upper, opt));
    const double fp_j = check(finite_part(jj, a, upper, opt));
    const double r1_h = regular([&](double w) { return h(w) / (w + a); });
    const double r1_j = regular([&](double w) { return j(w) / (w + a); });
    const double r2_h = regular([&](double w) { return h(w) / ((w + a) * (w + a)); });
    const double r2_j = regular([&](double w) { return j(w) / ((w + a) * (w + a)); });

    // a/(w^2-a^2) = (1/(w-a) - 1/(w+a))/2,  w/(w^2-a^2) = (1/(w-a) + 1/(w+a))/2
    // (w^2+a^2)/(w^2-a^2)^2 = (1/(w-a)^2 + 1/(w+a)^2)/2,  2wa/(w^2-a^2)^2 = (1/(w-a)^2 - 1/(w+a)^2)/2
    return {0.5 * (pv_h - r1_h), 0.5 * (pv_j + r1_j), 0.5 * (fp_h + r2_h), 0.5 * (fp_j - r2_j)};
}

}  // namespace

std::string name(const ModelSpec& spec) {
    return std::visit(overloaded{[](const SpinBoson&) { return std::string("spin_boson"); },
                                 [](const VSystem&) { return std::string("v_system"); },
                                 [](const TwoQubit&) { return std::string("two_qubit"); }},
                      spec);
}

SystemModel build(const ModelSpec& spec) {
    return std::visit(
        overloaded{
            [](const SpinBoson& s) {
                finite({s.omega_q, s.theta});
                return single_bath_model(HermitianOperator(0.5 * s.omega_q * ops::sigma_z()),
                                         HermitianOperator(sigma_r(s.theta)));
            },
            [](const VSystem& v) {
                finite({v.omega_q, v.delta});
                if (!(v.omega_q > 0)) throw InvalidParameter("v_system needs omega_q > 0");
                if (!(v.delta > 0) || !(v.delta < 2 * v.omega_q))
                    throw InvalidParameter("v_system needs 0 < delta < 2 omega_q");
                return single_bath_model(HermitianOperator(v_hamiltonian(v)), HermitianOperator(v_coupling()));
            },
            [](const TwoQubit& t) {
                finite({t.omega_q, t.lambda_s});
                const Matrix id = ops::identity(2);
                Matrix h = 0.5 * t.omega_q * (kron(ops::sigma_z(), id) + kron(id, ops::sigma_z())) +
                           t.lambda_s * (kron(ops::sigma_plus(), ops::sigma_minus()) +
                                         kron(ops::sigma_minus(), ops::sigma_plus()));
                return SystemModel{HermitianOperator(h),
                                   {HermitianOperator(ops::sigma_x()), HermitianOperator(ops::sigma_x())},
                                   {2, 2}};
            }},
        spec);
}

std::string regime_note(const ModelSpec& spec) {
    if (auto v = std::get_if<VSystem>(&spec)) {
        if (0.5 * v->delta > 0.1 * v->omega_q) {
            std::ostringstream os;
            os << "v_system: delta/2 = " << 0.5 * v->delta << " is not small against omega_q = " << v->omega_q;
            return os.str();
        }
    }
    return {};
}

DensityMatrix closed_form_state(const ModelSpec& spec, double beta, Regime regime) {
    check_beta(beta);
    const bool derived = regime == Regime::UltrastrongDerived;
    return std::visit(
        overloaded{
            [&](const SpinBoson& s) {
                const double c = derived ? std::tanh(0.5 * beta * s.omega_q * std::cos(s.theta))
                                         : std::cos(s.theta) * std::tanh(0.5 * beta * s.omega_q);
                return DensityMatrix(0.5 * (ops::identity(2) - c * sigma_r(s.theta)));
            },
            [&](const VSystem& v) -> DensityMatrix {
                if (!derived) throw UnsupportedCombination("no closed conjectured state for the v_system");
                const double e = std::exp(-0.5 * beta * v.omega_q);
                Matrix m = Matrix::Zero(3, 3);
                m(0, 0) = 1.0;
                m(1, 1) = m(2, 2) = 0.5 * (1 + e);
                m(1, 2) = m(2, 1) = 0.5 * (1 - e);
                return DensityMatrix(m / (2 + e));
            },
            [&](const TwoQubit& t) {
                const double c = derived ? std::tanh(0.5 * beta * t.lambda_s)
                                         : std::sinh(beta * t.lambda_s) /
                                               (std::cosh(beta * t.omega_q) + std::cosh(beta * t.lambda_s));
                return DensityMatrix(0.25 * (ops::identity(4) - c * kron(ops::sigma_x(), ops::sigma_x())));
            }},
        spec);
}

SpinBosonWeak spin_boson_weak_closed_form(double omega_q, double theta, const SpectralDensity& j, double beta,
                                          double lambda, const QuadratureOptions& opt) {
    if (!(beta > 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be positive and finite");
    if (!(omega_q > 0)) throw InvalidParameter("omega_q must be positive");
    const double s = std::sin(theta), l2 = lambda * lambda;
    if (s == 0.0 || l2 == 0.0) return {0.0, 0.0};
    const auto p = pole_integrals(j, beta, omega_q, opt);
    const double q = reorganization_energy(j, opt);
    const double th = std::tanh(0.5 * beta * omega_q);
    const double sech = 1.0 / std::cosh(0.5 * beta * omega_q);
    const double sx = 2 * l2 * std::sin(2 * theta) / omega_q * (th * p.coth_simple - p.plain_simple + q);
    const double sz = 2 * l2 * s * s * (th * p.coth_double - p.plain_double + 0.5 * beta * sech * sech * p.coth_simple);
    return {sx, sz};
}

VSystemCoefficients v_system_weak_coefficients(double omega_q, double delta, const SpectralDensity& j,
                                               double beta, const QuadratureOptions& opt) {
    build(VSystem{omega_q, delta});
    if (!(beta > 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be positive and finite");
    const double w1 = omega_q - 0.5 * delta, w2 = omega_q + 0.5 * delta;
    const double z = 1 + std::exp(-beta * w1) + std::exp(-beta * w2);
    const double t0 = 1 / z, t1 = std::exp(-beta * w1) / z, t2 = std::exp(-beta * w2) / z;
    auto A = [&](double w) { return lamb_coefficient(j, beta, w, opt).value; };
    auto dA = [&](double w) { return lamb_coefficient_derivative(j, beta, w, opt).value; };
    const double q = reorganization_energy(j, opt);
    const double a1 = A(w1), am1 = A(-w1), a2 = A(w2), am2 = A(-w2);

    const double f2 = t0 * dA(-w2) - t2 * dA(w2) +
                      beta * t2 * (a2 - t2 * a2 - t0 * am2 - t1 * a1 - t0 * am1 + q * t0);
    const double f1 = t0 * dA(-w1) - t1 * dA(w1) +
                      beta * t1 * (a1 - t1 * a1 - t0 * am1 - t2 * a2 - t0 * am2 + q * t0);
    // the reorganization term enters with a minus sign; the expansion of exp(-beta H_S') and
    // the exact oracle both fix it
    const double g = (t1 * a1 + t0 * am1 - (t2 * a2 + t0 * am2) - (t1 - t2) * q) / delta;
    return {-f1 - f2, f1, f2, g};
}

DensityMatrix v_system_weak_state(double omega_q, double delta, const SpectralDensity& j, double beta,
                                  double lambda, const QuadratureOptions& opt) {
    const auto c = v_system_weak_coefficients(omega_q, delta, j, beta, opt);
    const double w1 = omega_q - 0.5 * delta, w2 = omega_q + 0.5 * delta;
    const double z = 1 + std::exp(-beta * w1) + std::exp(-beta * w2);
    const double l2 = lambda * lambda;
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 1 / z + l2 * c.f0;
    m(1, 1) = std::exp(-beta * w1) / z + l2 * c.f1;
    m(2, 2) = std::exp(-beta * w2) / z + l2 * c.f2;
    m(1, 2) = m(2, 1) = l2 * c.g;
    m /= m.trace().real();
    return DensityMatrix(m);
}

DensityMatrix v_system_low_temperature_state(double omega_q, double delta, const SpectralDensity& j,
                                             double lambda, const QuadratureOptions& opt) {
    build(VSystem{omega_q, delta});
    const double l2 = lambda * lambda, hd = 0.5 * delta;
    auto I = [&](auto u) { return spectral_integral(j, u, opt).value; };
    const double i0 = I([&](double w) {
        const double s = (w + omega_q) * (w + omega_q);
        return 2 * (s + hd * hd) / ((s - hd * hd) * (s - hd * hd));
    });
    const double i1 = I([&](double w) { return 1 / ((w + omega_q - hd) * (w + omega_q - hd)); });
    const double i2 = I([&](double w) { return 1 / ((w + omega_q + hd) * (w + omega_q + hd)); });
    const double ic = I([&](double w) { return 1 / ((w + omega_q) * (w + omega_q) - hd * hd); });
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 1 - l2 * i0;
    m(1, 1) = l2 * i1;
    m(2, 2) = l2 * i2;
    m(1, 2) = m(2, 1) = l2 * ic;
    m /= m.trace().real();
    return DensityMatrix(m);
}

}  // namespace meanforce::models
