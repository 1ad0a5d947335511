// spectral.hpp - spectral densities and the beta-dependent bath coefficients

#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "meanforce/quadrature.hpp"

namespace meanforce {

// J(w) = q * tau_c * w * exp(-tau_c w), so that int J/w = q
struct OhmicExponential {
    double q{1};
    double tau_c{1};
};

// Interpolated on (grid, values); J ~ w^s below the first grid point, 0 above the last.
struct Tabulated {
    std::vector<double> grid;
    std::vector<double> values;
    double s{1};
};

// Finite set of modes, J(w) = sum_k g_k^2 delta(w - w_k). Integrals become sums.
struct DiscreteModes {
    std::vector<double> omega;
    std::vector<double> g;
};

class SpectralDensity {
public:
    using Form = std::variant<OhmicExponential, Tabulated, DiscreteModes>;

    SpectralDensity(Form f);  // validates, throws InvalidParameter

    const Form& form() const { return form_; }
    bool is_discrete() const { return std::holds_alternative<DiscreteModes>(form_); }

    // continuum forms only
    double operator()(double w) const;
    double over_omega(double w) const;  // J(w)/w, finite as w -> 0

    // Upper integration limit where J has no support left (tabulated), or the
    // starting point of the tail-doubling rule (Ohmic).
    double support_hint() const;
    bool compact_support() const { return std::holds_alternative<Tabulated>(form_); }

    SpectralDensity scaled(double c) const;

private:
    Form form_;
    std::vector<double> slopes_;  // Hermite slopes for Tabulated
};

using SpectralDensityConfig = SpectralDensity;

struct Coefficient {
    double value{0};
    double error{0};
};

// x coth(x), series near zero
double x_coth_x(double x);

double bose_occupation(double beta, double omega);

double reorganization_energy(const SpectralDensity& j, const QuadratureOptions& opt = {});

// Smallest Omega >= start (doubling) such that int_Omega^{2 Omega} |g| <= 1e-3 abs_tol.
double tail_cutoff(const std::function<double(double)>& g, double start, const QuadratureOptions& opt);

// J(w) coth(beta w/2), finite at w = 0
double j_coth(const SpectralDensity& j, double beta, double w);

// Upper limit for integrating g against a continuum J: the support end for
// tabulated forms, else the tail-doubling rule; never below min_upper.
double integration_upper_limit(const SpectralDensity& j, const std::function<double(double)>& g,
                               double min_upper, const QuadratureOptions& opt);

// int_0^inf J(w) u(w) dw, or int_0^inf (J(w)/w) u(w) dw when over_omega is set
Coefficient spectral_integral(const SpectralDensity& j, const std::function<double(double)>& u,
                              const QuadratureOptions& opt = {}, bool over_omega = false);

// PV int_0^upper f(w)/(w - a) dw with a in (0, upper/2]
QuadResult principal_value(const std::function<double(double)>& f, double a, double upper,
                           const QuadratureOptions& opt);

// Hadamard finite part of int_0^upper h(w)/(w - a)^2 dw with a in (0, upper/2]
QuadResult finite_part(const std::function<double(double)>& h, double a, double upper,
                       const QuadratureOptions& opt);

// A(x) = x C(|x|) + E(|x|) with
//   C(a) = PV int J coth(beta w/2)/(w^2 - a^2),  E(a) = PV int J w/(w^2 - a^2).
struct LambParts {
    double c{0}, e{0};
    double c_error{0}, e_error{0};
};
LambParts lamb_parts(const SpectralDensity& j, double beta, double a, const QuadratureOptions& opt = {});

Coefficient lamb_coefficient(const SpectralDensity& j, double beta, double omega_n,
                             const QuadratureOptions& opt = {});
Coefficient lamb_coefficient_derivative(const SpectralDensity& j, double beta, double omega_n,
                                        const QuadratureOptions& opt = {});

inline double d_coefficient(double a_value, double q, bool x_squared_identity) {
    return x_squared_identity ? a_value : a_value - q;
}

// G(beta, -i beta1) = int J [(n+1) e^{-beta1 w} + n e^{beta1 w}]
Coefficient beta_correlation(const SpectralDensity& j, double beta, double beta1,
                             const QuadratureOptions& opt = {});

// Coefficient table for one beta and a list of Bohr frequencies.
struct BathCoefficients {
    double beta{0};
    double q{0};
    std::vector<double> omega;
    std::vector<double> a;
    std::vector<double> da;
    double quadrature_error_estimate{0};

    double a_at(double w, double tol = 1e-12) const;
    double da_at(double w, double tol = 1e-12) const;
};

BathCoefficients bath_coefficients(const SpectralDensity& j, double beta,
                                   const std::vector<double>& omegas, bool with_derivative = true,
                                   const QuadratureOptions& opt = {});

}  // namespace meanforce
