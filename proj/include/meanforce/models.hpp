// models.hpp - the three worked systems and their closed-form states

#pragma once

#include <string>
#include <variant>

#include "meanforce/eigenops.hpp"
#include "meanforce/spectral.hpp"

namespace meanforce::models {

// H_S = omega_q sigma_z / 2, X = cos(theta) sigma_z - sin(theta) sigma_x
struct SpinBoson {
    double omega_q{1};
    double theta{0};
};

// ground |0>, excited |1>, |2> at omega_q -/+ delta/2; X = (|1> + |2>)<0| + h.c.
struct VSystem {
    double omega_q{3};
    double delta{0.1};
};

// two qubits with flip-flop interaction lambda_s, each coupled through sigma_x
struct TwoQubit {
    double omega_q{1};
    double lambda_s{1.55};
};

using ModelSpec = std::variant<SpinBoson, VSystem, TwoQubit>;

std::string name(const ModelSpec& spec);
SystemModel build(const ModelSpec& spec);

// non-empty when parameters are accepted but outside the regime the formulas target
std::string regime_note(const ModelSpec& spec);

enum class Regime { UltrastrongDerived, UltrastrongConjectured };

DensityMatrix closed_form_state(const ModelSpec& spec, double beta, Regime regime);

struct SpinBosonWeak {
    double sigma_x;
    double sigma_z_shift;  // <sigma_z> - <sigma_z>_0
};

// Bloch components from the scalar integral expressions. The sigma_z part uses
// finite-part integrals for the double pole, not finite differences.
SpinBosonWeak spin_boson_weak_closed_form(double omega_q, double theta, const SpectralDensity& j, double beta,
                                          double lambda, const QuadratureOptions& opt = {});

struct VSystemCoefficients {
    double f0, f1, f2, g;
};

VSystemCoefficients v_system_weak_coefficients(double omega_q, double delta, const SpectralDensity& j,
                                               double beta, const QuadratureOptions& opt = {});

// tau_S + lambda^2 (sum_p f_p |p><p| + g (|1><2| + |2><1|))
DensityMatrix v_system_weak_state(double omega_q, double delta, const SpectralDensity& j, double beta,
                                  double lambda, const QuadratureOptions& opt = {});

DensityMatrix v_system_low_temperature_state(double omega_q, double delta, const SpectralDensity& j,
                                             double lambda, const QuadratureOptions& opt = {});

}  // namespace meanforce::models
