// weak.hpp - second-order (weak coupling) mean force Gibbs state and its limits

#pragma once

#include <string>
#include <vector>

#include "meanforce/eigenops.hpp"
#include "meanforce/spectral.hpp"

namespace meanforce {

enum class Normalization { Binomial, Exact };
enum class Validity { Valid, Marginal, Invalid };

struct ValidityThresholds {
    double marginal{0.1};
    double invalid{1.0};
};

struct WeakOptions {
    QuadratureOptions quadrature{};
    double gap_tolerance{0};  // 0 selects 1e-9 * ||H_S||
    Normalization normalization{Normalization::Binomial};
    ValidityThresholds thresholds{};
};

struct WeakMfgResult {
    DensityMatrix rho;
    DensityMatrix tau_s;
    double validity_margin;
    Validity validity;
    double coherence_norm;
    BathCoefficients coefficients;
    double hermiticity_residual;  // of the assembled state, before symmetrizing
    double trace_residual;        // |Tr - 1| before the final renormalization
    std::vector<std::string> warnings;
};

Validity classify(double margin, const ValidityThresholds& t);
const char* to_string(Validity v);
const char* to_string(Normalization n);

WeakMfgResult weak_mfg_state(const SystemModel& model, const SpectralDensity& j, double beta, double lambda,
                             const WeakOptions& opt = {});

double weak_validity_margin(const SystemModel& model, const SpectralDensity& j, double beta, double lambda,
                            const WeakOptions& opt = {});

double coherence_commutator_norm(const Matrix& rho, const Matrix& hs);

// beta -> infinity form: ground projector plus the vacuum-fluctuation terms
DensityMatrix low_temperature_state(const SystemModel& model, const SpectralDensity& j, double lambda,
                                    const WeakOptions& opt = {});

DensityMatrix high_temperature_reference(const SystemModel& model, double beta);

}  // namespace meanforce
