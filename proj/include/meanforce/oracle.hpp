// oracle.hpp - exact reduced Gibbs state of a finite, truncated bosonic bath

#pragma once

#include <vector>

#include "meanforce/eigenops.hpp"
#include "meanforce/spectral.hpp"

namespace meanforce {

struct DiscretizedBath {
    std::vector<double> omega;  // strictly increasing
    std::vector<double> g;
    int fock_cutoff{2};
    double q_disc{0};

    int n_modes() const { return static_cast<int>(omega.size()); }
    SpectralDensity as_spectral_density() const;
};

// Gauss-Legendre nodes on (0, omega_max], g_k = sqrt(J(w_k) w_k).
// omega_max <= 0 picks the tail rule applied to J/w.
DiscretizedBath discretize_bath(const SpectralDensity& j, int n_modes, double omega_max = 0,
                                const QuadratureOptions& opt = {});

// Ladder depth from thermal occupancy of the softest mode, plus a displacement
// allowance lambda^2 ||X||^2 g_k^2 / w_k^2 at strong coupling.
int default_fock_cutoff(const DiscretizedBath& bath, double beta, double lambda = 0, double x_norm = 1);

inline constexpr long kDefaultDimensionCap = 4096;
inline constexpr double kTruncationThreshold = 1e-4;

// System is the first tensor factor, modes follow in order.
HermitianOperator build_total_hamiltonian(const SystemModel& model, const DiscretizedBath& bath, double lambda,
                                          long dimension_cap = kDefaultDimensionCap);

struct OracleDims {
    int system_dim;
    int fock_cutoff;
    int n_modes;
};

struct OracleResult {
    DensityMatrix rho_exact;
    OracleDims dims_used;
    double truncation_diagnostic;  // largest highest-Fock-level population over modes
    bool converged;
};

OracleResult exact_reduced_gibbs(const HermitianOperator& h_sr, const OracleDims& dims, double beta,
                                 long dimension_cap = kDefaultDimensionCap);

// convenience: discretized bath + Hamiltonian + reduced state
OracleResult oracle_state(const SystemModel& model, const DiscretizedBath& bath, double beta, double lambda,
                          long dimension_cap = kDefaultDimensionCap);

struct SweepPoint {
    int n_modes;
    int fock_cutoff;
};

struct SweepRow {
    int n_modes;
    int fock_cutoff;
    double lambda;
    double beta;
    double trace_distance_to_weak;
    double trace_distance_to_ultrastrong;
    double truncation_diagnostic;
    double trace_distance_to_previous;  // NaN for the first row
    bool converged;
};

struct SweepOptions {
    double omega_max{0};
    long dimension_cap{kDefaultDimensionCap};
    int threads{1};
    QuadratureOptions quadrature{};
};

// The weak reference is evaluated on the same discrete bath as each oracle point.
std::vector<SweepRow> convergence_sweep(const SystemModel& model, const SpectralDensity& j, double beta,
                                        double lambda, const std::vector<SweepPoint>& grid,
                                        const SweepOptions& opt = {});

}  // namespace meanforce
