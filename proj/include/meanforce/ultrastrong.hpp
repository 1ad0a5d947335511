// ultrastrong.hpp - partitioned-Hamiltonian states for one and two baths

#pragma once

#include <vector>

#include "meanforce/operator.hpp"

namespace meanforce {

struct ProjectorSet {
    std::vector<Matrix> projectors;
    std::vector<Matrix> bases;  // d x rank isometries spanning each eigenspace
    std::vector<double> eigenvalues;
    bool degenerate{false};
};

double default_cluster_tolerance(const HermitianOperator& x);

ProjectorSet projector_set(const HermitianOperator& x, double cluster_tol = 0);

// sum_n P_n H P_n
HermitianOperator partitioned_hamiltonian(const HermitianOperator& hs, const HermitianOperator& x,
                                          double cluster_tol = 0);
HermitianOperator partitioned_hamiltonian(const HermitianOperator& hs, const ProjectorSet& ps);

DensityMatrix ultrastrong_mfg_state(const HermitianOperator& hs, const HermitianOperator& x, double beta,
                                    double cluster_tol = 0);

// Projectors P_1m (x) P_2n built from local couplings on a (d1, d2) product space.
ProjectorSet product_projector_set(const HermitianOperator& x1, const HermitianOperator& x2,
                                   const std::vector<int>& dims, double cluster_tol = 0);

DensityMatrix ultrastrong_two_bath(const HermitianOperator& hs_total, const HermitianOperator& x1,
                                   const HermitianOperator& x2, const std::vector<int>& dims, double beta,
                                   double cluster_tol = 0);

// sum_n P_n tau_S P_n, the dephased Gibbs state used for comparison
DensityMatrix conjecture_state(const HermitianOperator& hs, const HermitianOperator& x, double beta,
                               double cluster_tol = 0);
DensityMatrix conjecture_two_bath(const HermitianOperator& hs_total, const HermitianOperator& x1,
                                  const HermitianOperator& x2, const std::vector<int>& dims, double beta,
                                  double cluster_tol = 0);

// Gibbs state of sum_n P_n H P_n, exponentiated block by block
DensityMatrix partitioned_gibbs(const HermitianOperator& hs, const ProjectorSet& ps, double beta);
DensityMatrix dephased_gibbs(const HermitianOperator& hs, const ProjectorSet& ps, double beta);

}  // namespace meanforce
