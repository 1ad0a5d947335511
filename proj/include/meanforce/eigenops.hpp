// eigenops.hpp - Bohr-frequency decomposition of a coupling operator

#pragma once

#include <vector>

#include "meanforce/operator.hpp"

namespace meanforce {

// H_S plus one coupling operator per bath. With two baths, dims holds the
// subsystem layout and each coupling acts on its own factor.
struct SystemModel {
    HermitianOperator hamiltonian;
    std::vector<HermitianOperator> couplings;
    std::vector<int> dims;

    bool two_bath() const { return couplings.size() == 2; }
    Matrix coupling_full(std::size_t i) const;  // coupling i embedded in the full space
};

SystemModel single_bath_model(HermitianOperator h, HermitianOperator x);

struct EigenOperator {
    double omega;
    Matrix op;
};

struct EigenOpDecomposition {
    std::vector<EigenOperator> pairs;  // ascending in omega, omega = 0 always present
    double gap_tolerance{0};

    const EigenOperator& zero() const;
};

// Groups ascending values into runs whose neighbours lie within tol. Throws
// AmbiguousGapClustering when two neighbours sit in the guard band (tol, 10 tol].
std::vector<std::vector<int>> cluster_sorted(const std::vector<double>& values, double tol);

double default_gap_tolerance(const HermitianOperator& h);

EigenOpDecomposition decompose(const HermitianOperator& hs, const HermitianOperator& x, double gap_tol = 0);

struct XSquared {
    bool identity;
    double c;
};
XSquared is_x_squared_identity(const HermitianOperator& x, double tol = 1e-10);

}  // namespace meanforce
