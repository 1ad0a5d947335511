#include "meanforce/ultrastrong.hpp"

#include <cmath>

#include "meanforce/eigenops.hpp"

namespace meanforce {

double default_cluster_tolerance(const HermitianOperator& x) {
    return default_gap_tolerance(x);
}

ProjectorSet projector_set(const HermitianOperator& x, double cluster_tol) {
    if (cluster_tol < 0 || !std::isfinite(cluster_tol)) throw InvalidParameter("cluster_tol must be positive");
    if (cluster_tol == 0) cluster_tol = default_cluster_tolerance(x);
    const auto es = hermitian_eigensystem(x);
    const std::vector<double> ev(es.eigenvalues.data(), es.eigenvalues.data() + es.eigenvalues.size());
    ProjectorSet ps;
    for (const auto& c : cluster_sorted(ev, cluster_tol)) {
        Matrix u(x.dim(), static_cast<Eigen::Index>(c.size()));
        double s = 0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            u.col(k) = es.eigenvectors.col(c[k]);
            s += ev[c[k]];
        }
        ps.projectors.push_back(u * u.adjoint());
        ps.bases.push_back(std::move(u));
        ps.eigenvalues.push_back(s / c.size());
        if (c.size() > 1) ps.degenerate = true;
    }
    return ps;
}

HermitianOperator partitioned_hamiltonian(const HermitianOperator& hs, const ProjectorSet& ps) {
    if (ps.projectors.empty() || ps.projectors[0].rows() != hs.dim())
        throw DimensionMismatch("projector set does not match H_S");
    Matrix h = Matrix::Zero(hs.dim(), hs.dim());
    for (const auto& p : ps.projectors) h += p * hs.matrix() * p;
    return HermitianOperator(0.5 * (h + h.adjoint()));
}

HermitianOperator partitioned_hamiltonian(const HermitianOperator& hs, const HermitianOperator& x,
                                          double cluster_tol) {
    if (hs.dim() != x.dim()) throw DimensionMismatch("H_S and X dimensions differ");
    return partitioned_hamiltonian(hs, projector_set(x, cluster_tol));
}

DensityMatrix partitioned_gibbs(const HermitianOperator& hs, const ProjectorSet& ps, double beta) {
    if (!(beta >= 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be finite and >= 0");
    if (ps.bases.empty() || ps.bases[0].rows() != hs.dim())
        throw DimensionMismatch("projector set does not match H_S");
    // each block U^dag H U is diagonalized on its own, so the result is exactly
    // block diagonal in the coupling eigenbasis
    std::vector<Eigensystem> blocks;
    double emin = INFINITY;
    for (const auto& u : ps.bases) {
        Matrix hb = u.adjoint() * hs.matrix() * u;
        hb = 0.5 * (hb + hb.adjoint()).eval();
        blocks.push_back(hermitian_eigensystem(hb));
        emin = std::min(emin, blocks.back().eigenvalues(0));
    }
    Matrix rho = Matrix::Zero(hs.dim(), hs.dim());
    for (std::size_t n = 0; n < blocks.size(); ++n) {
        const Vector w = (-beta * (blocks[n].eigenvalues.array() - emin)).exp();
        const Matrix v = ps.bases[n] * blocks[n].eigenvectors;
        rho += v * w.cast<cplx>().asDiagonal() * v.adjoint();
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityMatrix(std::move(rho));
}

DensityMatrix dephased_gibbs(const HermitianOperator& hs, const ProjectorSet& ps, double beta) {
    const Matrix tau = gibbs_state(hs, beta).matrix();
    Matrix rho = Matrix::Zero(hs.dim(), hs.dim());
    for (const auto& p : ps.projectors) rho += p * tau * p;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityMatrix(std::move(rho));
}

DensityMatrix ultrastrong_mfg_state(const HermitianOperator& hs, const HermitianOperator& x, double beta,
                                    double cluster_tol) {
    if (hs.dim() != x.dim()) throw DimensionMismatch("H_S and X dimensions differ");
    return partitioned_gibbs(hs, projector_set(x, cluster_tol), beta);
}

ProjectorSet product_projector_set(const HermitianOperator& x1, const HermitianOperator& x2,
                                   const std::vector<int>& dims, double cluster_tol) {
    if (dims.size() != 2 || dims[0] != x1.dim() || dims[1] != x2.dim())
        throw DimensionMismatch("two-bath couplings do not match the subsystem dims");
    const auto p1 = projector_set(x1, cluster_tol), p2 = projector_set(x2, cluster_tol);
    ProjectorSet ps;
    for (std::size_t m = 0; m < p1.bases.size(); ++m)
        for (std::size_t n = 0; n < p2.bases.size(); ++n) {
            Matrix u = kron(p1.bases[m], p2.bases[n]);
            ps.projectors.push_back(u * u.adjoint());
            ps.bases.push_back(std::move(u));
            ps.eigenvalues.push_back(p1.eigenvalues[m] * p2.eigenvalues[n]);
        }
    ps.degenerate = p1.degenerate || p2.degenerate;
    return ps;
}

DensityMatrix ultrastrong_two_bath(const HermitianOperator& hs_total, const HermitianOperator& x1,
                                   const HermitianOperator& x2, const std::vector<int>& dims, double beta,
                                   double cluster_tol) {
    const auto ps = product_projector_set(x1, x2, dims, cluster_tol);
    if (hs_total.dim() != dims[0] * dims[1]) throw DimensionMismatch("H_S does not match the subsystem dims");
    return partitioned_gibbs(hs_total, ps, beta);
}

DensityMatrix conjecture_state(const HermitianOperator& hs, const HermitianOperator& x, double beta,
                               double cluster_tol) {
    if (hs.dim() != x.dim()) throw DimensionMismatch("H_S and X dimensions differ");
    return dephased_gibbs(hs, projector_set(x, cluster_tol), beta);
}

DensityMatrix conjecture_two_bath(const HermitianOperator& hs_total, const HermitianOperator& x1,
                                  const HermitianOperator& x2, const std::vector<int>& dims, double beta,
                                  double cluster_tol) {
    const auto ps = product_projector_set(x1, x2, dims, cluster_tol);
    if (hs_total.dim() != dims[0] * dims[1]) throw DimensionMismatch("H_S does not match the subsystem dims");
    return dephased_gibbs(hs_total, ps, beta);
}

}  // namespace meanforce
