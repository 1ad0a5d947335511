#include "meanforce/weak.hpp"

#include <cmath>
#include <sstream>

namespace meanforce {

namespace {

void require_single_bath(const SystemModel& m) {
    if (m.couplings.size() != 1)
        throw UnsupportedCombination("weak coupling state is defined for a single bath only");
}

std::vector<double> frequencies(const EigenOpDecomposition& dec) {
    std::vector<double> w;
    for (const auto& p : dec.pairs) w.push_back(p.omega);
    return w;
}

// S_n = sum_{m != n} X_m / (omega_m - omega_n); the m != n double sum is linear in X_m
Matrix detuned_sum(const EigenOpDecomposition& dec, std::size_t n) {
    const auto& pn = dec.pairs[n];
    Matrix s = Matrix::Zero(pn.op.rows(), pn.op.cols());
    for (std::size_t m = 0; m < dec.pairs.size(); ++m)
        if (m != n) s += dec.pairs[m].op / (dec.pairs[m].omega - pn.omega);
    return s;
}

// [X_m, X_n^dag tau] + [tau X_n, X_m^dag] summed over m != n
Matrix cross_term(const Matrix& s, const Matrix& xn, const Matrix& tau) {
    const Matrix y = xn.adjoint() * tau, z = tau * xn;
    const Matrix sd = s.adjoint();
    return s * y - y * s + z * sd - sd * z;
}

double margin_from(const EigenOpDecomposition& dec, const Matrix& tau, const std::vector<double>& dvals,
                   double beta, double lambda) {
    double acc = 0;
    for (std::size_t n = 0; n < dec.pairs.size(); ++n) {
        const auto& x = dec.pairs[n].op;
        acc += (tau * x * x.adjoint()).trace().real() * dvals[n];
    }
    return std::abs(beta * lambda * lambda * acc);
}

}  // namespace

Validity classify(double margin, const ValidityThresholds& t) {
    if (margin >= t.invalid) return Validity::Invalid;
    if (margin >= t.marginal) return Validity::Marginal;
    return Validity::Valid;
}

const char* to_string(Validity v) {
    switch (v) {
        case Validity::Valid: return "valid";
        case Validity::Marginal: return "marginal";
        case Validity::Invalid: return "invalid";
    }
    return "?";
}

const char* to_string(Normalization n) {
    return n == Normalization::Binomial ? "binomial" : "exact";
}

WeakMfgResult weak_mfg_state(const SystemModel& model, const SpectralDensity& j, double beta, double lambda,
                             const WeakOptions& opt) {
    require_single_bath(model);
    if (!(beta > 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be positive and finite");
    if (!std::isfinite(lambda)) throw InvalidParameter("lambda must be finite");
    const auto& hs = model.hamiltonian;
    const auto& x = model.couplings[0];

    const auto dec = decompose(hs, x, opt.gap_tolerance);
    const auto x2 = is_x_squared_identity(x);
    auto bc = bath_coefficients(j, beta, frequencies(dec), true, opt.quadrature);
    DensityMatrix tau = gibbs_state(hs, beta);
    const Matrix& t = tau.matrix();

    const auto npairs = dec.pairs.size();
    std::vector<double> dval(npairs);
    for (std::size_t n = 0; n < npairs; ++n) dval[n] = d_coefficient(bc.a[n], bc.q, x2.identity);

    const bool binomial = opt.normalization == Normalization::Binomial;
    Matrix corr = Matrix::Zero(t.rows(), t.cols());
    double norm_shift = 0;  // sum_n Tr[tau X_n X_n^dag] D_n
    for (std::size_t n = 0; n < npairs; ++n) {
        const auto& p = dec.pairs[n];
        const Matrix xd = p.op.adjoint();
        const Matrix txx = t * p.op * xd;
        const double tr = txx.trace().real();
        norm_shift += tr * dval[n];
        // [X_0^dag, tau X_0] vanishes since X_0 commutes with tau
        if (p.omega != 0.0) corr += (xd * t * p.op - t * p.op * xd) * bc.da[n];
        corr += beta * (binomial ? Matrix(txx - tr * t) : txx) * dval[n];
        corr += cross_term(detuned_sum(dec, n), p.op, t) * dval[n];
    }

    const double l2 = lambda * lambda;
    Matrix rho = t + l2 * corr;
    if (!binomial) rho /= 1.0 + l2 * beta * norm_shift;
    const double herm = hermiticity_residual(rho);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    rho /= tr;

    const double margin = std::abs(beta * l2 * norm_shift);
    const double cnorm = coherence_commutator_norm(rho, hs.matrix());
    DensityMatrix out(std::move(rho));
    std::vector<std::string> warnings;
    const auto v = classify(margin, opt.thresholds);
    if (v == Validity::Invalid) {
        std::ostringstream os;
        os << "validity margin " << margin << " >= " << opt.thresholds.invalid;
        warnings.push_back(os.str());
    }
    if (out.min_eigenvalue() < -1e-10) {
        std::ostringstream os;
        os << "second-order state has negative eigenvalue " << out.min_eigenvalue();
        warnings.push_back(os.str());
    }
    return WeakMfgResult{std::move(out), std::move(tau), margin, v, cnorm, std::move(bc), herm,
                         std::abs(tr - 1.0), std::move(warnings)};
}

double weak_validity_margin(const SystemModel& model, const SpectralDensity& j, double beta, double lambda,
                            const WeakOptions& opt) {
    require_single_bath(model);
    if (!(beta > 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be positive and finite");
    const auto& x = model.couplings[0];
    const auto dec = decompose(model.hamiltonian, x, opt.gap_tolerance);
    const auto x2 = is_x_squared_identity(x);
    const auto bc = bath_coefficients(j, beta, frequencies(dec), false, opt.quadrature);
    std::vector<double> dval;
    for (std::size_t n = 0; n < dec.pairs.size(); ++n) dval.push_back(d_coefficient(bc.a[n], bc.q, x2.identity));
    return margin_from(dec, gibbs_state(model.hamiltonian, beta).matrix(), dval, beta, lambda);
}

double coherence_commutator_norm(const Matrix& rho, const Matrix& hs) {
    if (rho.rows() != hs.rows()) throw DimensionMismatch("coherence_commutator_norm: dimension mismatch");
    return max_abs(rho * hs - hs * rho);
}

DensityMatrix low_temperature_state(const SystemModel& model, const SpectralDensity& j, double lambda,
                                    const WeakOptions& opt) {
    require_single_bath(model);
    const auto& hs = model.hamiltonian;
    const auto& x = model.couplings[0];
    const auto dec = decompose(hs, x, opt.gap_tolerance);
    const auto es = hermitian_eigensystem(hs);
    if (es.eigenvalues.size() > 1 && es.eigenvalues(1) - es.eigenvalues(0) <= dec.gap_tolerance)
        throw DegenerateGroundState("ground state of H_S is degenerate");
    const Matrix p0 = es.eigenvectors.col(0) * es.eigenvectors.col(0).adjoint();
    const bool x2id = is_x_squared_identity(x).identity;
    const double q = reorganization_energy(j, opt.quadrature);

    // With tau = |0><0| only lowering operators into the ground state survive
    // (omega_n <= 0); there A and dA reduce to regular integrals with n_beta = 0.
    Matrix corr = Matrix::Zero(p0.rows(), p0.cols());
    for (std::size_t n = 0; n < dec.pairs.size(); ++n) {
        const auto& p = dec.pairs[n];
        if (p.omega > 0) continue;
        const double a = -p.omega;
        double av = q;
        if (a > 0) {
            av = spectral_integral(j, [a](double w) { return 1.0 / (w + a); }, opt.quadrature).value;
            const double dv = spectral_integral(j, [a](double w) { return 1.0 / ((w + a) * (w + a)); },
                                                opt.quadrature)
                                  .value;
            const Matrix xd = p.op.adjoint();
            corr += (xd * p0 * p.op - p0 * p.op * xd) * dv;
        }
        corr += cross_term(detuned_sum(dec, n), p.op, p0) * d_coefficient(av, q, x2id);
    }
    Matrix rho = p0 + lambda * lambda * corr;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityMatrix(std::move(rho));
}

DensityMatrix high_temperature_reference(const SystemModel& model, double beta) {
    return gibbs_state(model.hamiltonian, beta);
}

}  // namespace meanforce
