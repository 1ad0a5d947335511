#include "meanforce/oracle.hpp"

#include <cmath>
#include <future>
#include <limits>

#include "meanforce/ultrastrong.hpp"
#include "meanforce/weak.hpp"

namespace meanforce {

SpectralDensity DiscretizedBath::as_spectral_density() const {
    return SpectralDensity(DiscreteModes{omega, g});
}

DiscretizedBath discretize_bath(const SpectralDensity& j, int n_modes, double omega_max,
                                const QuadratureOptions& opt) {
    if (n_modes < 1) throw InvalidParameter("discretize_bath needs n_modes >= 1");
    if (j.is_discrete()) throw InvalidParameter("discretize_bath needs a continuum spectral density");
    if (!std::isfinite(omega_max)) throw InvalidParameter("omega_max must be finite");
    if (omega_max <= 0)
        omega_max = integration_upper_limit(j, [&](double w) { return j.over_omega(w); }, 0.0, opt);
    const auto gl = gauss_legendre(n_modes, 0.0, omega_max);
    DiscretizedBath b;
    for (int k = 0; k < n_modes; ++k) {
        const double w = gl.nodes[k];
        const double g = std::sqrt(std::max(j(w), 0.0) * gl.weights[k]);
        b.omega.push_back(w);
        b.g.push_back(g);
        b.q_disc += g * g / w;
    }
    return b;
}

int default_fock_cutoff(const DiscretizedBath& bath, double beta, double lambda, double x_norm) {
    if (bath.omega.empty()) throw InvalidParameter("empty bath");
    if (!(beta > 0)) throw InvalidParameter("default_fock_cutoff needs beta > 0");
    const double n = bose_occupation(beta, bath.omega.front());
    int c = std::max(2, static_cast<int>(std::floor(4 * n)) + 1);
    double shift = 0;
    for (std::size_t k = 0; k < bath.omega.size(); ++k) {
        const double a = lambda * x_norm * bath.g[k] / bath.omega[k];
        shift = std::max(shift, a * a + 3 * std::abs(a));
    }
    return c + static_cast<int>(std::ceil(shift));
}

namespace {

long total_dim(int d, int c, int n, long cap) {
    long total = d;
    for (int k = 0; k < n; ++k) {
        if (total > cap / c + 1) return std::numeric_limits<long>::max();
        total *= c;
    }
    return total;
}

}  // namespace

HermitianOperator build_total_hamiltonian(const SystemModel& model, const DiscretizedBath& bath, double lambda,
                                          long dimension_cap) {
    if (model.couplings.size() != 1) throw UnsupportedCombination("oracle supports single-bath models only");
    if (bath.fock_cutoff < 2) throw InvalidParameter("fock cutoff must be >= 2");
    if (bath.omega.size() != bath.g.size() || bath.omega.empty()) throw InvalidParameter("malformed bath");
    const int d = static_cast<int>(model.hamiltonian.dim());
    const int c = bath.fock_cutoff, n = bath.n_modes();
    const long dim = total_dim(d, c, n, dimension_cap);
    if (dim > dimension_cap)
        throw DimensionCap("total dimension exceeds cap " + std::to_string(dimension_cap));
    const long r = dim / d;

    const Matrix& hs = model.hamiltonian.matrix();
    const Matrix& x = model.couplings[0].matrix();
    const Matrix hs_eff = hs + lambda * lambda * bath.q_disc * x * x;

    // bath-only parts: diagonal number operators and the real coupling sum_k g_k (b_k + b_k^dag)
    Eigen::VectorXd hr = Eigen::VectorXd::Zero(r);
    Eigen::MatrixXd br = Eigen::MatrixXd::Zero(r, r);
    long stride = r;
    for (int k = 0; k < n; ++k) {
        stride /= c;
        for (long i = 0; i < r; ++i) {
            const long level = (i / stride) % c;
            hr(i) += bath.omega[k] * level;
            if (level + 1 < c) {
                const double amp = bath.g[k] * std::sqrt(double(level + 1));
                br(i + stride, i) += amp;
                br(i, i + stride) += amp;
            }
        }
    }

    Matrix h = Matrix::Zero(dim, dim);
    for (int s = 0; s < d; ++s)
        for (int t = 0; t < d; ++t) {
            auto blk = h.block(s * r, t * r, r, r);
            if (hs_eff(s, t) != 0.0) blk.diagonal().array() += hs_eff(s, t);
            if (x(s, t) != 0.0) blk += (lambda * x(s, t)) * br.cast<cplx>();
        }
    for (int s = 0; s < d; ++s) h.block(s * r, s * r, r, r).diagonal() += hr.cast<cplx>();
    return HermitianOperator(std::move(h));
}

OracleResult exact_reduced_gibbs(const HermitianOperator& h_sr, const OracleDims& dims, double beta,
                                 long dimension_cap) {
    if (!(beta >= 0) || !std::isfinite(beta)) throw InvalidParameter("beta must be finite and >= 0");
    const long dim = h_sr.dim();
    if (dim > dimension_cap) throw DimensionCap("total dimension exceeds cap");
    const int d = dims.system_dim, c = dims.fock_cutoff, n = dims.n_modes;
    if (total_dim(d, c, n, dimension_cap) != dim)
        throw DimensionMismatch("oracle dims do not match the Hamiltonian");
    const long r = dim / d;

    const auto es = hermitian_eigensystem(h_sr);
    Vector w = (-beta * (es.eigenvalues.array() - es.eigenvalues(0))).exp();
    w /= w.sum();
    const double wmax = w.maxCoeff();

    // rho_S = sum_k w_k N_k^T conj(N_k) with N_k(r, s) = v_k[s r_dim + r]
    Matrix rho = Matrix::Zero(d, d);
    Eigen::VectorXd pop = Eigen::VectorXd::Zero(dim);
    for (long k = 0; k < dim; ++k) {
        if (w(k) < 1e-18 * wmax) continue;
        Eigen::Map<const Matrix> nk(es.eigenvectors.col(k).data(), r, d);
        rho.noalias() += w(k) * (nk.transpose() * nk.conjugate());
        pop += w(k) * es.eigenvectors.col(k).cwiseAbs2();
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    double diag = 0;
    long stride = r;
    for (int m = 0; m < n; ++m) {
        stride /= c;
        double top = 0;
        for (long i = 0; i < dim; ++i)
            if (((i % r) / stride) % c == c - 1) top += pop(i);
        diag = std::max(diag, top);
    }
    return OracleResult{DensityMatrix(std::move(rho)), dims, diag, diag < kTruncationThreshold};
}

OracleResult oracle_state(const SystemModel& model, const DiscretizedBath& bath, double beta, double lambda,
                          long dimension_cap) {
    const auto h = build_total_hamiltonian(model, bath, lambda, dimension_cap);
    return exact_reduced_gibbs(h, {static_cast<int>(model.hamiltonian.dim()), bath.fock_cutoff, bath.n_modes()},
                               beta, dimension_cap);
}

std::vector<SweepRow> convergence_sweep(const SystemModel& model, const SpectralDensity& j, double beta,
                                        double lambda, const std::vector<SweepPoint>& grid,
                                        const SweepOptions& opt) {
    if (model.couplings.size() != 1) throw UnsupportedCombination("oracle supports single-bath models only");
    const auto ultra = ultrastrong_mfg_state(model.hamiltonian, model.couplings[0], beta);

    struct Point {
        SweepRow row;
        Matrix rho;
    };
    auto run = [&](const SweepPoint& p) {
        auto bath = discretize_bath(j, p.n_modes, opt.omega_max, opt.quadrature);
        bath.fock_cutoff = p.fock_cutoff;
        auto orc = oracle_state(model, bath, beta, lambda, opt.dimension_cap);
        WeakOptions wo;
        wo.quadrature = opt.quadrature;
        auto weak = weak_mfg_state(model, bath.as_spectral_density(), beta, lambda, wo);
        SweepRow row{p.n_modes,
                     p.fock_cutoff,
                     lambda,
                     beta,
                     trace_distance(orc.rho_exact, weak.rho),
                     trace_distance(orc.rho_exact, ultra),
                     orc.truncation_diagnostic,
                     std::numeric_limits<double>::quiet_NaN(),
                     orc.converged};
        return Point{row, orc.rho_exact.matrix()};
    };

    std::vector<Point> pts(grid.size());
    const std::size_t threads = std::max(1, opt.threads);
    for (std::size_t base = 0; base < grid.size(); base += threads) {
        std::vector<std::future<Point>> jobs;
        for (std::size_t i = base; i < std::min(grid.size(), base + threads); ++i)
            jobs.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred, run, grid[i]));
        for (std::size_t i = 0; i < jobs.size(); ++i) pts[base + i] = jobs[i].get();
    }

    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) pts[i].row.trace_distance_to_previous = trace_distance(pts[i].rho, pts[i - 1].rho);
        rows.push_back(pts[i].row);
    }
    return rows;
}

}  // namespace meanforce
