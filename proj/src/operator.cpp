#include "meanforce/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace meanforce {

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_residual(const Matrix& m) {
    return max_abs(m - m.adjoint());
}

HermitianOperator::HermitianOperator(Matrix m, double tol) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols())
        throw DimensionMismatch("operator must be square with dim >= 1");
    if (!m_.allFinite()) throw NonHermitianInput("operator has non-finite entries");
    const double r = hermiticity_residual(m_);
    if (r > tol)
        throw NonHermitianInput("operator not Hermitian (residual " + std::to_string(r) + ")");
}

bool HermitianOperator::is_real() const {
    return m_.imag().cwiseAbs().maxCoeff() == 0.0;
}

DensityMatrix::DensityMatrix(Matrix m, double tol) : op_(std::move(m)) {
    const double tr = op_.matrix().trace().real();
    if (std::abs(tr - 1.0) > tol)
        throw InvalidParameter("density matrix trace " + std::to_string(tr) + " != 1");
    min_eig_ = hermitian_eigensystem(op_).eigenvalues(0);
}

Eigensystem hermitian_eigensystem(const Matrix& a) {
    Eigensystem es;
    // the real solver is several times faster and exact zero imaginary parts are common
    if (a.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(a.real());
        if (s.info() != Eigen::Success) throw Error("eigensolver failed");
        es.eigenvalues = s.eigenvalues();
        es.eigenvectors = s.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> s(a);
        if (s.info() != Eigen::Success) throw Error("eigensolver failed");
        es.eigenvalues = s.eigenvalues();
        es.eigenvectors = s.eigenvectors();
    }
    return es;
}

Eigensystem hermitian_eigensystem(const HermitianOperator& a) {
    return hermitian_eigensystem(a.matrix());
}

DensityMatrix gibbs_state(const Eigensystem& es, double beta) {
    if (!std::isfinite(beta) || beta < 0) throw InvalidParameter("beta must be finite and >= 0");
    const auto n = es.eigenvalues.size();
    if (beta == 0.0) return DensityMatrix(Matrix::Identity(n, n) / double(n));
    const double e0 = es.eigenvalues(0);
    Vector w = (-beta * (es.eigenvalues.array() - e0)).exp();
    w /= w.sum();
    Matrix rho = es.eigenvectors * w.cast<cplx>().asDiagonal() * es.eigenvectors.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityMatrix(std::move(rho));
}

DensityMatrix gibbs_state(const HermitianOperator& h, double beta) {
    if (!std::isfinite(beta) || beta < 0) throw InvalidParameter("beta must be finite and >= 0");
    if (beta == 0.0) return DensityMatrix(Matrix::Identity(h.dim(), h.dim()) / double(h.dim()));
    return gibbs_state(hermitian_eigensystem(h), beta);
}

Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims, const std::vector<int>& keep) {
    if (dims.empty() || keep.empty()) throw DimensionMismatch("partial_trace: empty dims or keep");
    long total = 1;
    for (int d : dims) {
        if (d < 1) throw DimensionMismatch("partial_trace: dims must be positive");
        total *= d;
    }
    if (total != rho.rows() || rho.rows() != rho.cols())
        throw DimensionMismatch("partial_trace: product of dims != matrix dimension");
    const int nf = static_cast<int>(dims.size());
    std::vector<bool> kept(nf, false);
    for (int k : keep) {
        if (k < 0 || k >= nf || kept[k]) throw DimensionMismatch("partial_trace: bad keep index");
        kept[k] = true;
    }

    // strides for row-major multi-index (factor 0 most significant)
    std::vector<long> stride(nf);
    long s = 1;
    for (int f = nf - 1; f >= 0; --f) {
        stride[f] = s;
        s *= dims[f];
    }
    long dk = 1, dt = 1;
    for (int f = 0; f < nf; ++f) (kept[f] ? dk : dt) *= dims[f];

    // split a flat index into (kept part, traced part) offsets
    auto offsets = [&](bool want_kept) {
        long n = want_kept ? dk : dt;
        std::vector<long> off(n, 0);
        for (long i = 0; i < n; ++i) {
            long rem = i, o = 0;
            for (int f = nf - 1; f >= 0; --f) {
                if (kept[f] != want_kept) continue;
                o += (rem % dims[f]) * stride[f];
                rem /= dims[f];
            }
            off[i] = o;
        }
        return off;
    };
    const auto ko = offsets(true), to = offsets(false);

    Matrix out = Matrix::Zero(dk, dk);
    for (long i = 0; i < dk; ++i)
        for (long j = 0; j < dk; ++j) {
            cplx acc = 0;
            for (long t = 0; t < dt; ++t) acc += rho(ko[i] + to[t], ko[j] + to[t]);
            out(i, j) = acc;
        }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
    Matrix r = partial_trace(rho.matrix(), dims, keep);
    r /= r.trace().real();
    return DensityMatrix(std::move(r));
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(kron(a.matrix(), b.matrix()));
}

double trace_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("trace_distance: dimension mismatch");
    Matrix d = a - b;
    d = 0.5 * (d + d.adjoint()).eval();
    return 0.5 * hermitian_eigensystem(d).eigenvalues.cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return trace_distance(a.matrix(), b.matrix());
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("fidelity: dimension mismatch");
    auto es = hermitian_eigensystem(a.op());
    Vector s = es.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    Matrix sa = es.eigenvectors * s.cast<cplx>().asDiagonal() * es.eigenvectors.adjoint();
    Matrix m = sa * b.matrix() * sa;
    m = 0.5 * (m + m.adjoint()).eval();
    const double f = hermitian_eigensystem(m).eigenvalues.cwiseMax(0.0).cwiseSqrt().sum();
    return f * f;
}

namespace ops {
Matrix identity(int d) { return Matrix::Identity(d, d); }
Matrix sigma_x() { return (Matrix(2, 2) << 0, 1, 1, 0).finished(); }
Matrix sigma_y() { return (Matrix(2, 2) << 0, cplx(0, -1), cplx(0, 1), 0).finished(); }
Matrix sigma_z() { return (Matrix(2, 2) << 1, 0, 0, -1).finished(); }
Matrix sigma_plus() { return (Matrix(2, 2) << 0, 1, 0, 0).finished(); }
Matrix sigma_minus() { return (Matrix(2, 2) << 0, 0, 1, 0).finished(); }
Matrix projector(int d, int i) { return ket_bra(d, i, i); }
Matrix ket_bra(int d, int i, int j) {
    Matrix m = Matrix::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}
}  // namespace ops

}  // namespace meanforce
