// operator.hpp - dense Hermitian operators, density matrices and the primitives on them

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "meanforce/errors.hpp"

namespace meanforce {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;

double max_abs(const Matrix& m);
double hermiticity_residual(const Matrix& m);

// Immutable Hermitian matrix. Construction rejects anything off by more than
// kHermitianTol entrywise; nothing is symmetrized on the way in.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix m, double tol = kHermitianTol);

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    bool is_real() const;

private:
    Matrix m_;
};

// Unit-trace Hermitian operator. Positivity is not enforced; the smallest
// eigenvalue is stored as computed.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix m, double tol = kTraceTol);

    Eigen::Index dim() const { return op_.dim(); }
    const Matrix& matrix() const { return op_.matrix(); }
    const HermitianOperator& op() const { return op_; }
    double min_eigenvalue() const { return min_eig_; }

private:
    HermitianOperator op_;
    double min_eig_;
};

struct Eigensystem {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // columns
};

Eigensystem hermitian_eigensystem(const HermitianOperator& a);
Eigensystem hermitian_eigensystem(const Matrix& a);

// exp(-beta H)/Z, shifted by the lowest eigenvalue so large beta cannot overflow
DensityMatrix gibbs_state(const HermitianOperator& h, double beta);
DensityMatrix gibbs_state(const Eigensystem& es, double beta);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                            const std::vector<int>& keep);
Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims, const std::vector<int>& keep);

HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b);
Matrix kron(const Matrix& a, const Matrix& b);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const Matrix& a, const Matrix& b);

// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2; negative eigenvalues of a are clipped
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

namespace ops {
Matrix identity(int d);
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();
Matrix sigma_plus();   // |e><g|, index 0 is the sigma_z = +1 state
Matrix sigma_minus();
Matrix projector(int d, int i);
Matrix ket_bra(int d, int i, int j);
}  // namespace ops

}  // namespace meanforce
