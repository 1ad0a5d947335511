#include "meanforce/eigenops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace meanforce {

Matrix SystemModel::coupling_full(std::size_t i) const {
    if (!two_bath()) return couplings.at(i).matrix();
    const auto& x = couplings.at(i).matrix();
    return i == 0 ? kron(x, ops::identity(dims[1])) : kron(ops::identity(dims[0]), x);
}

SystemModel single_bath_model(HermitianOperator h, HermitianOperator x) {
    if (h.dim() != x.dim()) throw DimensionMismatch("H_S and X dimensions differ");
    const int d = static_cast<int>(h.dim());
    return SystemModel{std::move(h), {std::move(x)}, {d}};
}

const EigenOperator& EigenOpDecomposition::zero() const {
    for (const auto& p : pairs)
        if (p.omega == 0.0) return p;
    throw Error("decomposition without omega = 0 entry");
}

std::vector<std::vector<int>> cluster_sorted(const std::vector<double>& values, double tol) {
    std::vector<std::vector<int>> out;
    for (int i = 0; i < static_cast<int>(values.size()); ++i) {
        if (i > 0) {
            const double gap = values[i] - values[i - 1];
            if (gap <= tol) {
                out.back().push_back(i);
                continue;
            }
            if (gap <= 10 * tol)
                throw AmbiguousGapClustering("values " + std::to_string(values[i - 1]) + " and " +
                                             std::to_string(values[i]) + " lie within the clustering guard band");
        }
        out.push_back({i});
    }
    return out;
}

double default_gap_tolerance(const HermitianOperator& h) {
    const double n = hermitian_eigensystem(h).eigenvalues.cwiseAbs().maxCoeff();
    return 1e-9 * (n > 0 ? n : 1.0);
}

EigenOpDecomposition decompose(const HermitianOperator& hs, const HermitianOperator& x, double gap_tol) {
    if (hs.dim() != x.dim()) throw DimensionMismatch("decompose: H_S and X dimensions differ");
    if (gap_tol < 0 || !std::isfinite(gap_tol)) throw InvalidParameter("gap_tol must be positive");
    if (gap_tol == 0) gap_tol = default_gap_tolerance(hs);

    const auto es = hermitian_eigensystem(hs);
    const std::vector<double> ev(es.eigenvalues.data(), es.eigenvalues.data() + es.eigenvalues.size());
    const auto levels = cluster_sorted(ev, gap_tol);
    const int nl = static_cast<int>(levels.size());
    std::vector<double> energy(nl);
    for (int a = 0; a < nl; ++a) {
        double s = 0;
        for (int i : levels[a]) s += ev[i];
        energy[a] = s / levels[a].size();
    }

    const Matrix xe = es.eigenvectors.adjoint() * x.matrix() * es.eigenvectors;
    const double xscale = std::max(max_abs(x.matrix()), 1.0);

    // nonzero blocks P_a X P_b with E_a > E_b; their adjoints give the negative side
    struct Block {
        double gap;
        int a, b;
    };
    std::vector<Block> blocks;
    for (int a = 0; a < nl; ++a)
        for (int b = 0; b < a; ++b) {
            double m = 0;
            for (int i : levels[a])
                for (int j : levels[b]) m = std::max(m, std::abs(xe(i, j)));
            if (m > 1e-14 * xscale) blocks.push_back({energy[a] - energy[b], a, b});
        }
    std::sort(blocks.begin(), blocks.end(), [](const Block& l, const Block& r) { return l.gap < r.gap; });
    std::vector<double> gaps;
    for (const auto& b : blocks) gaps.push_back(b.gap);
    const auto classes = cluster_sorted(gaps, gap_tol);

    const auto d = xe.rows();
    auto block_matrix = [&](int a, int b) {
        Matrix m = Matrix::Zero(d, d);
        for (int i : levels[a])
            for (int j : levels[b]) m(i, j) = xe(i, j);
        return m;
    };
    auto to_lab = [&](const Matrix& m) { return Matrix(es.eigenvectors * m * es.eigenvectors.adjoint()); };

    EigenOpDecomposition dec;
    dec.gap_tolerance = gap_tol;
    Matrix x0 = Matrix::Zero(d, d);
    for (int a = 0; a < nl; ++a) x0 += block_matrix(a, a);
    std::vector<EigenOperator> positive;
    for (const auto& c : classes) {
        Matrix m = Matrix::Zero(d, d);
        double w = 0;
        for (int k : c) {
            m += block_matrix(blocks[k].a, blocks[k].b);
            w += blocks[k].gap;
        }
        positive.push_back({w / c.size(), to_lab(m)});
    }
    for (auto it = positive.rbegin(); it != positive.rend(); ++it)
        dec.pairs.push_back({-it->omega, it->op.adjoint()});
    dec.pairs.push_back({0.0, to_lab(x0)});
    for (auto& p : positive) dec.pairs.push_back(std::move(p));
    return dec;
}

XSquared is_x_squared_identity(const HermitianOperator& x, double tol) {
    const Matrix x2 = x.matrix() * x.matrix();
    const double c = x2.trace().real() / double(x.dim());
    const bool id = max_abs(x2 - c * Matrix::Identity(x.dim(), x.dim())) < tol;
    return {id, c};
}

}  // namespace meanforce
