#include "meanforce/serialize.hpp"

namespace meanforce {

nlohmann::json operator_to_json(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("operator_to_json: matrix not square");
    std::vector<double> re, im;
    re.reserve(m.size());
    im.reserve(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    return {{"dim", m.rows()}, {"re", re}, {"im", im}};
}

Matrix operator_from_json(const nlohmann::json& j) {
    const auto d = j.at("dim").get<long>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (d < 1 || re.size() != std::size_t(d * d) || im.size() != re.size())
        throw DimensionMismatch("operator_from_json: array sizes do not match dim");
    Matrix m(d, d);
    for (long i = 0; i < d; ++i)
        for (long k = 0; k < d; ++k) m(i, k) = cplx(re[i * d + k], im[i * d + k]);
    return m;
}

}  // namespace meanforce
