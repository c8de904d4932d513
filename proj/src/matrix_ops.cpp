#include "roid/matrix_ops.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace roid {

namespace {

constexpr double kRankCutoff = 1e-12;  // relative to sigma_max

Eigen::BDCSVD<Matrix> thin_svd(const Matrix& m) {
    return Eigen::BDCSVD<Matrix>(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

Matrix svt(const Matrix& m, double mu) {
    if (!m.allFinite()) throw InputError("svt: input must be finite");
    if (mu < 0) throw RangeError("svt: threshold must be nonnegative");
    auto svd = thin_svd(m);
    Vector s = (svd.singularValues().array() - mu).max(0.0);
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

Matrix ort(const Matrix& a, bool* unique) {
    if (!a.allFinite()) throw InputError("ort: input must be finite");
    if (a.rows() < a.cols()) throw DimensionError("ort: input must be tall or square");
    auto svd = thin_svd(a);
    if (unique) {
        const Vector& s = svd.singularValues();
        *unique = s.size() > 0 && s[s.size() - 1] > kRankCutoff * s[0];
    }
    return svd.matrixU() * svd.matrixV().transpose();
}

Matrix svds(const Matrix& m, Index k) {
    if (!m.allFinite()) throw InputError("svds: input must be finite");
    if (k < 1 || k > std::min(m.rows(), m.cols()))
        throw RangeError("svds: k must be in [1, min(rows, cols)]");
    auto svd = thin_svd(m);
    Matrix u = svd.matrixU().leftCols(k);
    for (Index j = 0; j < k; ++j) {
        Index imax = 0;
        u.col(j).cwiseAbs().maxCoeff(&imax);
        if (u(imax, j) < 0) u.col(j) = -u.col(j);
    }
    return u;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double schatten_norm(const Matrix& m, double p) {
    if (!m.allFinite()) throw InputError("schatten_norm: input must be finite");
    if (p <= 0) throw RangeError("schatten_norm: p must be positive");
    Vector s = Eigen::BDCSVD<Matrix>(m).singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0.0;
    const double cutoff = kRankCutoff * s[0];
    double sum = 0.0;
    for (Index i = 0; i < s.size(); ++i)
        if (s[i] > cutoff) sum += std::pow(s[i], p);
    return std::pow(sum, 1.0 / p);
}

double tensor_schatten(const DenseTensor3& t, double p, const std::array<double, 3>& weights) {
    if (p <= 0) throw RangeError("tensor_schatten: p must be positive");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0) throw ConfigError("tensor_schatten: weights must be nonnegative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw ConfigError("tensor_schatten: weights must sum to 1");
    double out = 0.0;
    for (int n = 1; n <= 3; ++n) out += weights[n - 1] * schatten_norm(unfold(t, n), p);
    return out;
}

}  // namespace roid
