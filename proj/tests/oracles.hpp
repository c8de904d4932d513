// Test-only reference implementations, kept independent of the library's
// computation paths: unfoldings by direct index-map enumeration, mode
// products by direct summation, singular values via Jacobi SVD.
#pragma once

#include <Eigen/QR>
#include <Eigen/SVD>
#include <random>

#include "roid/tensor.hpp"
#include "roid/types.hpp"

namespace oracle {

using roid::DenseTensor3;
using roid::Dims3;
using roid::Index;
using roid::Matrix;
using roid::Vector;

// j = 1 + sum_{k != n} (i_k - 1) * J_k, J_k = prod_{m < k, m != n} I_m.
inline Index column_index(Dims3 d, int mode, Index i1, Index i2, Index i3) {
    const Index idx[3] = {i1, i2, i3};
    const Index ext[3] = {d.i1, d.i2, d.i3};
    Index j = 1;
    Index stride = 1;
    for (int k = 0; k < 3; ++k) {
        if (k == mode - 1) continue;
        j += (idx[k] - 1) * stride;
        stride *= ext[k];
    }
    return j;
}

inline Matrix unfold(const DenseTensor3& t, int mode) {
    const Dims3 d = t.dims();
    Matrix out(d.extent(mode), d.count() / d.extent(mode));
    for (Index i1 = 1; i1 <= d.i1; ++i1)
        for (Index i2 = 1; i2 <= d.i2; ++i2)
            for (Index i3 = 1; i3 <= d.i3; ++i3) {
                const Index idx[3] = {i1, i2, i3};
                out(idx[mode - 1] - 1, column_index(d, mode, i1, i2, i3) - 1) = t(i1, i2, i3);
            }
    return out;
}

inline DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& m, int mode) {
    const Dims3 d = t.dims();
    Dims3 od = d;
    if (mode == 1) od.i1 = m.rows();
    if (mode == 2) od.i2 = m.rows();
    if (mode == 3) od.i3 = m.rows();
    Vector values = Vector::Zero(od.count());
    for (Index j1 = 1; j1 <= od.i1; ++j1)
        for (Index j2 = 1; j2 <= od.i2; ++j2)
            for (Index j3 = 1; j3 <= od.i3; ++j3) {
                double sum = 0.0;
                const Index contracted = d.extent(mode);
                for (Index k = 1; k <= contracted; ++k) {
                    const Index i1 = mode == 1 ? k : j1;
                    const Index i2 = mode == 2 ? k : j2;
                    const Index i3 = mode == 3 ? k : j3;
                    const Index jrow = mode == 1 ? j1 : (mode == 2 ? j2 : j3);
                    sum += t(i1, i2, i3) * m(jrow - 1, k - 1);
                }
                values[(j1 - 1) + od.i1 * ((j2 - 1) + od.i2 * (j3 - 1))] = sum;
            }
    return DenseTensor3(od, std::move(values));
}

inline Vector singular_values(const Matrix& m) {
    return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

inline double nuclear_norm(const Matrix& m) { return singular_values(m).sum(); }

// Deterministic test randomness (independent of the library's RNG).
inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& gen) {
    std::normal_distribution<double> dist;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = dist(gen);
    return m;
}

inline DenseTensor3 gaussian_tensor(Dims3 d, std::mt19937_64& gen) {
    std::normal_distribution<double> dist;
    Vector v(d.count());
    for (Index i = 0; i < v.size(); ++i) v[i] = dist(gen);
    return DenseTensor3(d, std::move(v));
}

inline Matrix random_orthonormal(Index rows, Index cols, std::mt19937_64& gen) {
    const Matrix g = gaussian_matrix(rows, cols, gen);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

}  // namespace oracle
