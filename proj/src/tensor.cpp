#include "roid/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace roid {

namespace {

void check_dims_positive(Dims3 d) {
    if (d.i1 <= 0 || d.i2 <= 0 || d.i3 <= 0)
        throw DimensionError("tensor dims must be positive");
}

void check_same_dims(Dims3 a, Dims3 b, const char* what) {
    if (!(a == b)) throw DimensionError(std::string(what) + ": tensor dims mismatch");
}

void check_mode(int mode) {
    if (mode < 1 || mode > 3) throw RangeError("mode must be 1, 2 or 3");
}

}  // namespace

DenseTensor3::DenseTensor3(Dims3 dims) : dims_(dims), data_(Vector::Zero(dims.count())) {
    check_dims_positive(dims);
}

DenseTensor3::DenseTensor3(Dims3 dims, Vector values) : dims_(dims), data_(std::move(values)) {
    check_dims_positive(dims);
    if (data_.size() != dims.count())
        throw DimensionError("value count does not match dims");
    if (!data_.allFinite())
        throw InputError("tensor values must be finite");
}

DenseTensor3 DenseTensor3::constant(Dims3 dims, double value) {
    check_dims_positive(dims);
    return DenseTensor3(dims, Vector::Constant(dims.count(), value));
}

ObservationSet::ObservationSet(Dims3 dims, std::vector<Observation> entries)
    : dims_(dims), entries_(std::move(entries)) {
    check_dims_positive(dims);
    linear_.reserve(entries_.size());
    for (const Observation& e : entries_) {
        if (e.i1 < 1 || e.i1 > dims.i1 || e.i2 < 1 || e.i2 > dims.i2 || e.i3 < 1 ||
            e.i3 > dims.i3)
            throw ValidationError("observation index (" + std::to_string(e.i1) + "," +
                                  std::to_string(e.i2) + "," + std::to_string(e.i3) +
                                  ") outside dims");
        if (!std::isfinite(e.value)) throw InputError("observation value must be finite");
        linear_.push_back((e.i1 - 1) + dims.i1 * ((e.i2 - 1) + dims.i2 * (e.i3 - 1)));
    }
    std::vector<Index> sorted = linear_;
    std::sort(sorted.begin(), sorted.end());
    const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
        const Index off = *dup;
        const Index i1 = off % dims.i1 + 1;
        const Index i2 = (off / dims.i1) % dims.i2 + 1;
        const Index i3 = off / (dims.i1 * dims.i2) + 1;
        throw ValidationError("duplicate observation index (" + std::to_string(i1) + "," +
                              std::to_string(i2) + "," + std::to_string(i3) + ")");
    }
}

DenseTensor3 ObservationSet::mask() const {
    Vector v = Vector::Zero(dims_.count());
    for (Index off : linear_) v[off] = 1.0;
    return DenseTensor3(dims_, std::move(v));
}

DenseTensor3 ObservationSet::to_tensor() const {
    Vector v = Vector::Zero(dims_.count());
    for (std::size_t k = 0; k < entries_.size(); ++k) v[linear_[k]] = entries_[k].value;
    return DenseTensor3(dims_, std::move(v));
}

ObservationSet ObservationSet::valued_from(const DenseTensor3& t) const {
    check_same_dims(dims_, t.dims(), "valued_from");
    std::vector<Observation> out = entries_;
    for (std::size_t k = 0; k < out.size(); ++k) out[k].value = t.values()[linear_[k]];
    return ObservationSet(dims_, std::move(out));
}

double ObservationSet::norm() const {
    double s = 0.0;
    for (const Observation& e : entries_) s += e.value * e.value;
    return std::sqrt(s);
}

// Mode-n unfolding per the index map j = 1 + sum_{k != n} (i_k - 1) J_k.
// Mode 1 is a reshape of the canonical buffer; mode 3 is the transpose of the
// (I1*I2) x I3 view; mode 2 transposes each frontal slice.
Matrix unfold(const DenseTensor3& t, int mode) {
    check_mode(mode);
    const Dims3 d = t.dims();
    const double* p = t.values().data();
    if (mode == 1) {
        return Eigen::Map<const Matrix>(p, d.i1, d.i2 * d.i3);
    }
    if (mode == 3) {
        return Eigen::Map<const Matrix>(p, d.i1 * d.i2, d.i3).transpose();
    }
    Matrix out(d.i2, d.i1 * d.i3);
    for (Index k = 0; k < d.i3; ++k) {
        Eigen::Map<const Matrix> slice(p + k * d.i1 * d.i2, d.i1, d.i2);
        out.block(0, k * d.i1, d.i2, d.i1) = slice.transpose();
    }
    return out;
}

DenseTensor3 refold(const Matrix& m, int mode, Dims3 dims) {
    check_mode(mode);
    check_dims_positive(dims);
    const Index rows = dims.extent(mode);
    const Index cols = dims.count() / rows;
    if (m.rows() != rows || m.cols() != cols)
        throw DimensionError("refold: matrix shape does not match mode and dims");
    Vector v(dims.count());
    if (mode == 1) {
        Eigen::Map<Matrix>(v.data(), rows, cols) = m;
    } else if (mode == 3) {
        Eigen::Map<Matrix>(v.data(), dims.i1 * dims.i2, dims.i3) = m.transpose();
    } else {
        for (Index k = 0; k < dims.i3; ++k) {
            Eigen::Map<Matrix> slice(v.data() + k * dims.i1 * dims.i2, dims.i1, dims.i2);
            slice = m.block(0, k * dims.i1, dims.i2, dims.i1).transpose();
        }
    }
    return DenseTensor3(dims, std::move(v));
}

DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& m, int mode) {
    check_mode(mode);
    const Dims3 d = t.dims();
    if (m.cols() != d.extent(mode))
        throw DimensionError("mode_product: matrix columns must match the mode extent");
    Dims3 out = d;
    const Index j = m.rows();
    const double* p = t.values().data();
    if (mode == 1) {
        out.i1 = j;
        Vector v(out.count());
        Eigen::Map<Matrix>(v.data(), j, d.i2 * d.i3).noalias() =
            m * Eigen::Map<const Matrix>(p, d.i1, d.i2 * d.i3);
        return DenseTensor3(out, std::move(v));
    }
    if (mode == 3) {
        out.i3 = j;
        Vector v(out.count());
        Eigen::Map<Matrix>(v.data(), d.i1 * d.i2, j).noalias() =
            Eigen::Map<const Matrix>(p, d.i1 * d.i2, d.i3) * m.transpose();
        return DenseTensor3(out, std::move(v));
    }
    out.i2 = j;
    Vector v(out.count());
    for (Index k = 0; k < d.i3; ++k) {
        Eigen::Map<const Matrix> slice(p + k * d.i1 * d.i2, d.i1, d.i2);
        Eigen::Map<Matrix> dst(v.data() + k * d.i1 * j, d.i1, j);
        dst.noalias() = slice * m.transpose();
    }
    return DenseTensor3(out, std::move(v));
}

DenseTensor3 multi_mode_product(const DenseTensor3& t, const Matrix& u, const Matrix& v,
                                const Matrix& w, bool transposed) {
    DenseTensor3 r = mode_product(t, transposed ? u.transpose() : u, 1);
    r = mode_product(r, transposed ? v.transpose() : v, 2);
    return mode_product(r, transposed ? w.transpose() : w, 3);
}

double inner(const DenseTensor3& a, const DenseTensor3& b) {
    check_same_dims(a.dims(), b.dims(), "inner");
    return a.values().dot(b.values());
}

double frobenius(const DenseTensor3& t) { return t.values().norm(); }

DenseTensor3 project(const DenseTensor3& t, const ObservationSet& omega, bool complement) {
    check_same_dims(t.dims(), omega.dims(), "project");
    if (!complement) {
        Vector v = Vector::Zero(t.size());
        for (Index off : omega.linear_indices()) v[off] = t.values()[off];
        return DenseTensor3(t.dims(), std::move(v));
    }
    Vector v = t.values();
    for (Index off : omega.linear_indices()) v[off] = 0.0;
    return DenseTensor3(t.dims(), std::move(v));
}

DenseTensor3 hadamard(const DenseTensor3& a, const DenseTensor3& b) {
    check_same_dims(a.dims(), b.dims(), "hadamard");
    return DenseTensor3(a.dims(), a.values().cwiseProduct(b.values()));
}

DenseTensor3 operator+(const DenseTensor3& a, const DenseTensor3& b) {
    check_same_dims(a.dims(), b.dims(), "operator+");
    return DenseTensor3(a.dims(), a.values() + b.values());
}

DenseTensor3 operator-(const DenseTensor3& a, const DenseTensor3& b) {
    check_same_dims(a.dims(), b.dims(), "operator-");
    return DenseTensor3(a.dims(), a.values() - b.values());
}

DenseTensor3 operator*(double c, const DenseTensor3& t) {
    return DenseTensor3(t.dims(), c * t.values());
}

}  // namespace roid
