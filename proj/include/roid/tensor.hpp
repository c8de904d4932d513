#pragma once

#include <vector>

#include "roid/types.hpp"

namespace roid {

/// Dense third-order tensor of real values.
///
/// Storage is column-major over (i1,i2,i3) with i1 fastest, so the mode-1
/// unfolding is a plain reshape of the buffer.
/// Tensors are immutable values after construction; constructors reject
/// NaN/Inf so solver divergence surfaces as an explicit error.
class DenseTensor3 {
public:
    DenseTensor3() = default;
    explicit DenseTensor3(Dims3 dims);  // zeros
    DenseTensor3(Dims3 dims, Vector values);

    static DenseTensor3 constant(Dims3 dims, double value);

    Dims3 dims() const { return dims_; }
    Index size() const { return data_.size(); }
    const Vector& values() const { return data_; }

    /// 1-based element access.
    double operator()(Index i1, Index i2, Index i3) const {
        return data_[(i1 - 1) + dims_.i1 * ((i2 - 1) + dims_.i2 * (i3 - 1))];
    }

    bool operator==(const DenseTensor3& other) const {
        return dims_ == other.dims_ && data_ == other.data_;
    }

private:
    Dims3 dims_{0, 0, 0};
    Vector data_;
};

/// Observed index set Omega with values, 1-based indices, distinct triples.
struct Observation {
    Index i1, i2, i3;
    double value;
};

class ObservationSet {
public:
    ObservationSet(Dims3 dims, std::vector<Observation> entries);

    Dims3 dims() const { return dims_; }
    const std::vector<Observation>& entries() const { return entries_; }
    Index count() const { return static_cast<Index>(entries_.size()); }

    /// 0-based offsets into the canonical buffer, entry order.
    const std::vector<Index>& linear_indices() const { return linear_; }

    /// Indicator tensor W of the observed positions.
    DenseTensor3 mask() const;
    /// P_Omega(T) as a dense tensor (observed values, zeros elsewhere).
    DenseTensor3 to_tensor() const;
    /// Same index set, values replaced by the entries of t.
    ObservationSet valued_from(const DenseTensor3& t) const;
    /// Frobenius norm of the observed values.
    double norm() const;

private:
    Dims3 dims_;
    std::vector<Observation> entries_;
    std::vector<Index> linear_;
};

Matrix unfold(const DenseTensor3& t, int mode);
DenseTensor3 refold(const Matrix& m, int mode, Dims3 dims);
DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& m, int mode);
/// t x1 u x2 v x3 w (each matrix transposed first when `transposed`).
DenseTensor3 multi_mode_product(const DenseTensor3& t, const Matrix& u, const Matrix& v,
                                const Matrix& w, bool transposed = false);
double inner(const DenseTensor3& a, const DenseTensor3& b);
double frobenius(const DenseTensor3& t);
DenseTensor3 project(const DenseTensor3& t, const ObservationSet& omega, bool complement = false);
DenseTensor3 hadamard(const DenseTensor3& a, const DenseTensor3& b);

DenseTensor3 operator+(const DenseTensor3& a, const DenseTensor3& b);
DenseTensor3 operator-(const DenseTensor3& a, const DenseTensor3& b);
DenseTensor3 operator*(double c, const DenseTensor3& t);

}  // namespace roid
