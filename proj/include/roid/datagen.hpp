#pragma once

#include <cstdint>

#include "roid/tensor.hpp"
#include "roid/types.hpp"

namespace roid {

/// Counter-based 64-bit generator (SplitMix64): the i-th draw is a bijective
/// hash of seed-derived state, so seeds reproduce across platforms.
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 mantissa bits.
    double uniform();
    double uniform(double lo, double hi);
    /// Standard normal via Box-Muller; draws are pair-cached.
    double normal();
    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// T = C x1 U1 x2 U2 x3 U3 with core entries iid uniform [0,1] and factor
/// entries iid uniform [-0.5, 0.5]; multi-linear rank equals `rank` a.s.
DenseTensor3 gen_tucker(Dims3 dims, Dims3 rank, std::uint64_t seed);

/// Exactly round(ratio * count) distinct indices, uniform without replacement
/// (seeded Fisher-Yates over the linearized index space). Values are zero;
/// use ObservationSet::valued_from to attach a source tensor.
ObservationSet sample_mask(Dims3 dims, double ratio, std::uint64_t seed);

/// t + nf * E with E iid standard Gaussian; nf = 0 returns t unchanged.
DenseTensor3 add_noise(const DenseTensor3& t, double nf, std::uint64_t seed);

/// L = D - W for a symmetric nonnegative affinity W; symmetric, zero row
/// sums, positive semidefinite.
struct GraphLaplacian {
    Matrix matrix;
    Index size() const { return matrix.rows(); }
};

GraphLaplacian laplacian_from_affinity(const Matrix& w);

}  // namespace roid
