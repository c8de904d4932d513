#include "roid/datagen.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace roid {

std::uint64_t PortableRng::next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double PortableRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PortableRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double PortableRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t PortableRng::below(std::uint64_t bound) {
    if (bound == 0) throw RangeError("below: bound must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
}

DenseTensor3 gen_tucker(Dims3 dims, Dims3 rank, std::uint64_t seed) {
    if (rank.i1 < 1 || rank.i2 < 1 || rank.i3 < 1 || rank.i1 > dims.i1 ||
        rank.i2 > dims.i2 || rank.i3 > dims.i3)
        throw RangeError("gen_tucker: rank must satisfy 1 <= r_n <= I_n");
    PortableRng rng(seed);
    Vector core(rank.count());
    for (Index i = 0; i < core.size(); ++i) core[i] = rng.uniform();
    Matrix u[3];
    const Index ext[3] = {dims.i1, dims.i2, dims.i3};
    const Index r[3] = {rank.i1, rank.i2, rank.i3};
    for (int n = 0; n < 3; ++n) {
        u[n].resize(ext[n], r[n]);
        for (Index j = 0; j < r[n]; ++j)
            for (Index i = 0; i < ext[n]; ++i) u[n](i, j) = rng.uniform(-0.5, 0.5);
    }
    return multi_mode_product(DenseTensor3(rank, std::move(core)), u[0], u[1], u[2]);
}

ObservationSet sample_mask(Dims3 dims, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio <= 1.0)) throw RangeError("sample_mask: ratio must be in (0, 1]");
    const Index total = dims.count();
    const Index m = static_cast<Index>(std::llround(ratio * static_cast<double>(total)));
    std::vector<Index> pool(static_cast<std::size_t>(total));
    std::iota(pool.begin(), pool.end(), Index{0});
    PortableRng rng(seed);
    std::vector<Observation> entries;
    entries.reserve(static_cast<std::size_t>(m));
    for (Index k = 0; k < m; ++k) {
        const Index j = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(total - k)));
        std::swap(pool[k], pool[j]);
        const Index off = pool[k];
        const Index i1 = off % dims.i1;
        const Index i2 = (off / dims.i1) % dims.i2;
        const Index i3 = off / (dims.i1 * dims.i2);
        entries.push_back({i1 + 1, i2 + 1, i3 + 1, 0.0});
    }
    return ObservationSet(dims, std::move(entries));
}

DenseTensor3 add_noise(const DenseTensor3& t, double nf, std::uint64_t seed) {
    if (nf < 0) throw RangeError("add_noise: noise factor must be nonnegative");
    if (nf == 0.0) return t;
    PortableRng rng(seed);
    Vector v = t.values();
    for (Index i = 0; i < v.size(); ++i) v[i] += nf * rng.normal();
    return DenseTensor3(t.dims(), std::move(v));
}

GraphLaplacian laplacian_from_affinity(const Matrix& w) {
    if (w.rows() != w.cols()) throw InputError("laplacian_from_affinity: affinity must be square");
    if (!w.allFinite() || (w.array() < 0).any())
        throw InputError("laplacian_from_affinity: affinity entries must be finite and nonnegative");
    if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw InputError("laplacian_from_affinity: affinity must be symmetric");
    Matrix sym = 0.5 * (w + w.transpose());
    Matrix l = Matrix(sym.colwise().sum().asDiagonal()) - sym;
    return GraphLaplacian{std::move(l)};
}

}  // namespace roid
