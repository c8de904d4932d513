#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "roid/matrix_ops.hpp"
#include "roid/tensor.hpp"

using namespace roid;

namespace {

// x(i,j,k) = i + 2(j-1) + 4(k-1): values 1..8 in canonical order.
DenseTensor3 counting_tensor() {
    Vector v(8);
    for (Index k = 1; k <= 2; ++k)
        for (Index j = 1; j <= 2; ++j)
            for (Index i = 1; i <= 2; ++i)
                v[(i - 1) + 2 * ((j - 1) + 2 * (k - 1))] =
                    static_cast<double>(i + 2 * (j - 1) + 4 * (k - 1));
    return DenseTensor3(Dims3{2, 2, 2}, std::move(v));
}

ObservationSet full_omega(const DenseTensor3& t) {
    std::vector<Observation> entries;
    const Dims3 d = t.dims();
    for (Index i3 = 1; i3 <= d.i3; ++i3)
        for (Index i2 = 1; i2 <= d.i2; ++i2)
            for (Index i1 = 1; i1 <= d.i1; ++i1) entries.push_back({i1, i2, i3, t(i1, i2, i3)});
    return ObservationSet(d, std::move(entries));
}

}  // namespace

TEST_CASE("tensor construction validates dims, count and finiteness") {
    CHECK_THROWS_AS(DenseTensor3(Dims3{0, 2, 2}), DimensionError);
    CHECK_THROWS_AS(DenseTensor3(Dims3{2, 2, 2}, Vector::Zero(7)), DimensionError);
    Vector bad = Vector::Zero(8);
    bad[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(DenseTensor3(Dims3{2, 2, 2}, bad), InputError);
    bad[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(DenseTensor3(Dims3{2, 2, 2}, bad), InputError);
}

TEST_CASE("observation set validates bounds and duplicates") {
    const Dims3 d{3, 3, 2};
    CHECK_THROWS_AS(ObservationSet(d, {{4, 1, 1, 2.0}}), ValidationError);
    CHECK_THROWS_AS(ObservationSet(d, {{1, 1, 1, 1.0}, {1, 1, 1, 2.0}}), ValidationError);
    const ObservationSet ok(d, {{1, 1, 1, 5.0}, {2, 3, 2, -1.5}});
    CHECK(ok.count() == 2);
    CHECK(ok.norm() == doctest::Approx(std::sqrt(25.0 + 2.25)));
}

TEST_CASE("unfold matches the frozen index-map enumeration") {
    const DenseTensor3 t = counting_tensor();
    const Matrix m1 = unfold(t, 1);
    Matrix want1(2, 4);
    want1 << 1, 3, 5, 7, 2, 4, 6, 8;
    CHECK((m1 - want1).cwiseAbs().maxCoeff() == 0.0);

    const Matrix m3 = unfold(t, 3);
    Matrix want3(2, 4);
    want3 << 1, 2, 3, 4, 5, 6, 7, 8;
    CHECK((m3 - want3).cwiseAbs().maxCoeff() == 0.0);

    const Matrix m2 = unfold(t, 2);
    Matrix want2(2, 4);
    want2 << 1, 2, 5, 6, 3, 4, 7, 8;
    CHECK((m2 - want2).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(unfold(t, 0), RangeError);
    CHECK_THROWS_AS(unfold(t, 4), RangeError);
}

TEST_CASE("unfold agrees with the enumeration oracle on random tensors") {
    auto gen = oracle::rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const DenseTensor3 t = oracle::gaussian_tensor(Dims3{3, 4, 5}, gen);
        for (int n = 1; n <= 3; ++n)
            CHECK((unfold(t, n) - oracle::unfold(t, n)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("refold inverts unfold exactly") {
    const DenseTensor3 t = counting_tensor();
    Matrix m(2, 4);
    m << 1, 3, 5, 7, 2, 4, 6, 8;
    CHECK(refold(m, 1, Dims3{2, 2, 2}) == t);

    Matrix scalar(1, 1);
    scalar << 7.0;
    const DenseTensor3 s = refold(scalar, 2, Dims3{1, 1, 1});
    CHECK(s(1, 1, 1) == 7.0);

    auto gen = oracle::rng(12);
    const DenseTensor3 r = oracle::gaussian_tensor(Dims3{4, 3, 6}, gen);
    for (int n = 1; n <= 3; ++n) {
        CHECK(refold(unfold(r, n), n, r.dims()) == r);
        const Matrix u = unfold(r, n);
        CHECK((unfold(refold(u, n, r.dims()), n) - u).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(refold(m, 3, Dims3{4, 2, 2}), DimensionError);
    CHECK_THROWS_AS(refold(m, 1, Dims3{2, 2, 3}), DimensionError);
}

TEST_CASE("mode_product basics") {
    const DenseTensor3 ones = DenseTensor3::constant(Dims3{2, 2, 2}, 1.0);
    Matrix row(1, 2);
    row << 1, 1;
    const DenseTensor3 p = mode_product(ones, row, 1);
    CHECK(p.dims() == Dims3{1, 2, 2});
    CHECK(p.values().minCoeff() == 2.0);
    CHECK(p.values().maxCoeff() == 2.0);

    const DenseTensor3 t = counting_tensor();
    for (int n = 1; n <= 3; ++n) CHECK(mode_product(t, Matrix::Identity(2, 2), n) == t);

    CHECK_THROWS_AS(mode_product(t, Matrix::Identity(3, 3), 1), DimensionError);
}

TEST_CASE("mode_product matches the matrix-unfolding identity and the oracle") {
    auto gen = oracle::rng(13);
    const DenseTensor3 t = oracle::gaussian_tensor(Dims3{3, 3, 3}, gen);
    const Matrix m = oracle::gaussian_matrix(2, 3, gen);
    for (int n = 1; n <= 3; ++n) {
        const DenseTensor3 prod = mode_product(t, m, n);
        CHECK((unfold(prod, n) - m * unfold(t, n)).cwiseAbs().maxCoeff() < 1e-14);
        const DenseTensor3 want = oracle::mode_product(t, m, n);
        CHECK(frobenius(prod - want) < 1e-12);
    }
}

TEST_CASE("multi_mode_product composes the three mode products") {
    Matrix e1 = Matrix::Zero(3, 1);
    e1(0, 0) = 1.0;
    const DenseTensor3 g = DenseTensor3::constant(Dims3{1, 1, 1}, 1.0);
    const DenseTensor3 ind = multi_mode_product(g, e1, e1, e1);
    CHECK(ind.dims() == Dims3{3, 3, 3});
    CHECK(ind(1, 1, 1) == 1.0);
    CHECK(frobenius(ind) == 1.0);

    auto gen = oracle::rng(14);
    const DenseTensor3 t = oracle::gaussian_tensor(Dims3{3, 4, 5}, gen);
    CHECK(multi_mode_product(t, Matrix::Identity(3, 3), Matrix::Identity(4, 4),
                             Matrix::Identity(5, 5)) == t);

    const Matrix u = oracle::gaussian_matrix(2, 3, gen);
    const Matrix v = oracle::gaussian_matrix(6, 4, gen);
    const Matrix w = oracle::gaussian_matrix(3, 5, gen);
    const DenseTensor3 got = multi_mode_product(t, u, v, w);
    const DenseTensor3 want = mode_product(mode_product(mode_product(t, u, 1), v, 2), w, 3);
    CHECK(frobenius(got - want) == 0.0);

    const DenseTensor3 got_t = multi_mode_product(t, u.transpose(), v.transpose(),
                                                  w.transpose(), /*transposed=*/true);
    CHECK(frobenius(got_t - want) == 0.0);

    CHECK_THROWS_AS(multi_mode_product(t, v, u, w), DimensionError);
}

TEST_CASE("inner and frobenius") {
    const DenseTensor3 t = counting_tensor();
    CHECK(inner(t, DenseTensor3(t.dims())) == 0.0);
    CHECK(frobenius(DenseTensor3::constant(Dims3{2, 2, 2}, 1.0)) ==
          doctest::Approx(std::sqrt(8.0)));

    double sumsq = 0.0;
    for (Index i = 0; i < t.size(); ++i) sumsq += t.values()[i] * t.values()[i];
    CHECK(frobenius(t) * frobenius(t) == doctest::Approx(sumsq));

    CHECK_THROWS_AS(inner(t, DenseTensor3(Dims3{2, 2, 3})), DimensionError);

    // <a,b> equals the matrix inner product of any unfolding pair.
    auto gen = oracle::rng(15);
    const DenseTensor3 a = oracle::gaussian_tensor(Dims3{3, 4, 2}, gen);
    const DenseTensor3 b = oracle::gaussian_tensor(Dims3{3, 4, 2}, gen);
    for (int n = 1; n <= 3; ++n)
        CHECK(inner(a, b) ==
              doctest::Approx((unfold(a, n).array() * unfold(b, n).array()).sum()));
}

TEST_CASE("project keeps Omega entries and zeroes the rest") {
    const DenseTensor3 t = counting_tensor();
    const ObservationSet all = full_omega(t);
    CHECK(project(t, all) == t);
    CHECK(frobenius(project(t, all, /*complement=*/true)) == 0.0);

    const ObservationSet empty(t.dims(), {});
    CHECK(frobenius(project(t, empty)) == 0.0);
    CHECK(project(t, empty, true) == t);

    const ObservationSet one(t.dims(), {{1, 1, 1, 0.0}});
    const DenseTensor3 p = project(t, one);
    CHECK(p(1, 1, 1) == t(1, 1, 1));
    CHECK(frobenius(p) == t(1, 1, 1));

    CHECK(project(t, one) + project(t, one, true) == t);

    // Linearity of the projection.
    auto gen = oracle::rng(16);
    const DenseTensor3 a = oracle::gaussian_tensor(t.dims(), gen);
    const DenseTensor3 b = oracle::gaussian_tensor(t.dims(), gen);
    CHECK(frobenius(project(a + b, one) - (project(a, one) + project(b, one))) == 0.0);

    CHECK_THROWS_AS(project(t, ObservationSet(Dims3{3, 3, 3}, {})), DimensionError);
}

TEST_CASE("hadamard") {
    const DenseTensor3 t = counting_tensor();
    CHECK(hadamard(t, DenseTensor3::constant(t.dims(), 1.0)) == t);
    CHECK(frobenius(hadamard(t, DenseTensor3(t.dims()))) == 0.0);

    const ObservationSet one(t.dims(), {{2, 1, 2, 0.0}});
    CHECK(hadamard(one.mask(), t) == project(t, one));

    CHECK_THROWS_AS(hadamard(t, DenseTensor3(Dims3{1, 2, 2})), DimensionError);
}

TEST_CASE("Tucker unfolding identity with Kronecker factors") {
    auto gen = oracle::rng(17);
    for (int trial = 0; trial < 3; ++trial) {
        const DenseTensor3 g = oracle::gaussian_tensor(Dims3{2, 3, 2}, gen);
        const Matrix u = oracle::gaussian_matrix(5, 2, gen);
        const Matrix v = oracle::gaussian_matrix(6, 3, gen);
        const Matrix w = oracle::gaussian_matrix(4, 2, gen);
        const DenseTensor3 x = multi_mode_product(g, u, v, w);
        const double scale = frobenius(x);
        CHECK((unfold(x, 1) - u * unfold(g, 1) * kronecker(w, v).transpose()).norm() <=
              1e-10 * scale);
        CHECK((unfold(x, 2) - v * unfold(g, 2) * kronecker(w, u).transpose()).norm() <=
              1e-10 * scale);
        CHECK((unfold(x, 3) - w * unfold(g, 3) * kronecker(v, u).transpose()).norm() <=
              1e-10 * scale);
    }
}
