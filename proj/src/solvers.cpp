#include "roid/solvers.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "roid/datagen.hpp"
#include "roid/matrix_ops.hpp"

namespace roid {

namespace {

// Inflation applied to the 20-step power-iteration spectral estimates so the
// linearized factor step stays a majorizer under estimation error.
constexpr double kTauSafety = 1.001;

Matrix random_orthonormal(Index rows, Index cols, PortableRng& rng) {
    Matrix g(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    Matrix r = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
    for (Index j = 0; j < cols; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

// Orthonormal basis of k columns whose leading min(k, rank-limit) columns are
// the top left singular vectors; padded with an orthonormal complement when k
// exceeds the second dimension (heavily skewed rank triples).
Matrix left_basis(const Matrix& m, Index k) {
    const Index kk = std::min(k, std::min(m.rows(), m.cols()));
    Matrix u = svds(m, kk);
    while (u.cols() < k) {
        double best_norm = -1.0;
        Vector best_res;
        for (Index i = 0; i < m.rows(); ++i) {
            Vector res = Vector::Unit(m.rows(), i) - u * u.row(i).transpose();
            if (res.norm() > best_norm) {
                best_norm = res.norm();
                best_res = std::move(res);
            }
        }
        u.conservativeResize(Eigen::NoChange, u.cols() + 1);
        u.col(u.cols() - 1) = best_res / best_norm;
    }
    return u;
}

double power_sigma_sq(const Matrix& p, int steps = 20) {
    if (p.size() == 0) return 0.0;
    PortableRng rng(0x5eed5eedu);
    Vector v(p.cols());
    for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    const double n0 = v.norm();
    if (n0 == 0.0) return 0.0;
    v /= n0;
    double est = 0.0;
    for (int it = 0; it < steps; ++it) {
        Vector w = p * v;
        est = w.squaredNorm();
        Vector next = p.transpose() * w;
        const double norm = next.norm();
        if (norm == 0.0) return 0.0;
        v = next / norm;
    }
    return est;
}

double power_sym_max(const Matrix& l, int steps = 20) {
    if (l.size() == 0) return 0.0;
    PortableRng rng(0x5eed5eeeu);
    Vector v(l.cols());
    for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    v /= v.norm();
    double est = 0.0;
    for (int it = 0; it < steps; ++it) {
        Vector w = l * v;
        est = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
    }
    return est;
}

struct SweepOut {
    Matrix u, v, w;
    DenseTensor3 m3;  // x x1 u_new^T x2 v_new^T, reused for the core update
    bool unique = true;
};

// Gauss-Seidel svds sweep (exact per-mode maximizer of the pure quadratic).
// The mode-1 contraction with the fresh factor is shared between the V and W
// subproblems.
SweepOut sweep_svds(const DenseTensor3& s, const Matrix& v0, const Matrix& w0, Dims3 rank) {
    SweepOut out;
    DenseTensor3 m1 = mode_product(mode_product(s, v0.transpose(), 2), w0.transpose(), 3);
    out.u = left_basis(unfold(m1, 1), rank.i1);
    DenseTensor3 s1 = mode_product(s, out.u.transpose(), 1);
    DenseTensor3 m2 = mode_product(s1, w0.transpose(), 3);
    out.v = left_basis(unfold(m2, 2), rank.i2);
    out.m3 = mode_product(s1, out.v.transpose(), 2);
    out.w = left_basis(unfold(out.m3, 3), rank.i3);
    return out;
}

// One gradient-procrustes step for mode n of
//   g = ||P^T F + rho*B_(n)^T||_F^2,  P = (M_n)_(n):
// F+ = ORT(P P^T F + rho P B_(n)^T), never decreasing g (convexity).
// With a graph penalty the linearized majorizer of
//   F_cost = -g/(2(1+3rho)) + (mu/2) tr(F^T L F)
// is minimized instead, damped by the Lipschitz bound tau.
Matrix ort_step(const Matrix& p, const Matrix& f, const Matrix& b_unf, double rho,
                const Matrix* lap, double mu, bool* unique) {
    Matrix arg = p * (p.transpose() * f) + rho * (p * b_unf.transpose());
    if (lap) {
        const double scale = 1.0 + 3.0 * rho;
        const double tau =
            kTauSafety * (power_sigma_sq(p) / scale + mu * power_sym_max(*lap));
        arg /= scale;
        arg.noalias() -= mu * (*lap * f);
        arg.noalias() += tau * f;
    }
    bool ok = true;
    Matrix next = ort(arg, &ok);
    if (unique && !ok) *unique = false;
    return next;
}

SweepOut sweep_ort(const DenseTensor3& x, const Matrix& u0, const Matrix& v0, const Matrix& w0,
                   const DenseTensor3& b, double rho, const std::array<Matrix, 3>* lap,
                   double mu) {
    SweepOut out;
    DenseTensor3 m1 = mode_product(mode_product(x, v0.transpose(), 2), w0.transpose(), 3);
    out.u = ort_step(unfold(m1, 1), u0, unfold(b, 1), rho, lap ? &(*lap)[0] : nullptr, mu,
                     &out.unique);
    DenseTensor3 x1 = mode_product(x, out.u.transpose(), 1);
    DenseTensor3 m2 = mode_product(x1, w0.transpose(), 3);
    out.v = ort_step(unfold(m2, 2), v0, unfold(b, 2), rho, lap ? &(*lap)[1] : nullptr, mu,
                     &out.unique);
    out.m3 = mode_product(x1, out.v.transpose(), 2);
    out.w = ort_step(unfold(out.m3, 3), w0, unfold(b, 3), rho, lap ? &(*lap)[2] : nullptr, mu,
                     &out.unique);
    return out;
}

struct InitState {
    Matrix u, v, w;
    DenseTensor3 core;
};

InitState init_factors(const DenseTensor3& filled, Dims3 rank, FactorInit init,
                       std::uint64_t seed) {
    InitState st;
    if (init == FactorInit::HosvdOfFilled) {
        st.u = left_basis(unfold(filled, 1), rank.i1);
        st.v = left_basis(unfold(filled, 2), rank.i2);
        st.w = left_basis(unfold(filled, 3), rank.i3);
    } else {
        PortableRng rng(seed);
        const Dims3 d = filled.dims();
        st.u = random_orthonormal(d.i1, rank.i1, rng);
        st.v = random_orthonormal(d.i2, rank.i2, rng);
        st.w = random_orthonormal(d.i3, rank.i3, rng);
    }
    st.core = multi_mode_product(filled, st.u, st.v, st.w, /*transposed=*/true);
    return st;
}

SolverResult zero_result(Dims3 dims, Dims3 rank, bool record_trace) {
    SolverResult res;
    res.model.core = DenseTensor3(rank);
    res.model.u = Matrix::Identity(dims.i1, rank.i1);
    res.model.v = Matrix::Identity(dims.i2, rank.i2);
    res.model.w = Matrix::Identity(dims.i3, rank.i3);
    res.completed = DenseTensor3(dims);
    res.trace = IterationTrace(record_trace);
    res.converged = true;
    return res;
}

double weighted_nuclear(const std::array<Matrix, 3>& core_unf,
                        const std::array<double, 3>& weights) {
    double s = 0.0;
    for (int n = 0; n < 3; ++n) s += weights[n] * schatten_norm(core_unf[n], 1.0);
    return s;
}

double trace_rse(const DenseTensor3& x, const DenseTensor3* reference) {
    if (!reference) return std::numeric_limits<double>::quiet_NaN();
    return frobenius(x - *reference) / frobenius(*reference);
}

// Shared ADMM loop for the solvers that split the core into per-mode aux
// matrices (ROID, GROID, full decomposition). `omega` null means the data
// tensor is held fixed at `data` and no interpolation happens.
SolverResult solve_core_split(const ObservationSet* omega, const DenseTensor3& data,
                              const std::array<Matrix, 3>* laplacians,
                              const SolverConfig& cfg, const DenseTensor3* reference) {
    const Dims3 dims = data.dims();
    const Dims3 rank = cfg.rank;
    cfg.validate(dims);
    const double norm_t = omega ? omega->norm() : frobenius(data);
    if (norm_t == 0.0) return zero_result(dims, rank, cfg.record_trace);

    InitState st = init_factors(data, rank, cfg.init, cfg.seed);
    Matrix u = std::move(st.u), v = std::move(st.v), w = std::move(st.w);
    DenseTensor3 core = std::move(st.core);
    std::array<Matrix, 3> core_unf = {unfold(core, 1), unfold(core, 2), unfold(core, 3)};

    AdmmState state;
    state.rho = cfg.rho0;
    for (int n = 0; n < 3; ++n) {
        state.aux[n] = core_unf[n];
        state.multipliers[n] = Matrix::Zero(core_unf[n].rows(), core_unf[n].cols());
    }

    DenseTensor3 x = omega ? interpolate_x(*omega, TuckerModel{core, u, v, w}) : data;
    SolverResult res;
    res.trace = IterationTrace(cfg.record_trace);

    const double mu = laplacians ? cfg.mu : 0.0;
    bool converged_flag = false;
    int it = 0;
    for (it = 1; it <= cfg.maxiter; ++it) {
        const double rho = state.rho;
        for (int n = 0; n < 3; ++n) {
            state.aux[n] =
                shrink_aux(core_unf[n], state.multipliers[n], rho, cfg.lambda, cfg.weights[n]);
            // SVT inputs are core-sized by construction; anything larger is a bug.
            if (state.aux[n].rows() != rank.extent(n + 1) ||
                state.aux[n].cols() != rank.count() / rank.extent(n + 1))
                throw std::logic_error("aux shape drifted from the core unfolding");
        }
        DenseTensor3 b(rank);
        for (int n = 0; n < 3; ++n)
            b = b + refold(state.aux[n] - state.multipliers[n] / rho, n + 1, rank);

        SweepOut sw = sweep_ort(x, u, v, w, b, rho, laplacians, mu);
        u = std::move(sw.u);
        v = std::move(sw.v);
        w = std::move(sw.w);
        DenseTensor3 a = mode_product(sw.m3, w.transpose(), 3);
        core = DenseTensor3(rank, (a.values() + rho * b.values()) / (1.0 + 3.0 * rho));
        std::array<Matrix, 3> core_unf_new = {unfold(core, 1), unfold(core, 2),
                                              unfold(core, 3)};

        double r = 0.0, s = 0.0;
        for (int n = 0; n < 3; ++n) {
            r = std::max(r, (core_unf_new[n] - state.aux[n]).norm());
            s = std::max(s, rho * (core_unf_new[n] - core_unf[n]).norm());
        }
        double misfit_sq = 0.0;
        std::optional<DenseTensor3> full_recon;
        if (omega) {
            // Reconstruction with the observed entries patched in, assembled
            // without a separate full-tensor pass. The observed misfit falls
            // out of the overwrite loop.
            DenseTensor3 partial = mode_product(mode_product(core, u, 1), v, 2);
            Vector xv(dims.count());
            Eigen::Map<Matrix>(xv.data(), dims.i1 * dims.i2, dims.i3).noalias() =
                Eigen::Map<const Matrix>(partial.values().data(), dims.i1 * dims.i2, rank.i3) *
                w.transpose();
            const std::vector<Observation>& entries = omega->entries();
            const std::vector<Index>& offs = omega->linear_indices();
            for (std::size_t k = 0; k < entries.size(); ++k) {
                const double diff = entries[k].value - xv[offs[k]];
                misfit_sq += diff * diff;
                xv[offs[k]] = entries[k].value;
            }
            x = DenseTensor3(dims, std::move(xv));
            // a is the previous data tensor contracted with the new factors,
            // so the dual x-term is a difference of core-sized projections.
            s = std::max(s,
                         rho * frobenius(multi_mode_product(x, u, v, w, /*transposed=*/true) -
                                         a));
        } else if (res.trace.enabled()) {
            full_recon = multi_mode_product(core, u, v, w);
            misfit_sq = (data.values() - full_recon->values()).squaredNorm();
        }
        for (int n = 0; n < 3; ++n)
            state.multipliers[n] += rho * (core_unf_new[n] - state.aux[n]);
        state.r = r;
        state.s = s;
        state.iteration = it;

        if (res.trace.enabled()) {
            double objective =
                weighted_nuclear(core_unf_new, cfg.weights) / cfg.lambda + 0.5 * misfit_sq;
            if (laplacians)
                objective += 0.5 * mu *
                             ((u.transpose() * (*laplacians)[0] * u).trace() +
                              (v.transpose() * (*laplacians)[1] * v).trace() +
                              (w.transpose() * (*laplacians)[2] * w).trace());
            res.trace.add({it, r, s, rho, objective,
                           trace_rse(omega ? x : *full_recon, reference)});
        }

        state.rho = penalty_update(rho, r, s, cfg.gamma, cfg.rho_min, cfg.rho_max);
        core_unf = std::move(core_unf_new);
        if (converged(state.aux, core_unf, norm_t, cfg.tol)) {
            converged_flag = true;
            break;
        }
    }

    res.model = TuckerModel{std::move(core), std::move(u), std::move(v), std::move(w)};
    res.completed = omega ? std::move(x) : res.model.reconstruct();
    res.iterations = std::min(it, cfg.maxiter);
    res.converged = converged_flag;
    return res;
}

}  // namespace

void SolverConfig::validate(Dims3 dims) const {
    if (rank.i1 < 1 || rank.i2 < 1 || rank.i3 < 1)
        throw ConfigError("rank entries must be positive");
    if (rank.i1 > dims.i1 || rank.i2 > dims.i2 || rank.i3 > dims.i3)
        throw ConfigError("rank entries must not exceed the tensor dims");
    if (!(lambda > 0)) throw ConfigError("lambda must be positive");
    if (mu < 0) throw ConfigError("mu must be nonnegative");
    if (!(tol > 0)) throw ConfigError("tol must be positive");
    if (maxiter < 1) throw ConfigError("maxiter must be at least 1");
    if (!(rho0 > 0) || !(gamma > 1) || !(rho_min > 0) || rho_min > rho_max ||
        rho0 < rho_min || rho0 > rho_max)
        throw ConfigError("penalty parameters must satisfy 0 < rho_min <= rho0 <= rho_max, gamma > 1");
    double wsum = 0.0;
    for (double wn : weights) {
        if (wn < 0) throw ConfigError("weights must be nonnegative");
        wsum += wn;
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw ConfigError("weights must sum to 1");
}

Matrix shrink_aux(const Matrix& core_unfolding, const Matrix& multiplier, double rho,
                  double lambda, double weight) {
    if (!(rho > 0) || !(lambda > 0)) throw RangeError("shrink_aux: rho and lambda must be positive");
    if (weight < 0) throw RangeError("shrink_aux: weight must be nonnegative");
    if (core_unfolding.rows() != multiplier.rows() || core_unfolding.cols() != multiplier.cols())
        throw DimensionError("shrink_aux: multiplier shape must match the core unfolding");
    return svt(core_unfolding + multiplier / rho, weight / (lambda * rho));
}

FactorSet factor_update(const DenseTensor3& x, const TuckerModel& factors,
                        const DenseTensor3& b, double rho) {
    const Dims3 dims = x.dims();
    if (factors.u.rows() != dims.i1 || factors.v.rows() != dims.i2 ||
        factors.w.rows() != dims.i3)
        throw DimensionError("factor_update: factor rows must match tensor dims");
    const Dims3 rank{factors.u.cols(), factors.v.cols(), factors.w.cols()};
    if (!(b.dims() == rank))
        throw DimensionError("factor_update: b dims must match the rank triple");
    if (rho < 0) throw RangeError("factor_update: rho must be nonnegative");
    if (rho == 0.0) {
        SweepOut sw = sweep_svds(x, factors.v, factors.w, rank);
        return FactorSet{std::move(sw.u), std::move(sw.v), std::move(sw.w), true};
    }
    SweepOut sw = sweep_ort(x, factors.u, factors.v, factors.w, b, rho, nullptr, 0.0);
    return FactorSet{std::move(sw.u), std::move(sw.v), std::move(sw.w), sw.unique};
}

DenseTensor3 core_update(const DenseTensor3& x, const Matrix& u, const Matrix& v,
                         const Matrix& w, const DenseTensor3& b, double rho) {
    if (rho < 0) throw RangeError("core_update: rho must be nonnegative");
    DenseTensor3 a = multi_mode_product(x, u, v, w, /*transposed=*/true);
    if (!(a.dims() == b.dims()))
        throw DimensionError("core_update: b dims must match the rank triple");
    return DenseTensor3(a.dims(), (a.values() + rho * b.values()) / (1.0 + 3.0 * rho));
}

DenseTensor3 interpolate_x(const ObservationSet& omega, const TuckerModel& model) {
    DenseTensor3 recon = model.reconstruct();
    if (!(recon.dims() == omega.dims()))
        throw DimensionError("interpolate_x: model dims must match omega dims");
    Vector xv = recon.values();
    const std::vector<Observation>& entries = omega.entries();
    const std::vector<Index>& offs = omega.linear_indices();
    for (std::size_t k = 0; k < entries.size(); ++k) xv[offs[k]] = entries[k].value;
    return DenseTensor3(recon.dims(), std::move(xv));
}

DenseTensor3 shooi_data_update(const ObservationSet& omega, const DenseTensor3& recon,
                               const DenseTensor3& multiplier, double rho) {
    if (!(recon.dims() == omega.dims()) || !(multiplier.dims() == omega.dims()))
        throw DimensionError("shooi_data_update: dims mismatch");
    if (!(rho > 0)) throw RangeError("shooi_data_update: rho must be positive");
    Vector z = recon.values() - multiplier.values() / rho;
    const std::vector<Observation>& entries = omega.entries();
    const std::vector<Index>& offs = omega.linear_indices();
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const Index off = offs[k];
        z[off] = (entries[k].value + rho * recon.values()[off] - multiplier.values()[off]) /
                 (1.0 + rho);
    }
    return DenseTensor3(recon.dims(), std::move(z));
}

SolverResult solve_roid(const ObservationSet& omega, const SolverConfig& config,
                        const DenseTensor3* reference) {
    if (omega.count() == 0) throw DegenerateInputError("solve_roid: omega is empty");
    return solve_core_split(&omega, omega.to_tensor(), nullptr, config, reference);
}

SolverResult solve_full(const DenseTensor3& t, const SolverConfig& config,
                        const DenseTensor3* reference) {
    return solve_core_split(nullptr, t, nullptr, config, reference);
}

SolverResult solve_groid(const ObservationSet& omega, const std::array<Matrix, 3>& laplacians,
                         const SolverConfig& config, const DenseTensor3* reference) {
    if (omega.count() == 0) throw DegenerateInputError("solve_groid: omega is empty");
    const Dims3 dims = omega.dims();
    for (int n = 0; n < 3; ++n) {
        const Matrix& l = laplacians[n];
        if (l.rows() != dims.extent(n + 1) || l.cols() != dims.extent(n + 1))
            throw DimensionError("solve_groid: laplacian size must match the mode extent");
        if ((l - l.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            throw InputError("solve_groid: laplacian must be symmetric");
    }
    return solve_core_split(&omega, omega.to_tensor(), &laplacians, config, reference);
}

SolverResult solve_shooi(const ObservationSet& omega, const SolverConfig& config,
                         const DenseTensor3* reference) {
    if (omega.count() == 0) throw DegenerateInputError("solve_shooi: omega is empty");
    const Dims3 dims = omega.dims();
    const Dims3 rank = config.rank;
    config.validate(dims);
    const double norm_t = omega.norm();
    if (norm_t == 0.0) return zero_result(dims, rank, config.record_trace);

    DenseTensor3 z = omega.to_tensor();
    InitState st = init_factors(z, rank, config.init, config.seed);
    Matrix u = std::move(st.u), v = std::move(st.v), w = std::move(st.w);
    DenseTensor3 y(dims);  // tensor multiplier
    double rho = config.rho0;

    SolverResult res;
    res.trace = IterationTrace(config.record_trace);
    DenseTensor3 core = std::move(st.core);
    DenseTensor3 recon(dims);
    bool converged_flag = false;
    int it = 0;
    for (it = 1; it <= config.maxiter; ++it) {
        DenseTensor3 shifted = DenseTensor3(dims, z.values() + y.values() / rho);
        SweepOut sw = sweep_svds(shifted, v, w, rank);
        u = std::move(sw.u);
        v = std::move(sw.v);
        w = std::move(sw.w);
        core = mode_product(sw.m3, w.transpose(), 3);
        recon = multi_mode_product(core, u, v, w);
        DenseTensor3 z_prev = std::move(z);
        z = shooi_data_update(omega, recon, y, rho);
        const double r = (z.values() - recon.values()).norm();
        const double s = rho * (z.values() - z_prev.values()).norm();
        y = DenseTensor3(dims, y.values() + rho * (z.values() - recon.values()));

        if (res.trace.enabled()) {
            double misfit = 0.0;
            for (std::size_t k = 0; k < omega.entries().size(); ++k) {
                const double d = z.values()[omega.linear_indices()[k]] - omega.entries()[k].value;
                misfit += d * d;
            }
            res.trace.add({it, r, s, rho, 0.5 * misfit, trace_rse(recon, reference)});
        }

        rho = penalty_update(rho, r, s, config.gamma, config.rho_min, config.rho_max);
        if (r / norm_t < config.tol) {
            converged_flag = true;
            break;
        }
    }

    res.model = TuckerModel{std::move(core), std::move(u), std::move(v), std::move(w)};
    res.completed = std::move(recon);
    res.iterations = std::min(it, config.maxiter);
    res.converged = converged_flag;
    return res;
}

TuckerModel solve_hooi(const DenseTensor3& t, Dims3 rank, double tol, int maxiter) {
    SolverConfig probe;
    probe.rank = rank;
    probe.tol = tol > 0 ? tol : 1.0;  // reuse the rank/dims checks
    probe.maxiter = std::max(maxiter, 1);
    probe.validate(t.dims());
    if (!(tol >= 0)) throw ConfigError("solve_hooi: tol must be nonnegative");
    if (maxiter < 1) throw ConfigError("solve_hooi: maxiter must be at least 1");

    const double norm_t = frobenius(t);
    if (norm_t == 0.0) return zero_result(t.dims(), rank, false).model;

    InitState st = init_factors(t, rank, FactorInit::HosvdOfFilled, 0);
    Matrix u = std::move(st.u), v = std::move(st.v), w = std::move(st.w);
    DenseTensor3 core = std::move(st.core);
    double prev_fit = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= maxiter; ++it) {
        SweepOut sw = sweep_svds(t, v, w, rank);
        u = std::move(sw.u);
        v = std::move(sw.v);
        w = std::move(sw.w);
        core = mode_product(sw.m3, w.transpose(), 3);
        const double fit = frobenius(t - multi_mode_product(core, u, v, w));
        if (std::abs(prev_fit - fit) < tol * std::max(1.0, norm_t)) break;
        prev_fit = fit;
    }
    return TuckerModel{std::move(core), std::move(u), std::move(v), std::move(w)};
}

}  // namespace roid
