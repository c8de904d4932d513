#pragma once

#include <array>
#include <cstdint>

#include "roid/admm.hpp"
#include "roid/tensor.hpp"
#include "roid/types.hpp"

namespace roid {

/// Tucker model: core tensor plus column-orthonormal factors.
struct TuckerModel {
    DenseTensor3 core;
    Matrix u, v, w;

    Dims3 rank() const { return core.dims(); }
    DenseTensor3 reconstruct() const { return multi_mode_product(core, u, v, w); }
};

enum class FactorInit {
    HosvdOfFilled,      // svds of each unfolding of the zero-filled tensor
    RandomOrthonormal,  // QR of seeded Gaussian
};

struct SolverConfig {
    Dims3 rank{0, 0, 0};
    double lambda = 100.0;
    double mu = 0.0;  // graph penalty weight (GROID)
    std::array<double, 3> weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
    double rho0 = 1e-2;
    double gamma = 2.0;
    double rho_min = 1e-6;
    double rho_max = 1e6;
    double tol = 1e-5;
    int maxiter = 500;
    FactorInit init = FactorInit::HosvdOfFilled;
    std::uint64_t seed = 0;
    bool record_trace = false;

    void validate(Dims3 dims) const;
};

struct SolverResult {
    TuckerModel model;
    DenseTensor3 completed;
    IterationTrace trace;
    int iterations = 0;
    bool converged = false;
};

/// SVT at threshold weight/(lambda*rho) applied to core_unfolding + multiplier/rho.
Matrix shrink_aux(const Matrix& core_unfolding, const Matrix& multiplier, double rho,
                  double lambda, double weight);

struct FactorSet {
    Matrix u, v, w;
    bool unique = true;  // cleared when any procrustes input was rank-deficient
};

/// One Gauss-Seidel factor sweep for the quadratic-plus-cross objective
/// g(U,V,W) = ||x x1 U^T x2 V^T x3 W^T + rho*b||_F^2: each mode takes the
/// gradient-based procrustes step, which never decreases g. At rho = 0 the
/// exact maximizer (dominant left subspace) is returned, matching a classic
/// HOOI sweep.
FactorSet factor_update(const DenseTensor3& x, const TuckerModel& factors,
                        const DenseTensor3& b, double rho);

/// Closed-form core minimizer (x x1 u^T x2 v^T x3 w^T + rho*b) / (1 + 3*rho).
DenseTensor3 core_update(const DenseTensor3& x, const Matrix& u, const Matrix& v,
                         const Matrix& w, const DenseTensor3& b, double rho);

/// P_Omega(T) + P_Omega_complement(reconstruction).
DenseTensor3 interpolate_x(const ObservationSet& omega, const TuckerModel& model);

/// Least-squares data update of the observed-entry split: on Omega
/// (T + rho*recon - multiplier)/(1 + rho), elsewhere recon - multiplier/rho.
DenseTensor3 shooi_data_update(const ObservationSet& omega, const DenseTensor3& recon,
                               const DenseTensor3& multiplier, double rho);

SolverResult solve_roid(const ObservationSet& omega, const SolverConfig& config,
                        const DenseTensor3* reference = nullptr);
SolverResult solve_full(const DenseTensor3& t, const SolverConfig& config,
                        const DenseTensor3* reference = nullptr);
SolverResult solve_shooi(const ObservationSet& omega, const SolverConfig& config,
                         const DenseTensor3* reference = nullptr);
SolverResult solve_groid(const ObservationSet& omega, const std::array<Matrix, 3>& laplacians,
                         const SolverConfig& config, const DenseTensor3* reference = nullptr);
TuckerModel solve_hooi(const DenseTensor3& t, Dims3 rank, double tol = 1e-5, int maxiter = 500);

}  // namespace roid
