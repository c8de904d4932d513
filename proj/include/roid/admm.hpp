#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "roid/tensor.hpp"
#include "roid/types.hpp"

namespace roid {

/// Adaptive penalty of the r/s-balancing rule: grow by gamma when the primal
/// residual dominates, shrink when the dual does, then clamp to
/// [rho_min, rho_max].
double penalty_update(double rho, double r, double s, double gamma, double rho_min,
                      double rho_max);

struct ResidualPair {
    double primal = 0.0;  // r
    double dual = 0.0;    // s
};

/// r = max_n ||core_(n) - aux_n||_F;
/// s = max(rho*||core_(n) - core_prev_(n)||_F,
///         rho*||(x - x_prev) x1 u^T x2 v^T x3 w^T||_F).
/// Pass x_prev = x = nullptr when the data tensor is held fixed.
ResidualPair residuals(const DenseTensor3& core_prev, const DenseTensor3& core,
                       const std::array<Matrix, 3>& aux, const Matrix& u, const Matrix& v,
                       const Matrix& w, const DenseTensor3* x_prev, const DenseTensor3* x,
                       double rho);

/// max_n ||core_(n) - aux_n||_F / t_norm < tol.
bool converged(const std::array<Matrix, 3>& aux, const std::array<Matrix, 3>& core_unfoldings,
               double t_norm, double tol);

struct TraceRecord {
    int iter;
    double r;
    double s;
    double rho;
    double objective;
    double rse;  // NaN when no reference tensor was supplied
};

/// Optional per-iteration record of residuals, penalty, objective and
/// RSE against a reference; off by default.
class IterationTrace {
public:
    IterationTrace() = default;
    explicit IterationTrace(bool enabled) : enabled_(enabled) {}

    bool enabled() const { return enabled_; }
    void add(TraceRecord rec) {
        if (enabled_) records_.push_back(rec);
    }
    const std::vector<TraceRecord>& records() const { return records_; }
    void write_csv(std::ostream& os) const;

private:
    bool enabled_ = false;
    std::vector<TraceRecord> records_;
};

/// Shared per-run ADMM state for the solvers with matrix multipliers
/// (SHOOI keeps a tensor multiplier of its own).
struct AdmmState {
    std::array<Matrix, 3> aux;          // G_n
    std::array<Matrix, 3> multipliers;  // Y_n
    double rho = 0.0;
    int iteration = 0;
    double r = 0.0;
    double s = 0.0;
};

}  // namespace roid
