#include "roid/admm.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace roid {

double penalty_update(double rho, double r, double s, double gamma, double rho_min,
                      double rho_max) {
    if (r > 10.0 * s)
        rho *= gamma;
    else if (s > 10.0 * r)
        rho /= gamma;
    return std::clamp(rho, rho_min, rho_max);
}

ResidualPair residuals(const DenseTensor3& core_prev, const DenseTensor3& core,
                       const std::array<Matrix, 3>& aux, const Matrix& u, const Matrix& v,
                       const Matrix& w, const DenseTensor3* x_prev, const DenseTensor3* x,
                       double rho) {
    if (!(core_prev.dims() == core.dims()))
        throw DimensionError("residuals: core dims changed between iterations");
    ResidualPair out;
    for (int n = 1; n <= 3; ++n) {
        const Matrix cur = unfold(core, n);
        const Matrix& g = aux[n - 1];
        if (g.rows() != cur.rows() || g.cols() != cur.cols())
            throw DimensionError("residuals: aux shape does not match core unfolding");
        out.primal = std::max(out.primal, (cur - g).norm());
        out.dual = std::max(out.dual, rho * (cur - unfold(core_prev, n)).norm());
    }
    if (x_prev && x) {
        const DenseTensor3 delta = *x - *x_prev;
        out.dual = std::max(
            out.dual, rho * frobenius(multi_mode_product(delta, u, v, w, /*transposed=*/true)));
    }
    return out;
}

bool converged(const std::array<Matrix, 3>& aux, const std::array<Matrix, 3>& core_unfoldings,
               double t_norm, double tol) {
    if (t_norm <= 0.0)
        throw DegenerateInputError("converged: observed tensor norm is zero");
    double worst = 0.0;
    for (int n = 0; n < 3; ++n)
        worst = std::max(worst, (core_unfoldings[n] - aux[n]).norm());
    return worst / t_norm < tol;
}

void IterationTrace::write_csv(std::ostream& os) const {
    os << "iter,r,s,rho,objective,rse\n";
    char buf[160];
    for (const TraceRecord& rec : records_) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", rec.iter, rec.r,
                      rec.s, rec.rho, rec.objective, rec.rse);
        os << buf;
    }
}

}  // namespace roid
