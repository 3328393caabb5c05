#pragma once

#include <vector>

#include "mechlab/linalg.hpp"

namespace mechlab {

struct LpResult {
    std::vector<double> x;
    double objective = 0;
    long pivots = 0;
    long degenerate_pivots = 0;
    double max_violation = 0;  // max_r (A x - b)_r, recomputed from the original data
};

enum class PivotRule {
    Bland,
    // Steepest edge on a perturbed rhs while the objective moves; Bland's rule during degenerate runs.
    DantzigBland,
};

// maximize c.x subject to A x <= b, x >= 0, with b >= 0 (the origin is feasible).
// Dense tableau over the nonbasic columns, rebuilt from A in long double every 200 pivots.
LpResult simplex_max(const Matrix& A, const std::vector<double>& b, const std::vector<double>& c,
                     double pivot_tol = 1e-9, long max_pivots = -1, PivotRule rule = PivotRule::DantzigBland);

}  // namespace mechlab
