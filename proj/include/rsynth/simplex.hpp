#pragma once

#include <iosfwd>

#include "rsynth/types.hpp"

namespace rsynth {

/* minimize cost . x  subject to  ineq_a * x <= ineq_b, x free */
struct LinearProgram {
  Vec cost;
  Mat ineq_a;
  Vec ineq_b;

  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double objective = 0.0;
};

/* dense two-phase primal simplex with Bland's anti-cycling rule.
 * free variables are split into positive parts internally. */
LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-9);

/* human-readable dump for debugging solver issues */
void dump_lp(std::ostream& os, const LinearProgram& lp);

}  // namespace rsynth
