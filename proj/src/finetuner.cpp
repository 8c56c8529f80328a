#include "rsynth/finetuner.hpp"

#include <cmath>

namespace rsynth {

void FineTuneRequest::validate() const {
  element.validate("fine-tune element");
  const int n = element.dim();
  const int m = static_cast<int>(u_min.size());
  if (x0.size() != n || target.size() != n || a.size() != n)
    throw ConfigurationError("fine-tune: state dimension mismatch");
  if (b.rows() != n || b.cols() != m || u_max.size() != m)
    throw ConfigurationError("fine-tune: input dimension mismatch");
  if (!element.contains(x0, 1e-9)) throw ConfigurationError("fine-tune: x0 outside the element");
  if (!element.contains(target, 1e-9)) throw ConfigurationError("fine-tune: target outside the element");
  for (int c = 0; c < m; ++c)
    if (!(u_min[c] <= u_max[c])) throw ConfigurationError("fine-tune: inverted input bounds");
  if (!(t_min >= 0.0 && t_min <= t_max)) throw ConfigurationError("fine-tune: invalid step-length bounds");
}

LinearProgram assemble_lp(const FineTuneRequest& req) {
  req.validate();
  const int n = req.element.dim();
  const int m = static_cast<int>(req.u_min.size());
  const int ny = 1 + m;        // y = [t; v]
  const int np = n + ny;       // p = [z; y]

  Mat big_m(n, ny);
  big_m.col(0) = req.a;
  big_m.rightCols(m) = req.b;
  const Vec e = req.target - req.x0;

  /* epigraph block: [-I  -M; -I  M] p <= [-e; e] */
  const int rows2 = 2 * n;
  /* feasibility block over y: [M; -M; -u_max I; u_min -I; t-caps] */
  const int rows1 = 2 * n + 2 * m + 2;

  LinearProgram lp;
  lp.cost = Vec::Zero(np);
  lp.cost.head(n).setOnes();
  lp.ineq_a = Mat::Zero(rows2 + rows1, np);
  lp.ineq_b = Vec::Zero(rows2 + rows1);

  lp.ineq_a.block(0, 0, n, n) = -Mat::Identity(n, n);
  lp.ineq_a.block(0, n, n, ny) = -big_m;
  lp.ineq_b.head(n) = -e;
  lp.ineq_a.block(n, 0, n, n) = -Mat::Identity(n, n);
  lp.ineq_a.block(n, n, n, ny) = big_m;
  lp.ineq_b.segment(n, n) = e;

  int r = rows2;
  lp.ineq_a.block(r, n, n, ny) = big_m;
  lp.ineq_b.segment(r, n) = req.element.hi - req.x0;
  r += n;
  lp.ineq_a.block(r, n, n, ny) = -big_m;
  lp.ineq_b.segment(r, n) = req.x0 - req.element.lo;
  r += n;
  for (int c = 0; c < m; ++c) {          // v_c - u_max_c * t <= 0
    lp.ineq_a(r + c, n) = -req.u_max[c];
    lp.ineq_a(r + c, n + 1 + c) = 1.0;
  }
  r += m;
  for (int c = 0; c < m; ++c) {          // u_min_c * t - v_c <= 0
    lp.ineq_a(r + c, n) = req.u_min[c];
    lp.ineq_a(r + c, n + 1 + c) = -1.0;
  }
  r += m;
  lp.ineq_a(r, n) = 1.0;
  lp.ineq_b[r] = req.t_max;
  lp.ineq_a(r + 1, n) = -1.0;
  lp.ineq_b[r + 1] = -req.t_min;
  return lp;
}

FineTuneResult fine_tune(const FineTuneRequest& req) {
  const LinearProgram lp = assemble_lp(req);
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Unbounded)
    throw Error("fine-tune: LP unbounded (internal error, the feasible set is compact in y)");

  FineTuneResult out;
  if (sol.status != LpStatus::Optimal) return out;

  const int n = req.element.dim();
  const int m = static_cast<int>(req.u_min.size());
  const double t = sol.x[n];
  const Vec v = sol.x.tail(m);

  out.feasible = true;
  out.t = std::max(0.0, t);
  out.u = Vec::Zero(m);
  if (out.t > 1e-12) {
    for (int c = 0; c < m; ++c)
      out.u[c] = std::min(req.u_max[c], std::max(req.u_min[c], v[c] / out.t));
  }
  out.x_predicted = req.x0 + req.a * out.t + req.b * v;
  out.residual = sol.objective;
  return out;
}

}  // namespace rsynth
