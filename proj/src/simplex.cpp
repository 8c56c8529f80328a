#include "rsynth/simplex.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace rsynth {

void LinearProgram::validate() const {
  if (cost.size() == 0) throw ConfigurationError("lp: empty cost vector");
  if (ineq_a.cols() != cost.size()) throw ConfigurationError("lp: constraint/cost dimension mismatch");
  if (ineq_a.rows() != ineq_b.size()) throw ConfigurationError("lp: constraint row/rhs mismatch");
  if (!cost.allFinite() || !ineq_a.allFinite() || !ineq_b.allFinite())
    throw ConfigurationError("lp: non-finite coefficient");
}

void dump_lp(std::ostream& os, const LinearProgram& lp) {
  os << "minimize " << lp.cost.transpose() << "\nsubject to (A x <= b):\n";
  for (int i = 0; i < lp.ineq_a.rows(); ++i)
    os << "  " << lp.ineq_a.row(i) << "  <=  " << lp.ineq_b[i] << "\n";
}

namespace {

/* dense simplex tableau: rows 0..m-1 constraints, row m reduced costs;
 * column ncols holds the right-hand side */
struct Tableau {
  Mat t;
  std::vector<int> basis;   // basic column per constraint row
  int m = 0;
  int ncols = 0;

  void pivot(int prow, int pcol) {
    t.row(prow) /= t(prow, pcol);
    for (int i = 0; i <= m; ++i) {
      if (i == prow) continue;
      const double f = t(i, pcol);
      if (f != 0.0) t.row(i) -= f * t.row(prow);
    }
    basis[prow] = pcol;
  }

  /* Bland's rule: entering = lowest eligible column index; leaving = among
   * minimum-ratio rows, the one whose basic variable has the lowest index.
   * returns false when optimal, throws on unbounded. */
  bool iterate(const std::vector<bool>& banned, double tol, bool* unbounded) {
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (banned[j]) continue;
      if (t(m, j) < -tol) { enter = j; break; }
    }
    if (enter < 0) return false;

    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) <= tol) continue;
      const double ratio = t(i, ncols) / t(i, enter);
      if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
        best = ratio;
        leave = i;
      }
    }
    if (leave < 0) {
      *unbounded = true;
      return false;
    }
    pivot(leave, enter);
    return true;
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol) {
  lp.validate();
  const int n = static_cast<int>(lp.cost.size());
  const int m = static_cast<int>(lp.ineq_a.rows());

  /* standard form: x = xp - xm with xp, xm >= 0, one slack per row;
   * rows with negative rhs are negated, which flips their slack and
   * requires an artificial variable to seed a feasible basis */
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (lp.ineq_b[i] < 0.0) art_rows.push_back(i);
  const int nart = static_cast<int>(art_rows.size());
  const int ncols = 2 * n + m + nart;

  Tableau tb;
  tb.m = m;
  tb.ncols = ncols;
  tb.t = Mat::Zero(m + 1, ncols + 1);
  tb.basis.assign(m, -1);

  int art = 0;
  for (int i = 0; i < m; ++i) {
    const double sgn = lp.ineq_b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      tb.t(i, j) = sgn * lp.ineq_a(i, j);
      tb.t(i, n + j) = -sgn * lp.ineq_a(i, j);
    }
    tb.t(i, 2 * n + i) = sgn;  // slack
    tb.t(i, ncols) = sgn * lp.ineq_b[i];
    if (sgn < 0.0) {
      tb.t(i, 2 * n + m + art) = 1.0;
      tb.basis[i] = 2 * n + m + art;
      ++art;
    } else {
      tb.basis[i] = 2 * n + i;
    }
  }

  std::vector<bool> banned(ncols, false);
  const int max_iter = 2000 * (ncols + m + 4);

  if (nart > 0) {
    /* phase 1: minimize the sum of artificials */
    for (int k = 0; k < nart; ++k) tb.t(m, 2 * n + m + k) = 1.0;
    for (int i = 0; i < m; ++i)
      if (tb.basis[i] >= 2 * n + m) tb.t.row(m) -= tb.t.row(i);

    bool unbounded = false;
    int iter = 0;
    while (tb.iterate(banned, tol, &unbounded))
      if (++iter > max_iter) throw Error("simplex: phase-1 iteration limit");
    if (unbounded) throw Error("simplex: phase-1 unbounded (internal error)");
    const double phase1 = -tb.t(m, ncols);  // objective row rhs carries -value
    if (std::abs(phase1) > tol) return LpSolution{LpStatus::Infeasible, Vec(), 0.0};

    /* drive leftover artificials out of the basis where possible */
    for (int i = 0; i < m; ++i) {
      if (tb.basis[i] < 2 * n + m) continue;
      int piv = -1;
      for (int j = 0; j < 2 * n + m; ++j)
        if (std::abs(tb.t(i, j)) > tol) { piv = j; break; }
      if (piv >= 0) tb.pivot(i, piv);
    }
    for (int k = 0; k < nart; ++k) banned[2 * n + m + k] = true;
  }

  /* phase 2: install the real objective and re-eliminate basic columns */
  tb.t.row(m).setZero();
  for (int j = 0; j < n; ++j) {
    tb.t(m, j) = lp.cost[j];
    tb.t(m, n + j) = -lp.cost[j];
  }
  for (int i = 0; i < m; ++i) {
    const int bj = tb.basis[i];
    const double f = tb.t(m, bj);
    if (f != 0.0) tb.t.row(m) -= f * tb.t.row(i);
  }

  bool unbounded = false;
  int iter = 0;
  while (tb.iterate(banned, tol, &unbounded))
    if (++iter > max_iter) throw Error("simplex: phase-2 iteration limit");
  if (unbounded) return LpSolution{LpStatus::Unbounded, Vec(), 0.0};

  Vec split = Vec::Zero(ncols);
  for (int i = 0; i < m; ++i)
    if (tb.basis[i] < ncols) split[tb.basis[i]] = tb.t(i, ncols);

  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.x = split.head(n) - split.segment(n, n);
  sol.objective = lp.cost.dot(sol.x);
  return sol;
}

}  // namespace rsynth
