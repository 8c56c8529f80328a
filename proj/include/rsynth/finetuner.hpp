#pragma once

#include "rsynth/simplex.hpp"
#include "rsynth/types.hpp"

namespace rsynth {

/* drive x0 toward target inside one element:
 * predicted update x+ = x0 + (a + b*u) * t over a single step of length t,
 * minimizing the L1 distance |target - x+| subject to x+ staying in the
 * element box, u within input bounds and t in [t_min, t_max] */
struct FineTuneRequest {
  Vec x0;
  Vec target;
  Box element;     // state box of the element
  Vec a;           // frozen drift at the element center
  Mat b;           // frozen input map at the element center
  Vec u_min;
  Vec u_max;
  double t_min = 0.0;
  double t_max = 0.0;

  void validate() const;
};

/* epigraph LP over p = [z (n) | t (1) | v (m)] with v = u*t:
 *   minimize sum(z)
 *   |target - x0 - M y| <= z        (M = [a b], y = [t; v])
 *   x_a <= x0 + M y <= x_b
 *   u_min * t <= v <= u_max * t
 *   t_min <= t <= t_max
 */
LinearProgram assemble_lp(const FineTuneRequest& req);

struct FineTuneResult {
  bool feasible = false;
  Vec u;                 // recovered input, u = v/t (zero when t == 0)
  double t = 0.0;
  Vec x_predicted;       // x0 + a*t + b*v
  double residual = 0.0; // optimal L1 distance to the target
};

FineTuneResult fine_tune(const FineTuneRequest& req);

}  // namespace rsynth
