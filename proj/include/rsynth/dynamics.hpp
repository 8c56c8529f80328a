#pragma once

#include <functional>
#include <optional>

#include "rsynth/types.hpp"

namespace rsynth {

/* one continuous-time mode: dx/dt = drift(x) + input_map(x) * u */
struct ModeDynamics {
  std::function<Vec(const Vec&)> drift;       // n-vector
  std::function<Mat(const Vec&)> input_map;   // n x m
  BinaryWord binary;                          // binary-input word selecting this mode
  std::optional<Box> guard;                   // optional state guard (whole domain if absent)
};

/* input-affine hybrid model over a bounded state box; modes are selected by the
 * binary input word (first mode whose word matches and whose guard holds wins) */
struct HybridSystemModel {
  int state_dim = 0;
  int input_dim = 0;        // continuous channels
  int binary_dim = 0;       // binary channels
  Box state_bounds;
  Box input_bounds;                    // per continuous channel
  std::vector<bool> wrap;              // per state dimension: periodic over its bounds
  std::vector<ModeDynamics> modes;

  void validate() const;
  int select_mode(const BinaryWord& ub, const Vec& x) const;

  /* wrap periodic dimensions into [lo, hi); applied at sample points only */
  Vec wrap_state(Vec x) const;
  bool in_domain(const Vec& x) const;
};

/* dx/dt for the mode selected by (ub, x); throws DomainViolation outside the
 * state box and ModelDefinitionError when no mode matches */
Vec evaluate_rate(const HybridSystemModel& model, const Vec& x, const Vec& u, const BinaryWord& ub);

/* element-local affine freeze at a point: a = drift(at), b = input_map(at) */
struct AffineTerm {
  Vec a;
  Mat b;
};
AffineTerm affine_approximation(const HybridSystemModel& model, const Vec& at, const BinaryWord& ub);

/* piecewise-constant input: equal-duration intervals, one level per interval */
struct SignalLevel {
  Vec u;
  BinaryWord ub;
};
struct PiecewiseConstantSignal {
  double interval_duration = 0.0;
  std::vector<SignalLevel> levels;

  double horizon() const { return interval_duration * static_cast<double>(levels.size()); }
  void validate(const HybridSystemModel& model) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;         // states[k] at times[k]; wrapped at samples
  bool exited_domain = false;      // truncated at the last in-domain sample
  Vec endpoint() const { return states.back(); }
};

/* classical fixed-step 4th-order Runge-Kutta over the signal's horizon.
 * step must divide the interval duration; step <= 0 selects duration/10.
 * the mode is re-selected at the start of every step; leaving the state box
 * truncates the trajectory and sets exited_domain instead of clamping. */
Trajectory integrate(const HybridSystemModel& model, const Vec& x0,
                     const PiecewiseConstantSignal& signal, double step = 0.0);

/* same integrator with state-feedback continuous input (binary word held);
 * used by the supervisor's stabilizer periods */
Trajectory integrate_feedback(const HybridSystemModel& model, const Vec& x0,
                              const std::function<Vec(const Vec&)>& u_of_x,
                              const BinaryWord& ub, double duration, double step);

}  // namespace rsynth
