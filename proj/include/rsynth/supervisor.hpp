#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "rsynth/graph.hpp"

namespace rsynth {

enum class ControllerMode { RS, FS, S };
const char* mode_name(ControllerMode m);

/* terminal control law holding the state at the destination; the supervisor
 * clamps the continuous output to the model's input bounds */
struct Stabilizer {
  std::function<Vec(const Vec&)> law;              // x -> continuous input
  std::function<BinaryWord(const Vec&)> binary;    // x -> binary word (may be null for none)
};

struct SupervisorConfig {
  double delta1 = 0.0;       // RS proximity threshold; 0 = 25% of the element half-diagonal
  double delta2 = 0.0;       // capture threshold; 0 = 50% of the destination element half-diagonal
  double t_s = 0.0;          // stabilizer sampling period
  double t_fs_max = 0.0;     // fine-tune step-length cap; 0 = the family horizon
  int max_steps = 2000;      // decision-step cap
  int capture_dwell = 10;    // consecutive S samples that end the run
  Vec noise_amplitude;       // per-dimension uniform measurement noise; empty = none
};

/* fill the auto defaults once the partition and destination are known */
SupervisorConfig resolve_supervisor_defaults(SupervisorConfig cfg, const Partition& part,
                                             double t_rs, const Vec& des);

/* mode selection exactly as the supervisor algorithm prescribes */
ControllerMode supervise_mode(const Vec& x, const Vec& node, const Vec& des,
                              ControllerMode prev, double delta1, double delta2);

struct LogSample {
  double t = 0.0;
  Vec x;               // true state at the decision
  Vec x_meas;          // measured state the decision used
  int element = -1;    // element of the measured state
  ControllerMode mode = ControllerMode::RS;
  Vec u0;              // first applied continuous input of the step
  double duration = 0.0;
  double fs_predicted = -1.0;  // fine-tune predicted residual (FS steps)
  double fs_actual = -1.0;     // simulated residual after the FS step
};

struct InputSegment {
  double t0 = 0.0, t1 = 0.0;
  Vec u;
  BinaryWord ub;
};

struct RunLog {
  std::vector<LogSample> samples;
  std::vector<InputSegment> inputs;     // full piecewise-constant applied input trace
  std::vector<double> trail_t;          // dense integrator samples
  std::vector<Vec> trail;
  bool aborted = false;
  std::string diagnostic;
  bool sustained_capture = false;
  double first_s_time = -1.0;           // first stabilizer engagement
  double end_time = 0.0;
  Vec final_state;
};

RunLog run_closed_loop(const HybridSystemModel& model, const Partition& part,
                       const TransitionGraph& tg, const ReachabilitySector& rs,
                       const Stabilizer& stab, const SupervisorConfig& cfg,
                       const Vec& x_init, const Vec& des, std::uint64_t noise_seed = 0);

}  // namespace rsynth
