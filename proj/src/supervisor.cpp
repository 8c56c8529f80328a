#include "rsynth/supervisor.hpp"

#include <cmath>
#include <random>

#include "rsynth/finetuner.hpp"

namespace rsynth {

const char* mode_name(ControllerMode m) {
  switch (m) {
    case ControllerMode::RS: return "RS";
    case ControllerMode::FS: return "FS";
    case ControllerMode::S: return "S";
  }
  return "?";
}

SupervisorConfig resolve_supervisor_defaults(SupervisorConfig cfg, const Partition& part,
                                             double t_rs, const Vec& des) {
  const int dest = part.locate(des);
  if (cfg.delta1 <= 0.0) cfg.delta1 = 0.25 * part.elements[0].box.half_diagonal();
  if (cfg.delta2 <= 0.0) cfg.delta2 = 0.50 * part.elements[dest].box.half_diagonal();
  if (cfg.t_fs_max <= 0.0) cfg.t_fs_max = t_rs;
  if (!(cfg.t_s > 0.0)) throw ConfigurationError("supervisor: sampling period t_s must be positive");
  if (cfg.max_steps < 1) throw ConfigurationError("supervisor: max_steps must be positive");
  return cfg;
}

ControllerMode supervise_mode(const Vec& x, const Vec& node, const Vec& des,
                              ControllerMode prev, double delta1, double delta2) {
  ControllerMode mode;
  if ((x - node).norm() <= delta1)
    mode = ControllerMode::RS;
  else if (prev == ControllerMode::FS)
    mode = ControllerMode::RS;
  else
    mode = ControllerMode::FS;
  if ((x - des).norm() <= delta2) mode = ControllerMode::S;
  return mode;
}

namespace {

Vec clamp_to_box(Vec x, const Box& box) {
  for (int i = 0; i < x.size(); ++i) x[i] = std::min(box.hi[i], std::max(box.lo[i], x[i]));
  return x;
}

struct NoiseSource {
  std::mt19937_64 rng;
  Vec amplitude;
  explicit NoiseSource(std::uint64_t seed, Vec amp) : rng(seed), amplitude(std::move(amp)) {}

  Vec measure(const HybridSystemModel& model, const Vec& x) {
    if (amplitude.size() == 0) return x;
    Vec m = x;
    for (int i = 0; i < x.size(); ++i) {
      const double u01 = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
      m[i] += amplitude[i] * (2.0 * u01 - 1.0);
    }
    m = model.wrap_state(std::move(m));
    return clamp_to_box(std::move(m), model.state_bounds);
  }
};

void append_trail(RunLog& log, const Trajectory& traj, double t0) {
  for (size_t k = 1; k < traj.states.size(); ++k) {
    log.trail_t.push_back(t0 + traj.times[k]);
    log.trail.push_back(traj.states[k]);
  }
}

/* fine-tune toward the node across the element's binary words, keeping the
 * minimum-residual feasible plan (ties resolve to the earlier word) */
struct FsPlan {
  bool ok = false;
  Vec u;
  BinaryWord ub;
  double t = 0.0;
  double predicted = -1.0;
};

FsPlan best_fine_tune(const Element& elem, const HybridSystemModel& model, const Vec& x0,
                      const Vec& target, double t_fs_max) {
  FsPlan plan;
  for (const auto& md : elem.mode_data) {
    FineTuneRequest req;
    req.x0 = x0;
    req.target = target;
    req.element = elem.box;
    req.a = md.a;
    req.b = md.b;
    req.u_min = model.input_bounds.lo;
    req.u_max = model.input_bounds.hi;
    req.t_min = 0.0;
    req.t_max = t_fs_max;
    const FineTuneResult r = fine_tune(req);
    if (!r.feasible) continue;
    if (!plan.ok || r.residual < plan.predicted - 1e-12) {
      plan.ok = true;
      plan.u = r.u;
      plan.ub = md.binary;
      plan.t = r.t;
      plan.predicted = r.residual;
    }
  }
  return plan;
}

}  // namespace

RunLog run_closed_loop(const HybridSystemModel& model, const Partition& part,
                       const TransitionGraph& tg, const ReachabilitySector& rs,
                       const Stabilizer& stab, const SupervisorConfig& cfg_in,
                       const Vec& x_init, const Vec& des, std::uint64_t noise_seed) {
  const SupervisorConfig cfg = resolve_supervisor_defaults(cfg_in, part, tg.family.t_rs, des);
  if (!check_reachability(rs, part, model.wrap_state(x_init)))
    throw ReachabilityFailure("closed loop: the initial element has no path to the destination");

  RunLog log;
  NoiseSource noise(noise_seed, cfg.noise_amplitude);
  Vec x = model.wrap_state(x_init);
  double t = 0.0;
  ControllerMode prev = ControllerMode::FS;  // Co(1); the first decision happens at k = 2
  int s_streak = 0;
  log.trail_t.push_back(0.0);
  log.trail.push_back(x);

  auto abort_run = [&](const std::string& why) {
    log.aborted = true;
    log.diagnostic = why + " (t=" + std::to_string(t) + ")";
  };

  /* a noisy reading near an element face can locate into an unroutable
   * neighbor while the true state is still on the route: coast one sampling
   * period on zero input and re-measure instead of giving up. the same goes
   * for fine-tuning there — a hop-less element's node is nobody's waypoint,
   * so steering toward it just digs the hole deeper. only a persistent hole
   * means the state really left the sector. with exact measurements a hole
   * reading IS the truth, so there is nothing to wait out. */
  const bool noisy = cfg.noise_amplitude.size() > 0 && cfg.noise_amplitude.maxCoeff() > 0.0;
  const int hole_patience = noisy ? 12 : 0;
  int hole_streak = 0;

  for (int step = 0; step < cfg.max_steps && !log.aborted; ++step) {
    const Vec x_meas = noise.measure(model, x);
    const int q = part.locate(x_meas);
    const Element& elem = part.elements[q];

    ControllerMode mode = supervise_mode(x_meas, elem.node, des, prev, cfg.delta1, cfg.delta2);
    const bool hole = q != rs.destination && rs.next_hop_element[q] < 0;
    if (hole && mode != ControllerMode::S) {
      LogSample smp;
      smp.t = t;
      smp.x = x;
      smp.x_meas = x_meas;
      smp.element = q;
      smp.mode = ControllerMode::RS;
      smp.u0 = Vec::Zero(model.input_dim);
      if (++hole_streak > hole_patience) {
        /* the policy is undefined here; stop with a log the caller can
         * inspect instead of losing the trajectory so far */
        abort_run("element " + std::to_string(q) + " has no next hop toward the destination");
        log.samples.push_back(std::move(smp));
        break;
      }
      PiecewiseConstantSignal sig;
      sig.interval_duration = cfg.t_s;
      sig.levels.push_back(SignalLevel{Vec::Zero(model.input_dim), tg.family.binary_words.front()});
      const Trajectory traj = integrate(model, x, sig);
      smp.duration = cfg.t_s;
      log.inputs.push_back(InputSegment{t, t + cfg.t_s, smp.u0, sig.levels.front().ub});
      append_trail(log, traj, t);
      if (traj.exited_domain) abort_run("trajectory left the domain while coasting");
      t += traj.times.back();
      x = traj.endpoint();
      log.samples.push_back(std::move(smp));
      prev = ControllerMode::RS;
      s_streak = 0;
      continue;
    }
    hole_streak = 0;
    if (mode == ControllerMode::RS && q == rs.destination)
      mode = ControllerMode::S;  // the destination stores no hop; hold with the stabilizer

    LogSample smp;
    smp.t = t;
    smp.x = x;
    smp.x_meas = x_meas;
    smp.element = q;
    smp.mode = mode;

    if (mode == ControllerMode::RS) {
      const PiecewiseConstantSignal sig = tg.family.signal(rs.next_hop_input[q]);
      const Trajectory traj = integrate(model, x, sig);
      smp.u0 = sig.levels.front().u;
      smp.duration = traj.times.back();
      for (size_t i = 0; i < sig.levels.size(); ++i)
        log.inputs.push_back(InputSegment{t + i * sig.interval_duration,
                                          t + (i + 1) * sig.interval_duration,
                                          sig.levels[i].u, sig.levels[i].ub});
      append_trail(log, traj, t);
      if (traj.exited_domain) abort_run("trajectory left the domain during a replay step");
      t += traj.times.back();
      x = traj.endpoint();
    } else if (mode == ControllerMode::FS) {
      const FsPlan plan = best_fine_tune(elem, model, x_meas, elem.node, cfg.t_fs_max);
      if (!plan.ok) {
        /* cannot improve from here; a zero-length step, the next decision is RS */
        smp.u0 = Vec::Zero(model.input_dim);
        smp.duration = 0.0;
      } else {
        smp.u0 = plan.u;
        smp.duration = plan.t;
        smp.fs_predicted = plan.predicted;
        if (plan.t > 1e-9) {
          PiecewiseConstantSignal sig;
          sig.interval_duration = plan.t;
          sig.levels.push_back(SignalLevel{plan.u, plan.ub});
          const Trajectory traj = integrate(model, x, sig);
          log.inputs.push_back(InputSegment{t, t + plan.t, plan.u, plan.ub});
          append_trail(log, traj, t);
          if (traj.exited_domain) abort_run("trajectory left the domain during a fine-tune step");
          t += traj.times.back();
          x = traj.endpoint();
          smp.fs_actual = (x - elem.node).lpNorm<1>();
        }
      }
    } else {
      if (log.first_s_time < 0.0) log.first_s_time = t;
      BinaryWord ub = stab.binary ? stab.binary(x_meas) : tg.family.binary_words.front();
      auto law = [&](const Vec& y) { return clamp_to_box(stab.law(y), model.input_bounds); };
      const Trajectory traj = integrate_feedback(model, x, law, ub, cfg.t_s, cfg.t_s / 100.0);
      smp.u0 = law(x_meas);
      smp.duration = cfg.t_s;
      log.inputs.push_back(InputSegment{t, t + cfg.t_s, smp.u0, ub});
      append_trail(log, traj, t);
      if (traj.exited_domain) abort_run("trajectory left the domain during a stabilizer step");
      t += traj.times.back();
      x = traj.endpoint();
    }

    log.samples.push_back(std::move(smp));
    s_streak = (mode == ControllerMode::S) ? s_streak + 1 : 0;
    prev = mode;
    if (s_streak >= cfg.capture_dwell) {
      log.sustained_capture = true;
      break;
    }
  }

  log.end_time = t;
  log.final_state = x;
  return log;
}

}  // namespace rsynth
