#include "rsynth/benchmarks.hpp"

#include <cmath>
#include <complex>

namespace rsynth {

namespace {

double param(const std::map<std::string, double>& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) throw ConfigurationError("model spec: missing parameter '" + key + "'");
  return it->second;
}

HybridSystemModel pendulum_model(const ModelSpec& spec) {
  const double cart_mass = param(spec.params, "M");
  const double rod_mass = param(spec.params, "m");
  const double length = param(spec.params, "l");
  const double damping = param(spec.params, "c");
  const double gravity = param(spec.params, "g");
  /* lumped constants of the rod-on-cart torque balance */
  const double m_eff = cart_mass + rod_mass / 2.0;
  const double inertia = (rod_mass / 3.0 + cart_mass) * length * length;

  HybridSystemModel model;
  model.state_dim = 2;
  model.input_dim = 1;
  model.binary_dim = 0;
  model.state_bounds = spec.state_bounds;
  model.input_bounds = spec.input_bounds;
  model.wrap = spec.wrap;

  ModeDynamics mode;
  mode.binary = {};
  mode.drift = [=](const Vec& x) {
    Vec dx(2);
    dx[0] = x[1];
    dx[1] = (-damping * x[1] - m_eff * gravity * length * std::sin(x[0])) / inertia;
    return dx;
  };
  mode.input_map = [=](const Vec&) {
    Mat b(2, 1);
    b << 0.0, 1.0 / inertia;
    return b;
  };
  model.modes.push_back(std::move(mode));
  model.validate();
  return model;
}

HybridSystemModel threetank_model(const ModelSpec& spec) {
  const double k1 = param(spec.params, "k1");
  const double k2 = param(spec.params, "k2");
  const double area = param(spec.params, "area");

  HybridSystemModel model;
  model.state_dim = 3;
  model.input_dim = 2;
  model.binary_dim = 2;
  model.state_bounds = spec.state_bounds;
  model.input_bounds = spec.input_bounds;
  model.wrap = spec.wrap;

  Mat b(3, 2);
  b << 1.0 / area, 0.0, 0.0, 1.0 / area, 0.0, 0.0;

  /* valve words [v13, v23]: each open valve couples its tank with tank 3 */
  for (int v13 = 0; v13 <= 1; ++v13) {
    for (int v23 = 0; v23 <= 1; ++v23) {
      Mat a = Mat::Zero(3, 3);
      if (v13) {
        a(0, 0) -= k1 / area;
        a(0, 2) += k1 / area;
        a(2, 0) += k1 / area;
        a(2, 2) -= k1 / area;
      }
      if (v23) {
        a(1, 1) -= k1 / area;
        a(1, 2) += k1 / area;
        a(2, 1) += k1 / area;
        a(2, 2) -= k1 / area;
      }
      a(2, 2) -= k2 / area;  // outlet of tank 3 always drains

      ModeDynamics mode;
      mode.binary = {static_cast<std::uint8_t>(v13), static_cast<std::uint8_t>(v23)};
      mode.drift = [a](const Vec& x) { return Vec(a * x); };
      mode.input_map = [b](const Vec&) { return b; };
      model.modes.push_back(std::move(mode));
    }
  }
  model.validate();
  return model;
}

HybridSystemModel pwa_model(const ModelSpec& spec) {
  HybridSystemModel model;
  model.state_dim = spec.state_bounds.dim();
  model.input_dim = spec.input_bounds.lo.size() ? spec.input_bounds.dim() : 0;
  model.binary_dim = spec.binary_dim;
  model.state_bounds = spec.state_bounds;
  model.input_bounds = spec.input_bounds;
  model.wrap = spec.wrap;
  if (spec.pwa_modes.empty()) throw ConfigurationError("pwa model: no modes given");
  for (const auto& pm : spec.pwa_modes) {
    if (pm.a_mat.rows() != model.state_dim || pm.a_mat.cols() != model.state_dim ||
        pm.b_mat.rows() != model.state_dim || pm.b_mat.cols() != model.input_dim ||
        pm.offset.size() != model.state_dim)
      throw ConfigurationError("pwa model: matrix dimensions do not match the bounds");
    ModeDynamics mode;
    mode.binary = pm.binary;
    const Mat a = pm.a_mat;
    const Vec c = pm.offset;
    const Mat b = pm.b_mat;
    mode.drift = [a, c](const Vec& x) { return Vec(a * x + c); };
    mode.input_map = [b](const Vec&) { return b; };
    model.modes.push_back(std::move(mode));
  }
  model.validate();
  return model;
}

}  // namespace

HybridSystemModel build_model(const ModelSpec& spec) {
  if (spec.type == "pendulum") return pendulum_model(spec);
  if (spec.type == "threetank") return threetank_model(spec);
  if (spec.type == "pwa") return pwa_model(spec);
  throw ConfigurationError("unknown model type '" + spec.type + "'");
}

Stabilizer build_stabilizer(const Scenario& sc) {
  Stabilizer stab;
  if (sc.stabilizer.type == "pendulum_pd") {
    const double k1 = param(sc.stabilizer.params, "k1");
    const double k2 = param(sc.stabilizer.params, "k2");
    const double cart_mass = param(sc.model.params, "M");
    const double rod_mass = param(sc.model.params, "m");
    const double length = param(sc.model.params, "l");
    const double damping = param(sc.model.params, "c");
    const double gravity = param(sc.model.params, "g");
    const double m_eff = cart_mass + rod_mass / 2.0;
    const double inertia = (rod_mass / 3.0 + cart_mass) * length * length;
    const double target = sc.des[0];

    /* require both linearized closed-loop poles at or left of -2:
     * error dynamics  e'' = -(k1/I) e - (k2/I) e'  */
    const double a = k1 / inertia, b = k2 / inertia;
    const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4.0 * a, 0.0));
    const double re1 = ((-b + disc) / 2.0).real();
    const double re2 = ((-b - disc) / 2.0).real();
    if (re1 > -2.0 + 1e-9 || re2 > -2.0 + 1e-9)
      throw ConfigurationError("pendulum stabilizer gains leave a closed-loop pole right of -2");

    stab.law = [=](const Vec& x) {
      Vec u(1);
      u[0] = m_eff * gravity * length * std::sin(x[0]) + damping * x[1] -
             k1 * (x[0] - target) - k2 * x[1];
      return u;
    };
    stab.binary = nullptr;
  } else if (sc.stabilizer.type == "tank_hold") {
    const double k1 = param(sc.model.params, "k1");
    const double kp = param(sc.stabilizer.params, "kp");
    const double area = param(sc.model.params, "area");
    const Vec des = sc.des;

    /* below the tank-3 setpoint both valves feed it; above, both close and its
     * outlet drains it. pumps hold tanks 1-2 by balancing the chosen branch's
     * outflow plus a small proportional pull toward the setpoint. */
    stab.binary = [des](const Vec& x) -> BinaryWord {
      const bool open = x[2] < des[2];
      return {static_cast<std::uint8_t>(open), static_cast<std::uint8_t>(open)};
    };
    stab.law = [=](const Vec& x) {
      const bool open = x[2] < des[2];
      Vec u(2);
      for (int i = 0; i < 2; ++i) {
        const double balance = open ? k1 * (x[i] - x[2]) : 0.0;
        u[i] = balance + kp * area * (des[i] - x[i]);
      }
      return u;
    };
  } else if (sc.stabilizer.type == "none") {
    stab.law = [dim = sc.model.input_bounds.dim()](const Vec&) { return Vec::Zero(dim); };
    stab.binary = nullptr;
  } else {
    throw ConfigurationError("unknown stabilizer type '" + sc.stabilizer.type + "'");
  }
  return stab;
}

Scenario make_pendulum_scenario(bool desk) {
  Scenario sc;
  sc.name = desk ? "pendulum-desk" : "pendulum";
  sc.model.type = "pendulum";
  sc.model.params = {{"M", 0.45}, {"m", 0.1}, {"l", 0.3}, {"c", 0.2}, {"g", 9.8}};
  sc.model.state_bounds.lo = Vec(2);
  sc.model.state_bounds.hi = Vec(2);
  sc.model.state_bounds.lo << 0.0, -10.0;
  sc.model.state_bounds.hi << 2.0 * M_PI, 10.0;
  sc.model.input_bounds.lo = Vec::Constant(1, -0.9);
  sc.model.input_bounds.hi = Vec::Constant(1, 0.9);
  sc.model.wrap = {true, false};
  sc.model.binary_dim = 0;

  sc.seed = desk ? std::vector<int>{20, 16} : std::vector<int>{40, 32};

  sc.family.t_rs = 0.04;
  sc.family.intervals = 4;
  std::vector<double> amps;
  if (desk) {
    amps = {-0.9, -0.45, 0.0, 0.45, 0.9};
  } else {
    for (int i = 0; i <= 12; ++i) amps.push_back(-0.9 + 0.15 * i);
  }
  sc.family.amplitudes = {amps};
  sc.family.binary_words = {{}};
  sc.family.budget = 40'000'000;
  sc.family.sample_count = 0;

  sc.costs.q1 = Vec::Ones(2);
  sc.costs.q2 = Vec::Ones(2);
  sc.costs.r = Vec::Constant(1, 1e-6);
  sc.costs.p = 2.0;

  sc.supervisor.t_s = 1.0;
  sc.supervisor.max_steps = desk ? 2000 : 4000;
  sc.supervisor.capture_dwell = 10;
  /* a fine-tune step must be allowed to outlast one replay: a hop can land a
   * quarter radian short of the next node, and at 2-3 rad/s closing that gap
   * takes two horizons. the placement residual keeps the shorter budget so
   * node choice still reflects what a single replay-length correction can do */
  sc.supervisor.t_fs_max = 2.0 * sc.family.t_rs;

  /* gains 4*I' put both closed-loop poles at -2 and keep the Euclidean error
   * norm non-increasing over every 1.0 s stabilizer period */
  const double inertia = (0.1 / 3.0 + 0.45) * 0.3 * 0.3;
  sc.stabilizer.type = "pendulum_pd";
  sc.stabilizer.params = {{"k1", 4.0 * inertia}, {"k2", 4.0 * inertia}};

  sc.placement.t_fs_max = sc.family.t_rs;

  sc.init = Vec::Zero(2);
  sc.des = Vec(2);
  sc.des << M_PI, 0.0;
  return sc;
}

Scenario make_threetank_scenario(bool desk) {
  Scenario sc;
  sc.name = desk ? "threetank-desk" : "threetank";
  sc.model.type = "threetank";
  sc.model.params = {{"k1", 3.89e-5}, {"k2", 8.65e-6}, {"area", 0.0123},
                     {"h_max", 0.66}, {"u_max", 2e-5}};
  sc.model.state_bounds.lo = Vec::Zero(3);
  sc.model.state_bounds.hi = Vec::Constant(3, 0.66);
  sc.model.input_bounds.lo = Vec::Zero(2);
  sc.model.input_bounds.hi = Vec::Constant(2, 2e-5);
  sc.model.wrap = {false, false, false};
  sc.model.binary_dim = 2;

  sc.seed = desk ? std::vector<int>{5, 5, 10} : std::vector<int>{10, 10, 20};

  /* the desk grid halves the resolution, so the horizon doubles: one horizon
   * of full pumping then moves roughly one element in every tank */
  sc.family.t_rs = desk ? 80.0 : 40.0;
  sc.family.intervals = 4;
  const double u_max = 2e-5;
  sc.family.amplitudes = {{0.0, u_max / 2.0, u_max}, {0.0, u_max / 2.0, u_max}};
  sc.family.binary_words = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  sc.family.budget = 40'000'000;
  /* the per-element signal sample must be dense enough to hit the thin class
   * of signals that enter a neighbor band and stay there (one pump near full,
   * the other near idle, valves mostly shut) */
  sc.family.sample_count = 20000;
  sc.family.sample_seed = 1;

  sc.costs.q1 = Vec::Ones(3);
  sc.costs.q2 = Vec::Ones(3);
  sc.costs.r = Vec::Constant(2, 1e-6);
  sc.costs.p = 2.0;

  sc.supervisor.t_s = 10.0;
  sc.supervisor.max_steps = desk ? 400 : 800;
  sc.supervisor.capture_dwell = 10;
  sc.supervisor.noise_amplitude = Vec::Constant(3, 0.03);
  /* keep the fine-tune trigger above the measurement-noise radius
   * (0.03 per tank -> up to 0.03*sqrt(3) ~ 0.052 in norm); below that the
   * loop chases phantom deviations with a correction every sample */
  sc.supervisor.delta1 = 0.06;
  /* capture must be sticky under the same noise: with the true state held at
   * the setpoint the measured distance still reads up to 0.052, so a smaller
   * delta2 drops out of S mid-dwell and the exit corrections random-walk the
   * levels out of the destination band */
  sc.supervisor.delta2 = 0.08;
  /* corrections run open loop from a noisy level reading, so cap them at a
   * quarter hop: an 80 s plan built on a 0.03 m phantom error can pump a
   * tank clear out of its element before the next measurement */
  sc.supervisor.t_fs_max = sc.family.t_rs / 4.0;

  sc.stabilizer.type = "tank_hold";
  sc.stabilizer.params = {{"kp", 0.02}};

  sc.placement.t_fs_max = sc.family.t_rs;

  sc.init = Vec::Zero(3);
  sc.des = Vec(3);
  sc.des << 0.44, 0.35, 0.2;
  return sc;
}

Scenario load_scenario(const std::string& name_or_path) {
  if (name_or_path == "pendulum") return make_pendulum_scenario(false);
  if (name_or_path == "pendulum-desk") return make_pendulum_scenario(true);
  if (name_or_path == "threetank") return make_threetank_scenario(false);
  if (name_or_path == "threetank-desk") return make_threetank_scenario(true);
  return load_scenario_file(name_or_path);
}

}  // namespace rsynth
