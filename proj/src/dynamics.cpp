#include "rsynth/dynamics.hpp"

#include <cmath>

namespace rsynth {

double weighted_pnorm_pow(const Vec& x, const Vec& w, double p) {
  if (w.size() != x.size()) throw ConfigurationError("cost weight dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += w[i] * std::pow(std::abs(x[i]), p);
  return s;
}

void HybridSystemModel::validate() const {
  if (state_dim <= 0) throw ModelDefinitionError("model: state_dim must be positive");
  state_bounds.validate("model state bounds");
  if (state_bounds.dim() != state_dim) throw ModelDefinitionError("model: state bounds dimension mismatch");
  if (input_dim > 0) {
    input_bounds.validate("model input bounds");
    if (input_bounds.dim() != input_dim) throw ModelDefinitionError("model: input bounds dimension mismatch");
  }
  if (static_cast<int>(wrap.size()) != state_dim) throw ModelDefinitionError("model: wrap flags dimension mismatch");
  if (modes.empty()) throw ModelDefinitionError("model: no modes defined");
  for (const auto& md : modes) {
    if (!md.drift || !md.input_map) throw ModelDefinitionError("model: mode missing dynamics");
    if (static_cast<int>(md.binary.size()) != binary_dim)
      throw ModelDefinitionError("model: mode binary word length mismatch");
  }
}

int HybridSystemModel::select_mode(const BinaryWord& ub, const Vec& x) const {
  if (static_cast<int>(ub.size()) != binary_dim)
    throw ModelDefinitionError("binary input word has wrong length");
  for (int i = 0; i < static_cast<int>(modes.size()); ++i) {
    if (modes[i].binary != ub) continue;
    if (modes[i].guard && !modes[i].guard->contains(x)) continue;
    return i;
  }
  throw ModelDefinitionError("no mode matches the given binary input / state");
}

Vec HybridSystemModel::wrap_state(Vec x) const {
  for (int i = 0; i < state_dim; ++i) {
    if (!wrap[i]) continue;
    const double lo = state_bounds.lo[i], w = state_bounds.hi[i] - state_bounds.lo[i];
    double r = std::fmod(x[i] - lo, w);
    if (r < 0) r += w;
    x[i] = lo + r;
  }
  return x;
}

bool HybridSystemModel::in_domain(const Vec& x) const {
  for (int i = 0; i < state_dim; ++i) {
    if (wrap[i]) continue;  // periodic dimensions cannot leave their range
    if (x[i] < state_bounds.lo[i] || x[i] > state_bounds.hi[i]) return false;
  }
  return true;
}

Vec evaluate_rate(const HybridSystemModel& model, const Vec& x, const Vec& u, const BinaryWord& ub) {
  if (x.size() != model.state_dim) throw ModelDefinitionError("state dimension mismatch");
  if (u.size() != model.input_dim) throw ModelDefinitionError("input dimension mismatch");
  if (!model.state_bounds.contains(x))
    throw DomainViolation("state outside the model domain");
  const auto& mode = model.modes[model.select_mode(ub, x)];
  if (model.input_dim == 0) return mode.drift(x);
  return mode.drift(x) + mode.input_map(x) * u;
}

AffineTerm affine_approximation(const HybridSystemModel& model, const Vec& at, const BinaryWord& ub) {
  const auto& mode = model.modes[model.select_mode(ub, at)];
  return AffineTerm{mode.drift(at), mode.input_map(at)};
}

void PiecewiseConstantSignal::validate(const HybridSystemModel& model) const {
  if (interval_duration <= 0.0) throw ConfigurationError("signal: interval duration must be positive");
  if (levels.empty()) throw ConfigurationError("signal: no levels");
  for (const auto& lv : levels) {
    if (lv.u.size() != model.input_dim) throw ConfigurationError("signal: level input dimension mismatch");
    if (static_cast<int>(lv.ub.size()) != model.binary_dim)
      throw ConfigurationError("signal: level binary word length mismatch");
    for (int c = 0; c < model.input_dim; ++c)
      if (lv.u[c] < model.input_bounds.lo[c] - 1e-12 || lv.u[c] > model.input_bounds.hi[c] + 1e-12)
        throw ConfigurationError("signal: level violates input bounds");
  }
}

namespace {

/* one RK4 step of dx/dt = f(x); intermediate stages are never wrapped */
template <class F>
Vec rk4_step(const F& f, const Vec& x, double h) {
  const Vec k1 = f(x);
  const Vec k2 = f(x + 0.5 * h * k1);
  const Vec k3 = f(x + 0.5 * h * k2);
  const Vec k4 = f(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

int steps_per_interval(double duration, double step) {
  if (step <= 0.0) return 10;
  const double ratio = duration / step;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw ConfigurationError("integration step must evenly divide the interval duration");
  return static_cast<int>(n);
}

}  // namespace

Trajectory integrate(const HybridSystemModel& model, const Vec& x0,
                     const PiecewiseConstantSignal& signal, double step) {
  signal.validate(model);
  if (!model.state_bounds.contains(model.wrap_state(x0)))
    throw DomainViolation("integration start lies outside the model domain");

  const int nsteps = steps_per_interval(signal.interval_duration, step);
  const double h = signal.interval_duration / nsteps;

  Trajectory out;
  out.times.push_back(0.0);
  out.states.push_back(model.wrap_state(x0));

  double t = 0.0;
  Vec x = out.states.back();
  for (const auto& lv : signal.levels) {
    for (int s = 0; s < nsteps; ++s) {
      const auto& mode = model.modes[model.select_mode(lv.ub, x)];
      auto f = [&](const Vec& y) -> Vec {
        return model.input_dim == 0 ? mode.drift(y) : Vec(mode.drift(y) + mode.input_map(y) * lv.u);
      };
      Vec xn = model.wrap_state(rk4_step(f, x, h));
      t += h;
      if (!xn.allFinite())
        throw IntegrationFailure("integration produced a non-finite state");
      if (!model.in_domain(xn)) {
        out.exited_domain = true;
        return out;
      }
      x = xn;
      out.times.push_back(t);
      out.states.push_back(x);
    }
  }
  return out;
}

Trajectory integrate_feedback(const HybridSystemModel& model, const Vec& x0,
                              const std::function<Vec(const Vec&)>& u_of_x,
                              const BinaryWord& ub, double duration, double step) {
  if (duration <= 0.0) throw ConfigurationError("feedback integration: duration must be positive");
  const int nsteps = steps_per_interval(duration, step);
  const double h = duration / nsteps;

  Trajectory out;
  out.times.push_back(0.0);
  out.states.push_back(model.wrap_state(x0));

  double t = 0.0;
  Vec x = out.states.back();
  for (int s = 0; s < nsteps; ++s) {
    const auto& mode = model.modes[model.select_mode(ub, x)];
    auto f = [&](const Vec& y) -> Vec {
      return model.input_dim == 0 ? mode.drift(y) : Vec(mode.drift(y) + mode.input_map(y) * u_of_x(y));
    };
    Vec xn = model.wrap_state(rk4_step(f, x, h));
    t += h;
    if (!xn.allFinite())
      throw IntegrationFailure("integration produced a non-finite state");
    if (!model.in_domain(xn)) {
      out.exited_domain = true;
      return out;
    }
    x = xn;
    out.times.push_back(t);
    out.states.push_back(x);
  }
  return out;
}

}  // namespace rsynth
