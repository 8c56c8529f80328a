#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsynth {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using BinaryWord = std::vector<std::uint8_t>;

/* error taxonomy: every failure mode thrown by the library derives from Error
 * so callers (CLI, tests) can distinguish classes of failure by type */
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
struct DomainViolation : Error {
  using Error::Error;
};
struct ModelDefinitionError : Error {
  using Error::Error;
};
struct ConfigurationError : Error {
  using Error::Error;
};
struct BudgetExceeded : Error {
  using Error::Error;
};
struct ReachabilityFailure : Error {
  using Error::Error;
};
struct IntegrationFailure : Error {
  using Error::Error;
};

/* axis-aligned box [lo, hi] */
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vec& x, double tol = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
    return true;
  }
  Vec center() const { return 0.5 * (lo + hi); }
  Vec widths() const { return hi - lo; }
  double half_diagonal() const { return 0.5 * (hi - lo).norm(); }

  void validate(const std::string& what) const {
    if (lo.size() != hi.size() || lo.size() == 0)
      throw ConfigurationError(what + ": malformed bounds");
    for (int i = 0; i < dim(); ++i)
      if (!(lo[i] < hi[i]))
        throw ConfigurationError(what + ": empty interval on axis " + std::to_string(i));
  }
};

/* edge and path costs: diagonal weights, p-th power of the weighted p-norm,
 * i.e. sum_i w_i |x_i|^p (so p=2 with unit weights is squared Euclidean) */
struct CostConfig {
  Vec q1;     // transition-residual weight (per state dimension)
  Vec q2;     // destination-distance weight (per state dimension)
  Vec r;      // input-effort weight (per input channel)
  double p = 2.0;
};

double weighted_pnorm_pow(const Vec& x, const Vec& w, double p);

}  // namespace rsynth
