#include "rsynth/partition.hpp"

#include <cmath>
#include <limits>

#include "rsynth/finetuner.hpp"

namespace rsynth {

const ElementModeData& Element::data_for(const BinaryWord& ub) const {
  for (const auto& md : mode_data)
    if (md.binary == ub) return md;
  throw ConfigurationError("element has no frozen data for the requested binary word");
}

Partition build_partition(const Box& domain, const std::vector<int>& seed) {
  domain.validate("partition domain");
  if (static_cast<int>(seed.size()) != domain.dim())
    throw ConfigurationError("partition: seed dimension mismatch");
  long long total = 1;
  for (int s : seed) {
    if (s < 1) throw ConfigurationError("partition: seed counts must be positive");
    total *= s;
    if (total > 50'000'000) throw ConfigurationError("partition: element count too large");
  }

  Partition part;
  part.domain = domain;
  part.seed = seed;
  part.elements.resize(static_cast<size_t>(total));

  const int n = domain.dim();
  const Vec w = domain.widths();
  for (int flat = 0; flat < static_cast<int>(total); ++flat) {
    Element& e = part.elements[flat];
    e.index = flat;
    e.box.lo = Vec(n);
    e.box.hi = Vec(n);
    int rem = flat;
    for (int d = 0; d < n; ++d) {
      const int idx = rem % seed[d];
      rem /= seed[d];
      const double step = w[d] / seed[d];
      e.box.lo[d] = domain.lo[d] + idx * step;
      e.box.hi[d] = (idx + 1 == seed[d]) ? domain.hi[d] : domain.lo[d] + (idx + 1) * step;
    }
    e.node = e.box.center();
  }
  return part;
}

int Partition::locate(const Vec& x) const {
  if (x.size() != domain.dim()) throw DomainViolation("locate: dimension mismatch");
  int flat = 0, stride = 1;
  for (int d = 0; d < domain.dim(); ++d) {
    if (x[d] < domain.lo[d] || x[d] > domain.hi[d])
      throw DomainViolation("locate: point outside the domain");
    const double step = (domain.hi[d] - domain.lo[d]) / seed[d];
    int idx = static_cast<int>(std::floor((x[d] - domain.lo[d]) / step));
    if (idx >= seed[d]) idx = seed[d] - 1;  // domain upper face is closed
    flat += stride * idx;
    stride *= seed[d];
  }
  return flat;
}

std::vector<int> Partition::multi_index(int flat) const {
  std::vector<int> idx(seed.size());
  for (size_t d = 0; d < seed.size(); ++d) {
    idx[d] = flat % seed[d];
    flat /= seed[d];
  }
  return idx;
}

std::vector<Vec> unactuated_directions(const Mat& b, const Vec& a, double tol) {
  const int n = static_cast<int>(b.rows());
  /* null(b^T) via full SVD of b^T: right singular vectors past the rank */
  Eigen::JacobiSVD<Mat> svd(b.transpose(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  const double cutoff = (sv.size() > 0 ? sv[0] : 0.0) * 1e-12 + tol;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;

  std::vector<Vec> dirs;
  for (int k = rank; k < n; ++k) {
    Vec dir = svd.matrixV().col(k);
    if (dir.dot(a) < 0.0) dir = -dir;
    dirs.push_back(dir);
  }
  return dirs;
}

void compute_element_models(Partition& part, const HybridSystemModel& model,
                            const std::vector<BinaryWord>& words) {
  if (words.empty()) throw ConfigurationError("compute_element_models: no binary words given");
  for (auto& e : part.elements) {
    e.mode_data.clear();
    for (const auto& w : words) {
      const AffineTerm af = affine_approximation(model, e.box.center(), w);
      ElementModeData md;
      md.binary = w;
      md.a = af.a;
      md.b = af.b;
      md.unactuated = unactuated_directions(af.b, af.a);
      e.mode_data.push_back(std::move(md));
    }
  }
}

namespace {

std::vector<Vec> node_candidates(const Box& box, double inset) {
  const int n = box.dim();
  const Vec mid = box.center();
  std::vector<Vec> cand;
  cand.push_back(mid);              // index 0 by convention: ties prefer the center
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec c(n);
    for (int d = 0; d < n; ++d) {
      const double corner = (mask >> d) & 1 ? box.hi[d] : box.lo[d];
      c[d] = corner + inset * (mid[d] - corner);
    }
    cand.push_back(c);
  }
  return cand;
}

/* residual of steering probe -> candidate within the element, taken over the
 * element's binary words; placement demands a minimum dwell so that candidates
 * merely coinciding with the probe do not win for free, falling back to an
 * unconstrained step length when the drift makes dwelling impossible */
double placement_residual(const Element& elem, const Box& input_bounds,
                          const Vec& probe, const Vec& candidate,
                          const PlacementConfig& cfg, bool* feasible) {
  double best = std::numeric_limits<double>::infinity();
  *feasible = false;
  for (const auto& md : elem.mode_data) {
    FineTuneRequest req;
    req.x0 = probe;
    req.target = candidate;
    req.element = elem.box;
    req.a = md.a;
    req.b = md.b;
    req.u_min = input_bounds.lo;
    req.u_max = input_bounds.hi;
    req.t_max = cfg.t_fs_max;
    req.t_min = cfg.dwell_fraction * cfg.t_fs_max;
    FineTuneResult r = fine_tune(req);
    if (!r.feasible) {
      req.t_min = 0.0;
      r = fine_tune(req);
    }
    if (r.feasible) {
      *feasible = true;
      best = std::min(best, r.residual);
    }
  }
  return best;
}

}  // namespace

void place_operating_node(Element& elem, const HybridSystemModel& model,
                          const PlacementConfig& cfg) {
  if (elem.mode_data.empty())
    throw ConfigurationError("place_operating_node: element models not computed");
  if (!(cfg.t_fs_max > 0.0))
    throw ConfigurationError("place_operating_node: t_fs_max must be positive");

  if (cfg.corner_inset < 0.0 || cfg.corner_inset > 1.0)
    throw ConfigurationError("place_operating_node: corner_inset must lie in [0, 1]");

  std::vector<Vec> probes;
  if (cfg.corner_probes) {
    probes = node_candidates(elem.box, cfg.corner_inset);
    probes.erase(probes.begin());  // corners only
  } else {
    probes.push_back(elem.box.center());
  }

  const std::vector<Vec> cands = node_candidates(elem.box, cfg.corner_inset);
  int best_idx = -1;
  double best_total = std::numeric_limits<double>::infinity();
  for (int ci = 0; ci < static_cast<int>(cands.size()); ++ci) {
    double total = 0.0;
    bool any = false;
    for (const auto& probe : probes) {
      bool ok = false;
      const double r = placement_residual(elem, model.input_bounds, probe, cands[ci], cfg, &ok);
      if (!ok) { any = false; break; }
      any = true;
      total += r;
    }
    if (!any) continue;
    if (total < best_total - 1e-12) {
      best_total = total;
      best_idx = ci;
    }
    /* ties keep the earlier candidate; index 0 is the center */
  }

  if (best_idx < 0) {
    elem.unsafe = true;
    return;
  }
  elem.node = cands[best_idx];
}

void place_operating_nodes(Partition& part, const HybridSystemModel& model,
                           const PlacementConfig& cfg) {
  for (auto& e : part.elements) place_operating_node(e, model, cfg);
}

}  // namespace rsynth
