#include "rsynth/graph.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <thread>
#include <utility>

namespace rsynth {

void SymbolicInputFamily::validate() const {
  if (!(t_rs > 0.0)) throw ConfigurationError("input family: horizon must be positive");
  if (intervals < 1) throw ConfigurationError("input family: need at least one interval");
  for (const auto& amps : amplitudes)
    if (amps.empty()) throw ConfigurationError("input family: empty amplitude list");
  if (binary_words.empty()) throw ConfigurationError("input family: binary word list must not be empty");
}

std::uint64_t SymbolicInputFamily::choices_per_interval() const {
  std::uint64_t c = 1;
  for (const auto& amps : amplitudes) c *= amps.size();
  return c * binary_words.size();
}

std::uint64_t SymbolicInputFamily::full_size() const {
  validate();
  const std::uint64_t c = choices_per_interval();
  std::uint64_t total = 1;
  for (int k = 0; k < intervals; ++k) {
    if (total > (std::numeric_limits<std::uint64_t>::max() / c))
      throw BudgetExceeded("input family: enumeration overflows");
    total *= c;
  }
  return total;
}

std::vector<std::uint64_t> SymbolicInputFamily::signal_ids() const {
  const std::uint64_t total = full_size();
  if (sample_count == 0 || sample_count >= total) {
    if (total > budget)
      throw BudgetExceeded("input family: " + std::to_string(total) +
                           " signals exceed the budget of " + std::to_string(budget) +
                           "; raise the budget, sample, or coarsen the amplitude grid");
    std::vector<std::uint64_t> ids(total);
    for (std::uint64_t i = 0; i < total; ++i) ids[i] = i;
    return ids;
  }
  if (sample_count > budget)
    throw BudgetExceeded("input family: sample count exceeds the budget");

  /* selection sampling: scan the id range once, keeping each id with
   * probability (needed - kept) / (remaining); deterministic per seed */
  std::mt19937_64 rng(sample_seed);
  std::vector<std::uint64_t> ids;
  ids.reserve(sample_count);
  std::uint64_t kept = 0;
  for (std::uint64_t j = 0; j < total && kept < sample_count; ++j) {
    const std::uint64_t remaining = total - j;
    if (rng() % remaining < sample_count - kept) {
      ids.push_back(j);
      ++kept;
    }
  }
  return ids;
}

PiecewiseConstantSignal SymbolicInputFamily::signal(std::uint64_t id) const {
  const std::uint64_t per = choices_per_interval();
  std::uint64_t camps = 1;
  for (const auto& amps : amplitudes) camps *= amps.size();

  PiecewiseConstantSignal sig;
  sig.interval_duration = t_rs / intervals;
  for (int k = 0; k < intervals; ++k) {
    std::uint64_t choice = id % per;
    id /= per;
    SignalLevel lv;
    lv.ub = binary_words[choice / camps];
    std::uint64_t amp_part = choice % camps;
    lv.u = Vec(static_cast<int>(amplitudes.size()));
    for (size_t c = 0; c < amplitudes.size(); ++c) {
      lv.u[c] = amplitudes[c][amp_part % amplitudes[c].size()];
      amp_part /= amplitudes[c].size();
    }
    sig.levels.push_back(std::move(lv));
  }
  return sig;
}

namespace {

/* One edge per (tail, head) pair: the j1-minimal transition, ties to the lowest
 * input id (ids are scanned in increasing order, so first-strictly-better wins).
 * Keeping every signal's edge would not survive paper-scale runs in memory. */
std::vector<TransitionEdge> edges_from_element(const Partition& part, const HybridSystemModel& model,
                                               const SymbolicInputFamily& family, const CostConfig& costs,
                                               const std::vector<std::uint64_t>& ids, int tail,
                                               std::uint64_t& raw_count) {
  std::map<int, TransitionEdge> best;
  const Element& elem = part.elements[tail];
  for (const std::uint64_t id : ids) {
    const PiecewiseConstantSignal sig = family.signal(id);
    const Trajectory traj = integrate(model, elem.node, sig);
    if (traj.exited_domain) continue;
    bool touches_unsafe = false;
    for (const auto& x : traj.states) {
      if (part.elements[part.locate(x)].unsafe) {
        touches_unsafe = true;
        break;
      }
    }
    if (touches_unsafe) continue;

    TransitionEdge e;
    e.tail = tail;
    e.head = part.locate(traj.endpoint());
    e.input_id = id;
    e.endpoint = traj.endpoint();
    e.j1 = weighted_pnorm_pow(e.endpoint - part.elements[e.head].node, costs.q1, costs.p);
    ++raw_count;

    auto [it, inserted] = best.try_emplace(e.head, e);
    if (!inserted && e.j1 < it->second.j1) it->second = e;
  }
  std::vector<TransitionEdge> out;
  out.reserve(best.size());
  for (auto& [head, e] : best) out.push_back(std::move(e));
  return out;
}

}  // namespace

TransitionGraph build_transition_graph(const Partition& part, const HybridSystemModel& model,
                                       const SymbolicInputFamily& family, const CostConfig& costs,
                                       int threads) {
  family.validate();
  const std::vector<std::uint64_t> ids = family.signal_ids();

  TransitionGraph tg;
  tg.element_count = part.count();
  tg.family = family;

  std::vector<std::vector<TransitionEdge>> per_element(part.count());
  std::vector<std::uint64_t> raw_counts(part.count(), 0);
  if (threads <= 1) {
    for (int q = 0; q < part.count(); ++q)
      if (!part.elements[q].unsafe)
        per_element[q] = edges_from_element(part, model, family, costs, ids, q, raw_counts[q]);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (int q = next.fetch_add(1); q < part.count(); q = next.fetch_add(1))
          if (!part.elements[q].unsafe)
            per_element[q] = edges_from_element(part, model, family, costs, ids, q, raw_counts[q]);
      });
    }
    for (auto& th : pool) th.join();
  }

  /* merge in element order: output identical for any thread count */
  for (auto& chunk : per_element)
    for (auto& e : chunk) tg.edges.push_back(std::move(e));
  for (const auto c : raw_counts) tg.raw_transitions += c;
  return tg;
}

void prune_multigraph(TransitionGraph& tg) {
  std::sort(tg.edges.begin(), tg.edges.end(), [](const TransitionEdge& a, const TransitionEdge& b) {
    if (a.tail != b.tail) return a.tail < b.tail;
    if (a.head != b.head) return a.head < b.head;
    if (a.j1 != b.j1) return a.j1 < b.j1;
    return a.input_id < b.input_id;
  });
  std::vector<TransitionEdge> kept;
  for (auto& e : tg.edges) {
    if (!kept.empty() && kept.back().tail == e.tail && kept.back().head == e.head) continue;
    kept.push_back(std::move(e));
  }
  tg.edges = std::move(kept);
}

void weigh_edges(TransitionGraph& tg, const Partition& part, const Vec& des, const CostConfig& costs) {
  if (!part.domain.contains(des)) throw ConfigurationError("weigh_edges: destination outside the domain");
  std::vector<TransitionEdge> kept;
  kept.reserve(tg.edges.size());
  for (auto& e : tg.edges) {
    if (part.elements[e.tail].unsafe || part.elements[e.head].unsafe) continue;
    const PiecewiseConstantSignal sig = tg.family.signal(e.input_id);
    double effort = 0.0;
    for (const auto& lv : sig.levels) effort += weighted_pnorm_pow(lv.u, costs.r, costs.p);
    e.j2 = weighted_pnorm_pow(part.elements[e.head].node - des, costs.q2, costs.p) + effort;
    kept.push_back(std::move(e));
  }
  tg.edges = std::move(kept);
}

ReachabilitySector dijkstra_rs(const TransitionGraph& tg, const Partition& part, const Vec& des) {
  const int dest = part.locate(des);
  if (part.elements[dest].unsafe)
    throw ConfigurationError("reachability sector: the destination element is unsafe");

  const int n = tg.element_count;
  ReachabilitySector rs;
  rs.destination = dest;
  rs.next_hop_element.assign(n, -1);
  rs.next_hop_input.assign(n, 0);
  rs.cost_to_go.assign(n, std::numeric_limits<double>::infinity());

  /* reversed adjacency: for original edge tail->head we relax head => tail */
  std::vector<std::vector<const TransitionEdge*>> into_head(n);
  for (const auto& e : tg.edges) {
    if (e.tail == e.head) continue;
    into_head[e.head].push_back(&e);
  }

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  rs.cost_to_go[dest] = 0.0;
  pq.emplace(0.0, dest);
  std::vector<bool> done(n, false);
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = true;
    for (const TransitionEdge* e : into_head[v]) {
      const double nd = d + e->j2;
      if (nd < rs.cost_to_go[e->tail]) {
        rs.cost_to_go[e->tail] = nd;
        rs.next_hop_element[e->tail] = e->head;
        rs.next_hop_input[e->tail] = e->input_id;
        pq.emplace(nd, e->tail);
      }
    }
  }
  return rs;
}

bool check_reachability(const ReachabilitySector& rs, const Partition& part, const Vec& init) {
  const int q = part.locate(init);
  return q == rs.destination || rs.next_hop_element[q] >= 0;
}

}  // namespace rsynth
