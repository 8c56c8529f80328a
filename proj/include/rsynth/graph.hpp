#pragma once

#include <cstdint>

#include "rsynth/dynamics.hpp"
#include "rsynth/partition.hpp"
#include "rsynth/types.hpp"

namespace rsynth {

/* the family of candidate piecewise-constant inputs over one horizon:
 * every interval independently picks one continuous level per channel and one
 * binary word. signals are identified by their mixed-radix enumeration id
 * (interval 0 is the least significant digit; within an interval, channel 0
 * varies fastest and the binary word index is the most significant part). */
struct SymbolicInputFamily {
  double t_rs = 0.0;
  int intervals = 4;
  std::vector<std::vector<double>> amplitudes;   // per continuous channel
  std::vector<BinaryWord> binary_words;          // {{}} when the model has none
  std::uint64_t budget = 1'000'000;              // hard cap on enumerated signals
  std::uint64_t sample_count = 0;                // 0 = full enumeration
  std::uint64_t sample_seed = 1;

  void validate() const;
  std::uint64_t choices_per_interval() const;
  std::uint64_t full_size() const;               // throws BudgetExceeded on overflow
  /* ids actually used: the full range, or a seeded uniform subsample when
   * sample_count is set and the full family exceeds it */
  std::vector<std::uint64_t> signal_ids() const;
  PiecewiseConstantSignal signal(std::uint64_t id) const;
};

struct TransitionEdge {
  int tail = -1;
  int head = -1;
  std::uint64_t input_id = 0;
  Vec endpoint;        // simulated state after the horizon
  double j1 = 0.0;     // endpoint-to-head-node residual (pruning cost)
  double j2 = 0.0;     // destination-distance + input-effort weight
};

struct TransitionGraph {
  int element_count = 0;
  SymbolicInputFamily family;
  std::vector<TransitionEdge> edges;         // one per (tail, head): the j1-minimal transition
  std::uint64_t raw_transitions = 0;         // in-domain transitions seen before reduction
};

/* simulate every family signal from every safe element's operating node;
 * edges whose trajectory leaves the domain or touches an unsafe element are
 * dropped. threads > 1 parallelizes over elements with a deterministic merge. */
TransitionGraph build_transition_graph(const Partition& part, const HybridSystemModel& model,
                                       const SymbolicInputFamily& family, const CostConfig& costs,
                                       int threads = 1);

/* keep one edge per (tail, head): minimal j1, ties to the lowest input id */
void prune_multigraph(TransitionGraph& tg);

/* j2 = |node(head) - des|_q2^p + sum_k |u_k|_r^p; drops unsafe-touching edges */
void weigh_edges(TransitionGraph& tg, const Partition& part, const Vec& des, const CostConfig& costs);

struct ReachabilitySector {
  int destination = -1;
  std::vector<int> next_hop_element;            // -1 where unreachable / destination
  std::vector<std::uint64_t> next_hop_input;
  std::vector<double> cost_to_go;               // +inf where unreachable
};

/* single Dijkstra run from the destination element over the reversed graph;
 * self-loops are ignored. throws ConfigurationError if des is unsafe. */
ReachabilitySector dijkstra_rs(const TransitionGraph& tg, const Partition& part, const Vec& des);

bool check_reachability(const ReachabilitySector& rs, const Partition& part, const Vec& init);

}  // namespace rsynth
