#pragma once

#include "rsynth/benchmarks.hpp"
#include "rsynth/graph.hpp"
#include "rsynth/partition.hpp"

namespace rsynth {

struct SynthesisStats {
  double wall_seconds = 0.0;
  std::uint64_t raw_edges = 0;
  std::uint64_t pruned_edges = 0;
  int unsafe_elements = 0;
  bool reachable = false;   // init element can reach the destination
};

struct SynthesisResult {
  Partition partition;
  TransitionGraph graph;        // pruned and weighed
  ReachabilitySector sector;
  SynthesisStats stats;
};

// Full offline pass: partition the domain, freeze per-element affine models,
// place operating nodes, enumerate symbolic inputs, build/prune/weigh the
// transition graph and reduce it to a next-hop table toward sc.des.
SynthesisResult synthesize(const Scenario& sc, int threads = 1);

}  // namespace rsynth
