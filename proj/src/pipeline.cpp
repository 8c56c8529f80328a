#include <chrono>

#include "rsynth/pipeline.hpp"

namespace rsynth {

SynthesisResult synthesize(const Scenario& sc, int threads) {
  const auto t0 = std::chrono::steady_clock::now();

  HybridSystemModel model = build_model(sc.model);
  sc.family.validate();
  if (sc.des.size() != model.state_dim)
    throw ConfigurationError("destination dimension does not match the model");
  if (!model.state_bounds.contains(sc.des, 1e-12))
    throw ConfigurationError("destination lies outside the state bounds");

  SynthesisResult out;
  out.partition = build_partition(model.state_bounds, sc.seed);
  compute_element_models(out.partition, model, sc.family.binary_words);

  PlacementConfig pcfg = sc.placement;
  if (pcfg.t_fs_max <= 0.0) pcfg.t_fs_max = sc.family.t_rs;
  place_operating_nodes(out.partition, model, pcfg);

  // The destination element's node is the destination itself: every path in
  // the sector then ends exactly where the supervisor wants to hand over.
  const int dest = out.partition.locate(sc.des);
  out.partition.elements[dest].node = sc.des;

  out.graph = build_transition_graph(out.partition, model, sc.family, sc.costs, threads);
  out.stats.raw_edges = out.graph.raw_transitions;
  prune_multigraph(out.graph);
  weigh_edges(out.graph, out.partition, sc.des, sc.costs);
  out.stats.pruned_edges = out.graph.edges.size();

  out.sector = dijkstra_rs(out.graph, out.partition, sc.des);

  for (const auto& el : out.partition.elements)
    if (el.unsafe) ++out.stats.unsafe_elements;
  if (sc.init.size() == model.state_dim && model.state_bounds.contains(sc.init, 1e-12))
    out.stats.reachable = check_reachability(out.sector, out.partition, sc.init);

  const auto t1 = std::chrono::steady_clock::now();
  out.stats.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return out;
}

}  // namespace rsynth
