#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "rsynth/graph.hpp"
#include "rsynth/pipeline.hpp"

using namespace rsynth;

namespace {

/* 1-d integrator dx/dt = u on [0,1]; two elements with nodes at the centers */
struct LineRig {
  HybridSystemModel model;
  Partition part;
  SymbolicInputFamily family;
  CostConfig costs;
};

LineRig make_line_rig() {
  LineRig rig;
  ModelSpec spec;
  spec.type = "pwa";
  spec.state_bounds.lo = Vec::Constant(1, 0.0);
  spec.state_bounds.hi = Vec::Constant(1, 1.0);
  spec.input_bounds.lo = Vec::Constant(1, -1.0);
  spec.input_bounds.hi = Vec::Constant(1, 1.0);
  spec.wrap = {false};
  PwaMode m;
  m.a_mat = Mat::Zero(1, 1);
  m.b_mat = Mat::Identity(1, 1);
  m.offset = Vec::Zero(1);
  spec.pwa_modes.push_back(m);
  rig.model = build_model(spec);

  rig.part = build_partition(rig.model.state_bounds, {2});
  compute_element_models(rig.part, rig.model, {{}});

  rig.family.t_rs = 0.3;
  rig.family.intervals = 2;
  rig.family.amplitudes = {{-1.0, 1.0}};
  rig.family.binary_words = {{}};
  rig.family.budget = 1000;

  rig.costs.q1 = Vec::Ones(1);
  rig.costs.q2 = Vec::Ones(1);
  rig.costs.r = Vec::Ones(1);
  rig.costs.p = 2.0;
  return rig;
}

const TransitionEdge* find_edge(const TransitionGraph& tg, int tail, int head) {
  for (const TransitionEdge& e : tg.edges)
    if (e.tail == tail && e.head == head) return &e;
  return nullptr;
}

/* reference shortest-path: Bellman-Ford over the reversed edges */
std::vector<double> bellman_ford_rev(int n, const std::vector<TransitionEdge>& edges, int dest) {
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  dist[dest] = 0.0;
  for (int pass = 0; pass < n; ++pass) {
    bool changed = false;
    for (const TransitionEdge& e : edges) {
      if (e.tail == e.head) continue;
      if (std::isfinite(dist[e.head]) && dist[e.head] + e.j2 < dist[e.tail]) {
        dist[e.tail] = dist[e.head] + e.j2;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

}  // namespace

TEST_CASE("family size arithmetic") {
  SymbolicInputFamily fam;
  fam.t_rs = 1.0;
  fam.intervals = 2;
  fam.amplitudes = {{-1.0, 1.0}};
  fam.binary_words = {{}};
  CHECK(fam.choices_per_interval() == 2);
  CHECK(fam.full_size() == 4);

  fam.amplitudes = {{0.0, 1.0}, {0.0, 1.0, 2.0}};  // two channels
  fam.binary_words = {{0}, {1}};
  CHECK(fam.choices_per_interval() == 12);
  fam.intervals = 3;
  CHECK(fam.full_size() == 12ull * 12 * 12);

  const Scenario pend = make_pendulum_scenario();
  CHECK(pend.family.choices_per_interval() == 13);
  CHECK(pend.family.full_size() == 28561);  // 13^4

  const Scenario tank = make_threetank_scenario();
  CHECK(tank.family.choices_per_interval() == 36);  // 3 levels^2 channels * 4 words
}

TEST_CASE("signal ids decode interval-first, channel-fastest") {
  SymbolicInputFamily fam;
  fam.t_rs = 2.0;
  fam.intervals = 2;
  fam.amplitudes = {{10.0, 11.0}, {20.0, 21.0, 22.0}};
  fam.binary_words = {{0}, {1}};
  // camps = 2*3 = 6, choices = 12 per interval
  REQUIRE(fam.choices_per_interval() == 12);

  // id = digit0 + 12 * digit1, digit = a0 + 2*a1 + 6*word
  const std::uint64_t id = (1 + 2 * 2 + 6 * 1) + 12ull * (0 + 2 * 1 + 6 * 0);
  const PiecewiseConstantSignal sig = fam.signal(id);
  REQUIRE(sig.levels.size() == 2);
  CHECK(sig.interval_duration == doctest::Approx(1.0));
  CHECK(sig.levels[0].u[0] == doctest::Approx(11.0));  // a0 = 1
  CHECK(sig.levels[0].u[1] == doctest::Approx(22.0));  // a1 = 2
  CHECK(sig.levels[0].ub == BinaryWord{1});
  CHECK(sig.levels[1].u[0] == doctest::Approx(10.0));  // a0 = 0
  CHECK(sig.levels[1].u[1] == doctest::Approx(21.0));  // a1 = 1
  CHECK(sig.levels[1].ub == BinaryWord{0});

  // id 0 is all-first-choice everywhere
  const PiecewiseConstantSignal zero = fam.signal(0);
  for (const auto& lv : zero.levels) {
    CHECK(lv.u[0] == doctest::Approx(10.0));
    CHECK(lv.u[1] == doctest::Approx(20.0));
    CHECK(lv.ub == BinaryWord{0});
  }
}

TEST_CASE("budget violations throw") {
  SymbolicInputFamily fam;
  fam.t_rs = 1.0;
  fam.intervals = 8;
  fam.amplitudes = {{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0}};
  fam.binary_words = {{}};
  fam.budget = 1'000'000;  // 10^8 ids exceed it
  CHECK_THROWS_AS(fam.signal_ids(), BudgetExceeded);

  fam.sample_count = 2'000'000;  // sampling more than the budget is still a refusal
  CHECK_THROWS_AS(fam.signal_ids(), BudgetExceeded);

  // overflow in full_size is caught rather than wrapped
  fam.intervals = 64;
  fam.sample_count = 0;
  CHECK_THROWS_AS(fam.full_size(), BudgetExceeded);
}

TEST_CASE("subsampling is seeded, sorted and unique") {
  SymbolicInputFamily fam;
  fam.t_rs = 1.0;
  fam.intervals = 6;
  fam.amplitudes = {{0.0, 1.0, 2.0, 3.0, 4.0}};
  fam.binary_words = {{}};
  fam.budget = 100'000'000;
  fam.sample_count = 2000;
  fam.sample_seed = 42;

  const std::vector<std::uint64_t> a = fam.signal_ids();
  const std::vector<std::uint64_t> b = fam.signal_ids();
  REQUIRE(a.size() == 2000);
  CHECK(a == b);  // same seed, same draw
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
  CHECK(a.back() < fam.full_size());

  fam.sample_seed = 43;
  CHECK(fam.signal_ids() != a);

  // sample_count >= full enumeration degrades to the full range
  fam.sample_count = fam.full_size();
  CHECK(fam.signal_ids().size() == fam.full_size());
}

TEST_CASE("two-element line: every surviving transition, by hand") {
  LineRig rig = make_line_rig();
  const TransitionGraph tg = build_transition_graph(rig.part, rig.model, rig.family, rig.costs);

  // from 0.25: (-, -) exits; from 0.75: (+, +) exits; six transitions survive
  CHECK(tg.raw_transitions == 6);
  REQUIRE(tg.edges.size() == 4);

  const TransitionEdge* e01 = find_edge(tg, 0, 1);
  REQUIRE(e01);
  CHECK(e01->input_id == 3);  // (+1, +1) is the only way up
  CHECK(e01->endpoint[0] == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(e01->j1 == doctest::Approx(0.04).epsilon(1e-9));  // (0.55 - 0.75)^2

  const TransitionEdge* e00 = find_edge(tg, 0, 0);
  REQUIRE(e00);
  CHECK(e00->j1 < 1e-28);  // up-down and down-up both return home modulo roundoff
  CHECK((e00->input_id == 1 || e00->input_id == 2));

  const TransitionEdge* e10 = find_edge(tg, 1, 0);
  REQUIRE(e10);
  CHECK(e10->input_id == 0);
  CHECK(e10->endpoint[0] == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(e10->j1 == doctest::Approx(0.04).epsilon(1e-9));

  const TransitionEdge* e11 = find_edge(tg, 1, 1);
  REQUIRE(e11);
  CHECK(e11->j1 < 1e-28);
  CHECK((e11->input_id == 1 || e11->input_id == 2));
}

TEST_CASE("exact j1 ties keep the lowest input id") {
  // an input map of zero makes every signal produce the identical trajectory,
  // so all four ids tie bitwise and the scan order must decide
  LineRig rig = make_line_rig();
  ModelSpec spec;
  spec.type = "pwa";
  spec.state_bounds = rig.model.state_bounds;
  spec.input_bounds = rig.model.input_bounds;
  spec.wrap = {false};
  PwaMode m;
  m.a_mat = Mat::Zero(1, 1);
  m.b_mat = Mat::Zero(1, 1);
  m.offset = Vec::Zero(1);
  spec.pwa_modes.push_back(m);
  const HybridSystemModel still = build_model(spec);

  const TransitionGraph tg = build_transition_graph(rig.part, still, rig.family, rig.costs);
  CHECK(tg.raw_transitions == 8);  // nothing ever exits
  REQUIRE(tg.edges.size() == 2);   // only the two self-transitions
  for (const TransitionEdge& e : tg.edges) {
    CHECK(e.tail == e.head);
    CHECK(e.input_id == 0);
    CHECK(e.j1 == 0.0);
  }
}

TEST_CASE("weights combine destination distance and input effort") {
  LineRig rig = make_line_rig();
  TransitionGraph tg = build_transition_graph(rig.part, rig.model, rig.family, rig.costs);

  const Vec des = Vec::Constant(1, 0.75);
  weigh_edges(tg, rig.part, des, rig.costs);
  // every surviving signal spends (+-1)^2 per interval = 2 units of effort
  const TransitionEdge* e01 = find_edge(tg, 0, 1);
  REQUIRE(e01);
  CHECK(e01->j2 == doctest::Approx(2.0).epsilon(1e-12));  // lands on des exactly
  const TransitionEdge* e10 = find_edge(tg, 1, 0);
  REQUIRE(e10);
  CHECK(e10->j2 == doctest::Approx(0.25 + 2.0).epsilon(1e-12));

  // zero input weight: reaching the destination node costs nothing
  CostConfig free = rig.costs;
  free.r = Vec::Zero(1);
  TransitionGraph tg2 = build_transition_graph(rig.part, rig.model, rig.family, free);
  weigh_edges(tg2, rig.part, des, free);
  const TransitionEdge* free01 = find_edge(tg2, 0, 1);
  REQUIRE(free01);
  CHECK(free01->j2 == doctest::Approx(0.0).scale(1.0));

  // doubling q2 doubles the distance share
  CostConfig heavy = rig.costs;
  heavy.q2 = Vec::Constant(1, 2.0);
  TransitionGraph tg3 = build_transition_graph(rig.part, rig.model, rig.family, heavy);
  weigh_edges(tg3, rig.part, des, heavy);
  const TransitionEdge* heavy10 = find_edge(tg3, 1, 0);
  REQUIRE(heavy10);
  CHECK(heavy10->j2 == doctest::Approx(0.5 + 2.0).epsilon(1e-12));

  Vec far = Vec::Constant(1, 3.0);
  CHECK_THROWS_AS(weigh_edges(tg, rig.part, far, rig.costs), ConfigurationError);
}

TEST_CASE("unsafe elements are cut out of the weighed graph") {
  LineRig rig = make_line_rig();
  TransitionGraph tg = build_transition_graph(rig.part, rig.model, rig.family, rig.costs);
  REQUIRE(tg.edges.size() == 4);
  rig.part.elements[0].unsafe = true;
  weigh_edges(tg, rig.part, Vec::Constant(1, 0.75), rig.costs);
  REQUIRE(tg.edges.size() == 1);  // only 1 -> 1 survives
  CHECK(tg.edges[0].tail == 1);
  CHECK(tg.edges[0].head == 1);
}

TEST_CASE("pruning keeps the j1-minimal edge with the lowest id") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    TransitionGraph tg;
    tg.element_count = n;
    const int count = 10 + static_cast<int>(rng() % 60);
    for (int k = 0; k < count; ++k) {
      TransitionEdge e;
      e.tail = static_cast<int>(rng() % n);
      e.head = static_cast<int>(rng() % n);
      e.input_id = rng() % 16;
      e.j1 = static_cast<double>(rng() % 8) / 4.0;  // deliberate ties
      e.endpoint = Vec::Constant(1, static_cast<double>(k));
      tg.edges.push_back(e);
    }

    // oracle: best (j1, input_id) lexicographic per (tail, head)
    std::map<std::pair<int, int>, std::pair<double, std::uint64_t>> best;
    for (const TransitionEdge& e : tg.edges) {
      const auto key = std::make_pair(e.tail, e.head);
      const auto val = std::make_pair(e.j1, e.input_id);
      auto it = best.find(key);
      if (it == best.end() || val < it->second) best[key] = val;
    }

    prune_multigraph(tg);
    REQUIRE(tg.edges.size() == best.size());
    for (const TransitionEdge& e : tg.edges) {
      const auto& want = best.at({e.tail, e.head});
      CHECK(e.j1 == want.first);
      CHECK(e.input_id == want.second);
    }

    // idempotent
    const size_t once = tg.edges.size();
    prune_multigraph(tg);
    CHECK(tg.edges.size() == once);
  }
}

TEST_CASE("next-hop table on a three-element chain") {
  Box dom;
  dom.lo = Vec::Constant(1, 0.0);
  dom.hi = Vec::Constant(1, 3.0);
  Partition part = build_partition(dom, {3});

  TransitionGraph tg;
  tg.element_count = 3;
  auto add = [&](int t, int h, double w, std::uint64_t id) {
    TransitionEdge e;
    e.tail = t;
    e.head = h;
    e.j2 = w;
    e.input_id = id;
    e.endpoint = Vec::Constant(1, part.elements[h].node[0]);
    tg.edges.push_back(e);
  };
  add(0, 1, 1.0, 7);
  add(1, 2, 1.0, 8);
  add(0, 2, 3.0, 9);   // direct but worse
  add(2, 2, 5.0, 10);  // self-loop must be ignored

  const Vec des = Vec::Constant(1, 2.5);
  const ReachabilitySector rs = dijkstra_rs(tg, part, des);
  CHECK(rs.destination == 2);
  CHECK(rs.cost_to_go[0] == doctest::Approx(2.0));
  CHECK(rs.cost_to_go[1] == doctest::Approx(1.0));
  CHECK(rs.cost_to_go[2] == 0.0);
  CHECK(rs.next_hop_element[0] == 1);
  CHECK(rs.next_hop_input[0] == 7);
  CHECK(rs.next_hop_element[1] == 2);
  CHECK(rs.next_hop_input[1] == 8);
  CHECK(rs.next_hop_element[2] == -1);

  CHECK(check_reachability(rs, part, Vec::Constant(1, 0.1)));
  CHECK(check_reachability(rs, part, des));

  // an isolated element is unreachable
  tg.edges.erase(tg.edges.begin());  // cut 0 -> 1
  tg.edges.erase(tg.edges.begin() + 1);  // cut 0 -> 2 (now first+1)
  const ReachabilitySector rs2 = dijkstra_rs(tg, part, des);
  CHECK(std::isinf(rs2.cost_to_go[0]));
  CHECK(rs2.next_hop_element[0] == -1);
  CHECK_FALSE(check_reachability(rs2, part, Vec::Constant(1, 0.1)));

  part.elements[2].unsafe = true;
  CHECK_THROWS_AS(dijkstra_rs(tg, part, des), ConfigurationError);
}

TEST_CASE("random graphs agree with a relaxation oracle") {
  std::mt19937_64 rng(20240901);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 20 + static_cast<int>(rng() % 81);  // up to 100 elements
    Box dom;
    dom.lo = Vec::Constant(1, 0.0);
    dom.hi = Vec::Constant(1, static_cast<double>(n));
    Partition part = build_partition(dom, {n});

    TransitionGraph tg;
    tg.element_count = n;
    const int edge_count = 3 * n;
    for (int k = 0; k < edge_count; ++k) {
      TransitionEdge e;
      e.tail = static_cast<int>(rng() % n);
      e.head = static_cast<int>(rng() % n);
      e.input_id = static_cast<std::uint64_t>(k);
      // dyadic weights make every path sum exact in floating point
      e.j2 = static_cast<double>(rng() % 2048) / 1024.0;
      e.endpoint = Vec::Constant(1, part.elements[e.head].node[0]);
      tg.edges.push_back(e);
    }

    const int dest = static_cast<int>(rng() % n);
    const Vec des = part.elements[dest].node;
    const ReachabilitySector rs = dijkstra_rs(tg, part, des);
    const std::vector<double> ref = bellman_ford_rev(n, tg.edges, dest);

    for (int q = 0; q < n; ++q) {
      if (std::isinf(ref[q])) {
        CHECK(std::isinf(rs.cost_to_go[q]));
        CHECK(rs.next_hop_element[q] == -1);
        continue;
      }
      CHECK(rs.cost_to_go[q] == ref[q]);  // dyadic sums: exact equality
      if (q == dest) continue;
      // the advertised hop actually certifies the cost
      const int h = rs.next_hop_element[q];
      REQUIRE(h >= 0);
      bool certified = false;
      for (const TransitionEdge& e : tg.edges)
        if (e.tail == q && e.head == h && e.input_id == rs.next_hop_input[q] &&
            e.j2 + ref[h] == ref[q])
          certified = true;
      CHECK(certified);
    }
  }
}

TEST_CASE("graph construction is deterministic and thread-invariant") {
  const Scenario sc = make_pendulum_scenario(true);
  const HybridSystemModel model = build_model(sc.model);
  Partition part = build_partition(sc.model.state_bounds, sc.seed);
  compute_element_models(part, model, {{}});
  place_operating_nodes(part, model, sc.placement);

  const TransitionGraph one = build_transition_graph(part, model, sc.family, sc.costs, 1);
  const TransitionGraph two = build_transition_graph(part, model, sc.family, sc.costs, 2);
  const TransitionGraph rep = build_transition_graph(part, model, sc.family, sc.costs, 1);

  auto same = [](const TransitionGraph& a, const TransitionGraph& b) {
    REQUIRE(a.edges.size() == b.edges.size());
    CHECK(a.raw_transitions == b.raw_transitions);
    for (size_t i = 0; i < a.edges.size(); ++i) {
      CHECK(a.edges[i].tail == b.edges[i].tail);
      CHECK(a.edges[i].head == b.edges[i].head);
      CHECK(a.edges[i].input_id == b.edges[i].input_id);
      CHECK(a.edges[i].j1 == b.edges[i].j1);  // bitwise
      CHECK((a.edges[i].endpoint - b.edges[i].endpoint).norm() == 0.0);
    }
  };
  same(one, rep);
  same(one, two);
}

TEST_CASE("synthesized graph is self-consistent on the small swing-up") {
  const Scenario sc = make_pendulum_scenario(true);
  const SynthesisResult out = synthesize(sc);

  const CostConfig& costs = sc.costs;
  for (const TransitionEdge& e : out.graph.edges) {
    CHECK(out.partition.locate(e.endpoint) == e.head);
    const Vec gap = e.endpoint - out.partition.elements[e.head].node;
    CHECK(e.j1 == doctest::Approx(weighted_pnorm_pow(gap, costs.q1, costs.p))
                      .epsilon(1e-12)
                      .scale(1.0));
    CHECK_FALSE(out.partition.elements[e.tail].unsafe);
    CHECK_FALSE(out.partition.elements[e.head].unsafe);
  }

  // cost-to-go satisfies the triangle property over every edge, with equality
  // along the advertised next hop
  const std::vector<double>& ctg = out.sector.cost_to_go;
  for (const TransitionEdge& e : out.graph.edges) {
    if (e.tail == e.head) continue;
    if (!std::isfinite(ctg[e.head])) continue;
    CHECK(ctg[e.tail] <= e.j2 + ctg[e.head] + 1e-9);
  }
  int finite = 0;
  for (int q = 0; q < out.partition.count(); ++q) {
    if (!std::isfinite(ctg[q])) continue;
    ++finite;
    if (q == out.sector.destination) {
      CHECK(ctg[q] == 0.0);
      continue;
    }
    const int h = out.sector.next_hop_element[q];
    REQUIRE(h >= 0);
    bool matched = false;
    for (const TransitionEdge& e : out.graph.edges)
      if (e.tail == q && e.head == h && e.input_id == out.sector.next_hop_input[q]) {
        CHECK(ctg[q] == doctest::Approx(e.j2 + ctg[h]).epsilon(1e-12).scale(1.0));
        matched = true;
      }
    CHECK(matched);
  }
  CHECK(finite >= 2);  // the destination pulls in at least part of the space
}
