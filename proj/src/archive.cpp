#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <json.hpp>

#include "rsynth/archive.hpp"

namespace rsynth {

namespace {

constexpr const char* kMagic = "rsynth-archive 2";

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok) {
  try {
    return std::stod(tok);
  } catch (const std::exception&) {
    throw ConfigurationError("archive: bad numeric field '" + tok + "'");
  }
}

std::istream& expect_line(std::istream& in, std::string& line, const char* what) {
  if (!std::getline(in, line))
    throw ConfigurationError(std::string("archive: truncated before ") + what);
  return in;
}

}  // namespace

void save_archive(const std::string& path, const Scenario& sc, const SynthesisResult& res) {
  std::ostringstream os;
  os << kMagic << "\n";
  // re-dump compactly so the whole scenario sits on one line
  os << "scenario " << nlohmann::json::parse(scenario_to_json(sc)).dump() << "\n";

  os << "elements " << res.partition.count() << "\n";
  for (const auto& el : res.partition.elements) {
    os << "e " << el.index << " " << (el.unsafe ? 1 : 0);
    for (int i = 0; i < el.node.size(); ++i) os << " " << fmt(el.node[i]);
    os << "\n";
  }

  os << "edges " << res.graph.edges.size() << "\n";
  for (const auto& ed : res.graph.edges) {
    os << "g " << ed.tail << " " << ed.head << " " << ed.input_id << " " << fmt(ed.j1) << " "
       << fmt(ed.j2);
    for (int i = 0; i < ed.endpoint.size(); ++i) os << " " << fmt(ed.endpoint[i]);
    os << "\n";
  }

  os << "sector " << res.sector.destination << "\n";
  for (int q = 0; q < res.partition.count(); ++q) {
    os << "s " << q << " " << res.sector.next_hop_element[q] << " " << res.sector.next_hop_input[q]
       << " " << fmt(res.sector.cost_to_go[q]) << "\n";
  }

  os << "stats " << res.stats.raw_edges << " " << res.stats.pruned_edges << " "
     << res.stats.unsafe_elements << " " << (res.stats.reachable ? 1 : 0) << "\n";
  os << "end\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write archive '" + path + "'");
  out << os.str();
}

Archive load_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open archive '" + path + "'");

  std::string line;
  expect_line(in, line, "header");
  if (line != kMagic) throw ConfigurationError("archive: unrecognized header '" + line + "'");

  expect_line(in, line, "scenario");
  if (line.rfind("scenario ", 0) != 0) throw ConfigurationError("archive: missing scenario line");

  Archive ar;
  ar.scenario = scenario_from_json(line.substr(9));
  const HybridSystemModel model = build_model(ar.scenario.model);

  ar.result.partition = build_partition(model.state_bounds, ar.scenario.seed);
  compute_element_models(ar.result.partition, model, ar.scenario.family.binary_words);

  std::string tok;
  int n = 0;
  expect_line(in, line, "elements");
  {
    std::istringstream ls(line);
    if (!(ls >> tok >> n) || tok != "elements" || n != ar.result.partition.count())
      throw ConfigurationError("archive: element count mismatch");
  }
  for (int i = 0; i < n; ++i) {
    expect_line(in, line, "element row");
    std::istringstream ls(line);
    int idx = 0, unsafe = 0;
    if (!(ls >> tok >> idx >> unsafe) || tok != "e" || idx != i)
      throw ConfigurationError("archive: bad element row");
    auto& el = ar.result.partition.elements[i];
    el.unsafe = unsafe != 0;
    for (int d = 0; d < model.state_dim; ++d) {
      if (!(ls >> tok)) throw ConfigurationError("archive: short element row");
      el.node[d] = parse_double(tok);
    }
  }

  std::uint64_t m = 0;
  expect_line(in, line, "edges");
  {
    std::istringstream ls(line);
    if (!(ls >> tok >> m) || tok != "edges") throw ConfigurationError("archive: missing edge count");
  }
  ar.result.graph.element_count = ar.result.partition.count();
  ar.result.graph.family = ar.scenario.family;
  ar.result.graph.edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    expect_line(in, line, "edge row");
    std::istringstream ls(line);
    TransitionEdge ed;
    std::string j1s, j2s;
    if (!(ls >> tok >> ed.tail >> ed.head >> ed.input_id >> j1s >> j2s) || tok != "g")
      throw ConfigurationError("archive: bad edge row");
    ed.j1 = parse_double(j1s);
    ed.j2 = parse_double(j2s);
    ed.endpoint.resize(model.state_dim);
    for (int d = 0; d < model.state_dim; ++d) {
      if (!(ls >> tok)) throw ConfigurationError("archive: short edge row");
      ed.endpoint[d] = parse_double(tok);
    }
    ar.result.graph.edges.push_back(std::move(ed));
  }
  ar.result.stats.raw_edges = m;
  ar.result.stats.pruned_edges = m;

  expect_line(in, line, "sector");
  {
    std::istringstream ls(line);
    if (!(ls >> tok >> ar.result.sector.destination) || tok != "sector")
      throw ConfigurationError("archive: missing sector line");
  }
  ar.result.sector.next_hop_element.assign(n, -1);
  ar.result.sector.next_hop_input.assign(n, 0);
  ar.result.sector.cost_to_go.assign(n, std::numeric_limits<double>::infinity());
  for (int i = 0; i < n; ++i) {
    expect_line(in, line, "sector row");
    std::istringstream ls(line);
    int idx = 0;
    std::string cost;
    if (!(ls >> tok >> idx >> ar.result.sector.next_hop_element[i] >>
          ar.result.sector.next_hop_input[i] >> cost) ||
        tok != "s" || idx != i)
      throw ConfigurationError("archive: bad sector row");
    ar.result.sector.cost_to_go[i] =
        cost == "inf" ? std::numeric_limits<double>::infinity() : parse_double(cost);
  }

  expect_line(in, line, "stats");
  {
    std::istringstream ls(line);
    int reach = 0;
    if (!(ls >> tok >> ar.result.stats.raw_edges >> ar.result.stats.pruned_edges >>
          ar.result.stats.unsafe_elements >> reach) ||
        tok != "stats")
      throw ConfigurationError("archive: bad stats line");
    ar.result.stats.reachable = reach != 0;
  }
  expect_line(in, line, "end");
  if (line != "end") throw ConfigurationError("archive: missing end marker");
  return ar;
}

void write_dot(std::ostream& os, const Partition& part, const TransitionGraph& tg,
               const ReachabilitySector& rs) {
  os << "digraph sector {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& el : part.elements) {
    os << "  q" << el.index << " [label=\"" << el.index;
    if (el.index == rs.destination) os << "\\ndest";
    os << "\"";
    if (el.unsafe) os << ", style=filled, fillcolor=gray";
    if (el.index == rs.destination) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& ed : tg.edges) {
    const bool on_policy = rs.next_hop_element.size() > static_cast<std::size_t>(ed.tail) &&
                           rs.next_hop_element[ed.tail] == ed.head &&
                           rs.next_hop_input[ed.tail] == ed.input_id;
    os << "  q" << ed.tail << " -> q" << ed.head << " [label=\"" << fmt(ed.j2) << "\"";
    if (on_policy) os << ", color=red, penwidth=2";
    os << "];\n";
  }
  os << "}\n";
}

void write_nodes_table(std::ostream& os, const Partition& part) {
  os << "element,unsafe";
  const int dim = part.domain.dim();
  for (int d = 0; d < dim; ++d) os << ",node" << d;
  for (int d = 0; d < dim; ++d) os << ",lo" << d << ",hi" << d;
  os << "\n";
  for (const auto& el : part.elements) {
    os << el.index << "," << (el.unsafe ? 1 : 0);
    for (int d = 0; d < dim; ++d) os << "," << fmt(el.node[d]);
    for (int d = 0; d < dim; ++d) os << "," << fmt(el.box.lo[d]) << "," << fmt(el.box.hi[d]);
    os << "\n";
  }
}

void write_edges_table(std::ostream& os, const TransitionGraph& tg) {
  os << "tail,head,input_id,j1,j2";
  const int dim = tg.edges.empty() ? 0 : static_cast<int>(tg.edges.front().endpoint.size());
  for (int d = 0; d < dim; ++d) os << ",end" << d;
  os << "\n";
  for (const auto& ed : tg.edges) {
    os << ed.tail << "," << ed.head << "," << ed.input_id << "," << fmt(ed.j1) << ","
       << fmt(ed.j2);
    for (int d = 0; d < ed.endpoint.size(); ++d) os << "," << fmt(ed.endpoint[d]);
    os << "\n";
  }
}

void write_sector_table(std::ostream& os, const ReachabilitySector& rs) {
  os << "element,next_hop,input_id,cost_to_go\n";
  for (std::size_t q = 0; q < rs.next_hop_element.size(); ++q) {
    os << q << "," << rs.next_hop_element[q] << "," << rs.next_hop_input[q] << ","
       << fmt(rs.cost_to_go[q]) << "\n";
  }
}

void write_trajectory_table(std::ostream& os, const Trajectory& traj) {
  os << "t";
  const int dim = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  for (int d = 0; d < dim; ++d) os << ",x" << d;
  os << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << fmt(traj.times[k]);
    for (int d = 0; d < dim; ++d) os << "," << fmt(traj.states[k][d]);
    os << "\n";
  }
}

void write_run_samples(std::ostream& os, const RunLog& log) {
  const int dim = log.samples.empty() ? 0 : static_cast<int>(log.samples.front().x.size());
  const int udim = log.samples.empty() ? 0 : static_cast<int>(log.samples.front().u0.size());
  os << "t,mode,element,duration";
  for (int d = 0; d < dim; ++d) os << ",x" << d;
  for (int d = 0; d < dim; ++d) os << ",meas" << d;
  for (int d = 0; d < udim; ++d) os << ",u" << d;
  os << ",fs_predicted,fs_actual\n";
  for (const auto& s : log.samples) {
    os << fmt(s.t) << "," << mode_name(s.mode) << "," << s.element << "," << fmt(s.duration);
    for (int d = 0; d < dim; ++d) os << "," << fmt(s.x[d]);
    for (int d = 0; d < dim; ++d) os << "," << fmt(s.x_meas[d]);
    for (int d = 0; d < udim; ++d) os << "," << fmt(s.u0[d]);
    os << "," << fmt(s.fs_predicted) << "," << fmt(s.fs_actual) << "\n";
  }
}

void write_run_trail(std::ostream& os, const RunLog& log) {
  const int dim = log.trail.empty() ? 0 : static_cast<int>(log.trail.front().size());
  os << "t";
  for (int d = 0; d < dim; ++d) os << ",x" << d;
  os << "\n";
  for (std::size_t k = 0; k < log.trail_t.size(); ++k) {
    os << fmt(log.trail_t[k]);
    for (int d = 0; d < dim; ++d) os << "," << fmt(log.trail[k][d]);
    os << "\n";
  }
}

void write_run_inputs(std::ostream& os, const RunLog& log) {
  const int udim = log.inputs.empty() ? 0 : static_cast<int>(log.inputs.front().u.size());
  const int bdim = log.inputs.empty() ? 0 : static_cast<int>(log.inputs.front().ub.size());
  os << "t0,t1";
  for (int d = 0; d < udim; ++d) os << ",u" << d;
  for (int d = 0; d < bdim; ++d) os << ",b" << d;
  os << "\n";
  for (const auto& seg : log.inputs) {
    os << fmt(seg.t0) << "," << fmt(seg.t1);
    for (int d = 0; d < udim; ++d) os << "," << fmt(seg.u[d]);
    for (int d = 0; d < bdim; ++d) os << "," << static_cast<int>(seg.ub[d]);
    os << "\n";
  }
}

void write_run_summary(std::ostream& os, const RunLog& log) {
  os << "steps " << log.samples.size() << "\n";
  int n_rs = 0, n_fs = 0, n_s = 0;
  for (const auto& s : log.samples) {
    if (s.mode == ControllerMode::RS) ++n_rs;
    else if (s.mode == ControllerMode::FS) ++n_fs;
    else ++n_s;
  }
  os << "mode_counts RS=" << n_rs << " FS=" << n_fs << " S=" << n_s << "\n";
  os << "transitions";
  for (std::size_t k = 0; k < log.samples.size(); ++k) {
    if (k == 0 || log.samples[k].mode != log.samples[k - 1].mode)
      os << " " << fmt(log.samples[k].t) << ":" << mode_name(log.samples[k].mode);
  }
  os << "\n";
  os << "first_s_time " << fmt(log.first_s_time) << "\n";
  os << "end_time " << fmt(log.end_time) << "\n";
  os << "final_state";
  for (int d = 0; d < log.final_state.size(); ++d) os << " " << fmt(log.final_state[d]);
  os << "\n";
  os << "sustained_capture " << (log.sustained_capture ? 1 : 0) << "\n";
  os << "aborted " << (log.aborted ? 1 : 0) << "\n";
  if (!log.diagnostic.empty()) os << "diagnostic " << log.diagnostic << "\n";
}

}  // namespace rsynth
