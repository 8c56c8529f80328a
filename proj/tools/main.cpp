#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <CLI11.hpp>

#include "rsynth/archive.hpp"

namespace {

using namespace rsynth;

Vec parse_vector(const std::string& text, const char* what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigurationError(std::string("bad ") + what + " component '" + tok + "'");
    }
  }
  if (vals.empty()) throw ConfigurationError(std::string("empty ") + what);
  Vec v(static_cast<int>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
  return v;
}

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      vals.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ConfigurationError("bad grid component '" + tok + "'");
    }
  }
  if (vals.empty()) throw ConfigurationError("empty grid");
  return vals;
}

// "0,0.45,0.9" = one list for every channel; "0,1;2,3" = per-channel lists
std::vector<std::vector<double>> parse_amplitudes(const std::string& text, int channels) {
  std::vector<std::vector<double>> lists;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    Vec v = parse_vector(part, "amplitude");
    lists.emplace_back(v.data(), v.data() + v.size());
  }
  if (lists.size() == 1 && channels > 1) lists.resize(channels, lists.front());
  if (static_cast<int>(lists.size()) != channels)
    throw ConfigurationError("amplitude lists do not match the input channel count");
  return lists;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write '" + path + "'");
  out << text;
}

int run_synthesize(const std::string& scenario_name, const std::string& seed_grid,
                   const std::string& amplitudes, std::uint64_t budget, std::uint64_t samples,
                   const std::string& init, const std::string& des, int threads,
                   const std::string& out_path) {
  Scenario sc = load_scenario(scenario_name);
  if (!seed_grid.empty()) sc.seed = parse_grid(seed_grid);
  if (!amplitudes.empty())
    sc.family.amplitudes = parse_amplitudes(amplitudes, sc.model.input_bounds.dim());
  if (budget > 0) sc.family.budget = budget;
  if (samples > 0) sc.family.sample_count = samples;
  if (!init.empty()) sc.init = parse_vector(init, "init");
  if (!des.empty()) sc.des = parse_vector(des, "des");
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;

  SynthesisResult res = synthesize(sc, threads);
  save_archive(out_path, sc, res);

  std::printf("scenario        %s\n", sc.name.c_str());
  std::printf("elements        %d (%d unsafe)\n", res.partition.count(),
              res.stats.unsafe_elements);
  std::printf("edges           %llu raw, %llu kept\n",
              static_cast<unsigned long long>(res.stats.raw_edges),
              static_cast<unsigned long long>(res.stats.pruned_edges));
  int reachable = 0;
  for (int q = 0; q < res.partition.count(); ++q)
    if (q == res.sector.destination || res.sector.next_hop_element[q] >= 0) ++reachable;
  std::printf("sector          %d/%d elements reach the destination\n", reachable,
              res.partition.count());
  std::printf("init reachable  %s\n", res.stats.reachable ? "yes" : "no");
  std::printf("wall time       %.2f s\n", res.stats.wall_seconds);
  std::printf("archive         %s\n", out_path.c_str());
  return 0;
}

int run_simulate(const std::string& archive_path, const std::string& init,
                 std::uint64_t noise_seed, int steps, const std::string& out_prefix) {
  Archive ar = load_archive(archive_path);
  const HybridSystemModel model = build_model(ar.scenario.model);
  const Stabilizer stab = build_stabilizer(ar.scenario);

  Vec x0 = ar.scenario.init;
  if (!init.empty()) x0 = parse_vector(init, "init");

  SupervisorConfig cfg = resolve_supervisor_defaults(
      ar.scenario.supervisor, ar.result.partition, ar.scenario.family.t_rs, ar.scenario.des);
  if (steps > 0) cfg.max_steps = steps;

  RunLog log = run_closed_loop(model, ar.result.partition, ar.result.graph, ar.result.sector,
                               stab, cfg, x0, ar.scenario.des, noise_seed);

  if (!out_prefix.empty()) {
    auto dump = [&](const char* suffix, auto writer) {
      std::ostringstream os;
      writer(os);
      write_text_file(out_prefix + suffix, os.str());
    };
    dump("-samples.csv", [&](std::ostream& os) { write_run_samples(os, log); });
    dump("-trail.csv", [&](std::ostream& os) { write_run_trail(os, log); });
    dump("-inputs.csv", [&](std::ostream& os) { write_run_inputs(os, log); });
    dump("-summary.txt", [&](std::ostream& os) { write_run_summary(os, log); });
    std::printf("wrote %s-{samples,trail,inputs}.csv and %s-summary.txt\n", out_prefix.c_str(),
                out_prefix.c_str());
  }
  write_run_summary(std::cout, log);
  return log.aborted ? 3 : 0;
}

int run_export(const std::string& archive_path, const std::string& format,
               const std::string& out_path) {
  Archive ar = load_archive(archive_path);
  std::ostringstream os;
  if (format == "dot") {
    write_dot(os, ar.result.partition, ar.result.graph, ar.result.sector);
  } else if (format == "nodes") {
    write_nodes_table(os, ar.result.partition);
  } else if (format == "edges") {
    write_edges_table(os, ar.result.graph);
  } else if (format == "sector") {
    write_sector_table(os, ar.result.sector);
  } else if (format == "scenario") {
    os << scenario_to_json(ar.scenario);
  } else {
    throw ConfigurationError("unknown export format '" + format +
                             "' (dot|nodes|edges|sector|scenario)");
  }
  if (out_path.empty())
    std::cout << os.str();
  else
    write_text_file(out_path, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthesis and closed-loop simulation for hybrid controllers on rectangular "
               "partitions"};
  app.require_subcommand(1);

  std::string scenario, seed_grid, amplitudes, init, des, out_path, archive_path, format;
  std::uint64_t budget = 0, samples = 0, noise_seed = 0;
  int threads = 0, steps = 0;

  auto* syn = app.add_subcommand("synthesize", "build the transition graph and next-hop policy");
  syn->add_option("--scenario", scenario,
                  "builtin name (pendulum, pendulum-desk, threetank, threetank-desk) or a JSON "
                  "scenario file")
      ->required();
  syn->add_option("--seed-grid", seed_grid, "partition seed, e.g. 40,32");
  syn->add_option("--amplitudes", amplitudes,
                  "input amplitude grid, lists per channel separated by ';'");
  syn->add_option("--budget", budget, "symbolic-input enumeration cap");
  syn->add_option("--samples", samples, "subsample this many signals per element (0 = all)");
  syn->add_option("--init", init, "initial state override, e.g. 0,0");
  syn->add_option("--des", des, "destination override, e.g. 3.14159,0");
  syn->add_option("--threads", threads, "worker threads (0 = all cores)");
  syn->add_option("--out", out_path, "archive output path")->required();

  auto* sim = app.add_subcommand("simulate", "run the supervisor loop from a synthesis archive");
  sim->add_option("--archive", archive_path, "archive produced by synthesize")->required();
  sim->add_option("--init", init, "initial state override");
  sim->add_option("--noise-seed", noise_seed, "measurement-noise seed (0 = noise-free)");
  sim->add_option("--steps", steps, "decision-step cap override");
  sim->add_option("--out", out_path, "output file prefix for the run logs");

  auto* exp = app.add_subcommand("export", "write tables or graphs from a synthesis archive");
  exp->add_option("--archive", archive_path, "archive produced by synthesize")->required();
  exp->add_option("--format", format, "dot | nodes | edges | sector | scenario")->required();
  exp->add_option("--out", out_path, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (syn->parsed())
      return run_synthesize(scenario, seed_grid, amplitudes, budget, samples, init, des, threads,
                            out_path);
    if (sim->parsed()) return run_simulate(archive_path, init, noise_seed, steps, out_path);
    return run_export(archive_path, format, out_path);
  } catch (const ConfigurationError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const ModelDefinitionError& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return 2;
  } catch (const DomainViolation& e) {
    std::fprintf(stderr, "domain violation: %s\n", e.what());
    return 3;
  } catch (const BudgetExceeded& e) {
    std::fprintf(stderr, "budget exceeded: %s\n", e.what());
    return 4;
  } catch (const ReachabilityFailure& e) {
    std::fprintf(stderr, "reachability failure: %s\n", e.what());
    return 5;
  } catch (const IntegrationFailure& e) {
    std::fprintf(stderr, "integration failure: %s\n", e.what());
    return 6;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
