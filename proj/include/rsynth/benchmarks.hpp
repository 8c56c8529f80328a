#pragma once

#include <map>
#include <string>

#include "rsynth/partition.hpp"
#include "rsynth/supervisor.hpp"

namespace rsynth {

/* declarative model description: a named parametric family or tabulated
 * per-mode affine matrices; everything needed to rebuild the dynamics */
struct PwaMode {
  BinaryWord binary;
  Mat a_mat;     // state matrix
  Mat b_mat;     // input matrix
  Vec offset;    // constant drift term
};

struct ModelSpec {
  std::string type;                       // "pendulum" | "threetank" | "pwa"
  std::map<std::string, double> params;
  Box state_bounds;
  Box input_bounds;
  std::vector<bool> wrap;
  int binary_dim = 0;
  std::vector<PwaMode> pwa_modes;         // only for type "pwa"
};

struct StabilizerSpec {
  std::string type;                       // "pendulum_pd" | "tank_hold" | "none"
  std::map<std::string, double> params;
};

struct Scenario {
  std::string name;
  ModelSpec model;
  std::vector<int> seed;
  SymbolicInputFamily family;
  CostConfig costs;
  SupervisorConfig supervisor;
  StabilizerSpec stabilizer;
  PlacementConfig placement;
  Vec init;
  Vec des;
};

HybridSystemModel build_model(const ModelSpec& spec);
Stabilizer build_stabilizer(const Scenario& sc);

/* inverted-pendulum-on-a-cart swing-up benchmark; desk = the reduced
 * configuration used by the fast acceptance checks */
Scenario make_pendulum_scenario(bool desk = false);

/* three-tank level-control benchmark with valve switching */
Scenario make_threetank_scenario(bool desk = false);

/* builtin names: pendulum, pendulum-desk, threetank, threetank-desk;
 * anything else is treated as a path to a scenario file */
Scenario load_scenario(const std::string& name_or_path);
Scenario load_scenario_file(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);
std::string scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);

}  // namespace rsynth
