#pragma once

#include <iosfwd>
#include <string>

#include "rsynth/pipeline.hpp"
#include "rsynth/supervisor.hpp"

namespace rsynth {

struct Archive {
  Scenario scenario;
  SynthesisResult result;
};

/* Text snapshot of a finished synthesis: the scenario, the placed nodes, the
 * pruned/weighed edge list and the next-hop table.  Doubles are written with
 * 17 significant digits and nothing time-dependent is stored, so identical
 * synthesis inputs produce byte-identical files. */
void save_archive(const std::string& path, const Scenario& sc, const SynthesisResult& res);
Archive load_archive(const std::string& path);

/* exports */
void write_dot(std::ostream& os, const Partition& part, const TransitionGraph& tg,
               const ReachabilitySector& rs);
void write_nodes_table(std::ostream& os, const Partition& part);
void write_edges_table(std::ostream& os, const TransitionGraph& tg);
void write_sector_table(std::ostream& os, const ReachabilitySector& rs);
void write_trajectory_table(std::ostream& os, const Trajectory& traj);

/* run-log writers */
void write_run_samples(std::ostream& os, const RunLog& log);
void write_run_trail(std::ostream& os, const RunLog& log);
void write_run_inputs(std::ostream& os, const RunLog& log);
void write_run_summary(std::ostream& os, const RunLog& log);

}  // namespace rsynth
