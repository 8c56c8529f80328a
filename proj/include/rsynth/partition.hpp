#pragma once

#include "rsynth/dynamics.hpp"
#include "rsynth/types.hpp"

namespace rsynth {

/* per-binary-word frozen data of one element */
struct ElementModeData {
  BinaryWord binary;
  Vec a;
  Mat b;
  std::vector<Vec> unactuated;   // oriented orthonormal basis of null(b^T)
};

struct Element {
  int index = -1;
  Box box;
  Vec node;          // operating node; initialized to the center
  bool unsafe = false;
  std::vector<ElementModeData> mode_data;

  const ElementModeData& data_for(const BinaryWord& ub) const;
};

/* uniform rectangular partition of the state box; elements are half-open
 * [lo, hi) except along the domain's upper faces, which are closed.
 * flat index: dimension 0 varies fastest. */
struct Partition {
  Box domain;
  std::vector<int> seed;         // element count per dimension
  std::vector<Element> elements;

  int count() const { return static_cast<int>(elements.size()); }
  int locate(const Vec& x) const;            // total on the domain; throws DomainViolation outside
  std::vector<int> multi_index(int flat) const;
};

Partition build_partition(const Box& domain, const std::vector<int>& seed);

/* orthonormal basis of null(b^T), each vector flipped so that dir . a >= 0 */
std::vector<Vec> unactuated_directions(const Mat& b, const Vec& a, double tol = 1e-10);

/* fill per-element frozen affine data and unactuated directions for every
 * binary word in `words` (pass {{}} for systems without binary inputs) */
void compute_element_models(Partition& part, const HybridSystemModel& model,
                            const std::vector<BinaryWord>& words);

struct PlacementConfig {
  bool corner_probes = false;       // default: the single center probe
  double dwell_fraction = 0.25;     // minimum dwell for placement, as a fraction of t_fs_max
  double corner_inset = 0.5;        // corner candidates pulled toward the center by this
                                    // fraction of each half-width; boxes are half-open, so a
                                    // node ON an upper face would belong to the neighbor, and
                                    // endpoints cluster near nodes, so face-hugging nodes leave
                                    // replayed transitions no margin for deviation
  double t_fs_max = 0.0;            // must be set by the caller
};

/* candidate set = the 2^n (inset) corners plus the center; winner minimizes
 * the summed fine-tune residual over the probe set (ties: center first, then
 * lowest candidate index). elements where every candidate is infeasible from
 * every probe are flagged unsafe. */
void place_operating_node(Element& elem, const HybridSystemModel& model,
                          const PlacementConfig& cfg);

void place_operating_nodes(Partition& part, const HybridSystemModel& model,
                           const PlacementConfig& cfg);

}  // namespace rsynth
