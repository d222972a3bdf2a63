// Kauffman state enumeration and the multi-variable state sum <D>, with the
// Alexander-matrix determinant oracle, base-point sweep and skein checks.
#pragma once

#include <cstdint>
#include <functional>

#include "spatialalex/diagram.hpp"
#include "spatialalex/ring.hpp"
#include "spatialalex/rotation.hpp"

namespace salex {

// Assignment of one corner per crossing, in Cr(D) order.
struct KauffmanState {
  std::vector<Corner> corner;
};

// Local contributions of a corner: the sign factor and the A-weight.
struct CornerWeight {
  int sign = 1;
  GroupRingElement a;
};
CornerWeight corner_weight(const CombMap& m, const EdgeColoring& col, const CrossingRef& c,
                           Corner corner);

// Complete duplicate-free enumeration of states whose induced region map is a
// bijection onto the unmarked regions.  Deterministic order: crossings by
// ascending corner count, candidate corners by region index.
std::vector<KauffmanState> enumerate_states(const DecoratedDiagram& dd);
void for_each_state(const DecoratedDiagram& dd, const std::function<void(const KauffmanState&)>& fn);

// (sign, prod A) of one state.
std::pair<int, GroupRingElement> state_weight(const DecoratedDiagram& dd, const EdgeColoring& col,
                                              const KauffmanState& s);

// |delta| = x - x*t for the base edge meridian t; x is the winding of the
// marked region on the right of the base arc.
GroupRingElement delta_norm(const DecoratedDiagram& dd, const EdgeColoring& col,
                            const WindingAssignment& w);

// <D>_delta as a fraction; zero when the state set is empty (in particular
// for disconnected diagrams).  Honors SPATIAL_ALEX_THREADS for the weight
// accumulation.
RingFraction state_sum(const DecoratedDiagram& dd, const EdgeColoring& col);
RingFraction state_sum(const CombMap& m, const RegionTable& table, const EdgeColoring& col,
                       const BasePoint& base);

// det of the Alexander matrix (rows = crossings, cols = unmarked regions,
// entries = sums of corner A-weights); equals the state-sum numerator up to
// a global sign.
GroupRingElement alexander_det(const DecoratedDiagram& dd, const EdgeColoring& col);

struct SweepEntry {
  BasePoint base;
  RingFraction value;
  double millis = 0;
};
struct SweepReport {
  std::vector<SweepEntry> entries;
  RingFraction common;
};
// state_sum for every base position; throws SweepMismatch when two differ.
SweepReport base_point_sweep(const CombMap& m, const RegionTable& table, const EdgeColoring& col);

// Skein resolutions of one crossing: the two-vertex "H" graph and the
// merge-split graph, colored over the original lattice.
struct Resolution {
  Diagram diagram;
  EdgeColoring coloring;
  std::string mid_edge;
};
Resolution resolve_h(const Diagram& d, const EdgeColoring& col, const std::string& crossing_id);
Resolution resolve_ms(const Diagram& d, const EdgeColoring& col, const std::string& crossing_id);

// Verifies the skein relation at one crossing with the base point placed on
// the same arc in all three diagrams (the arc must avoid the site).
bool skein_check(const Diagram& d, const EdgeColoring& col, const std::string& crossing_id,
                 const BasePoint& base);

}  // namespace salex
