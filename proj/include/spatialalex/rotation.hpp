// Winding numbers of regions, chi of vertices and crossings, and the
// extended rotation number Rot(D).
//
// Winding rule: crossing an edge from its right side to its left side
// multiplies by the edge meridian (the unbounded region carries 1).  This is
// the orientation the worked examples and the move behavior pin down; a ccw
// circle with meridian t gets interior winding t and Rot = t.
#pragma once

#include <optional>

#include "spatialalex/diagram.hpp"

namespace salex {

struct WindingAssignment {
  // Indexed by region (regular regions only carry meaning).
  std::vector<HalfMonomial> of_region;
};

// Requires a connected diagram; the assignment is checked for consistency on
// every arc (InconsistentWinding on failure).
WindingAssignment winding_numbers(const CombMap& m, const RegionTable& table,
                                  const EdgeColoring& col);

HalfMonomial chi_vertex(const CombMap& m, const RegionTable& table, const WindingAssignment& w,
                        const std::string& vertex_id);
HalfMonomial chi_crossing(const CombMap& m, const RegionTable& table, const WindingAssignment& w,
                          const std::string& crossing_id);

// Product of chi over all vertices and double points of a connected diagram
// (integral by the homology lemma; asserted).
HalfMonomial chi_node_product(const CombMap& m, const RegionTable& table,
                              const WindingAssignment& w, const EdgeColoring& col);

// Rot(D); disconnected diagrams give the product over components, each
// computed in isolation with its own unbounded face at 1.
HalfMonomial rot(const CombMap& m, const EdgeColoring& col);

// Sum of the basis exponents of Rot under the homomorphism sending every
// meridian to 1.  Requires a link diagram (crossings only).
int64_t classical_w(const CombMap& m, const EdgeColoring& col);

}  // namespace salex
