// Assembly of the normalized multi-variable Alexander polynomial
// Delta = -Rot(D)^{1/2} * <D>, its single-variable specialization, and the
// trivalent coloring identity check.
#pragma once

#include "spatialalex/graphalg.hpp"
#include "spatialalex/statesum.hpp"

namespace salex {

struct AlexanderValue {
  RingFraction value;     // -sqrt(rot) * raw_sum, canonical form
  HalfMonomial rot;
  RingFraction raw_sum;   // <D>
  std::vector<std::string> basis;
  std::optional<GroupRingElement> polynomial;  // when the denominator clears
};

AlexanderValue alexander(const CombMap& m, const EdgeColoring& col);

// Single-variable image under Phi_c.  The target is a rank-1 lattice with
// basis name "t"; rational colorings are cleared by `denominator_scale`, so
// exponents are halves of t^(1/denominator_scale).
struct Specialized {
  RingFraction value;
  LatticePtr lat;
  int64_t denominator_scale = 1;
};

Specialized specialize(const RingFraction& x, const LatticePtr& source, const Coloring& c,
                       const DirectedGraph& g);

// phi_c(rot) as a rational exponent of t.
Rational phi_of(const HalfMonomial& m, const LatticePtr& source, const Coloring& c);

// Checks Phi_c(Delta) = Delta_{(G,c)}(t) * (t^{1/2}-t^{-1/2})^{|V|-1} on a
// trivalent diagram, computing the right side through the single-variable
// pipeline (recolored rank-1 evaluation).
bool moy_relation_check(const CombMap& m, const EdgeColoring& col, const Coloring& c);

// Exponent scaling t_i -> t_i^k on every monomial (cross-validation utility).
GroupRingElement scale_exponents(const GroupRingElement& p, int64_t k);
RingFraction scale_exponents(const RingFraction& x, int64_t k);

// Rank-1 recoloring of a diagram: every edge meridian becomes t^{c(e)} (times
// the denominator clearing).  Used for the dual-route specialization check.
EdgeColoring rank1_coloring(const Diagram& d, const Coloring& c, int64_t denominator_scale);

LatticePtr rank1_lattice();

}  // namespace salex
