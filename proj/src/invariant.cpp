#include "spatialalex/invariant.hpp"

#include <numeric>

#include "spatialalex/errors.hpp"

namespace salex {

AlexanderValue alexander(const CombMap& m, const EdgeColoring& col) {
  AlexanderValue v;
  v.basis = col.lat->basis_names();
  v.rot = rot(m, col);

  BasePoint base;
  if (!m.diagram().arcs.empty())
    base = {false, m.diagram().arcs.front().id};
  else if (!m.diagram().free_loops.empty())
    base = {true, m.diagram().free_loops.front().id};
  else
    fail("EmptyGraph", "diagram has no strands");
  v.raw_sum = state_sum(m, faces(m), col, base);

  HalfMonomial half_rot = mono_sqrt(v.rot);
  v.value = canonicalize(RingFraction(-v.raw_sum.num().mono_scaled(half_rot), v.raw_sum.den()));
  if (v.value.den() == GroupRingElement::one(col.lat)) v.polynomial = v.value.num();
  return v;
}

Rational phi_of(const HalfMonomial& m, const LatticePtr& source, const Coloring& c) {
  Rational acc(0);
  const auto& basis = source->basis_names();
  for (size_t i = 0; i < basis.size(); ++i) {
    auto it = c.value.find(basis[i]);
    if (it == c.value.end()) fail("UnbalancedColoring", "no color for basis edge " + basis[i]);
    acc += Rational(m.halves[i]) * it->second / 2;
  }
  return acc;
}

LatticePtr rank1_lattice() {
  static LatticePtr lat = MeridianLattice::build({"t"}, {});
  return lat;
}

Specialized specialize(const RingFraction& x, const LatticePtr& source, const Coloring& c,
                       const DirectedGraph& g) {
  if (!balanced(g, c)) fail("UnbalancedColoring", "coloring violates vertex balance");
  Specialized out;
  out.lat = rank1_lattice();
  Int scale = 1;
  for (const auto& [e, v] : c.value)
    scale = boost::multiprecision::lcm(scale, v.denominator());
  out.denominator_scale = static_cast<int64_t>(scale);

  std::vector<int64_t> basis_color;  // N * c(b_i), whole units
  for (const auto& b : source->basis_names()) {
    auto it = c.value.find(b);
    if (it == c.value.end()) fail("UnbalancedColoring", "no color for basis edge " + b);
    basis_color.push_back(static_cast<int64_t>(it->second.numerator() * (scale / it->second.denominator())));
  }
  auto image = [&](const HalfMonomial& m) {
    int64_t halves = 0;
    for (size_t i = 0; i < basis_color.size(); ++i) halves += m.halves[i] * basis_color[i];
    return HalfMonomial{{halves}};
  };
  out.value = RingFraction(x.num().map_monomials(out.lat, image),
                           x.den().map_monomials(out.lat, image));
  return out;
}

EdgeColoring rank1_coloring(const Diagram& d, const Coloring& c, int64_t denominator_scale) {
  EdgeColoring col;
  col.lat = rank1_lattice();
  for (const auto& e : d.edges) {
    auto it = c.value.find(e);
    if (it == c.value.end()) fail("UnbalancedColoring", "no color for edge " + e);
    Rational v = it->second * denominator_scale;
    if (v.denominator() != 1) fail("UnbalancedColoring", "denominator scale does not clear " + e);
    col.color[e] = HalfMonomial{{2 * static_cast<int64_t>(v.numerator())}};
  }
  return col;
}

GroupRingElement scale_exponents(const GroupRingElement& p, int64_t k) {
  return p.map_monomials(p.lattice(), [&](const HalfMonomial& m) { return mono_pow(m, k); });
}

RingFraction scale_exponents(const RingFraction& x, int64_t k) {
  return RingFraction(scale_exponents(x.num(), k), scale_exponents(x.den(), k));
}

bool moy_relation_check(const CombMap& m, const EdgeColoring& col, const Coloring& c) {
  const Diagram& d = m.diagram();
  int n_vertices = 0;
  for (const Node& n : d.nodes) {
    if (n.is_crossing) continue;
    ++n_vertices;
    if (n.in.size() + n.out.size() != 3) fail("NotTrivalent", "vertex " + n.id);
  }
  DirectedGraph g = underlying_digraph(m);
  for (const auto& [e, v] : c.value)
    if (v <= 0 || v.denominator() != 1)
      fail("UnbalancedColoring", "moy_relation_check needs positive integer colors");

  // Left side: Phi_c applied to the multi-variable invariant.
  AlexanderValue multi = alexander(m, col);
  Specialized lhs = specialize(multi.value, col.lat, c, g);

  // Right side from the single-variable pipeline.
  EdgeColoring rcol = rank1_coloring(d, c, lhs.denominator_scale);
  BasePoint base = d.arcs.empty() ? BasePoint{true, d.free_loops.front().id}
                                  : BasePoint{false, d.arcs.front().id};
  RingFraction bracket_c = state_sum(m, faces(m), rcol, base);
  HalfMonomial rot_c = rot(m, rcol);  // t^{phi_c(Rot)}
  HalfMonomial curliness{{rot_c.halves[0] / 2}};  // t^{phi_c(Rot)/2}

  auto lat = rank1_lattice();
  GroupRingElement down(lat);  // t^{-1/2} - t^{1/2}
  down.add_term(HalfMonomial{{-1}}, 1);
  down.add_term(HalfMonomial{{1}}, -1);
  GroupRingElement up(lat);  // t^{1/2} - t^{-1/2}
  up.add_term(HalfMonomial{{1}}, 1);
  up.add_term(HalfMonomial{{-1}}, -1);

  RingFraction delta_gc =
      bracket_c * RingFraction(GroupRingElement::one(lat), down.pow(n_vertices - 1));
  delta_gc = delta_gc.mono_scaled(curliness);
  RingFraction rhs = delta_gc * RingFraction::whole(up.pow(n_vertices - 1));
  return fraction_eq(lhs.value, rhs);
}

}  // namespace salex
