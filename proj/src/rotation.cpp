#include "spatialalex/rotation.hpp"

#include <deque>

#include "spatialalex/errors.hpp"

namespace salex {

namespace {

// Per-face winding values for one node component, outer face at identity.
std::vector<std::optional<HalfMonomial>> component_windings(const CombMap& m,
                                                            const EdgeColoring& col, int comp) {
  std::vector<std::optional<HalfMonomial>> w(m.n_faces());
  const Diagram& d = m.diagram();
  int start = m.component_outer_face(comp);
  w[start] = col.lat->identity();
  std::deque<int> queue{start};
  // Adjacency: left(a) = right(a) * color(edge(a)).
  while (!queue.empty()) {
    int f = queue.front();
    queue.pop_front();
    for (size_t ai = 0; ai < d.arcs.size(); ++ai) {
      if (m.component_of_arc(static_cast<int>(ai)) != comp) continue;
      int fl = m.face_left_of_arc(static_cast<int>(ai));
      int fr = m.face_right_of_arc(static_cast<int>(ai));
      if (fl != f && fr != f) continue;
      const HalfMonomial& t = col.of(d.arcs[ai].edge);
      HalfMonomial left_val = fl == f ? *w[f] : mono_mul(*w[f], t);
      HalfMonomial right_val = fr == f ? *w[f] : mono_mul(*w[f], mono_inv(t));
      auto assign = [&](int face, const HalfMonomial& val) {
        if (!w[face]) {
          w[face] = val;
          queue.push_back(face);
        } else if (!(*w[face] == val)) {
          fail("InconsistentWinding", "winding assignment does not close up");
        }
      };
      assign(fl, left_val);
      assign(fr, right_val);
    }
  }
  return w;
}

HalfMonomial chi_vertex_faces(const CombMap& m, const std::vector<std::optional<HalfMonomial>>& w,
                              const Node& n, const LatticePtr& lat) {
  HalfMonomial acc = lat->identity();
  // Sectors between consecutive in-arcs, then between consecutive out-arcs;
  // the two gap sectors met by the separating line are skipped.
  for (size_t i = 0; i + 1 < n.in.size(); ++i) {
    int dart = 2 * m.arc_index(n.in[i]) + 1;
    acc = mono_mul(acc, mono_sqrt(*w[m.face_of(dart)]));
  }
  for (size_t j = 1; j < n.out.size(); ++j) {
    int dart = 2 * m.arc_index(n.out[j]);
    acc = mono_mul(acc, mono_sqrt(*w[m.face_of(dart)]));
  }
  return acc;
}

HalfMonomial chi_crossing_faces(const CombMap& m, const std::vector<std::optional<HalfMonomial>>& w,
                                const Node& n) {
  int south = m.face_of(2 * m.arc_index(n.sw) + 1);
  int north = m.face_of(2 * m.arc_index(n.ne));
  return mono_mul(mono_sqrt(*w[south]), mono_sqrt(*w[north]));
}

}  // namespace

WindingAssignment winding_numbers(const CombMap& m, const RegionTable& table,
                                  const EdgeColoring& col) {
  if (!m.connected()) fail("MalformedInput", "winding_numbers needs a connected diagram");
  WindingAssignment a;
  a.of_region.assign(table.regions.size(), col.lat->identity());
  const Diagram& d = m.diagram();
  if (m.n_node_components() == 1) {
    auto w = component_windings(m, col, 0);
    for (int f = 0; f < m.n_faces(); ++f) {
      if (!w[f]) fail("InconsistentWinding", "unreached face");
      a.of_region[table.region_of_face[f]] = *w[f];
    }
  } else {
    // Single free loop.
    const FreeLoop& l = d.free_loops[0];
    const HalfMonomial& t = col.of(l.edge);
    a.of_region[table.loop_inside[0]] = l.ccw ? t : mono_inv(t);
  }
  return a;
}

HalfMonomial chi_vertex(const CombMap& m, const RegionTable& table, const WindingAssignment& w,
                        const std::string& vertex_id) {
  const Node& n = m.diagram().nodes[m.node_index(vertex_id)];
  if (n.is_crossing) fail("MalformedInput", vertex_id + " is not a vertex");
  std::vector<std::optional<HalfMonomial>> by_face(m.n_faces());
  for (int f = 0; f < m.n_faces(); ++f) by_face[f] = w.of_region[table.region_of_face[f]];
  HalfMonomial acc{std::vector<int64_t>(w.of_region.at(0).halves.size(), 0)};
  for (size_t i = 0; i + 1 < n.in.size(); ++i)
    acc = mono_mul(acc, mono_sqrt(*by_face[m.face_of(2 * m.arc_index(n.in[i]) + 1)]));
  for (size_t j = 1; j < n.out.size(); ++j)
    acc = mono_mul(acc, mono_sqrt(*by_face[m.face_of(2 * m.arc_index(n.out[j]))]));
  return acc;
}

HalfMonomial chi_crossing(const CombMap& m, const RegionTable& table, const WindingAssignment& w,
                          const std::string& crossing_id) {
  const Node& n = m.diagram().nodes[m.node_index(crossing_id)];
  if (!n.is_crossing) fail("MalformedInput", crossing_id + " is not a crossing");
  int south = m.face_of(2 * m.arc_index(n.sw) + 1);
  int north = m.face_of(2 * m.arc_index(n.ne));
  return mono_mul(mono_sqrt(w.of_region[table.region_of_face[south]]),
                  mono_sqrt(w.of_region[table.region_of_face[north]]));
}

HalfMonomial chi_node_product(const CombMap& m, const RegionTable& table,
                              const WindingAssignment& w, const EdgeColoring& col) {
  if (!m.connected()) fail("MalformedInput", "chi_node_product needs a connected diagram");
  HalfMonomial acc = col.lat->identity();
  std::vector<std::optional<HalfMonomial>> by_face(m.n_faces());
  for (int f = 0; f < m.n_faces(); ++f) by_face[f] = w.of_region[table.region_of_face[f]];
  for (const Node& n : m.diagram().nodes)
    acc = mono_mul(acc, n.is_crossing ? chi_crossing_faces(m, by_face, n)
                                      : chi_vertex_faces(m, by_face, n, col.lat));
  if (!acc.is_integral()) fail("NonIntegralRotation", "chi product is not integral");
  return acc;
}

HalfMonomial rot(const CombMap& m, const EdgeColoring& col) {
  const Diagram& d = m.diagram();
  HalfMonomial total = col.lat->identity();
  for (int comp = 0; comp < m.n_node_components(); ++comp) {
    auto w = component_windings(m, col, comp);
    HalfMonomial region_product = col.lat->identity();
    for (int f = 0; f < m.n_faces(); ++f)
      if (w[f]) region_product = mono_mul(region_product, *w[f]);
    HalfMonomial node_product = col.lat->identity();
    for (size_t ni = 0; ni < d.nodes.size(); ++ni) {
      if (m.component_of_node(static_cast<int>(ni)) != comp) continue;
      const Node& n = d.nodes[ni];
      node_product = mono_mul(node_product, n.is_crossing ? chi_crossing_faces(m, w, n)
                                                          : chi_vertex_faces(m, w, n, col.lat));
    }
    if (!node_product.is_integral())
      fail("NonIntegralRotation", "chi product over a component is not integral");
    total = mono_mul(total, mono_mul(region_product, mono_inv(node_product)));
  }
  for (const FreeLoop& l : d.free_loops) {
    const HalfMonomial& t = col.of(l.edge);
    total = mono_mul(total, l.ccw ? t : mono_inv(t));
  }
  if (!total.is_integral()) fail("NonIntegralRotation", "rotation number is not integral");
  return total;
}

int64_t classical_w(const CombMap& m, const EdgeColoring& col) {
  for (const Node& n : m.diagram().nodes)
    if (!n.is_crossing) fail("NotALink", "diagram has vertices");
  HalfMonomial r = rot(m, col);
  int64_t sum = 0;
  for (int64_t h : r.halves) sum += h / 2;
  return sum;
}

}  // namespace salex
