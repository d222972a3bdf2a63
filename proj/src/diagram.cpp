#include "spatialalex/diagram.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "spatialalex/errors.hpp"

namespace salex {

using nlohmann::json;

namespace {

FaceRef face_ref_from_json(const json& j) {
  FaceRef f;
  if (j.is_null()) {
    f.kind = FaceRef::Unbounded;
    return f;
  }
  if (j.contains("arc")) {
    f.kind = FaceRef::ArcSide;
    f.id = j.at("arc").get<std::string>();
  } else if (j.contains("loop")) {
    f.kind = FaceRef::LoopSide;
    f.id = j.at("loop").get<std::string>();
  } else {
    fail("MalformedInput", "face reference needs arc or loop");
  }
  std::string side = j.at("side").get<std::string>();
  if (side != "left" && side != "right") fail("MalformedInput", "side must be left or right");
  f.left = side == "left";
  return f;
}

json face_ref_to_json(const FaceRef& f) {
  if (f.kind == FaceRef::Unbounded) return nullptr;
  json j;
  j[f.kind == FaceRef::ArcSide ? "arc" : "loop"] = f.id;
  j["side"] = f.left ? "left" : "right";
  return j;
}

}  // namespace

Diagram parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail("MalformedInput", e.what());
  }
  Diagram d;
  try {
    for (const auto& e : j.at("edges")) d.edges.push_back(e.at("id").get<std::string>());
    for (const auto& a : j.at("arcs"))
      d.arcs.push_back({a.at("id").get<std::string>(), a.at("edge").get<std::string>()});
    for (const auto& n : j.at("nodes")) {
      Node node;
      node.id = n.at("id").get<std::string>();
      std::string type = n.at("type").get<std::string>();
      if (type == "vertex") {
        node.is_crossing = false;
        for (const auto& x : n.at("in")) node.in.push_back(x.get<std::string>());
        for (const auto& x : n.at("out")) node.out.push_back(x.get<std::string>());
      } else if (type == "crossing") {
        node.is_crossing = true;
        std::string s = n.at("sign").get<std::string>();
        if (s != "pos" && s != "neg") fail("MalformedInput", "crossing sign must be pos or neg");
        node.sign = s == "pos" ? Sign::pos : Sign::neg;
        node.sw = n.at("sw").get<std::string>();
        node.se = n.at("se").get<std::string>();
        node.ne = n.at("ne").get<std::string>();
        node.nw = n.at("nw").get<std::string>();
      } else {
        fail("MalformedInput", "node type must be vertex or crossing");
      }
      d.nodes.push_back(std::move(node));
    }
    if (j.contains("free_loops"))
      for (const auto& l : j.at("free_loops")) {
        FreeLoop loop;
        loop.id = l.at("id").get<std::string>();
        loop.edge = l.at("edge").get<std::string>();
        std::string o = l.at("orientation").get<std::string>();
        if (o != "ccw" && o != "cw") fail("MalformedInput", "orientation must be ccw or cw");
        loop.ccw = o == "ccw";
        loop.face = face_ref_from_json(l.contains("face") ? l.at("face") : json(nullptr));
        d.free_loops.push_back(std::move(loop));
      }
    d.outer = face_ref_from_json(j.at("outer"));
    if (d.outer.kind == FaceRef::Unbounded) fail("MalformedInput", "outer must name an arc or loop side");
    if (j.contains("nesting"))
      for (const auto& n : j.at("nesting"))
        d.nesting.push_back({face_ref_from_json(n.at("component_outer")), face_ref_from_json(n.at("in"))});
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail("MalformedInput", e.what());
  }
  return d;
}

std::string serialize(const Diagram& d) {
  json j;
  j["edges"] = json::array();
  for (const auto& e : d.edges) j["edges"].push_back({{"id", e}});
  j["arcs"] = json::array();
  for (const auto& a : d.arcs) j["arcs"].push_back({{"id", a.id}, {"edge", a.edge}});
  j["nodes"] = json::array();
  for (const auto& n : d.nodes) {
    json nj;
    nj["id"] = n.id;
    if (n.is_crossing) {
      nj["type"] = "crossing";
      nj["sign"] = n.sign == Sign::pos ? "pos" : "neg";
      nj["sw"] = n.sw;
      nj["se"] = n.se;
      nj["ne"] = n.ne;
      nj["nw"] = n.nw;
    } else {
      nj["type"] = "vertex";
      nj["in"] = n.in;
      nj["out"] = n.out;
    }
    j["nodes"].push_back(std::move(nj));
  }
  j["free_loops"] = json::array();
  for (const auto& l : d.free_loops)
    j["free_loops"].push_back({{"id", l.id},
                               {"edge", l.edge},
                               {"orientation", l.ccw ? "ccw" : "cw"},
                               {"face", face_ref_to_json(l.face)}});
  j["outer"] = face_ref_to_json(d.outer);
  j["nesting"] = json::array();
  for (const auto& n : d.nesting)
    j["nesting"].push_back(
        {{"component_outer", face_ref_to_json(n.component_outer)}, {"in", face_ref_to_json(n.host)}});
  return j.dump(2);
}

int CombMap::arc_index(const std::string& id) const {
  auto it = arc_idx_.find(id);
  if (it == arc_idx_.end()) fail("DanglingArc", "unknown arc " + id);
  return it->second;
}

int CombMap::node_index(const std::string& id) const {
  auto it = node_idx_.find(id);
  if (it == node_idx_.end()) fail("MalformedInput", "unknown node " + id);
  return it->second;
}

int CombMap::edge_index(const std::string& id) const {
  auto it = edge_idx_.find(id);
  if (it == edge_idx_.end()) fail("UnknownEdge", id);
  return it->second;
}

CombMap::CombMap(const Diagram& d) : d_(&d) {
  for (size_t i = 0; i < d.arcs.size(); ++i) {
    if (arc_idx_.count(d.arcs[i].id)) fail("MalformedInput", "duplicate arc id " + d.arcs[i].id);
    arc_idx_[d.arcs[i].id] = static_cast<int>(i);
  }
  for (size_t i = 0; i < d.nodes.size(); ++i) {
    if (node_idx_.count(d.nodes[i].id)) fail("MalformedInput", "duplicate node id " + d.nodes[i].id);
    node_idx_[d.nodes[i].id] = static_cast<int>(i);
  }
  for (size_t i = 0; i < d.edges.size(); ++i) {
    if (edge_idx_.count(d.edges[i])) fail("MalformedInput", "duplicate edge id " + d.edges[i]);
    edge_idx_[d.edges[i]] = static_cast<int>(i);
  }
  for (const auto& a : d.arcs)
    if (!edge_idx_.count(a.edge)) fail("UnknownEdge", "arc " + a.id + " on unknown edge " + a.edge);
  for (const auto& l : d.free_loops)
    if (!edge_idx_.count(l.edge)) fail("UnknownEdge", "loop " + l.id + " on unknown edge " + l.edge);
  build_rotation();
  build_components();
  build_faces();
  build_strands();
  validate();
}

void CombMap::build_rotation() {
  const int nd = n_darts();
  node_of_.assign(nd, -1);
  next_ccw_.assign(nd, -1);
  prev_ccw_.assign(nd, -1);
  std::vector<int> tail_seen(d_->arcs.size(), 0), head_seen(d_->arcs.size(), 0);

  for (size_t ni = 0; ni < d_->nodes.size(); ++ni) {
    const Node& n = d_->nodes[ni];
    std::vector<int> cyc;  // ccw cyclic dart order around the node
    auto tail_dart = [&](const std::string& arc) {
      int ai = arc_index(arc);
      ++tail_seen[ai];
      return 2 * ai;
    };
    auto head_dart = [&](const std::string& arc) {
      int ai = arc_index(arc);
      ++head_seen[ai];
      return 2 * ai + 1;
    };
    if (n.is_crossing) {
      cyc = {head_dart(n.sw), head_dart(n.se), tail_dart(n.ne), tail_dart(n.nw)};
    } else {
      if (n.in.empty() || n.out.empty())
        fail("SinkOrSourceVertex", "vertex " + n.id + " lacks in or out edges");
      for (auto it = n.out.rbegin(); it != n.out.rend(); ++it) cyc.push_back(tail_dart(*it));
      for (const auto& a : n.in) cyc.push_back(head_dart(a));
    }
    for (size_t i = 0; i < cyc.size(); ++i) {
      int dart = cyc[i];
      if (node_of_[dart] != -1) fail("MalformedInput", "arc slot used twice at node " + n.id);
      node_of_[dart] = static_cast<int>(ni);
      next_ccw_[dart] = cyc[(i + 1) % cyc.size()];
      prev_ccw_[dart] = cyc[(i + cyc.size() - 1) % cyc.size()];
    }
  }
  for (size_t ai = 0; ai < d_->arcs.size(); ++ai) {
    if (tail_seen[ai] != 1 || head_seen[ai] != 1)
      fail("DanglingArc", "arc " + d_->arcs[ai].id + " must occur exactly once as outgoing and once as incoming");
  }
}

void CombMap::build_components() {
  const int nn = static_cast<int>(d_->nodes.size());
  std::vector<int> parent(nn);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (size_t ai = 0; ai < d_->arcs.size(); ++ai) {
    int a = find(node_of_[2 * ai]), b = find(node_of_[2 * ai + 1]);
    if (a != b) parent[a] = b;
  }
  comp_of_node_.assign(nn, -1);
  for (int i = 0; i < nn; ++i) {
    int r = find(i);
    if (comp_of_node_[r] == -1) comp_of_node_[r] = n_node_components_++;
    comp_of_node_[i] = comp_of_node_[r];
  }
}

void CombMap::build_faces() {
  const int nd = n_darts();
  face_of_.assign(nd, -1);
  face_darts_.clear();
  n_faces_ = 0;
  for (int start = 0; start < nd; ++start) {
    if (face_of_[start] != -1) continue;
    std::vector<int> orbit;
    int dart = start;
    do {
      face_of_[dart] = n_faces_;
      orbit.push_back(dart);
      dart = prev_ccw_[alpha(dart)];
    } while (dart != start);
    face_darts_.push_back(std::move(orbit));
    ++n_faces_;
  }

  // Resolve per-component outer faces from outer + nesting declarations.
  comp_outer_face_.assign(n_node_components_, -1);
  auto declare = [&](const FaceRef& ref) {
    if (ref.kind != FaceRef::ArcSide) return;  // loop-side declarations carry no node component
    int ai = arc_index(ref.id);
    int f = ref.left ? face_left_of_arc(ai) : face_right_of_arc(ai);
    int c = component_of_arc(ai);
    if (comp_outer_face_[c] != -1 && comp_outer_face_[c] != f)
      fail("InconsistentOuter", "conflicting outer declarations for one component");
    comp_outer_face_[c] = f;
  };
  declare(d_->outer);
  for (const auto& n : d_->nesting) declare(n.component_outer);
  for (int c = 0; c < n_node_components_; ++c)
    if (comp_outer_face_[c] == -1)
      fail("InconsistentOuter", "component without an outer declaration");
}

void CombMap::build_strands() {
  strands_.assign(d_->edges.size(), {});
  strand_cycle_.assign(d_->edges.size(), false);
  std::vector<char> loop_edge(d_->edges.size(), 0);
  for (const auto& l : d_->free_loops) {
    int e = edge_index(l.edge);
    if (loop_edge[e]) fail("MalformedInput", "edge " + l.edge + " has several free loops");
    loop_edge[e] = 1;
  }

  // Pass-through at crossings: sw continues at ne, se continues at nw.
  std::vector<int> next_arc(d_->arcs.size(), -1);
  for (const Node& n : d_->nodes) {
    if (!n.is_crossing) continue;
    next_arc[arc_index(n.sw)] = arc_index(n.ne);
    next_arc[arc_index(n.se)] = arc_index(n.nw);
  }
  std::vector<char> used(d_->arcs.size(), 0);
  std::vector<int> chains(d_->edges.size(), 0);
  auto follow = [&](int start, int edge) {
    if (++chains[edge] > 1)
      fail("MalformedInput", "arcs of edge " + d_->edges[edge] + " do not form a single path");
    int a = start;
    while (true) {
      if (used[a]) fail("MalformedInput", "edge " + d_->edges[edge] + " has inconsistent strand");
      used[a] = 1;
      if (this->d_->arcs[a].edge != this->d_->edges[edge])
        fail("MalformedInput", "strand of edge " + d_->edges[edge] + " runs through arc " +
                                   d_->arcs[a].id + " of a different edge");
      strands_[edge].push_back(a);
      int nx = next_arc[a];
      if (nx == -1 || nx == start) {
        strand_cycle_[edge] = nx == start;
        break;
      }
      a = nx;
    }
  };
  // Strands starting at vertices.
  for (const Node& n : d_->nodes) {
    if (n.is_crossing) continue;
    for (const auto& arc : n.out) {
      int ai = arc_index(arc);
      follow(ai, edge_index(d_->arcs[ai].edge));
    }
  }
  // Remaining strands are closed cycles through crossings.
  for (size_t ai = 0; ai < d_->arcs.size(); ++ai)
    if (!used[ai]) follow(static_cast<int>(ai), edge_index(d_->arcs[ai].edge));

  for (size_t e = 0; e < d_->edges.size(); ++e) {
    size_t arc_count = 0;
    for (const auto& a : d_->arcs)
      if (a.edge == d_->edges[e]) ++arc_count;
    if (loop_edge[e]) {
      if (arc_count > 0) fail("MalformedInput", "edge " + d_->edges[e] + " is both loop and arcs");
    } else if (arc_count == 0) {
      fail("MalformedInput", "edge " + d_->edges[e] + " has no arcs");
    } else if (strands_[e].size() != arc_count) {
      fail("MalformedInput", "arcs of edge " + d_->edges[e] + " do not form a single path");
    }
  }
}

void CombMap::validate() {
  // Euler formula per node component: faces = darts/2 - nodes + 2.
  for (int c = 0; c < n_node_components_; ++c) {
    std::set<int> comp_faces;
    int darts = 0, nodes = 0;
    for (size_t ni = 0; ni < d_->nodes.size(); ++ni)
      if (comp_of_node_[ni] == c) ++nodes;
    for (int dart = 0; dart < n_darts(); ++dart)
      if (comp_of_node_[node_of_[dart]] == c) {
        ++darts;
        comp_faces.insert(face_of_[dart]);
      }
    if (static_cast<int>(comp_faces.size()) != darts / 2 - nodes + 2)
      fail("NonPlanarMap", "Euler check failed for a component");
  }
}

RegionTable faces(const CombMap& m) {
  const Diagram& d = m.diagram();
  RegionTable t;
  // Slots: [0..n_faces) face orbits, then loop insides, then the global
  // unbounded slot.  Union-find merges component outer faces into hosts.
  const int nf = m.n_faces();
  const int nl = static_cast<int>(d.free_loops.size());
  const int global_slot = nf + nl;
  std::vector<int> parent(nf + nl + 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  std::map<std::string, int> loop_idx;
  for (int i = 0; i < nl; ++i) loop_idx[d.free_loops[i].id] = i;

  std::function<int(const FaceRef&)> slot_of = [&](const FaceRef& ref) -> int {
    switch (ref.kind) {
      case FaceRef::Unbounded:
        return global_slot;
      case FaceRef::ArcSide: {
        int ai = m.arc_index(ref.id);
        return ref.left ? m.face_left_of_arc(ai) : m.face_right_of_arc(ai);
      }
      case FaceRef::LoopSide: {
        auto it = loop_idx.find(ref.id);
        if (it == loop_idx.end()) fail("MalformedInput", "unknown loop " + ref.id);
        const FreeLoop& l = d.free_loops[it->second];
        bool inside = l.ccw == ref.left;  // ccw travel keeps the interior on the left
        if (inside) return nf + it->second;
        return slot_of(l.face);
      }
    }
    return global_slot;
  };

  unite(slot_of(d.outer), global_slot);
  for (int c = 0; c < m.n_node_components(); ++c)
    if (m.component_outer_face(c) >= 0 && find(m.component_outer_face(c)) != find(global_slot)) {
      // Host resolution: nesting entries override; default host is unbounded.
      bool declared = false;
      for (const auto& n : d.nesting) {
        if (n.component_outer.kind != FaceRef::ArcSide) continue;
        int ai = m.arc_index(n.component_outer.id);
        if (m.component_of_arc(ai) != c) continue;
        unite(m.component_outer_face(c), slot_of(n.host));
        declared = true;
      }
      if (!declared) unite(m.component_outer_face(c), global_slot);
    }

  t.region_of_face.assign(nf, -1);
  t.loop_inside.assign(nl, -1);
  t.loop_outside.assign(nl, -1);
  std::map<int, int> region_of_class;
  auto region_for = [&](int slot) {
    int r = find(slot);
    auto it = region_of_class.find(r);
    if (it != region_of_class.end()) return it->second;
    int idx = static_cast<int>(t.regions.size());
    region_of_class[r] = idx;
    t.regions.push_back({"r" + std::to_string(idx), false});
    return idx;
  };
  t.unbounded = region_for(global_slot);
  for (int f = 0; f < nf; ++f) t.region_of_face[f] = region_for(f);
  for (int l = 0; l < nl; ++l) {
    t.loop_inside[l] = region_for(nf + l);
    t.loop_outside[l] = region_for(find(slot_of(d.free_loops[l].face)));
  }
  t.n_regular = static_cast<int>(t.regions.size());
  for (const Node& n : d.nodes) {
    if (n.is_crossing) continue;
    int idx = static_cast<int>(t.regions.size());
    t.regions.push_back({"circle:" + n.id, true});
    t.circle_of_vertex[n.id] = idx;
    ++t.n_circle;
  }
  return t;
}

std::string corner_name(Corner c) {
  switch (c) {
    case Corner::N: return "N";
    case Corner::S: return "S";
    case Corner::E: return "E";
    case Corner::W: return "W";
  }
  return "?";
}

DecoratedDiagram decorate(const CombMap& m, const RegionTable& table, const BasePoint& base) {
  const Diagram& d = m.diagram();
  DecoratedDiagram dd;
  dd.diagram = &d;
  dd.map = &m;
  dd.regions = table;
  dd.base = base;

  if (base.on_loop) {
    int li = -1;
    for (size_t i = 0; i < d.free_loops.size(); ++i)
      if (d.free_loops[i].id == base.id) li = static_cast<int>(i);
    if (li < 0) fail("MalformedInput", "unknown base loop " + base.id);
    const FreeLoop& l = d.free_loops[li];
    dd.base_edge = l.edge;
    dd.marked_left = l.ccw ? table.loop_inside[li] : table.loop_outside[li];
    dd.marked_right = l.ccw ? table.loop_outside[li] : table.loop_inside[li];
  } else {
    int ai = m.arc_index(base.id);
    dd.base_edge = d.arcs[ai].edge;
    dd.marked_left = table.left_of_arc(m, ai);
    dd.marked_right = table.right_of_arc(m, ai);
  }
  if (dd.marked_left == dd.marked_right)
    fail("MarkedRegionsCoincide", "base arc has the same region on both sides");

  auto region_at_dart = [&](int dart) { return table.region_of_face[m.face_of(dart)]; };
  for (size_t ni = 0; ni < d.nodes.size(); ++ni) {
    const Node& n = d.nodes[ni];
    if (!n.is_crossing) continue;
    CrossingRef c;
    c.id = n.id;
    c.node = static_cast<int>(ni);
    int sw = 2 * m.arc_index(n.sw) + 1, se = 2 * m.arc_index(n.se) + 1;
    int ne = 2 * m.arc_index(n.ne), nw = 2 * m.arc_index(n.nw);
    c.corners = {{Corner::N, region_at_dart(ne)},
                 {Corner::S, region_at_dart(sw)},
                 {Corner::E, region_at_dart(se)},
                 {Corner::W, region_at_dart(nw)}};
    dd.crossings.push_back(std::move(c));
  }
  for (const Node& n : d.nodes) {
    if (n.is_crossing) continue;
    for (const auto& arc : n.in) {
      int ai = m.arc_index(arc);
      CrossingRef c;
      c.is_circle = true;
      c.id = n.id + "/" + arc;
      c.in_arc = ai;
      c.vertex_id = n.id;
      c.corners = {{Corner::N, table.circle_of_vertex.at(n.id)},
                   {Corner::W, table.region_of_face[m.face_left_of_arc(ai)]},
                   {Corner::E, table.region_of_face[m.face_right_of_arc(ai)]}};
      dd.crossings.push_back(std::move(c));
    }
  }

  if (m.connected()) {
    if (dd.regions.regions.size() != dd.crossings.size() + 2)
      fail("NonPlanarMap", "|Re(D)| != |Cr(D)| + 2 on a connected diagram");
  }
  return dd;
}

Components connected_components(const CombMap& m) {
  const Diagram& d = m.diagram();
  Components c;
  for (size_t i = 0; i < d.nodes.size(); ++i)
    c.of_node[d.nodes[i].id] = m.component_of_node(static_cast<int>(i));
  for (size_t i = 0; i < d.arcs.size(); ++i)
    c.of_arc[d.arcs[i].id] = m.component_of_arc(static_cast<int>(i));
  for (size_t i = 0; i < d.free_loops.size(); ++i)
    c.of_loop[d.free_loops[i].id] = m.n_node_components() + static_cast<int>(i);
  c.count = m.n_components();
  return c;
}

const HalfMonomial& EdgeColoring::of(const std::string& edge) const {
  auto it = color.find(edge);
  if (it == color.end()) fail("UnknownEdge", edge);
  return it->second;
}

LatticePtr universal_lattice(const Diagram& d, const std::vector<std::string>& preferred_basis) {
  std::map<std::string, std::string> edge_of_arc;
  for (const auto& a : d.arcs) edge_of_arc[a.id] = a.edge;
  std::vector<EdgeIncidence> inc;
  for (const Node& n : d.nodes) {
    if (n.is_crossing) continue;
    EdgeIncidence e;
    e.vertex_id = n.id;
    for (const auto& a : n.in) e.in_edges.push_back(edge_of_arc.at(a));
    for (const auto& a : n.out) e.out_edges.push_back(edge_of_arc.at(a));
    inc.push_back(std::move(e));
  }
  return MeridianLattice::build(d.edges, inc, preferred_basis);
}

EdgeColoring universal_coloring(const Diagram& d, const std::vector<std::string>& preferred_basis) {
  EdgeColoring c;
  c.lat = universal_lattice(d, preferred_basis);
  for (const auto& e : d.edges) c.color[e] = c.lat->meridian(e);
  return c;
}

}  // namespace salex
