#include "spatialalex/moves.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "spatialalex/errors.hpp"

namespace salex {

using nlohmann::json;

std::string kind_name(MoveKind k) {
  switch (k) {
    case MoveKind::R1p: return "R1+";
    case MoveKind::R1m: return "R1-";
    case MoveKind::R1prime: return "R1'";
    case MoveKind::R2: return "R2";
    case MoveKind::R3: return "R3";
    case MoveKind::R4over: return "R4over";
    case MoveKind::R4under: return "R4under";
    case MoveKind::R5cw: return "R5cw";
    case MoveKind::R5ccw: return "R5ccw";
  }
  return "?";
}

MoveKind kind_from_name(const std::string& s) {
  for (MoveKind k : {MoveKind::R1p, MoveKind::R1m, MoveKind::R1prime, MoveKind::R2, MoveKind::R3,
                     MoveKind::R4over, MoveKind::R4under, MoveKind::R5cw, MoveKind::R5ccw})
    if (kind_name(k) == s) return k;
  fail("MalformedInput", "unknown move kind " + s);
}

json site_to_json(const MoveSite& s) {
  return json{{"kind", kind_name(s.kind)},
              {"direction", s.dir == MoveDir::Insert ? "insert" : "remove"},
              {"anchor", s.anchor}};
}

MoveSite site_from_json(const json& j) {
  MoveSite s;
  s.kind = kind_from_name(j.at("kind").get<std::string>());
  std::string d = j.at("direction").get<std::string>();
  if (d != "insert" && d != "remove") fail("MalformedInput", "direction must be insert or remove");
  s.dir = d == "insert" ? MoveDir::Insert : MoveDir::Remove;
  s.anchor = j.value("anchor", json::object());
  return s;
}

namespace {

// Mutable working copy with slot-level surgery helpers.
struct Builder {
  Diagram d;
  int fresh_counter = 0;

  explicit Builder(const Diagram& src) : d(src) {
    for (const auto& a : d.arcs) bump(a.id);
    for (const auto& n : d.nodes) bump(n.id);
    for (const auto& l : d.free_loops) bump(l.id);
  }
  void bump(const std::string& id) {
    auto p = id.find('$');
    if (p == std::string::npos) return;
    fresh_counter = std::max(fresh_counter, std::atoi(id.c_str() + p + 1));
  }
  std::string fresh(const std::string& stem) { return stem + "$" + std::to_string(++fresh_counter); }

  Arc& arc(const std::string& id) {
    for (auto& a : d.arcs)
      if (a.id == id) return a;
    fail("DanglingArc", id);
  }
  Node& node(const std::string& id) {
    for (auto& n : d.nodes)
      if (n.id == id) return n;
    fail("PatternNotFound", "no node " + id);
  }

  // Where an arc ends (vertex in-list or crossing sw/se) and starts.
  std::string* head_slot(const std::string& id) {
    for (auto& n : d.nodes) {
      if (n.is_crossing) {
        if (n.sw == id) return &n.sw;
        if (n.se == id) return &n.se;
      } else {
        for (auto& a : n.in)
          if (a == id) return &a;
      }
    }
    fail("DanglingArc", "no head slot for " + id);
  }
  std::string* tail_slot(const std::string& id) {
    for (auto& n : d.nodes) {
      if (n.is_crossing) {
        if (n.ne == id) return &n.ne;
        if (n.nw == id) return &n.nw;
      } else {
        for (auto& a : n.out)
          if (a == id) return &a;
      }
    }
    fail("DanglingArc", "no tail slot for " + id);
  }

  void erase_arc(const std::string& id) {
    d.arcs.erase(std::remove_if(d.arcs.begin(), d.arcs.end(),
                                [&](const Arc& a) { return a.id == id; }),
                 d.arcs.end());
  }
  void erase_node(const std::string& id) {
    d.nodes.erase(std::remove_if(d.nodes.begin(), d.nodes.end(),
                                 [&](const Node& n) { return n.id == id; }),
                  d.nodes.end());
  }
  void erase_loop(const std::string& id) {
    d.free_loops.erase(std::remove_if(d.free_loops.begin(), d.free_loops.end(),
                                      [&](const FreeLoop& l) { return l.id == id; }),
                       d.free_loops.end());
  }

  void for_each_ref(const std::function<void(FaceRef&)>& fn) {
    fn(d.outer);
    for (auto& n : d.nesting) {
      fn(n.component_outer);
      fn(n.host);
    }
    for (auto& l : d.free_loops) fn(l.face);
  }
  // Redirect references from one arc to another, keeping the side.
  void redirect_arc_refs(const std::string& from, const std::string& to) {
    for_each_ref([&](FaceRef& r) {
      if (r.kind == FaceRef::ArcSide && r.id == from) r.id = to;
    });
  }
  void redirect_arc_refs(const std::string& from, const std::string& to, bool force_left) {
    for_each_ref([&](FaceRef& r) {
      if (r.kind == FaceRef::ArcSide && r.id == from) {
        r.id = to;
        r.left = force_left;
      }
    });
  }
  void redirect_loop_refs(const std::string& loop, const std::string& arc) {
    for_each_ref([&](FaceRef& r) {
      if (r.kind == FaceRef::LoopSide && r.id == loop) {
        r.kind = FaceRef::ArcSide;
        r.id = arc;
      }
    });
  }
  void arc_refs_to_loop(const std::string& arc, const std::string& loop) {
    for_each_ref([&](FaceRef& r) {
      if (r.kind == FaceRef::ArcSide && r.id == arc) {
        r.kind = FaceRef::LoopSide;
        r.id = loop;
      }
    });
  }

  Diagram finish() {
    CombMap m(d);  // validates
    return d;
  }
};

Node make_crossing(const std::string& id, const std::string& a_in, const std::string& a_out,
                   const std::string& b_in, const std::string& b_out, bool a_slash, bool over_a) {
  Node x;
  x.id = id;
  x.is_crossing = true;
  if (a_slash) {
    x.sw = a_in;
    x.ne = a_out;
    x.se = b_in;
    x.nw = b_out;
    x.sign = over_a ? Sign::pos : Sign::neg;
  } else {
    x.sw = b_in;
    x.ne = b_out;
    x.se = a_in;
    x.nw = a_out;
    x.sign = over_a ? Sign::neg : Sign::pos;
  }
  return x;
}

bool face_is_component_outer(const CombMap& m, int face) {
  for (int c = 0; c < m.n_node_components(); ++c)
    if (m.component_outer_face(c) == face) return true;
  return false;
}

// True when no free loop or nested component is declared inside the region
// of this face (the move needs an empty disk).
bool face_hosts_content(const CombMap& m, const RegionTable& table, int face) {
  int region = table.region_of_face[face];
  const Diagram& d = m.diagram();
  std::function<int(const FaceRef&)> region_of_ref = [&](const FaceRef& r) -> int {
    switch (r.kind) {
      case FaceRef::Unbounded:
        return table.unbounded;
      case FaceRef::ArcSide: {
        int ai = m.arc_index(r.id);
        return r.left ? table.left_of_arc(m, ai) : table.right_of_arc(m, ai);
      }
      case FaceRef::LoopSide:
        for (size_t i = 0; i < d.free_loops.size(); ++i)
          if (d.free_loops[i].id == r.id)
            return d.free_loops[i].ccw == r.left ? table.loop_inside[i] : table.loop_outside[i];
        fail("MalformedInput", "unknown loop " + r.id);
    }
    return table.unbounded;
  };
  for (const auto& l : d.free_loops)
    if (region_of_ref(l.face) == region) return true;
  for (const auto& n : d.nesting)
    if (region_of_ref(n.host) == region) return true;
  return false;
}

// ---------------------------------------------------------------- R1 kinks

Diagram r1_insert(const Diagram& d, const json& anchor, bool positive) {
  Builder b(d);
  const bool left = anchor.at("loop_side").get<std::string>() == "left";
  std::string x_id = b.fresh("x");
  std::string lp = b.fresh("a");

  if (anchor.contains("loop")) {
    std::string loop_id = anchor.at("loop").get<std::string>();
    FreeLoop loop;
    bool found = false;
    for (const auto& l : b.d.free_loops)
      if (l.id == loop_id) {
        loop = l;
        found = true;
      }
    if (!found) fail("PatternNotFound", "no free loop " + loop_id);
    std::string big = b.fresh("a");
    b.d.arcs.push_back({big, loop.edge});
    b.d.arcs.push_back({lp, loop.edge});
    // left: loop runs nw->sw, big circle re-enters at se; right mirrored.
    Node x = left ? make_crossing(x_id, lp, big, big, lp, true, positive)
                  : make_crossing(x_id, big, lp, lp, big, true, positive);
    b.d.nodes.push_back(x);
    b.erase_loop(loop_id);
    b.redirect_loop_refs(loop_id, big);
    FaceRef comp_outer{FaceRef::ArcSide, big, !loop.ccw};  // ccw keeps outside on the right
    bool outer_here = b.d.outer.kind == FaceRef::ArcSide && b.d.outer.id == big;
    if (!outer_here) b.d.nesting.push_back({comp_outer, loop.face});
    return b.finish();
  }

  std::string a = anchor.at("arc").get<std::string>();
  std::string edge = b.arc(a).edge;
  std::string a2 = b.fresh("a");
  std::string* head = b.head_slot(a);
  *head = a2;
  b.d.arcs.push_back({a2, edge});
  b.d.arcs.push_back({lp, edge});
  // left: strand enters se, loop runs nw->sw, exit ne.
  Node x = left ? make_crossing(x_id, lp, a2, a, lp, true, positive)
                : make_crossing(x_id, a, lp, lp, a2, true, positive);
  b.d.nodes.push_back(x);
  return b.finish();
}

struct KinkPattern {
  std::string crossing;
  bool left = false;       // loop side
  std::string loop_arc, in_arc, out_arc;
  Sign sign = Sign::pos;
  std::string edge;
};

std::optional<KinkPattern> match_kink(const CombMap& m, const RegionTable& table, const Node& n) {
  if (!n.is_crossing) return std::nullopt;
  KinkPattern p;
  p.crossing = n.id;
  p.sign = n.sign;
  if (n.nw == n.sw) {
    p.left = true;
    p.loop_arc = n.nw;
    p.in_arc = n.se;
    p.out_arc = n.ne;
  } else if (n.ne == n.se) {
    p.left = false;
    p.loop_arc = n.ne;
    p.in_arc = n.sw;
    p.out_arc = n.nw;
  } else {
    return std::nullopt;
  }
  p.edge = m.diagram().arcs[m.arc_index(p.loop_arc)].edge;
  // The kink disk must be an empty bounded face.
  int disk = p.left ? m.face_left_of_arc(m.arc_index(p.loop_arc))
                    : m.face_right_of_arc(m.arc_index(p.loop_arc));
  if (face_is_component_outer(m, disk)) return std::nullopt;
  if (face_hosts_content(m, table, disk)) return std::nullopt;
  return p;
}

Diagram r1_remove(const Diagram& d, const std::string& crossing, std::optional<Sign> want_sign) {
  CombMap m(d);
  RegionTable table = faces(m);
  Builder b(d);
  Node& n = b.node(crossing);
  auto p = match_kink(m, table, n);
  if (!p) fail("PatternNotFound", "no kink at " + crossing);
  if (want_sign && *want_sign != p->sign) fail("PatternNotFound", "kink sign mismatch");

  if (p->in_arc == p->out_arc) {
    // The strand closes up into a free loop.
    int comp = m.component_of_node(m.node_index(crossing));
    int big = m.arc_index(p->in_arc);
    bool ccw = m.component_outer_face(comp) == m.face_right_of_arc(big);
    std::string loop_id = b.fresh("l");
    FaceRef host{FaceRef::Unbounded, "", true};
    bool was_outer_comp =
        d.outer.kind == FaceRef::ArcSide &&
        m.component_of_arc(m.arc_index(d.outer.id)) == comp;
    if (!was_outer_comp) {
      for (size_t i = 0; i < b.d.nesting.size(); ++i) {
        const auto& entry = b.d.nesting[i];
        if (entry.component_outer.kind == FaceRef::ArcSide &&
            m.component_of_arc(m.arc_index(entry.component_outer.id)) == comp) {
          host = entry.host;
          b.d.nesting.erase(b.d.nesting.begin() + i);
          break;
        }
      }
    }
    b.redirect_arc_refs(p->loop_arc, p->in_arc, p->left);
    b.arc_refs_to_loop(p->in_arc, loop_id);
    b.erase_node(crossing);
    b.erase_arc(p->loop_arc);
    std::string edge = p->edge;
    b.erase_arc(p->in_arc);
    b.d.free_loops.push_back({loop_id, edge, ccw, host});
    if (was_outer_comp && b.d.outer.kind == FaceRef::LoopSide && b.d.outer.id == loop_id) {
      // Side already carried over; outside of the loop must face the ref.
      b.d.outer.left = !ccw;
    }
    return b.finish();
  }

  std::string* head = b.head_slot(p->out_arc);
  *head = p->in_arc;
  b.erase_node(crossing);
  b.redirect_arc_refs(p->loop_arc, p->in_arc, p->left);
  b.redirect_arc_refs(p->out_arc, p->in_arc);
  b.erase_arc(p->loop_arc);
  b.erase_arc(p->out_arc);
  return b.finish();
}

// ---------------------------------------------------------------- R2

Diagram r2_insert(const Diagram& d, const json& anchor) {
  CombMap m(d);
  std::string fa = anchor.at("from_arc").get<std::string>();
  std::string ta = anchor.at("to_arc").get<std::string>();
  bool ra = anchor.at("from_dir").get<std::string>() == "rev";
  bool rb = anchor.at("to_dir").get<std::string>() == "rev";
  bool over = anchor.at("finger").get<std::string>() == "over";
  if (fa == ta) fail("PatternNotFound", "R2 needs two distinct arcs");
  int dart_f = 2 * m.arc_index(fa) + (ra ? 1 : 0);
  int dart_t = 2 * m.arc_index(ta) + (rb ? 1 : 0);
  if (m.face_of(dart_f) != m.face_of(dart_t))
    fail("PatternNotFound", "arcs do not bound a common face on those sides");

  Builder b(d);
  std::string ea = b.arc(fa).edge, eb = b.arc(ta).edge;
  std::string p2 = b.fresh("a"), p3 = b.fresh("a"), q2 = b.fresh("a"), q3 = b.fresh("a");
  std::string x1 = b.fresh("x"), x2 = b.fresh("x");
  *b.head_slot(fa) = p3;
  *b.head_slot(ta) = q3;
  b.d.arcs.push_back({p2, ea});
  b.d.arcs.push_back({p3, ea});
  b.d.arcs.push_back({q2, eb});
  b.d.arcs.push_back({q3, eb});
  // Piece bookkeeping, actual order along each strand: fa -> p2 -> p3.
  std::string a_in_x1 = ra ? p2 : fa, a_out_x1 = ra ? p3 : p2;
  std::string a_in_x2 = ra ? fa : p2, a_out_x2 = ra ? p2 : p3;
  std::string b_in_x1 = rb ? q2 : ta, b_out_x1 = rb ? q3 : q2;
  std::string b_in_x2 = rb ? ta : q2, b_out_x2 = rb ? q2 : q3;
  b.d.nodes.push_back(make_crossing(x1, a_in_x1, a_out_x1, b_in_x1, b_out_x1, !(ra ^ rb), over));
  b.d.nodes.push_back(make_crossing(x2, a_in_x2, a_out_x2, b_in_x2, b_out_x2, (ra ^ rb), over));
  return b.finish();
}

struct Passage {
  std::string in, out;
  bool slash = false;
};

// The two strand passages of a crossing.
std::pair<Passage, Passage> passages(const Node& n) {
  return {Passage{n.sw, n.ne, true}, Passage{n.se, n.nw, false}};
}

bool passage_over(const Node& n, const Passage& p) {
  return (n.sign == Sign::pos) == p.slash;
}

struct BigonPattern {
  std::string x1, x2;
  std::string mid_a, mid_b;  // bigon sides, mid_a on strand A
  Passage a1, a2, b1, b2;    // strand passages at x1 and x2
  int face = -1;
};

std::optional<BigonPattern> match_bigon(const CombMap& m, const RegionTable& table,
                                        const std::string& x1, const std::string& x2) {
  const Diagram& d = m.diagram();
  const Node& n1 = d.nodes[m.node_index(x1)];
  const Node& n2 = d.nodes[m.node_index(x2)];
  if (!n1.is_crossing || !n2.is_crossing || x1 == x2) return std::nullopt;
  for (int f = 0; f < m.n_faces(); ++f) {
    const auto& darts = m.face_darts(f);
    if (darts.size() != 2) continue;
    int arc0 = darts[0] / 2, arc1 = darts[1] / 2;
    if (arc0 == arc1) continue;
    std::set<int> nodes{m.node_of(darts[0]), m.node_of(darts[1]), m.node_of(m.alpha(darts[0])),
                        m.node_of(m.alpha(darts[1]))};
    if (nodes != std::set<int>{m.node_index(x1), m.node_index(x2)}) continue;
    if (face_is_component_outer(m, f) || face_hosts_content(m, table, f)) continue;

    BigonPattern p;
    p.face = f;
    auto [p1a, p1b] = passages(n1);
    auto [p2a, p2b] = passages(n2);
    const std::string u = d.arcs[arc0].id, v = d.arcs[arc1].id;
    auto contains = [](const Passage& pp, const std::string& a) { return pp.in == a || pp.out == a; };
    // Strand A carries u, strand B carries v, at both crossings.
    Passage a1 = contains(p1a, u) ? p1a : p1b;
    Passage b1 = contains(p1a, u) ? p1b : p1a;
    Passage a2 = contains(p2a, u) ? p2a : p2b;
    Passage b2 = contains(p2a, u) ? p2b : p2a;
    if (!contains(a1, u) || !contains(a2, u) || !contains(b1, v) || !contains(b2, v)) continue;
    if (passage_over(n1, a1) != passage_over(n2, a2)) continue;  // strand must stay over or under
    if (n1.sign == n2.sign) continue;
    p.x1 = x1;
    p.x2 = x2;
    p.mid_a = u;
    p.mid_b = v;
    p.a1 = a1;
    p.a2 = a2;
    p.b1 = b1;
    p.b2 = b2;
    return p;
  }
  return std::nullopt;
}

Diagram r2_remove(const Diagram& d, const std::string& x1, const std::string& x2) {
  CombMap m(d);
  RegionTable table = faces(m);
  auto p = match_bigon(m, table, x1, x2);
  if (!p) fail("PatternNotFound", "no removable bigon between " + x1 + " and " + x2);
  Builder b(d);

  // Which side of each bigon arc faces the bigon, before surgery.
  auto bigon_on_left = [&](const std::string& arc) {
    return m.face_left_of_arc(m.arc_index(arc)) == p->face;
  };
  bool bigon_left_a = bigon_on_left(p->mid_a);
  bool bigon_left_b = bigon_on_left(p->mid_b);

  // The two strands may share outer pieces (a strand crossing itself);
  // renames from the first mend must be visible to the second.
  std::map<std::string, std::string> renamed;
  std::function<std::string(std::string)> resolve = [&](std::string id) {
    while (renamed.count(id)) id = renamed[id];
    return id;
  };

  struct Mend {
    bool freed = false;
    std::string kept;  // surviving arc of the strand
  };
  auto mend_strand = [&](const std::string& mid, const Passage& at1, const Passage& at2) -> Mend {
    bool mid_out_of_1 = at1.out == mid;
    const Passage& from = mid_out_of_1 ? at1 : at2;  // mid leaves this crossing
    const Passage& into = mid_out_of_1 ? at2 : at1;
    std::string w_in = resolve(from.in);
    std::string w_out = resolve(into.out);
    if (w_in == w_out) return {true, w_in};  // strand closes into a loop
    *b.head_slot(w_out) = w_in;
    b.redirect_arc_refs(mid, w_in);
    b.redirect_arc_refs(w_out, w_in);
    renamed[mid] = w_in;
    renamed[w_out] = w_in;
    b.erase_arc(mid);
    b.erase_arc(w_out);
    return {false, w_in};
  };

  Mend ma = mend_strand(p->mid_a, p->a1, p->a2);
  Mend mb = mend_strand(p->mid_b, p->b1, p->b2);
  b.erase_node(x1);
  b.erase_node(x2);
  if (ma.freed && mb.freed) fail("PatternNotFound", "removal would free both strands");

  auto free_strand = [&](const std::string& mid, const std::string& outer, bool bigon_left,
                         const std::string& other_kept, bool other_bigon_left) {
    // The rest of the diagram sits on the bigon side, so that side is the
    // loop's outside.
    bool ccw = !bigon_left;
    std::string loop_id = b.fresh("l");
    std::string edge = b.arc(mid).edge;
    b.redirect_arc_refs(mid, outer);
    b.arc_refs_to_loop(outer, loop_id);
    b.erase_arc(mid);
    b.erase_arc(outer);
    FaceRef host{FaceRef::ArcSide, resolve(other_kept), other_bigon_left};
    b.d.free_loops.push_back({loop_id, edge, ccw, host});
  };
  if (ma.freed) free_strand(p->mid_a, ma.kept, bigon_left_a, mb.kept, bigon_left_b);
  if (mb.freed) free_strand(p->mid_b, mb.kept, bigon_left_b, ma.kept, bigon_left_a);
  return b.finish();
}

// ---------------------------------------------------------------- R3

struct TrianglePattern {
  // Crossings and side arcs of the triangle; side[i] joins x[i] and x[(i+1)%3].
  std::string x[3];
  std::string side[3];
  int face = -1;
};

std::optional<TrianglePattern> match_triangle(const CombMap& m, const RegionTable& table, int face) {
  const auto& darts = m.face_darts(face);
  if (darts.size() != 3) return std::nullopt;
  if (face_is_component_outer(m, face) || face_hosts_content(m, table, face)) return std::nullopt;
  const Diagram& d = m.diagram();
  std::set<int> arcset, nodeset;
  for (int dt : darts) {
    arcset.insert(dt / 2);
    nodeset.insert(m.node_of(dt));
    nodeset.insert(m.node_of(m.alpha(dt)));
    if (!d.nodes[m.node_of(dt)].is_crossing) return std::nullopt;
    if (!d.nodes[m.node_of(m.alpha(dt))].is_crossing) return std::nullopt;
  }
  if (arcset.size() != 3 || nodeset.size() != 3) return std::nullopt;
  TrianglePattern t;
  t.face = face;
  std::vector<int> arcs(arcset.begin(), arcset.end());
  std::vector<int> nodes(nodeset.begin(), nodeset.end());
  // Order: x[i] named so side[i] joins x[i], x[i+1].
  auto ends = [&](int arc) {
    return std::pair<int, int>{m.node_of(2 * arc), m.node_of(2 * arc + 1)};
  };
  t.x[0] = d.nodes[nodes[0]].id;
  int a01 = -1;
  for (int a : arcs) {
    auto [u, v] = ends(a);
    if (u != nodes[0] && v != nodes[0]) {
      t.side[1] = d.arcs[a].id;  // joins x1,x2 (opposite x0)
    }
  }
  std::vector<int> others;
  for (int n : nodes)
    if (n != nodes[0]) others.push_back(n);
  t.x[1] = d.nodes[others[0]].id;
  t.x[2] = d.nodes[others[1]].id;
  for (int a : arcs) {
    auto [u, v] = ends(a);
    std::set<int> e{u, v};
    if (e == std::set<int>{nodes[0], others[0]}) t.side[0] = d.arcs[a].id;
    if (e == std::set<int>{others[0], others[1]}) t.side[1] = d.arcs[a].id;
    if (e == std::set<int>{others[1], nodes[0]}) t.side[2] = d.arcs[a].id;
  }
  if (t.side[0].empty() || t.side[1].empty() || t.side[2].empty()) return std::nullopt;
  return t;
}

Diagram r3_apply(const Diagram& d, const json& anchor) {
  CombMap m(d);
  RegionTable table = faces(m);
  std::string ref_arc = anchor.at("arc").get<std::string>();
  bool ref_left = anchor.at("side").get<std::string>() == "left";
  std::string slide = anchor.at("slide").get<std::string>();
  int face = ref_left ? m.face_left_of_arc(m.arc_index(ref_arc))
                      : m.face_right_of_arc(m.arc_index(ref_arc));
  auto t = match_triangle(m, table, face);
  if (!t) fail("PatternNotFound", "no triangle at that face");

  // Permute so side a = the sliding strand's side, X0 = opposite crossing.
  int si = -1;
  for (int i = 0; i < 3; ++i)
    if (t->side[i] == slide) si = i;
  if (si < 0) fail("PatternNotFound", "slide arc is not a side of the triangle");
  std::string a = t->side[si];
  std::string bP = t->side[(si + 2) % 3];  // side at P not on strand A
  std::string cQ = t->side[(si + 1) % 3];
  std::string P, Q, X0;
  {
    // a runs from its tail crossing (P) to its head crossing (Q).
    Builder probe(d);
    int ai = m.arc_index(a);
    P = d.nodes[m.node_of(2 * ai)].id;
    Q = d.nodes[m.node_of(2 * ai + 1)].id;
    for (const auto& x : t->x)
      if (x != P && x != Q) X0 = x;
  }
  // bP must touch P; cQ must touch Q (swap if needed).
  auto touches = [&](const std::string& arc, const std::string& node) {
    int ai = m.arc_index(arc);
    return d.nodes[m.node_of(2 * ai)].id == node || d.nodes[m.node_of(2 * ai + 1)].id == node;
  };
  if (!touches(bP, P)) std::swap(bP, cQ);
  if (!touches(bP, P) || !touches(cQ, Q)) fail("PatternNotFound", "triangle sides inconsistent");

  struct StrandInfo {
    std::string mid, u, w;    // u -> first -> mid -> second -> w
    std::string first, second;
    bool slash_first = false, slash_second = false;
    bool over = false;
  };
  auto strand_of = [&](const std::string& mid) {
    StrandInfo s;
    s.mid = mid;
    int ai = m.arc_index(mid);
    s.first = d.nodes[m.node_of(2 * ai)].id;
    s.second = d.nodes[m.node_of(2 * ai + 1)].id;
    const Node& nf = d.nodes[m.node_index(s.first)];
    const Node& ns = d.nodes[m.node_index(s.second)];
    // mid leaves `first` (out slot) and enters `second` (in slot).
    if (nf.ne == mid) {
      s.slash_first = true;
      s.u = nf.sw;
    } else if (nf.nw == mid) {
      s.slash_first = false;
      s.u = nf.se;
    } else {
      fail("PatternNotFound", "triangle side misplaced");
    }
    if (ns.sw == mid) {
      s.slash_second = true;
      s.w = ns.ne;
    } else if (ns.se == mid) {
      s.slash_second = false;
      s.w = ns.nw;
    } else {
      fail("PatternNotFound", "triangle side misplaced");
    }
    s.over = passage_over(nf, Passage{s.u, mid, s.slash_first});
    if (s.over != passage_over(ns, Passage{mid, s.w, s.slash_second}))
      fail("PatternNotFound", "strand changes level inside the triangle");
    return s;
  };
  StrandInfo A = strand_of(a), B = strand_of(bP), C = strand_of(cQ);
  // Slide validity: A entirely over or entirely under the other two.
  // (already enforced per strand by strand_of; A's flag vs B/C at shared
  // crossings is what the classical condition demands)
  auto over_at = [&](const StrandInfo& s, const std::string& x) {
    const Node& n = d.nodes[m.node_index(x)];
    bool slash = (x == s.first) ? s.slash_first : s.slash_second;
    return (n.sign == Sign::pos) == slash;
  };
  if (over_at(A, P) != over_at(A, Q))
    fail("PatternNotFound", "sliding strand is not uniformly over or under");

  // Exclude exotic sharing between mids and outer pieces.
  std::set<std::string> mids{A.mid, B.mid, C.mid};
  for (const auto& outer : {A.u, A.w, B.u, B.w, C.u, C.w})
    if (mids.count(outer)) fail("PatternNotFound", "triangle strand re-enters the site");

  Builder b(d);
  // Each strand's crossings swap order; senses and over/under persist.
  auto rebuild = [&](const std::string& xid, const StrandInfo& s1, const StrandInfo& s2) {
    // in/out of strand s at crossing xid after the slide.
    auto io = [&](const StrandInfo& s) {
      bool was_first = s.first == xid;
      return was_first ? std::pair<std::string, std::string>{s.mid, s.w}
                       : std::pair<std::string, std::string>{s.u, s.mid};
    };
    auto [in1, out1] = io(s1);
    auto [in2, out2] = io(s2);
    bool slash1 = s1.first == xid ? s1.slash_first : s1.slash_second;
    b.node(xid) = make_crossing(xid, in1, out1, in2, out2, slash1, over_at(s1, xid));
  };
  rebuild(P, A, B);
  rebuild(Q, A, C);
  rebuild(X0, B, C);
  return b.finish();
}

// ---------------------------------------------------------------- R4

struct R4Pattern {
  std::string vertex;
  bool from_in = true;  // strand currently crosses the in-arcs
  bool strand_over = false;
  bool lr = true;       // strand runs along the vertex order left to right
  std::vector<std::string> pieces_near;  // arcs between the crossings and v
  std::vector<std::string> pieces_far;   // arcs beyond the crossings
  std::vector<std::string> xs;           // crossings, in vertex slot order
  std::string s_pre, s_post;             // strand outer pieces (travel order)
  std::vector<std::string> s_mid;        // strand pieces between crossings
};

std::optional<R4Pattern> match_r4(const CombMap& m, const RegionTable& table,
                                  const std::string& vertex, bool from_in) {
  const Diagram& d = m.diagram();
  const Node& v = d.nodes[m.node_index(vertex)];
  if (v.is_crossing) return std::nullopt;
  const std::vector<std::string>& near = from_in ? v.in : v.out;
  R4Pattern p;
  p.vertex = vertex;
  p.from_in = from_in;
  const int k = static_cast<int>(near.size());

  std::vector<const Node*> xs(k);
  for (int i = 0; i < k; ++i) {
    int ai = m.arc_index(near[i]);
    int other = from_in ? m.node_of(2 * ai) : m.node_of(2 * ai + 1);
    if (!d.nodes[other].is_crossing) return std::nullopt;
    xs[i] = &d.nodes[other];
  }
  std::set<std::string> distinct;
  for (auto* x : xs) distinct.insert(x->id);
  if (static_cast<int>(distinct.size()) != k) return std::nullopt;

  // Slot layout decides the strand direction; it must be uniform.
  // from_in, LR: pi sits at nw (edge "\", strand "/"); RL: pi at ne.
  // from_out, LR: pi sits at se; RL: pi at sw.
  std::optional<bool> lr;
  for (int i = 0; i < k; ++i) {
    const Node& x = *xs[i];
    const std::string& pi = near[i];
    bool this_lr;
    if (from_in) {
      if (x.nw == pi)
        this_lr = true;
      else if (x.ne == pi)
        this_lr = false;
      else
        return std::nullopt;
    } else {
      if (x.se == pi)
        this_lr = true;
      else if (x.sw == pi)
        this_lr = false;
      else
        return std::nullopt;
    }
    if (lr && *lr != this_lr) return std::nullopt;
    lr = this_lr;
  }
  p.lr = *lr;

  auto strand_passage = [&](const Node& x, const std::string& pi) {
    // The crossed edge uses the other transversal line.
    if (from_in)
      return p.lr ? Passage{x.sw, x.ne, true} : Passage{x.se, x.nw, false};
    return p.lr ? Passage{x.sw, x.ne, true} : Passage{x.se, x.nw, false};
  };
  std::optional<bool> over;
  for (int i = 0; i < k; ++i) {
    Passage s = strand_passage(*xs[i], near[i]);
    bool this_over = passage_over(*xs[i], s);
    if (over && *over != this_over) return std::nullopt;
    over = this_over;
    p.pieces_near.push_back(near[i]);
    const Node& x = *xs[i];
    p.pieces_far.push_back(from_in ? (p.lr ? x.se : x.sw) : (p.lr ? x.nw : x.ne));
    p.xs.push_back(x.id);
  }
  p.strand_over = *over;

  // Walk the strand in travel order: vertex-order for LR, reversed for RL.
  std::vector<int> travel(k);
  for (int i = 0; i < k; ++i) travel[i] = p.lr ? i : k - 1 - i;
  for (int j = 0; j + 1 < k; ++j) {
    const Node& x = *xs[travel[j]];
    const Node& y = *xs[travel[j + 1]];
    Passage sx = strand_passage(x, near[travel[j]]);
    Passage sy = strand_passage(y, near[travel[j + 1]]);
    if (sx.out != sy.in) return std::nullopt;
    p.s_mid.push_back(sx.out);
  }
  {
    Passage sfirst = strand_passage(*xs[travel[0]], near[travel[0]]);
    Passage slast = strand_passage(*xs[travel[k - 1]], near[travel[k - 1]]);
    p.s_pre = sfirst.in;
    p.s_post = slast.out;
    if (p.s_pre == slast.out && k == 1) return std::nullopt;  // strand is a pure kink
  }
  // Strand must be disjoint from the crossed edges' pieces.
  std::set<std::string> edge_pieces(p.pieces_near.begin(), p.pieces_near.end());
  edge_pieces.insert(p.pieces_far.begin(), p.pieces_far.end());
  if (edge_pieces.count(p.s_pre) || edge_pieces.count(p.s_post)) return std::nullopt;
  for (const auto& a : p.s_mid)
    if (edge_pieces.count(a)) return std::nullopt;

  // Wedge faces between consecutive crossed edges must be empty triangles.
  for (int i = 0; i + 1 < k; ++i) {
    int dart = from_in ? 2 * m.arc_index(near[i]) + 1 : 2 * m.arc_index(near[i + 1]);
    int f = m.face_of(dart);
    if (m.face_darts(f).size() != 3) return std::nullopt;
    if (face_hosts_content(m, table, f) || face_is_component_outer(m, f)) return std::nullopt;
  }
  return p;
}

Diagram r4_apply(const Diagram& d, const std::string& vertex, bool from_in, bool want_over) {
  CombMap m(d);
  RegionTable table = faces(m);
  auto p = match_r4(m, table, vertex, from_in);
  if (!p) fail("PatternNotFound", "no slid strand at vertex " + vertex);
  if (p->strand_over != want_over) fail("PatternNotFound", "strand is on the other level");

  Builder b(d);
  const std::string strand_edge = b.arc(p->s_pre).edge;
  const int k = static_cast<int>(p->xs.size());
  const int vindex = [&] {
    for (size_t i = 0; i < b.d.nodes.size(); ++i)
      if (b.d.nodes[i].id == vertex) return static_cast<int>(i);
    fail("PatternNotFound", "vertex vanished");
  }();
  const std::vector<std::string> far_list = from_in ? b.d.nodes[vindex].out : b.d.nodes[vindex].in;
  const int l = static_cast<int>(far_list.size());
  for (const auto& bj : far_list)
    if (bj == p->s_pre || bj == p->s_post)
      fail("PatternNotFound", "strand attaches to the vertex itself");
  const bool closed = p->s_post == p->s_pre;

  // Demolish: each crossed edge heals (far piece takes the vertex slot), the
  // strand heals into s_pre.
  for (int i = 0; i < k; ++i) {
    auto& near_list = from_in ? b.d.nodes[vindex].in : b.d.nodes[vindex].out;
    near_list[i] = p->pieces_far[i];
    b.redirect_arc_refs(p->pieces_near[i], p->pieces_far[i]);
    b.erase_arc(p->pieces_near[i]);
  }
  for (const auto& mid : p->s_mid) {
    b.redirect_arc_refs(mid, p->s_pre);
    b.erase_arc(mid);
  }
  // The strand's downstream slot will be re-pointed at the last new piece.
  std::vector<std::string> s_parts{p->s_pre};
  const int n_parts = closed ? l : l + 1;
  for (int i = 1; i < n_parts; ++i) {
    std::string id = b.fresh("a");
    b.d.arcs.push_back({id, strand_edge});
    s_parts.push_back(id);
  }
  if (!closed) {
    *b.head_slot(p->s_post) = s_parts.back();
    b.redirect_arc_refs(p->s_post, p->s_pre);
    if (p->s_post != p->s_pre) b.erase_arc(p->s_post);
  }
  for (const auto& x : p->xs) b.erase_node(x);

  // Rebuild the crossings on the other side, in the strand's travel order.
  for (int jj = 0; jj < l; ++jj) {
    int j = p->lr ? jj : l - 1 - jj;
    const std::string bj = far_list[j];
    const std::string bj_edge = b.arc(bj).edge;
    const std::string x_id = b.fresh("x");
    const std::string bj_far = b.fresh("a");
    // Near piece keeps id bj and stays anchored at the vertex slot; the far
    // piece takes over the remote end.
    if (from_in)
      *b.head_slot(bj) = bj_far;
    else
      *b.tail_slot(bj) = bj_far;
    b.d.arcs.push_back({bj_far, bj_edge});
    const std::string e_in = from_in ? bj : bj_far;
    const std::string e_out = from_in ? bj_far : bj;
    const std::string s_in = s_parts[jj];
    const std::string s_out = s_parts[(jj + 1) % n_parts];
    b.d.nodes.push_back(make_crossing(x_id, s_in, s_out, e_in, e_out, p->lr, want_over));
  }
  return b.finish();
}

// ---------------------------------------------------------------- R5

Diagram r5_insert(const Diagram& d, const std::string& vertex, int pos, bool positive) {
  Builder b(d);
  Node& v = b.node(vertex);
  if (v.is_crossing) fail("PatternNotFound", vertex + " is a crossing");
  if (pos < 0 || pos + 1 >= static_cast<int>(v.in.size()))
    fail("PatternNotFound", "no adjacent in-edge pair at that position");
  std::string pa = v.in[pos], qa = v.in[pos + 1];
  std::string pp = b.fresh("a"), qp = b.fresh("a");
  std::string x_id = b.fresh("x");
  b.d.arcs.push_back({pp, b.arc(pa).edge});
  b.d.arcs.push_back({qp, b.arc(qa).edge});
  Node x = make_crossing(x_id, pa, pp, qa, qp, true, positive);
  b.d.nodes.push_back(x);
  v.in[pos] = qp;
  v.in[pos + 1] = pp;
  return b.finish();
}

Diagram r5_remove(const Diagram& d, const std::string& vertex, int pos,
                  std::optional<Sign> want_sign) {
  CombMap m(d);
  RegionTable table = faces(m);
  Builder b(d);
  Node& v = b.node(vertex);
  if (v.is_crossing || pos < 0 || pos + 1 >= static_cast<int>(v.in.size()))
    fail("PatternNotFound", "no pair at that position");
  std::string left_arc = v.in[pos], right_arc = v.in[pos + 1];
  int li = m.arc_index(left_arc), ri = m.arc_index(right_arc);
  int ln = m.node_of(2 * li), rn = m.node_of(2 * ri);
  if (ln != rn || !d.nodes[ln].is_crossing) fail("PatternNotFound", "pair does not meet a crossing");
  const Node& x = d.nodes[ln];
  // left slot arc must come from nw (the "\" upper piece), right from ne.
  if (x.nw != left_arc || x.ne != right_arc) fail("PatternNotFound", "slots do not match the swap");
  if (want_sign && x.sign != *want_sign) fail("PatternNotFound", "sign mismatch");
  int f = m.face_of(2 * li + 1);  // face between the pair at v
  if (m.face_darts(f).size() != 2 || face_is_component_outer(m, f) ||
      face_hosts_content(m, table, f))
    fail("PatternNotFound", "pair is not an empty bigon");
  std::string pa = x.sw, qa = x.se;
  v.in[pos] = pa;
  v.in[pos + 1] = qa;
  b.redirect_arc_refs(right_arc, pa);
  b.redirect_arc_refs(left_arc, qa);
  b.erase_arc(left_arc);
  b.erase_arc(right_arc);
  b.erase_node(x.id);
  return b.finish();
}

}  // namespace

Diagram apply_move(const Diagram& d, const MoveSite& site) {
  switch (site.kind) {
    case MoveKind::R1p:
    case MoveKind::R1m: {
      bool positive = site.kind == MoveKind::R1p;
      if (site.dir == MoveDir::Insert) return r1_insert(d, site.anchor, positive);
      return r1_remove(d, site.anchor.at("crossing").get<std::string>(),
                       positive ? Sign::pos : Sign::neg);
    }
    case MoveKind::R1prime: {
      if (site.dir == MoveDir::Insert) {
        json a = site.anchor;
        Diagram mid = r1_insert(d, a, true);
        // The continuation arc of the first kink carries the second one; it
        // is the unique arc added with the strand's edge whose id is fresh.
        // Recover it as the out-arc of the newly added crossing.
        const Node& x = mid.nodes.back();
        std::string cont = (a.at("loop_side").get<std::string>() == "left") ? x.ne : x.nw;
        json a2{{"arc", cont}, {"loop_side", a.at("loop_side")}};
        return r1_insert(mid, a2, false);
      }
      Diagram mid = r1_remove(d, site.anchor.at("crossing").get<std::string>(), std::nullopt);
      return r1_remove(mid, site.anchor.at("crossing2").get<std::string>(), std::nullopt);
    }
    case MoveKind::R2:
      if (site.dir == MoveDir::Insert) return r2_insert(d, site.anchor);
      return r2_remove(d, site.anchor.at("crossing").get<std::string>(),
                       site.anchor.at("crossing2").get<std::string>());
    case MoveKind::R3:
      return r3_apply(d, site.anchor);
    case MoveKind::R4over:
    case MoveKind::R4under:
      return r4_apply(d, site.anchor.at("vertex").get<std::string>(),
                      site.anchor.at("from").get<std::string>() == "in",
                      site.kind == MoveKind::R4over);
    case MoveKind::R5cw:
    case MoveKind::R5ccw: {
      bool positive = site.kind == MoveKind::R5cw;
      if (site.dir == MoveDir::Insert)
        return r5_insert(d, site.anchor.at("vertex").get<std::string>(),
                         site.anchor.at("pos").get<int>(), positive);
      return r5_remove(d, site.anchor.at("vertex").get<std::string>(),
                       site.anchor.at("pos").get<int>(), positive ? Sign::pos : Sign::neg);
    }
  }
  fail("MalformedInput", "unhandled move kind");
}

MoveEffect move_effect(const Diagram& d, const EdgeColoring& col, const MoveSite& site) {
  MoveEffect e{col.lat->identity(), col.lat->identity()};
  auto edge_of_arc = [&](const std::string& id) -> std::string {
    for (const auto& a : d.arcs)
      if (a.id == id) return a.edge;
    for (const auto& l : d.free_loops)
      if (l.id == id) return l.edge;
    fail("DanglingArc", id);
  };
  auto kink_effect = [&](const std::string& edge, bool left, bool positive, bool insert) {
    HalfMonomial t = col.of(edge);
    HalfMonomial rot = left ? t : mono_inv(t);
    HalfMonomial sum = col.lat->identity();
    if (positive && left) sum = mono_inv(t);
    if (!positive && !left) sum = t;
    if (!insert) {
      rot = mono_inv(rot);
      sum = mono_inv(sum);
    }
    e.rot_factor = mono_mul(e.rot_factor, rot);
    e.sum_factor = mono_mul(e.sum_factor, sum);
  };
  switch (site.kind) {
    case MoveKind::R1p:
    case MoveKind::R1m: {
      bool positive = site.kind == MoveKind::R1p;
      if (site.dir == MoveDir::Insert) {
        std::string id = site.anchor.contains("arc") ? site.anchor.at("arc").get<std::string>()
                                                     : site.anchor.at("loop").get<std::string>();
        kink_effect(edge_of_arc(id), site.anchor.at("loop_side").get<std::string>() == "left",
                    positive, true);
      } else {
        CombMap m(d);
        RegionTable table = faces(m);
        for (const Node& n : d.nodes)
          if (n.id == site.anchor.at("crossing").get<std::string>()) {
            auto p = match_kink(m, table, n);
            if (!p) fail("PatternNotFound", "no kink for effect");
            kink_effect(p->edge, p->left, p->sign == Sign::pos, false);
          }
      }
      break;
    }
    case MoveKind::R1prime: {
      if (site.dir == MoveDir::Insert) {
        std::string id = site.anchor.contains("arc") ? site.anchor.at("arc").get<std::string>()
                                                     : site.anchor.at("loop").get<std::string>();
        bool left = site.anchor.at("loop_side").get<std::string>() == "left";
        kink_effect(edge_of_arc(id), left, true, true);
        kink_effect(edge_of_arc(id), left, false, true);
      } else {
        CombMap m(d);
        RegionTable table = faces(m);
        for (const std::string key : {"crossing", "crossing2"})
          for (const Node& n : d.nodes)
            if (n.id == site.anchor.at(key).get<std::string>()) {
              auto p = match_kink(m, table, n);
              if (!p) fail("PatternNotFound", "no kink for effect");
              kink_effect(p->edge, p->left, p->sign == Sign::pos, false);
            }
      }
      break;
    }
    default:
      break;  // II, III, IV, V preserve both
  }
  return e;
}

std::vector<MoveSite> find_sites(const Diagram& d, MoveKind kind, MoveDir dir) {
  std::vector<MoveSite> out;
  auto push = [&](json anchor) { out.push_back({kind, dir, std::move(anchor)}); };
  CombMap m(d);
  RegionTable table = faces(m);

  switch (kind) {
    case MoveKind::R1p:
    case MoveKind::R1m:
    case MoveKind::R1prime: {
      if (dir == MoveDir::Insert) {
        for (const auto& a : d.arcs)
          for (const char* side : {"left", "right"}) push({{"arc", a.id}, {"loop_side", side}});
        for (const auto& l : d.free_loops)
          for (const char* side : {"left", "right"}) push({{"loop", l.id}, {"loop_side", side}});
      } else if (kind != MoveKind::R1prime) {
        Sign want = kind == MoveKind::R1p ? Sign::pos : Sign::neg;
        for (const Node& n : d.nodes) {
          auto p = match_kink(m, table, n);
          if (p && p->sign == want) push({{"crossing", n.id}});
        }
      } else {
        // Adjacent kink pairs of opposite sign on the same side.
        for (const Node& n : d.nodes) {
          auto p = match_kink(m, table, n);
          if (!p || p->in_arc == p->out_arc) continue;
          int out_arc = m.arc_index(p->out_arc);
          int next_node = m.node_of(2 * out_arc + 1);
          const Node& n2 = d.nodes[next_node];
          if (n2.id == n.id) continue;
          auto p2 = match_kink(m, table, n2);
          if (!p2 || p2->left != p->left || p2->sign == p->sign) continue;
          if (p2->in_arc != p->out_arc) continue;
          push({{"crossing", n.id}, {"crossing2", n2.id}});
        }
      }
      break;
    }
    case MoveKind::R2: {
      if (dir == MoveDir::Insert) {
        for (int f = 0; f < m.n_faces(); ++f) {
          const auto& darts = m.face_darts(f);
          for (int d1 : darts)
            for (int d2 : darts) {
              if (d1 / 2 == d2 / 2) continue;
              for (const char* finger : {"over", "under"})
                push({{"from_arc", d.arcs[d1 / 2].id},
                      {"from_dir", d1 % 2 ? "rev" : "fwd"},
                      {"to_arc", d.arcs[d2 / 2].id},
                      {"to_dir", d2 % 2 ? "rev" : "fwd"},
                      {"finger", finger}});
            }
        }
      } else {
        for (int f = 0; f < m.n_faces(); ++f) {
          const auto& darts = m.face_darts(f);
          if (darts.size() != 2) continue;
          int na = m.node_of(darts[0]), nb = m.node_of(m.alpha(darts[0]));
          if (na == nb) continue;
          const Node &n1 = d.nodes[na], &n2 = d.nodes[nb];
          if (!n1.is_crossing || !n2.is_crossing) continue;
          if (!match_bigon(m, table, n1.id, n2.id)) continue;
          // Only keep removals that do not split the diagram.
          MoveSite cand{kind, dir, {{"crossing", n1.id}, {"crossing2", n2.id}}};
          try {
            apply_move(d, cand);
          } catch (const Error&) {
            continue;
          }
          out.push_back(cand);
        }
      }
      break;
    }
    case MoveKind::R3: {
      for (int f = 0; f < m.n_faces(); ++f) {
        auto t = match_triangle(m, table, f);
        if (!t) continue;
        int dart0 = m.face_darts(f)[0];
        json base{{"arc", d.arcs[dart0 / 2].id}, {"side", dart0 % 2 ? "right" : "left"}};
        for (const auto& side : t->side) {
          json anchor = base;
          anchor["slide"] = side;
          MoveSite cand{kind, dir, anchor};
          try {
            apply_move(d, cand);
          } catch (const Error&) {
            continue;
          }
          out.push_back(cand);
        }
      }
      break;
    }
    case MoveKind::R4over:
    case MoveKind::R4under: {
      for (const Node& n : d.nodes) {
        if (n.is_crossing) continue;
        for (const char* from : {"in", "out"}) {
          auto p = match_r4(m, table, n.id, std::string(from) == "in");
          if (p && p->strand_over == (kind == MoveKind::R4over))
            push({{"vertex", n.id}, {"from", from}});
        }
      }
      break;
    }
    case MoveKind::R5cw:
    case MoveKind::R5ccw: {
      Sign want = kind == MoveKind::R5cw ? Sign::pos : Sign::neg;
      for (const Node& n : d.nodes) {
        if (n.is_crossing) continue;
        for (int pos = 0; pos + 1 < static_cast<int>(n.in.size()); ++pos) {
          if (dir == MoveDir::Insert) {
            push({{"vertex", n.id}, {"pos", pos}});
          } else {
            MoveSite cand{kind, dir, {{"vertex", n.id}, {"pos", pos}}};
            try {
              apply_move(d, cand);
            } catch (const Error&) {
              continue;
            }
            out.push_back(cand);
          }
        }
      }
      break;
    }
  }
  return out;
}

std::vector<FuzzStep> fuzz(const Diagram& d, const FuzzOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::vector<FuzzStep> steps;
  Diagram cur = d;

  struct Pool {
    MoveKind kind;
    MoveDir dir;
    int weight;
    bool grows;
  };
  std::vector<Pool> pool = {
      {MoveKind::R1prime, MoveDir::Insert, 3, true},  {MoveKind::R1prime, MoveDir::Remove, 1, false},
      {MoveKind::R2, MoveDir::Insert, 4, true},       {MoveKind::R2, MoveDir::Remove, 2, false},
      {MoveKind::R3, MoveDir::Insert, 2, false},      {MoveKind::R4over, MoveDir::Insert, 1, false},
      {MoveKind::R4under, MoveDir::Insert, 1, false},
  };
  if (!opt.framed) {
    pool.push_back({MoveKind::R1p, MoveDir::Insert, 3, true});
    pool.push_back({MoveKind::R1m, MoveDir::Insert, 3, true});
    pool.push_back({MoveKind::R1p, MoveDir::Remove, 1, false});
    pool.push_back({MoveKind::R1m, MoveDir::Remove, 1, false});
    pool.push_back({MoveKind::R5cw, MoveDir::Insert, 1, true});
    pool.push_back({MoveKind::R5ccw, MoveDir::Insert, 1, true});
    pool.push_back({MoveKind::R5cw, MoveDir::Remove, 1, false});
    pool.push_back({MoveKind::R5ccw, MoveDir::Remove, 1, false});
  }

  for (int step = 0; step < opt.n_moves; ++step) {
    int crossings = 0;
    for (const auto& n : cur.nodes)
      if (n.is_crossing) ++crossings;
    std::vector<Pool> usable;
    for (const auto& p : pool)
      if (!(p.grows && crossings >= opt.max_crossings)) usable.push_back(p);

    bool applied = false;
    std::vector<size_t> order(usable.size());
    // Weighted first pick, then fall through the rest deterministically.
    int total = 0;
    for (const auto& p : usable) total += p.weight;
    std::uniform_int_distribution<int> pickw(0, total - 1);
    int roll = pickw(rng);
    size_t first = 0;
    for (size_t i = 0; i < usable.size(); ++i) {
      roll -= usable[i].weight;
      if (roll < 0) {
        first = i;
        break;
      }
    }
    for (size_t i = 0; i < usable.size(); ++i) order[i] = (first + i) % usable.size();
    for (size_t oi : order) {
      auto sites = find_sites(cur, usable[oi].kind, usable[oi].dir);
      if (sites.empty()) continue;
      std::uniform_int_distribution<size_t> pick(0, sites.size() - 1);
      MoveSite site = sites[pick(rng)];
      try {
        Diagram next = apply_move(cur, site);
        steps.push_back({site, next});
        cur = std::move(next);
        applied = true;
        break;
      } catch (const Error&) {
        continue;
      }
    }
    if (!applied) break;
  }
  return steps;
}

namespace {

std::string canonical_encoding(const Diagram& d) {
  CombMap m(d);
  std::ostringstream os;
  // Free loops first (sorted by edge, orientation, face kind).
  std::vector<std::string> loops;
  for (const auto& l : d.free_loops)
    loops.push_back(l.edge + (l.ccw ? "+" : "-"));
  std::sort(loops.begin(), loops.end());
  for (const auto& s : loops) os << "loop " << s << ";";

  if (!d.arcs.empty()) {
    int start;
    if (d.outer.kind == FaceRef::ArcSide)
      start = 2 * m.arc_index(d.outer.id) + (d.outer.left ? 0 : 1);
    else
      fail("MalformedInput", "canonical form needs an arc-side outer");
    std::map<int, int> node_label, arc_label;
    std::deque<int> queue{start};
    std::vector<int> node_order, arc_order;
    auto touch_arc = [&](int dart) {
      int a = dart / 2;
      if (!arc_label.count(a)) {
        arc_label[a] = static_cast<int>(arc_order.size());
        arc_order.push_back(a);
      }
    };
    std::set<int> seen_darts;
    while (!queue.empty()) {
      int dart = queue.front();
      queue.pop_front();
      if (seen_darts.count(dart)) continue;
      seen_darts.insert(dart);
      touch_arc(dart);
      int n = m.node_of(dart);
      if (!node_label.count(n)) {
        node_label[n] = static_cast<int>(node_order.size());
        node_order.push_back(n);
      }
      // walk the rotation at this node, then jump across arcs
      int t = dart;
      do {
        queue.push_back(m.alpha(t));
        t = m.sigma_next(t);
      } while (t != dart);
    }
    for (int n : node_order) {
      const Node& node = d.nodes[n];
      auto dart_code = [&](const std::string& arc, bool head) {
        int ai = m.arc_index(arc);
        return std::to_string(arc_label.at(ai)) + (head ? "h" : "t");
      };
      if (node.is_crossing) {
        os << "x" << (node.sign == Sign::pos ? "+" : "-") << "(" << dart_code(node.sw, true) << ","
           << dart_code(node.se, true) << "," << dart_code(node.ne, false) << ","
           << dart_code(node.nw, false) << ");";
      } else {
        os << "v(";
        for (const auto& a : node.in) os << dart_code(a, true) << ",";
        os << "|";
        for (const auto& a : node.out) os << dart_code(a, false) << ",";
        os << ");";
      }
    }
    for (int a : arc_order) os << "e" << d.arcs[a].edge << ";";
  }
  return os.str();
}

}  // namespace

bool isomorphic(const Diagram& a, const Diagram& b) {
  return canonical_encoding(a) == canonical_encoding(b);
}

}  // namespace salex
