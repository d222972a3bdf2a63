#include "spatialalex/statesum.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "spatialalex/errors.hpp"

namespace salex {

namespace {

HalfMonomial half_power(const HalfMonomial& t, int num_halves) {
  // t^(num_halves/2); t is integral so its halves are even.
  HalfMonomial r = t;
  for (auto& h : r.halves) h = h / 2 * num_halves;
  return r;
}

int threads_from_env() {
  const char* v = std::getenv("SPATIAL_ALEX_THREADS");
  if (!v) return 1;
  int n = std::atoi(v);
  return n > 1 ? n : 1;
}

}  // namespace

CornerWeight corner_weight(const CombMap& m, const EdgeColoring& col, const CrossingRef& c,
                           Corner corner) {
  CornerWeight w;
  w.a = GroupRingElement::one(col.lat);
  if (c.is_circle) {
    const HalfMonomial t = col.of(m.diagram().arcs[c.in_arc].edge);
    switch (corner) {
      case Corner::W:
        w.a = GroupRingElement::monomial(col.lat, half_power(t, -1));
        break;
      case Corner::E:
        w.a = GroupRingElement::monomial(col.lat, half_power(t, 1));
        break;
      case Corner::N: {
        GroupRingElement p(col.lat);
        p.add_term(half_power(t, -1), 1);
        p.add_term(half_power(t, 1), -1);
        w.a = p;
        break;
      }
      case Corner::S:
        fail("MalformedInput", "circle crossings have no S corner");
    }
    return w;
  }
  const Node& n = m.diagram().nodes[c.node];
  const bool pos = n.sign == Sign::pos;
  const HalfMonomial t = col.of(m.diagram().arcs[m.arc_index(pos ? n.sw : n.se)].edge);
  if (corner == Corner::N) w.sign = -1;
  if (pos) {
    if (corner == Corner::N || corner == Corner::W)
      w.a = GroupRingElement::monomial(col.lat, mono_inv(t));
  } else {
    if (corner == Corner::N || corner == Corner::E)
      w.a = GroupRingElement::monomial(col.lat, t);
  }
  return w;
}

void for_each_state(const DecoratedDiagram& dd, const std::function<void(const KauffmanState&)>& fn) {
  const int n = static_cast<int>(dd.crossings.size());
  const int nr = static_cast<int>(dd.regions.regions.size());
  if (!dd.map->connected()) return;

  // Candidate regions per crossing, excluding the marked pair.
  std::vector<std::vector<std::pair<int, Corner>>> cand(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& [corner, region] : dd.crossings[i].corners)
      if (region != dd.marked_left && region != dd.marked_right) cand[i].push_back({region, corner});
    std::sort(cand[i].begin(), cand[i].end(), [](const auto& a, const auto& b) {
      return a.first < b.first ||
             (a.first == b.first && static_cast<int>(a.second) < static_cast<int>(b.second));
    });
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dd.crossings[a].corners.size() < dd.crossings[b].corners.size();
  });

  if (n > 16) {
    // Hall-style feasibility prefilter: a maximum matching smaller than n
    // means there are no states at all.
    std::vector<int> match(nr, -1);
    std::function<bool(int, std::vector<char>&)> augment = [&](int i, std::vector<char>& seen) {
      for (const auto& [region, corner] : cand[i]) {
        if (seen[region]) continue;
        seen[region] = 1;
        if (match[region] == -1 || augment(match[region], seen)) {
          match[region] = i;
          return true;
        }
      }
      return false;
    };
    int matched = 0;
    for (int i = 0; i < n; ++i) {
      std::vector<char> seen(nr, 0);
      if (augment(i, seen)) ++matched;
    }
    if (matched < n) return;
  }

  KauffmanState state;
  state.corner.assign(n, Corner::N);
  std::vector<char> used(nr, 0);
  std::function<void(int)> rec = [&](int depth) {
    if (depth == n) {
      fn(state);
      return;
    }
    int i = order[depth];
    for (const auto& [region, corner] : cand[i]) {
      if (used[region]) continue;
      used[region] = 1;
      state.corner[i] = corner;
      rec(depth + 1);
      used[region] = 0;
    }
  };
  rec(0);
}

std::vector<KauffmanState> enumerate_states(const DecoratedDiagram& dd) {
  std::vector<KauffmanState> out;
  for_each_state(dd, [&](const KauffmanState& s) { out.push_back(s); });
  return out;
}

std::pair<int, GroupRingElement> state_weight(const DecoratedDiagram& dd, const EdgeColoring& col,
                                              const KauffmanState& s) {
  int sign = 1;
  GroupRingElement prod = GroupRingElement::one(col.lat);
  for (size_t i = 0; i < dd.crossings.size(); ++i) {
    CornerWeight w = corner_weight(*dd.map, col, dd.crossings[i], s.corner[i]);
    sign *= w.sign;
    prod = prod * w.a;
  }
  return {sign, prod};
}

GroupRingElement delta_norm(const DecoratedDiagram& dd, const EdgeColoring& col,
                            const WindingAssignment& w) {
  if (dd.marked_left == dd.marked_right)
    fail("MarkedRegionsCoincide", "cannot form |delta|");
  const HalfMonomial& x = w.of_region[dd.marked_right];
  GroupRingElement p(col.lat);
  p.add_term(x, 1);
  p.add_term(mono_mul(x, col.of(dd.base_edge)), -1);
  return p;
}

RingFraction state_sum(const DecoratedDiagram& dd, const EdgeColoring& col) {
  if (!dd.map->connected()) return RingFraction::zero(col.lat);
  auto states = enumerate_states(dd);
  if (states.empty()) return RingFraction::zero(col.lat);

  const int workers = std::min<int>(threads_from_env(), static_cast<int>(states.size()));
  GroupRingElement numerator(col.lat);
  if (workers <= 1) {
    for (const auto& s : states) {
      auto [sign, a] = state_weight(dd, col, s);
      numerator = numerator + (sign < 0 ? -a : a);
    }
  } else {
    std::vector<GroupRingElement> partial(workers, GroupRingElement(col.lat));
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&, t]() {
        for (size_t i = t; i < states.size(); i += workers) {
          auto [sign, a] = state_weight(dd, col, states[i]);
          partial[t] = partial[t] + (sign < 0 ? -a : a);
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& p : partial) numerator = numerator + p;
  }

  WindingAssignment w = winding_numbers(*dd.map, dd.regions, col);
  return RingFraction(numerator, delta_norm(dd, col, w));
}

RingFraction state_sum(const CombMap& m, const RegionTable& table, const EdgeColoring& col,
                       const BasePoint& base) {
  if (!m.connected()) return RingFraction::zero(col.lat);
  DecoratedDiagram dd = decorate(m, table, base);
  return state_sum(dd, col);
}

GroupRingElement alexander_det(const DecoratedDiagram& dd, const EdgeColoring& col) {
  if (!dd.map->connected()) fail("MalformedInput", "alexander_det needs a connected diagram");
  const int n = static_cast<int>(dd.crossings.size());
  std::vector<int> cols;
  for (int r = 0; r < static_cast<int>(dd.regions.regions.size()); ++r)
    if (r != dd.marked_left && r != dd.marked_right) cols.push_back(r);
  if (static_cast<int>(cols.size()) != n)
    fail("MalformedInput", "region/crossing count mismatch");
  if (n == 0) return GroupRingElement::one(col.lat);

  std::vector<std::vector<GroupRingElement>> mat(n, std::vector<GroupRingElement>(n, GroupRingElement(col.lat)));
  for (int i = 0; i < n; ++i)
    for (const auto& [corner, region] : dd.crossings[i].corners) {
      auto it = std::find(cols.begin(), cols.end(), region);
      if (it == cols.end()) continue;
      CornerWeight w = corner_weight(*dd.map, col, dd.crossings[i], corner);
      GroupRingElement& cell = mat[i][it - cols.begin()];
      cell = cell + (w.sign < 0 ? -w.a : w.a);
    }

  if (n <= 8) {
    // Cofactor expansion along the first column of the submatrix.
    std::function<GroupRingElement(std::vector<int>, std::vector<int>)> det =
        [&](std::vector<int> rows, std::vector<int> cs) -> GroupRingElement {
      if (rows.size() == 1) return mat[rows[0]][cs[0]];
      GroupRingElement acc(col.lat);
      for (size_t i = 0; i < rows.size(); ++i) {
        if (mat[rows[i]][cs[0]].is_zero()) continue;
        std::vector<int> sub_rows;
        for (size_t j = 0; j < rows.size(); ++j)
          if (j != i) sub_rows.push_back(rows[j]);
        std::vector<int> sub_cols(cs.begin() + 1, cs.end());
        GroupRingElement term = mat[rows[i]][cs[0]] * det(sub_rows, sub_cols);
        acc = (i % 2 == 0) ? acc + term : acc - term;
      }
      return acc;
    };
    std::vector<int> rows(n), cs(n);
    for (int i = 0; i < n; ++i) rows[i] = cs[i] = i;
    return det(rows, cs);
  }

  // Fraction-free Bareiss after clearing each row's monomial content; the
  // cleared contents multiply back in at the end.
  HalfMonomial restore = col.lat->identity();
  for (int i = 0; i < n; ++i) {
    GroupRingElement row_sum(col.lat);
    HalfMonomial content = col.lat->identity();
    bool any = false;
    for (int j = 0; j < n; ++j) {
      if (mat[i][j].is_zero()) continue;
      HalfMonomial c = mat[i][j].content();
      if (!any) {
        content = c;
        any = true;
      } else {
        for (size_t k = 0; k < content.halves.size(); ++k)
          content.halves[k] = std::min(content.halves[k], c.halves[k]);
      }
    }
    if (!any) return GroupRingElement(col.lat);  // zero row
    restore = mono_mul(restore, content);
    for (int j = 0; j < n; ++j) mat[i][j] = mat[i][j].mono_scaled(mono_inv(content));
  }
  GroupRingElement prev = GroupRingElement::one(col.lat);
  int sign = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (!mat[i][c].is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) return GroupRingElement(col.lat);
    if (piv != c) {
      std::swap(mat[piv], mat[c]);
      sign = -sign;
    }
    for (int i = c + 1; i < n; ++i)
      for (int j = c + 1; j < n; ++j) {
        GroupRingElement num = mat[i][j] * mat[c][c] - mat[i][c] * mat[c][j];
        auto q = exact_div(num, prev);
        if (!q) fail("MalformedInput", "Bareiss division failed");
        mat[i][j] = *q;
      }
    prev = mat[c][c];
  }
  GroupRingElement result = mat[n - 1][n - 1].mono_scaled(restore);
  return sign < 0 ? -result : result;
}

SweepReport base_point_sweep(const CombMap& m, const RegionTable& table, const EdgeColoring& col) {
  if (!m.connected()) fail("MalformedInput", "base_point_sweep needs a connected diagram");
  SweepReport rep;
  std::vector<BasePoint> bases;
  for (const auto& a : m.diagram().arcs) bases.push_back({false, a.id});
  for (const auto& l : m.diagram().free_loops) bases.push_back({true, l.id});
  for (const auto& b : bases) {
    auto t0 = std::chrono::steady_clock::now();
    RingFraction v = state_sum(m, table, col, b);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rep.entries.push_back({b, v, ms});
  }
  for (size_t i = 1; i < rep.entries.size(); ++i)
    if (!fraction_eq(rep.entries[0].value, rep.entries[i].value))
      fail("SweepMismatch", "state sums differ between " + rep.entries[0].base.id + " and " +
                                rep.entries[i].base.id);
  rep.common = rep.entries.empty() ? RingFraction::zero(col.lat) : rep.entries[0].value;
  return rep;
}

namespace {

struct Site {
  int node = -1;
  std::string sw, se, ne, nw;
};

Site site_of(const Diagram& d, const std::string& crossing_id) {
  for (size_t i = 0; i < d.nodes.size(); ++i) {
    const Node& n = d.nodes[i];
    if (n.id != crossing_id) continue;
    if (!n.is_crossing) fail("MalformedInput", crossing_id + " is not a crossing");
    return {static_cast<int>(i), n.sw, n.se, n.ne, n.nw};
  }
  fail("MalformedInput", "unknown crossing " + crossing_id);
}

std::string edge_of_arc(const Diagram& d, const std::string& arc) {
  for (const auto& a : d.arcs)
    if (a.id == arc) return a.edge;
  fail("DanglingArc", arc);
}

}  // namespace

Resolution resolve_h(const Diagram& d, const EdgeColoring& col, const std::string& crossing_id) {
  Site s = site_of(d, crossing_id);
  Resolution r;
  r.diagram = d;
  r.coloring = col;
  r.mid_edge = crossing_id + ".h";
  r.diagram.edges.push_back(r.mid_edge);
  std::string mid_arc = r.mid_edge;
  r.diagram.arcs.push_back({mid_arc, r.mid_edge});
  Node left, right;
  left.id = crossing_id + ".L";
  left.in = {s.sw, mid_arc};
  left.out = {s.nw};
  right.id = crossing_id + ".R";
  right.in = {s.se};
  right.out = {mid_arc, s.ne};
  r.diagram.nodes[s.node] = left;
  r.diagram.nodes.push_back(right);
  HalfMonomial t = col.of(edge_of_arc(d, s.sw)), ss = col.of(edge_of_arc(d, s.se));
  r.coloring.color[r.mid_edge] = mono_mul(ss, mono_inv(t));
  return r;
}

Resolution resolve_ms(const Diagram& d, const EdgeColoring& col, const std::string& crossing_id) {
  Site s = site_of(d, crossing_id);
  Resolution r;
  r.diagram = d;
  r.coloring = col;
  r.mid_edge = crossing_id + ".ms";
  r.diagram.edges.push_back(r.mid_edge);
  std::string mid_arc = r.mid_edge;
  r.diagram.arcs.push_back({mid_arc, r.mid_edge});
  Node merge, split;
  merge.id = crossing_id + ".M";
  merge.in = {s.sw, s.se};
  merge.out = {mid_arc};
  split.id = crossing_id + ".S";
  split.in = {mid_arc};
  split.out = {s.nw, s.ne};
  r.diagram.nodes[s.node] = merge;
  r.diagram.nodes.push_back(split);
  HalfMonomial t = col.of(edge_of_arc(d, s.sw)), ss = col.of(edge_of_arc(d, s.se));
  r.coloring.color[r.mid_edge] = mono_mul(t, ss);
  return r;
}

bool skein_check(const Diagram& d, const EdgeColoring& col, const std::string& crossing_id,
                 const BasePoint& base) {
  Site s = site_of(d, crossing_id);
  if (!base.on_loop)
    for (const auto& arc : {s.sw, s.se, s.ne, s.nw})
      if (arc == base.id) fail("BasePointOnSite", "base point lies on the rewritten tangle");
  const Node& x = d.nodes[s.node];

  CombMap m0(d);
  RingFraction lhs = state_sum(m0, faces(m0), col, base);

  Resolution h = resolve_h(d, col, crossing_id);
  CombMap mh(h.diagram);
  RingFraction fh = state_sum(mh, faces(mh), h.coloring, base);

  Resolution ms = resolve_ms(d, col, crossing_id);
  CombMap mms(ms.diagram);
  RingFraction fms = state_sum(mms, faces(mms), ms.coloring, base);

  const HalfMonomial t = col.of(edge_of_arc(d, s.sw));
  const HalfMonomial ss = col.of(edge_of_arc(d, s.se));
  auto bracket_half = [&](const HalfMonomial& u) {
    GroupRingElement p(col.lat);
    p.add_term(half_power(u, 1), 1);
    p.add_term(half_power(u, -1), -1);
    return p;  // u^{1/2} - u^{-1/2}
  };
  GroupRingElement bt = bracket_half(t), bs = bracket_half(ss), bts = bracket_half(mono_mul(t, ss));
  const int e = x.sign == Sign::pos ? -1 : 1;  // exponent sign of the coefficients
  GroupRingElement coef_h_num(col.lat);
  coef_h_num.add_term(half_power(mono_mul(t, ss), e), -1);
  GroupRingElement coef_ms_num(col.lat);
  coef_ms_num.add_term(half_power(ss, e), 1);
  RingFraction coef_h(coef_h_num, bt * bs);
  RingFraction coef_ms(coef_ms_num, bt * bts);

  RingFraction rhs = coef_h * fh + coef_ms * fms;
  return fraction_eq(lhs, rhs);
}

}  // namespace salex
