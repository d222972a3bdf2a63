#include "spatialalex/graphalg.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "spatialalex/errors.hpp"

namespace salex {

DirectedGraph underlying_digraph(const CombMap& m) {
  const Diagram& d = m.diagram();
  DirectedGraph g;
  std::map<std::string, int> vidx;
  for (const Node& n : d.nodes) {
    if (n.is_crossing) continue;
    vidx[n.id] = static_cast<int>(g.vertices.size());
    g.vertices.push_back(n.id);
  }
  for (size_t e = 0; e < d.edges.size(); ++e) {
    bool is_loop = false;
    for (const auto& l : d.free_loops)
      if (l.edge == d.edges[e]) is_loop = true;
    if (is_loop) {
      g.closed_edges.push_back(d.edges[e]);
      continue;
    }
    const auto& strand = m.edge_strand(static_cast<int>(e));
    if (m.strand_is_cycle(static_cast<int>(e))) {
      g.closed_edges.push_back(d.edges[e]);
      continue;
    }
    int tail_node = m.node_of(2 * strand.front());
    int head_node = m.node_of(2 * strand.back() + 1);
    g.edges.push_back({d.edges[e], vidx.at(d.nodes[tail_node].id), vidx.at(d.nodes[head_node].id)});
  }
  return g;
}

bool strongly_connected(const DirectedGraph& g) {
  const int n = static_cast<int>(g.vertices.size());
  if (n <= 1) return true;
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (const auto& e : g.edges) {
        int from = forward ? e.tail : e.head, to = forward ? e.head : e.tail;
        if (from == v && !seen[to]) {
          seen[to] = 1;
          ++count;
          q.push_back(to);
        }
      }
    }
    return count == n;
  };
  return reach(true) && reach(false);
}

bool Coloring::is_integral() const {
  for (const auto& [e, v] : value)
    if (v.denominator() != 1) return false;
  return true;
}

bool balanced(const DirectedGraph& g, const Coloring& c) {
  std::vector<Rational> net(g.vertices.size(), Rational(0));
  for (const auto& e : g.edges) {
    const Rational& v = c.value.at(e.edge);
    net[e.head] += v;
    net[e.tail] -= v;
  }
  for (const auto& v : net)
    if (v != 0) return false;
  return true;
}

std::optional<Coloring> positive_coloring(const DirectedGraph& g) {
  Coloring c;
  for (const auto& e : g.closed_edges) c.value[e] = 1;
  for (const auto& e : g.edges) c.value[e.edge] = 0;
  for (size_t target = 0; target < g.edges.size(); ++target) {
    if (c.value[g.edges[target].edge] > Rational(0)) continue;
    // Directed path from head(target) back to tail(target).
    const int n = static_cast<int>(g.vertices.size());
    std::vector<int> via(n, -1);
    std::vector<char> seen(n, 0);
    std::deque<int> q{g.edges[target].head};
    seen[g.edges[target].head] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (size_t i = 0; i < g.edges.size(); ++i)
        if (g.edges[i].tail == v && !seen[g.edges[i].head]) {
          seen[g.edges[i].head] = 1;
          via[g.edges[i].head] = static_cast<int>(i);
          q.push_back(g.edges[i].head);
        }
    }
    int goal = g.edges[target].tail;
    if (!seen[goal]) return std::nullopt;  // edge on no directed cycle
    Rational bump = Rational(1) - c.value[g.edges[target].edge];
    c.value[g.edges[target].edge] += bump;
    int v = goal;
    while (v != g.edges[target].head) {
      // A self-reached start with empty path happens for loop edges.
      int ei = via[v];
      if (ei == -1) break;
      c.value[g.edges[ei].edge] += bump;
      v = g.edges[ei].tail;
    }
  }
  for (const auto& [e, v] : c.value)
    if (v <= 0) return std::nullopt;
  return c;
}

Int arborescence_count(const DirectedGraph& g, const std::string& root) {
  const int n = static_cast<int>(g.vertices.size());
  int r = -1;
  for (int i = 0; i < n; ++i)
    if (g.vertices[i] == root) r = i;
  if (r < 0) fail("MalformedInput", "unknown root vertex " + root);
  if (n == 1) return 1;
  // In-degree Laplacian minor at the root counts arborescences oriented away
  // from it; self-loops cancel out of both terms.
  IntMat L(n, std::vector<Int>(n, 0));
  for (const auto& e : g.edges) {
    if (e.tail == e.head) continue;
    L[e.head][e.head] += 1;
    L[e.tail][e.head] -= 1;
  }
  IntMat M;
  for (int i = 0; i < n; ++i) {
    if (i == r) continue;
    std::vector<Int> row;
    for (int j = 0; j < n; ++j)
      if (j != r) row.push_back(L[i][j]);
    M.push_back(std::move(row));
  }
  // Bareiss fraction-free determinant.
  const int k = static_cast<int>(M.size());
  Int prev = 1;
  int sign = 1;
  for (int col = 0; col < k; ++col) {
    int piv = -1;
    for (int i = col; i < k; ++i)
      if (M[i][col] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return 0;
    if (piv != col) {
      std::swap(M[piv], M[col]);
      sign = -sign;
    }
    for (int i = col + 1; i < k; ++i)
      for (int j = col + 1; j < k; ++j)
        M[i][j] = (M[i][j] * M[col][col] - M[i][col] * M[col][j]) / prev;
    prev = M[col][col];
  }
  return sign * M[k - 1][k - 1];
}

}  // namespace salex
