// Directed-graph services on the underlying abstract graph of a diagram:
// strong connectivity, positive balanced colorings, arborescence counts.
#pragma once

#include <boost/rational.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spatialalex/diagram.hpp"
#include "spatialalex/intmat.hpp"

namespace salex {

using Rational = boost::rational<Int>;

// The underlying directed multigraph: crossings are transparent, so each
// graph edge runs from the vertex its strand leaves to the vertex it enters.
// Strands without vertices (closed knot components, free loops) are listed
// separately: they sit on their own directed cycle.
struct DirectedGraph {
  std::vector<std::string> vertices;
  struct E {
    std::string edge;
    int tail, head;  // vertex indices
  };
  std::vector<E> edges;
  std::vector<std::string> closed_edges;
};

DirectedGraph underlying_digraph(const CombMap& m);

bool strongly_connected(const DirectedGraph& g);
inline bool strongly_connected(const CombMap& m) { return strongly_connected(underlying_digraph(m)); }

// Balanced edge coloring; values rational with an integer fast path.
struct Coloring {
  std::map<std::string, Rational> value;
  bool is_integral() const;
};

bool balanced(const DirectedGraph& g, const Coloring& c);

// Builds a positive integer coloring by cycle augmentation, or nullopt when
// some edge lies on no directed cycle.
std::optional<Coloring> positive_coloring(const DirectedGraph& g);
inline std::optional<Coloring> positive_coloring(const CombMap& m) {
  return positive_coloring(underlying_digraph(m));
}

// Spanning out-arborescences rooted at `root`, all edges oriented away from
// the root (directed matrix-tree minor).
Int arborescence_count(const DirectedGraph& g, const std::string& root);

}  // namespace salex
