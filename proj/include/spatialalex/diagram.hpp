// Transverse graph diagrams as combinatorial planar maps: vertices with a
// separating line, signed crossings, free loops, face traversal, and the
// decoration (base point, crossing set, region set, corner incidence).
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spatialalex/lattice.hpp"

namespace salex {

enum class Sign { pos, neg };

struct Arc {
  std::string id;
  std::string edge;
};

// A node is either a transverse vertex (in-arcs left to right below L_v,
// out-arcs left to right above) or a signed crossing with slots sw,se
// incoming and ne,nw outgoing.
struct Node {
  std::string id;
  bool is_crossing = false;
  std::vector<std::string> in, out;      // vertex
  Sign sign = Sign::pos;                 // crossing
  std::string sw, se, ne, nw;            // crossing
};

struct FaceRef {
  enum Kind { Unbounded, ArcSide, LoopSide } kind = Unbounded;
  std::string id;    // arc or loop id
  bool left = true;  // side relative to travel direction
  bool operator==(const FaceRef&) const = default;
};

struct FreeLoop {
  std::string id;
  std::string edge;
  bool ccw = true;
  FaceRef face;  // containing face
};

// Declares that the face `component_outer` of a nested component plays the
// role of its unbounded face and is identified with the host face `host`.
struct Nesting {
  FaceRef component_outer;
  FaceRef host;
};

struct Diagram {
  std::vector<std::string> edges;
  std::vector<Arc> arcs;
  std::vector<Node> nodes;
  std::vector<FreeLoop> free_loops;
  FaceRef outer;  // names the unbounded face (ArcSide or LoopSide)
  std::vector<Nesting> nesting;
};

Diagram parse(const std::string& text);
std::string serialize(const Diagram& d);

// Dart encoding: 2*arc_index for the tail dart (at the node the arc leaves),
// 2*arc_index+1 for the head dart.  Faces are orbits of sigma^{-1} o alpha;
// the orbit of a dart is the face on its left.
class CombMap {
 public:
  explicit CombMap(const Diagram& d);

  const Diagram& diagram() const { return *d_; }
  int arc_index(const std::string& id) const;
  int node_index(const std::string& id) const;
  int edge_index(const std::string& id) const;

  int n_darts() const { return static_cast<int>(2 * d_->arcs.size()); }
  int alpha(int dart) const { return dart ^ 1; }
  int node_of(int dart) const { return node_of_[dart]; }
  int sigma_next(int dart) const { return next_ccw_[dart]; }
  int sigma_prev(int dart) const { return prev_ccw_[dart]; }

  int face_of(int dart) const { return face_of_[dart]; }  // face left of dart
  int n_faces() const { return n_faces_; }
  int face_left_of_arc(int arc) const { return face_of_[2 * arc]; }
  int face_right_of_arc(int arc) const { return face_of_[2 * arc + 1]; }
  const std::vector<int>& face_darts(int face) const { return face_darts_[face]; }

  // Node components: 0..n_components-1, then each free loop is its own
  // component in input order.
  int n_components() const { return n_node_components_ + static_cast<int>(d_->free_loops.size()); }
  int n_node_components() const { return n_node_components_; }
  int component_of_node(int node) const { return comp_of_node_[node]; }
  int component_of_arc(int arc) const { return comp_of_node_[node_of_[2 * arc]]; }
  bool connected() const { return n_components() == 1; }

  // Outer face orbit of each node component (from outer/nesting declarations).
  int component_outer_face(int comp) const { return comp_outer_face_[comp]; }

  // Sequence of arcs of one edge, in travel order (path or cycle).
  const std::vector<int>& edge_strand(int edge) const { return strands_[edge]; }

  // Vertex of which this node-free edge strand is a cycle, if none: -1 means
  // the strand starts at a vertex; free loops are not strands.
  bool strand_is_cycle(int edge) const { return strand_cycle_[edge]; }

 private:
  void build_rotation();
  void build_faces();
  void build_components();
  void build_strands();
  void validate();

  const Diagram* d_;
  std::map<std::string, int> arc_idx_, node_idx_, edge_idx_;
  std::vector<int> node_of_;       // per dart
  std::vector<int> next_ccw_, prev_ccw_;
  std::vector<int> face_of_;
  std::vector<std::vector<int>> face_darts_;
  int n_faces_ = 0;
  std::vector<int> comp_of_node_;
  int n_node_components_ = 0;
  std::vector<int> comp_outer_face_;
  std::vector<std::vector<int>> strands_;
  std::vector<bool> strand_cycle_;
};

// Global region structure: component face orbits merged across nesting, plus
// one region per free loop interior, plus circle regions (one per vertex).
struct RegionTable {
  struct Region {
    std::string id;
    bool circle = false;
  };
  std::vector<Region> regions;
  int unbounded = -1;
  int n_regular = 0, n_circle = 0;

  // region index of each (component, face orbit)
  std::vector<int> region_of_face;
  std::vector<int> loop_inside;            // per free loop
  std::vector<int> loop_outside;           // per free loop
  std::map<std::string, int> circle_of_vertex;

  int left_of_arc(const CombMap& m, int arc) const { return region_of_face[m.face_left_of_arc(arc)]; }
  int right_of_arc(const CombMap& m, int arc) const { return region_of_face[m.face_right_of_arc(arc)]; }
};

RegionTable faces(const CombMap& m);

// One corner of a crossing in Cr(D).
enum class Corner { N, S, E, W };
std::string corner_name(Corner c);

struct CrossingRef {
  std::string id;          // node id, or vertex/arc pair for circle crossings
  bool is_circle = false;
  int node = -1;           // double crossings: node index
  int in_arc = -1;         // circle crossings: the incoming arc
  std::string vertex_id;   // circle crossings
  std::vector<std::pair<Corner, int>> corners;  // corner -> region index
};

struct BasePoint {
  bool on_loop = false;
  std::string id;  // arc id or free loop id
  bool operator==(const BasePoint&) const = default;
};

struct DecoratedDiagram {
  const Diagram* diagram = nullptr;
  const CombMap* map = nullptr;
  RegionTable regions;
  BasePoint base;
  std::vector<CrossingRef> crossings;  // Cr(D)
  int marked_left = -1, marked_right = -1;  // R_u, R_v
  std::string base_edge;
};

// Computes Cr(D), Re(D), the corner map and the marked pair.  For connected
// diagrams asserts |Re(D)| = |Cr(D)| + 2.
DecoratedDiagram decorate(const CombMap& m, const RegionTable& table, const BasePoint& base);

// Partition of nodes / arcs / free loops into diagram components.
struct Components {
  int count = 0;
  std::map<std::string, int> of_node;
  std::map<std::string, int> of_arc;
  std::map<std::string, int> of_loop;
};
Components connected_components(const CombMap& m);

// Meridian labels for every edge, over a common lattice.  The universal
// coloring assigns each edge the class of its own meridian.
struct EdgeColoring {
  LatticePtr lat;
  std::map<std::string, HalfMonomial> color;

  const HalfMonomial& of(const std::string& edge) const;
};

LatticePtr universal_lattice(const Diagram& d, const std::vector<std::string>& preferred_basis = {});
EdgeColoring universal_coloring(const Diagram& d, const std::vector<std::string>& preferred_basis = {});

}  // namespace salex
