// Local rewriting engine for the diagram moves, plus the seeded random
// fuzzer used by the invariance harness.
//
// Insertions work at any anchor; removals only by exact pattern match.  The
// engine keeps diagrams connected: removals that would split the projection
// are rejected as PatternNotFound.
#pragma once

#include <cstdint>
#include <random>

#include "json.hpp"
#include "spatialalex/diagram.hpp"

namespace salex {

enum class MoveKind { R1p, R1m, R1prime, R2, R3, R4over, R4under, R5cw, R5ccw };
enum class MoveDir { Insert, Remove };

std::string kind_name(MoveKind k);
MoveKind kind_from_name(const std::string& s);

struct MoveSite {
  MoveKind kind;
  MoveDir dir = MoveDir::Insert;
  nlohmann::json anchor;
};

nlohmann::json site_to_json(const MoveSite& s);
MoveSite site_from_json(const nlohmann::json& j);

// Applies one move; the result is re-validated (Euler, arc pairing).
Diagram apply_move(const Diagram& d, const MoveSite& site);

// Exact multiplicative behavior of Rot and <D> under the move; identity for
// the crossing-count-preserving moves, meridian powers for the kinks.
struct MoveEffect {
  HalfMonomial rot_factor;
  HalfMonomial sum_factor;
};
MoveEffect move_effect(const Diagram& d, const EdgeColoring& col, const MoveSite& site);

// All valid sites of one kind/direction, in deterministic order.
std::vector<MoveSite> find_sites(const Diagram& d, MoveKind kind, MoveDir dir);

struct FuzzOptions {
  uint64_t seed = 1;
  int n_moves = 10;
  bool framed = true;
  int max_crossings = 12;
};

struct FuzzStep {
  MoveSite site;
  Diagram diagram;
};

// Deterministic seeded sequence of insert-biased moves; framed mode uses
// only the framed move set {I', II, III, IV}.
std::vector<FuzzStep> fuzz(const Diagram& d, const FuzzOptions& opt);

// Combinatorial-map isomorphism for connected diagrams, anchored at the
// declared outer face; edge ids are respected, arc and node ids are not.
bool isomorphic(const Diagram& a, const Diagram& b);

}  // namespace salex
