// Meridian homology lattice of a transverse graph complement, plus exact
// monomial arithmetic with half-integer exponents.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "spatialalex/intmat.hpp"

namespace salex {

// Group element with exponents in (1/2)Z over the lattice basis.  The vector
// stores twice the exponent, so t^(1/2) has halves {1} and t has halves {2}.
struct HalfMonomial {
  std::vector<int64_t> halves;

  bool operator==(const HalfMonomial&) const = default;
  bool is_identity() const {
    for (int64_t h : halves)
      if (h != 0) return false;
    return true;
  }
  bool is_integral() const {
    for (int64_t h : halves)
      if (h % 2 != 0) return false;
    return true;
  }
};

// Lexicographic order on halves vectors; the one total order used everywhere
// (term maps, leading-term division, printing).
struct MonomialLess {
  bool operator()(const HalfMonomial& a, const HalfMonomial& b) const {
    return a.halves < b.halves;
  }
};

HalfMonomial mono_mul(const HalfMonomial& a, const HalfMonomial& b);
HalfMonomial mono_inv(const HalfMonomial& a);
// Componentwise halving; requires an integral monomial (all halves even).
HalfMonomial mono_sqrt(const HalfMonomial& a);
HalfMonomial mono_pow(const HalfMonomial& a, int64_t k);

struct EdgeIncidence {
  std::string vertex_id;
  std::vector<std::string> in_edges;   // with multiplicity
  std::vector<std::string> out_edges;  // with multiplicity
};

class MeridianLattice {
 public:
  // Builds H_1(S^3 \ G; Z) from edge generators and vertex relators
  // prod(in) = prod(out).  Throws NonFreeQuotient if any Smith invariant
  // factor is outside {0,1}, EmptyGraph when there are no edges.
  static std::shared_ptr<const MeridianLattice> build(
      const std::vector<std::string>& edges,
      const std::vector<EdgeIncidence>& incidences,
      const std::vector<std::string>& preferred_basis = {});

  const std::vector<std::string>& edge_ids() const { return edge_ids_; }
  const std::vector<std::string>& basis_names() const { return basis_names_; }
  int rank() const { return static_cast<int>(basis_names_.size()); }
  const IntMat& relation_matrix() const { return relations_; }

  // Projection of the unit vector of an edge, as an integral HalfMonomial.
  HalfMonomial meridian(const std::string& edge_id) const;
  HalfMonomial identity() const { return HalfMonomial{std::vector<int64_t>(basis_names_.size(), 0)}; }
  bool has_edge(const std::string& edge_id) const { return edge_index_.count(edge_id) > 0; }

  std::string render(const HalfMonomial& m) const;

 private:
  MeridianLattice() = default;

  std::vector<std::string> edge_ids_;
  std::map<std::string, size_t> edge_index_;
  IntMat relations_;                  // rows = vertices, cols = edges
  std::vector<std::string> basis_names_;
  std::vector<std::vector<Int>> projection_;  // k x E, whole units
};

using LatticePtr = std::shared_ptr<const MeridianLattice>;

}  // namespace salex
