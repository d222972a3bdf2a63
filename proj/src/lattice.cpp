#include "spatialalex/lattice.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "spatialalex/errors.hpp"

namespace salex {

HalfMonomial mono_mul(const HalfMonomial& a, const HalfMonomial& b) {
  if (a.halves.size() != b.halves.size()) fail("LatticeMismatch", "monomial ranks differ");
  HalfMonomial r = a;
  for (size_t i = 0; i < r.halves.size(); ++i) r.halves[i] += b.halves[i];
  return r;
}

HalfMonomial mono_inv(const HalfMonomial& a) {
  HalfMonomial r = a;
  for (auto& h : r.halves) h = -h;
  return r;
}

HalfMonomial mono_sqrt(const HalfMonomial& a) {
  HalfMonomial r = a;
  for (auto& h : r.halves) {
    if (h % 2 != 0) fail("NonSquare", "sqrt of a monomial with odd half-exponent");
    h /= 2;
  }
  return r;
}

HalfMonomial mono_pow(const HalfMonomial& a, int64_t k) {
  HalfMonomial r = a;
  for (auto& h : r.halves) h *= k;
  return r;
}

std::shared_ptr<const MeridianLattice> MeridianLattice::build(
    const std::vector<std::string>& edges, const std::vector<EdgeIncidence>& incidences,
    const std::vector<std::string>& preferred_basis) {
  if (edges.empty()) fail("EmptyGraph", "lattice needs at least one edge");
  auto lat = std::shared_ptr<MeridianLattice>(new MeridianLattice());
  lat->edge_ids_ = edges;
  for (size_t i = 0; i < edges.size(); ++i) {
    if (lat->edge_index_.count(edges[i])) fail("MalformedInput", "duplicate edge id " + edges[i]);
    lat->edge_index_[edges[i]] = i;
  }
  const size_t E = edges.size();

  lat->relations_.assign(incidences.size(), std::vector<Int>(E, 0));
  for (size_t v = 0; v < incidences.size(); ++v) {
    for (const auto& e : incidences[v].in_edges) {
      auto it = lat->edge_index_.find(e);
      if (it == lat->edge_index_.end()) fail("UnknownEdge", e);
      lat->relations_[v][it->second] += 1;
    }
    for (const auto& e : incidences[v].out_edges) {
      auto it = lat->edge_index_.find(e);
      if (it == lat->edge_index_.end()) fail("UnknownEdge", e);
      lat->relations_[v][it->second] -= 1;
    }
  }

  for (const Int& d : smith_invariants(lat->relations_))
    if (d != 0 && d != 1)
      fail("NonFreeQuotient", "Smith invariant factor " + d.str() +
                                  " (quotient has torsion; malformed input)");

  const int rel_rank = int_rank(lat->relations_);
  const int k = static_cast<int>(E) - rel_rank;

  // Basis: first k edges (in the given preference order, default input order)
  // whose meridians are independent modulo the relation rows.
  std::vector<std::string> order = preferred_basis;
  for (const auto& e : edges)
    if (std::find(order.begin(), order.end(), e) == order.end()) order.push_back(e);
  for (const auto& e : order)
    if (!lat->edge_index_.count(e)) fail("UnknownEdge", "basis edge " + e);

  std::vector<std::string> basis;
  IntMat probe = lat->relations_;
  int base_rank = rel_rank;
  for (const auto& e : order) {
    if (static_cast<int>(basis.size()) == k) break;
    std::vector<Int> unit(E, 0);
    unit[lat->edge_index_[e]] = 1;
    probe.push_back(unit);
    if (int_rank(probe) > base_rank) {
      ++base_rank;
      basis.push_back(e);
    } else {
      probe.pop_back();
    }
  }
  if (static_cast<int>(basis.size()) != k)
    fail("NonFreeQuotient", "could not select a meridian basis");
  lat->basis_names_ = basis;

  // Express every meridian over the basis: solve
  //   unit_e = sum alpha_v * relation_v + sum beta_i * unit_{basis_i}.
  IntMat span = lat->relations_;
  for (const auto& b : basis) {
    std::vector<Int> unit(E, 0);
    unit[lat->edge_index_[b]] = 1;
    span.push_back(unit);
  }
  lat->projection_.assign(k, std::vector<Int>(E, 0));
  for (size_t e = 0; e < E; ++e) {
    std::vector<Int> unit(E, 0);
    unit[e] = 1;
    std::vector<Int> coeffs;
    if (!solve_in_rowspace(span, unit, coeffs))
      fail("NonFreeQuotient", "meridian of " + edges[e] + " not integral over the basis");
    for (int i = 0; i < k; ++i) lat->projection_[i][e] = coeffs[lat->relations_.size() + i];
  }
  // The projection kills every relation row by construction; spot-verify.
  for (const auto& row : lat->relations_) {
    for (int i = 0; i < k; ++i) {
      Int acc = 0;
      for (size_t e = 0; e < E; ++e) acc += lat->projection_[i][e] * row[e];
      if (acc != 0) fail("NonFreeQuotient", "projection does not annihilate a relator");
    }
  }
  return lat;
}

HalfMonomial MeridianLattice::meridian(const std::string& edge_id) const {
  auto it = edge_index_.find(edge_id);
  if (it == edge_index_.end()) fail("UnknownEdge", edge_id);
  HalfMonomial m{std::vector<int64_t>(basis_names_.size(), 0)};
  for (size_t i = 0; i < basis_names_.size(); ++i)
    m.halves[i] = 2 * static_cast<int64_t>(projection_[i][it->second]);
  return m;
}

std::string MeridianLattice::render(const HalfMonomial& m) const {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < basis_names_.size(); ++i) {
    int64_t h = m.halves[i];
    if (h == 0) continue;
    if (!first) os << "*";
    first = false;
    os << basis_names_[i];
    if (h == 2) continue;
    os << "^(";
    if (h % 2 == 0)
      os << h / 2;
    else
      os << h << "/2";
    os << ")";
  }
  if (first) os << "1";
  return os.str();
}

}  // namespace salex
