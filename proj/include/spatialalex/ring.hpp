// Integral group ring of the half-exponent meridian lattice, and formal
// fractions over it.  Coefficients are arbitrary-precision integers.
#pragma once

#include <map>
#include <optional>
#include <string>

#include "spatialalex/lattice.hpp"

namespace salex {

class GroupRingElement {
 public:
  GroupRingElement() = default;
  explicit GroupRingElement(LatticePtr lat) : lat_(std::move(lat)) {}

  static GroupRingElement zero(LatticePtr lat) { return GroupRingElement(std::move(lat)); }
  static GroupRingElement one(LatticePtr lat);
  static GroupRingElement monomial(LatticePtr lat, const HalfMonomial& m, Int coeff = 1);

  const LatticePtr& lattice() const { return lat_; }
  const std::map<HalfMonomial, Int, MonomialLess>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }
  bool is_monomial() const { return terms_.size() == 1; }

  GroupRingElement operator+(const GroupRingElement& o) const;
  GroupRingElement operator-(const GroupRingElement& o) const;
  GroupRingElement operator*(const GroupRingElement& o) const;
  GroupRingElement operator-() const;
  bool operator==(const GroupRingElement& o) const { return terms_ == o.terms_; }

  GroupRingElement scaled(const Int& c) const;
  GroupRingElement mono_scaled(const HalfMonomial& m) const;  // multiply by monomial
  GroupRingElement pow(int64_t k) const;                      // k >= 0

  // Componentwise-min exponent vector over all terms (the monomial content).
  HalfMonomial content() const;

  // Applies a lattice-exponent substitution h -> f(h) to every term.
  GroupRingElement map_monomials(LatticePtr target,
                                 const std::function<HalfMonomial(const HalfMonomial&)>& f) const;

  std::string str() const;

  void add_term(const HalfMonomial& m, const Int& c);

 private:
  void check_same(const GroupRingElement& o) const;

  LatticePtr lat_;
  std::map<HalfMonomial, Int, MonomialLess> terms_;
};

// Exact quotient in the Laurent ring: q with q*d == p, or nullopt.
std::optional<GroupRingElement> exact_div(const GroupRingElement& p, const GroupRingElement& d);

// Formal fraction num/den with den != 0.  Canonical form strips the shared
// monomial content and normalizes the sign of den's lex-least term.
class RingFraction {
 public:
  RingFraction() = default;
  RingFraction(GroupRingElement num, GroupRingElement den);

  static RingFraction zero(LatticePtr lat);
  static RingFraction whole(GroupRingElement p);

  const GroupRingElement& num() const { return num_; }
  const GroupRingElement& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  RingFraction operator+(const RingFraction& o) const;
  RingFraction operator-(const RingFraction& o) const;
  RingFraction operator*(const RingFraction& o) const;
  RingFraction mono_scaled(const HalfMonomial& m) const;

  std::string str() const;

 private:
  GroupRingElement num_, den_;
};

RingFraction canonicalize(const RingFraction& x);
bool fraction_eq(const RingFraction& a, const RingFraction& b);

}  // namespace salex
