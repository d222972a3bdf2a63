#include "spatialalex/ring.hpp"

#include <functional>
#include <sstream>

#include "spatialalex/errors.hpp"

namespace salex {

GroupRingElement GroupRingElement::one(LatticePtr lat) {
  GroupRingElement p(lat);
  p.add_term(lat->identity(), 1);
  return p;
}

GroupRingElement GroupRingElement::monomial(LatticePtr lat, const HalfMonomial& m, Int coeff) {
  GroupRingElement p(std::move(lat));
  p.add_term(m, coeff);
  return p;
}

void GroupRingElement::add_term(const HalfMonomial& m, const Int& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void GroupRingElement::check_same(const GroupRingElement& o) const {
  if (lat_ && o.lat_ && lat_ != o.lat_ && lat_->basis_names() != o.lat_->basis_names())
    fail("LatticeMismatch", "ring elements over different lattices");
}

GroupRingElement GroupRingElement::operator+(const GroupRingElement& o) const {
  check_same(o);
  GroupRingElement r = *this;
  if (!r.lat_) r.lat_ = o.lat_;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

GroupRingElement GroupRingElement::operator-(const GroupRingElement& o) const {
  check_same(o);
  GroupRingElement r = *this;
  if (!r.lat_) r.lat_ = o.lat_;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

GroupRingElement GroupRingElement::operator-() const {
  GroupRingElement r(lat_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

GroupRingElement GroupRingElement::operator*(const GroupRingElement& o) const {
  check_same(o);
  GroupRingElement r(lat_ ? lat_ : o.lat_);
  for (const auto& [m1, c1] : terms_)
    for (const auto& [m2, c2] : o.terms_) r.add_term(mono_mul(m1, m2), c1 * c2);
  return r;
}

GroupRingElement GroupRingElement::scaled(const Int& c) const {
  GroupRingElement r(lat_);
  if (c == 0) return r;
  for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
  return r;
}

GroupRingElement GroupRingElement::mono_scaled(const HalfMonomial& m) const {
  GroupRingElement r(lat_);
  for (const auto& [m1, c] : terms_) r.terms_.emplace(mono_mul(m1, m), c);
  return r;
}

GroupRingElement GroupRingElement::pow(int64_t k) const {
  if (k < 0) fail("MalformedInput", "negative ring power");
  GroupRingElement r = GroupRingElement::one(lat_);
  GroupRingElement base = *this;
  while (k > 0) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  return r;
}

HalfMonomial GroupRingElement::content() const {
  if (terms_.empty()) return lat_ ? lat_->identity() : HalfMonomial{};
  HalfMonomial m = terms_.begin()->first;
  for (const auto& [mm, c] : terms_)
    for (size_t i = 0; i < m.halves.size(); ++i) m.halves[i] = std::min(m.halves[i], mm.halves[i]);
  return m;
}

GroupRingElement GroupRingElement::map_monomials(
    LatticePtr target, const std::function<HalfMonomial(const HalfMonomial&)>& f) const {
  GroupRingElement r(std::move(target));
  for (const auto& [m, c] : terms_) r.add_term(f(m), c);
  return r;
}

std::string GroupRingElement::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Descending lex order so the leading term prints first.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const Int& c = it->second;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    Int a = abs(c);
    std::string mono = lat_ ? lat_->render(it->first) : std::string("1");
    if (mono == "1")
      os << a.str();
    else if (a == 1)
      os << mono;
    else
      os << a.str() << "*" << mono;
  }
  return os.str();
}

std::optional<GroupRingElement> exact_div(const GroupRingElement& p, const GroupRingElement& d) {
  if (d.is_zero()) fail("DivisionByZero", "exact_div by zero");
  LatticePtr lat = p.lattice() ? p.lattice() : d.lattice();
  if (p.is_zero()) return GroupRingElement::zero(lat);
  // Shift both operands into the polynomial cone so leading-term reduction
  // terminates; the shifts cancel in the restored quotient.
  HalfMonomial cp = p.content(), cd = d.content();
  GroupRingElement rem = p.mono_scaled(mono_inv(cp));
  GroupRingElement div = d.mono_scaled(mono_inv(cd));
  GroupRingElement q(lat);
  const auto& dlead = *div.terms().rbegin();
  while (!rem.is_zero()) {
    const auto& rlead = *rem.terms().rbegin();
    HalfMonomial qm = rlead.first;
    bool mono_ok = true;
    for (size_t i = 0; i < qm.halves.size(); ++i) {
      qm.halves[i] -= dlead.first.halves[i];
      if (qm.halves[i] < 0) mono_ok = false;
    }
    if (!mono_ok || rlead.second % dlead.second != 0) return std::nullopt;
    Int qc = rlead.second / dlead.second;
    q.add_term(qm, qc);
    rem = rem - div.mono_scaled(qm).scaled(qc);
  }
  return q.mono_scaled(mono_mul(cp, mono_inv(cd)));
}

RingFraction::RingFraction(GroupRingElement num, GroupRingElement den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) fail("DivisionByZero", "fraction with zero denominator");
}

RingFraction RingFraction::zero(LatticePtr lat) {
  return RingFraction(GroupRingElement::zero(lat), GroupRingElement::one(lat));
}

RingFraction RingFraction::whole(GroupRingElement p) {
  auto lat = p.lattice();
  return RingFraction(std::move(p), GroupRingElement::one(lat));
}

RingFraction RingFraction::operator+(const RingFraction& o) const {
  return RingFraction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RingFraction RingFraction::operator-(const RingFraction& o) const {
  return RingFraction(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

RingFraction RingFraction::operator*(const RingFraction& o) const {
  return RingFraction(num_ * o.num_, den_ * o.den_);
}

RingFraction RingFraction::mono_scaled(const HalfMonomial& m) const {
  return RingFraction(num_.mono_scaled(m), den_);
}

std::string RingFraction::str() const {
  if (num_.is_zero()) return "0";
  if (den_ == GroupRingElement::one(den_.lattice())) return num_.str();
  std::string n = num_.str(), d = den_.str();
  std::string ln = num_.term_count() > 1 ? "(" + n + ")" : n;
  std::string ld = den_.term_count() > 1 ? "(" + d + ")" : d;
  return ln + " / " + ld;
}

RingFraction canonicalize(const RingFraction& x) {
  if (x.num().is_zero())
    return RingFraction(GroupRingElement::zero(x.den().lattice()),
                        GroupRingElement::one(x.den().lattice()));
  // Try to clear the denominator entirely first.
  if (auto q = exact_div(x.num(), x.den()))
    return RingFraction(*q, GroupRingElement::one(x.den().lattice()));
  HalfMonomial cn = x.num().content(), cd = x.den().content();
  HalfMonomial shared = cn;
  for (size_t i = 0; i < shared.halves.size(); ++i)
    shared.halves[i] = std::min(shared.halves[i], cd.halves[i]);
  GroupRingElement n = x.num().mono_scaled(mono_inv(shared));
  GroupRingElement d = x.den().mono_scaled(mono_inv(shared));
  if (d.terms().begin()->second < 0) {
    n = -n;
    d = -d;
  }
  return RingFraction(std::move(n), std::move(d));
}

bool fraction_eq(const RingFraction& a, const RingFraction& b) {
  return a.num() * b.den() == b.num() * a.den();
}

}  // namespace salex
