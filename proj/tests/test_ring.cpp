#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "spatialalex/errors.hpp"
#include "spatialalex/ring.hpp"

using namespace salex;

namespace {

LatticePtr rank1() { return MeridianLattice::build({"t"}, {}); }

GroupRingElement mono(LatticePtr lat, std::vector<int64_t> halves, Int c = 1) {
  return GroupRingElement::monomial(lat, HalfMonomial{std::move(halves)}, c);
}

GroupRingElement random_poly(LatticePtr lat, std::mt19937_64& rng, int terms) {
  GroupRingElement p(lat);
  for (int i = 0; i < terms; ++i)
    p.add_term(HalfMonomial{{static_cast<int64_t>(rng() % 9) - 4}},
               static_cast<int64_t>(rng() % 11) - 5);
  return p;
}

}  // namespace

TEST_CASE("basic arithmetic identities") {
  auto lat = rank1();
  auto th = mono(lat, {1});    // t^(1/2)
  auto thi = mono(lat, {-1});  // t^(-1/2)
  // (t^{1/2} - t^{-1/2}) (t^{1/2} + t^{-1/2}) = t - t^{-1}
  CHECK((th - thi) * (th + thi) == mono(lat, {2}) - mono(lat, {-2}));
  auto p = th + mono(lat, {4}, 3);
  CHECK((p + (-p)).is_zero());
}

TEST_CASE("distributivity on random elements") {
  auto lat = rank1();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 40; ++i) {
    auto p = random_poly(lat, rng, 4), q = random_poly(lat, rng, 3), r = random_poly(lat, rng, 3);
    CHECK(p * (q + r) == p * q + p * r);
    CHECK(p * q == q * p);
    CHECK((p * q) * r == p * (q * r));
  }
}

TEST_CASE("exact division") {
  auto lat = rank1();
  auto t = mono(lat, {2});
  auto one = GroupRingElement::one(lat);
  // (t - 1) / (t^{1/2} - t^{-1/2}) = t^{1/2}
  auto q = exact_div(t - one, mono(lat, {1}) - mono(lat, {-1}));
  REQUIRE(q.has_value());
  CHECK(*q == mono(lat, {1}));
  // 1 / (t^{-1} - 1) has no polynomial quotient
  CHECK_FALSE(exact_div(one, mono(lat, {-2}) - one).has_value());
  CHECK_THROWS_AS(exact_div(one, GroupRingElement::zero(lat)), Error);
}

TEST_CASE("exact_div(p*d, d) == p on random elements") {
  auto lat = rank1();
  std::mt19937_64 rng(13);
  for (int i = 0; i < 60; ++i) {
    auto p = random_poly(lat, rng, 4);
    auto d = random_poly(lat, rng, 3);
    if (d.is_zero()) continue;
    auto q = exact_div(p * d, d);
    REQUIRE(q.has_value());
    CHECK(*q == p);
  }
}

TEST_CASE("fractions: equality and canonical form") {
  auto lat = rank1();
  auto one = GroupRingElement::one(lat);
  auto t = mono(lat, {2});
  auto tinv = mono(lat, {-2});
  // 1/(t^{-1}-1) == -t/(1-t) * t^{-1}
  RingFraction a(one, tinv - one);
  RingFraction b(mono(lat, {0}, -1) * t * tinv, one - t);
  CHECK(fraction_eq(a, b));
  // ((t-1)) / (t^{1/2} (t^{1/2}-t^{-1/2})) canonicalizes to 1
  RingFraction c(t - one, mono(lat, {1}) * (mono(lat, {1}) - mono(lat, {-1})));
  RingFraction cc = canonicalize(c);
  CHECK(fraction_eq(cc, RingFraction::whole(one)));
  CHECK(cc.den() == one);
}

TEST_CASE("canonicalize: idempotent, preserves value; fraction_eq equivalence") {
  auto lat = rank1();
  std::mt19937_64 rng(17);
  std::vector<RingFraction> pool;
  for (int i = 0; i < 30; ++i) {
    auto n = random_poly(lat, rng, 3);
    auto d = random_poly(lat, rng, 3);
    if (d.is_zero()) d = GroupRingElement::one(lat);
    RingFraction x(n, d);
    CHECK(fraction_eq(x, canonicalize(x)));
    RingFraction c1 = canonicalize(x), c2 = canonicalize(c1);
    CHECK(c1.num() == c2.num());
    CHECK(c1.den() == c2.den());
    pool.push_back(x);
    // scale by a random unit: must stay equal
    GroupRingElement u = mono(lat, {static_cast<int64_t>(rng() % 5) - 2}, rng() % 2 ? 1 : -1);
    CHECK(fraction_eq(x, RingFraction(n * u, d * u)));
  }
  // transitivity spot check
  for (size_t i = 0; i + 2 < pool.size(); i += 3) {
    if (fraction_eq(pool[i], pool[i + 1]) && fraction_eq(pool[i + 1], pool[i + 2]))
      CHECK(fraction_eq(pool[i], pool[i + 2]));
  }
}

TEST_CASE("rendering") {
  auto lat = MeridianLattice::build(
      {"t", "s"}, {});
  GroupRingElement p(lat);
  p.add_term(HalfMonomial{{3, -2}}, -2);
  p.add_term(HalfMonomial{{0, 0}}, 1);
  CHECK(p.str() == "-2*t^(3/2)*s^(-1) + 1");
}
