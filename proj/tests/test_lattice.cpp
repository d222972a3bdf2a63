#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "spatialalex/errors.hpp"
#include "spatialalex/lattice.hpp"

using namespace salex;

TEST_CASE("theta-style lattice: m maps to t*s in the basis {t,s}") {
  auto lat = MeridianLattice::build(
      {"t", "s", "m"},
      {{"v1", {"t", "s"}, {"m"}}, {"v2", {"m"}, {"t", "s"}}});
  CHECK(lat->rank() == 2);
  CHECK(lat->basis_names() == std::vector<std::string>{"t", "s"});
  CHECK(lat->meridian("m") == HalfMonomial{{2, 2}});
  CHECK(lat->meridian("t") == HalfMonomial{{2, 0}});
  CHECK(lat->render(lat->meridian("m")) == "t*s");
}

TEST_CASE("single loop edge") {
  auto lat = MeridianLattice::build({"t"}, {});
  CHECK(lat->rank() == 1);
  CHECK(lat->meridian("t") == HalfMonomial{{2}});
  CHECK(lat->meridian("t").is_integral());
}

TEST_CASE("empty graph rejected") {
  CHECK_THROWS_AS(MeridianLattice::build({}, {}), Error);
}

TEST_CASE("random connected graphs: rank = E - V + 1") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    int nv = 2 + static_cast<int>(rng() % 5);
    int extra = 1 + static_cast<int>(rng() % 5);
    std::vector<std::string> edges;
    std::vector<EdgeIncidence> inc(nv);
    for (int v = 0; v < nv; ++v) inc[v].vertex_id = "v" + std::to_string(v);
    auto add_edge = [&](int from, int to) {
      std::string id = "e" + std::to_string(edges.size());
      edges.push_back(id);
      inc[to].in_edges.push_back(id);
      inc[from].out_edges.push_back(id);
    };
    for (int v = 1; v < nv; ++v) add_edge(static_cast<int>(rng() % v), v);
    for (int i = 0; i < extra; ++i)
      add_edge(static_cast<int>(rng() % nv), static_cast<int>(rng() % nv));
    for (int v = 0; v + 1 < nv; ++v) add_edge(v + 1, v);

    auto lat = MeridianLattice::build(edges, inc);
    int expected = static_cast<int>(edges.size()) - nv + 1;
    CHECK(lat->rank() == expected);
    // independent oracle: rational rank of the relation matrix
    CHECK(int_rank(lat->relation_matrix()) == nv - 1);
    for (const auto& e : edges) CHECK(lat->meridian(e).is_integral());
  }
}

TEST_CASE("monomial arithmetic") {
  HalfMonomial t{{2, 0}}, s{{0, 2}};
  CHECK(mono_mul(t, mono_inv(s)) == HalfMonomial{{2, -2}});
  CHECK(mono_sqrt(HalfMonomial{{4, -4}}) == HalfMonomial{{2, -2}});
  CHECK(mono_inv(mono_mul(t, mono_inv(t))) == HalfMonomial{{0, 0}});
  CHECK_THROWS_AS(mono_sqrt(HalfMonomial{{1, 0}}), Error);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    HalfMonomial a{{static_cast<int64_t>(rng() % 19) - 9, static_cast<int64_t>(rng() % 19) - 9}};
    CHECK(mono_sqrt(mono_mul(a, a)) == a);
  }
}
