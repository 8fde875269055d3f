#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "hgcoop/errors.hpp"
#include "hgcoop/hypergraph.hpp"
#include "hgcoop/rng.hpp"

using namespace hgcoop;

namespace {

GeneratorConfig er(std::size_t n, double k, std::uint64_t seed) {
  GeneratorConfig c;
  c.kind = GeneratorKind::ER;
  c.nodes = n;
  c.mean_hyperdegree = k;
  c.edge_size = 3;
  c.seed = seed;
  return c;
}

std::size_t max_degree(const Hypergraph& h) {
  const auto k = hyperdegrees(h);
  return *std::max_element(k.begin(), k.end());
}

}  // namespace

TEST_CASE("hyperdegrees of the named structures") {
  CHECK(hyperdegrees(structures::two_edge()) == std::vector<std::size_t>{1, 2, 2, 1});

  const auto k4 = structures::fully_connected(4, 3);
  CHECK(k4.edge_count() == 4);
  for (auto k : hyperdegrees(k4)) CHECK(k == 3);

  const auto k6 = structures::fully_connected(6, 3);
  CHECK(k6.edge_count() == 20);
  for (auto k : hyperdegrees(k6)) CHECK(k == 10);

  CHECK(structures::fully_connected(3, 3).edge_count() == 1);
  CHECK(structures::fully_connected(5, 3).edge_count() == 10);
  CHECK(hyperdegrees(structures::chain_of_three()) == std::vector<std::size_t>{1, 2, 2, 2, 1, 1});
  for (auto k : hyperdegrees(structures::ring_of_four())) CHECK(k == 2);
  for (auto k : hyperdegrees(structures::six_node_three_regular())) CHECK(k == 3);
  for (auto k : hyperdegrees(structures::circulant(100, 3))) CHECK(k == 3);
}

TEST_CASE("constructor rejects malformed hyperedges") {
  CHECK_THROWS_AS(Hypergraph(3, 3, {{0, 1}}), InvalidInput);
  CHECK_THROWS_AS(Hypergraph(3, 3, {{0, 1, 1}}), InvalidInput);
  CHECK_THROWS_AS(Hypergraph(3, 3, {{0, 1, 3}}), InvalidInput);
  CHECK_THROWS_AS(Hypergraph(3, 1, {}), InvalidInput);
}

TEST_CASE("isolated nodes are flagged") {
  Hypergraph h(5, 3, {{0, 1, 2}});
  CHECK(h.has_isolated_nodes());
  CHECK(h.isolated_nodes() == std::vector<NodeId>{3, 4});
}

TEST_CASE("edge count uses round-half-up") {
  CHECK(target_edge_count(er(120, 8, 0)) == 320);
  CHECK(target_edge_count(er(3, 1, 0)) == 1);
  CHECK(target_edge_count(er(3, 0.5, 0)) == 1);  // 0.5 rounds up
  CHECK(target_edge_count(er(9, 0.5, 0)) == 2);  // 1.5 rounds up
  CHECK_THROWS_AS(target_edge_count(er(3, 0.1, 0)), InvalidInput);
}

TEST_CASE("ER generator") {
  SUBCASE("only one triple exists on three nodes") {
    const auto h = generate_er(er(3, 1, 42));
    REQUIRE(h.edge_count() == 1);
    const auto m = h.members(0);
    CHECK(std::vector<NodeId>(m.begin(), m.end()) == std::vector<NodeId>{0, 1, 2});
  }
  SUBCASE("N=120, <k>=8") {
    const auto h = generate_er(er(120, 8, 7));
    CHECK(h.edge_count() == 320);
    const auto k = hyperdegrees(h);
    CHECK(std::all_of(k.begin(), k.end(), [](auto v) { return v >= 1; }));
    CHECK(std::accumulate(k.begin(), k.end(), std::size_t{0}) == 3 * h.edge_count());
  }
  SUBCASE("a single hyperedge cannot cover 100 nodes") {
    auto c = er(100, 0.03, 1);
    c.max_attempts = 50;
    try {
      generate_er(c);
      FAIL("expected an error");
    } catch (const InvalidInput& e) {
      CHECK(std::string(e.what()).find("cannot cover all nodes") != std::string::npos);
    }
  }
  SUBCASE("deterministic per seed") {
    CHECK(generate_er(er(60, 5, 99)) == generate_er(er(60, 5, 99)));
    CHECK_FALSE(generate_er(er(60, 5, 99)) == generate_er(er(60, 5, 100)));
  }
  SUBCASE("mean hyperdegree over 200 seeds") {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto k = hyperdegrees(generate_er(er(120, 8, derive_seed(5, s))));
      total += static_cast<double>(std::accumulate(k.begin(), k.end(), std::size_t{0})) / 120.0;
    }
    CHECK(std::abs(total / 200.0 - 8.0) <= 0.05 * 8.0);
  }
  SUBCASE("members are distinct and in range") {
    const auto h = generate_er(er(50, 10, 3));
    for (EdgeId e = 0; e < h.edge_count(); ++e) {
      const auto m = h.members(e);
      std::set<NodeId> s(m.begin(), m.end());
      CHECK(s.size() == 3);
      CHECK(*s.rbegin() < 50);
    }
  }
}

TEST_CASE("BA generator") {
  CHECK(static_model_exponent(2.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(static_model_exponent(2.0), InvalidInput);

  auto c = er(3, 1, 11);
  c.kind = GeneratorKind::BA;
  const auto tiny = generate_ba(c);
  REQUIRE(tiny.edge_count() == 1);
  CHECK(tiny.hyperdegree(0) == 1);
  CHECK(tiny.hyperdegree(2) == 1);

  SUBCASE("heavier tail than ER at equal mean hyperdegree") {
    int wins = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      auto ba = er(120, 8, derive_seed(21, s));
      ba.kind = GeneratorKind::BA;
      const auto hb = generate_ba(ba);
      const auto he = generate_er(er(120, 8, derive_seed(21, s)));
      CHECK(hb.edge_count() == he.edge_count());
      if (max_degree(hb) > max_degree(he)) ++wins;
    }
    CHECK(wins >= 90);
  }
  SUBCASE("deterministic per seed") {
    auto ba = er(80, 6, 5);
    ba.kind = GeneratorKind::BA;
    CHECK(generate_ba(ba) == generate_ba(ba));
  }
}

TEST_CASE("hyperedge-list loader") {
  SUBCASE("dimension filter drops other sizes and compacts labels") {
    const auto h = load_hyperedge_list("a,b\na,b,c\nb,c,d\na,b,c,d,e\n", 3);
    CHECK(h.node_count() == 4);
    CHECK(h.edge_count() == 2);
    CHECK(h.edge_size() == 3);
    CHECK(h.labels() == std::vector<std::string>{"a", "b", "c", "d"});
  }
  SUBCASE("single triad") {
    const auto h = load_hyperedge_list("a,b,c");
    CHECK(h.edge_size() == 3);
    CHECK(h.node_count() == 3);
    CHECK(h.edge_count() == 1);
  }
  SUBCASE("comments, blank lines and whitespace") {
    const auto h = load_hyperedge_list("# header\n\n x , y ,z\r\n# more\ny,z,w\n");
    CHECK(h.node_count() == 4);
    CHECK(h.edge_count() == 2);
    CHECK(h.label(0) == "x");
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(load_hyperedge_list("a,a,b"), InvalidInput);
    CHECK_THROWS_AS(load_hyperedge_list("a,b,c\na,b"), InvalidInput);
    CHECK_THROWS_AS(load_hyperedge_list("a,b\nc,d", 3), InvalidInput);
    CHECK_THROWS_AS(load_hyperedge_list("# nothing\n"), InvalidInput);
    CHECK_THROWS_AS(load_hyperedge_list("a,,b"), InvalidInput);
  }
  SUBCASE("duplicate hyperedges are kept") {
    CHECK(load_hyperedge_list("a,b,c\nc,b,a\n").edge_count() == 2);
  }
}

TEST_CASE("serialize then reload gives an isomorphic hypergraph") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto h = generate_er(er(30, 4, seed));
    const auto text = serialize_hyperedge_list(h);
    const auto back = load_hyperedge_list(text);
    REQUIRE(back.node_count() == h.node_count());
    REQUIRE(back.edge_count() == h.edge_count());
    // The label map sends reloaded index -> original index.
    for (EdgeId e = 0; e < h.edge_count(); ++e) {
      std::set<NodeId> original(h.members(e).begin(), h.members(e).end());
      std::set<NodeId> mapped;
      for (NodeId v : back.members(e)) mapped.insert(static_cast<NodeId>(std::stoul(back.label(v))));
      CHECK(original == mapped);
    }
  }
}

TEST_CASE("relabeling permutes incidence consistently") {
  const auto h = structures::chain_of_three();
  const std::vector<NodeId> perm{5, 3, 1, 0, 2, 4};
  const auto p = h.relabeled(perm);
  for (NodeId i = 0; i < h.node_count(); ++i) CHECK(p.hyperdegree(perm[i]) == h.hyperdegree(i));
  for (EdgeId e = 0; e < h.edge_count(); ++e)
    for (std::uint32_t s = 0; s < 3; ++s) CHECK(p.members(e)[s] == perm[h.members(e)[s]]);
}
