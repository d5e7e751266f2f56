#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "ncnet/builders.hpp"
#include "ncnet/constructions.hpp"
#include "ncnet/error.hpp"
#include "ncnet/search.hpp"
#include "ncnet/serialize.hpp"
#include "support.hpp"

using namespace ncnet;

namespace {

SearchOutcome linear(const NetworkSpec& net, std::int64_t n, unsigned workers = 4) {
  SearchOptions opts;
  opts.workers = workers;
  return search_scalar_linear(net, AlphabetSpec::cyclic_ring(n), opts);
}

void expect_reverifies(const NetworkSpec& net, const SearchOutcome& s) {
  REQUIRE(s.status == SearchStatus::found);
  REQUIRE(s.solution.has_value());
  CHECK(verify_exhaustive(net, *s.solution).outcome == Outcome::solution);
}

std::int64_t gcd3(std::int64_t a, std::int64_t b, std::int64_t c) { return std::gcd(std::gcd(a, b), c); }

// Dense table of an edge, as stored or expanded.
std::vector<Symbol> table_of(const NetworkSpec& net, const Code& code, const std::string& edge) {
  const Topology topo = validate_network(net);
  const auto arity = node_inputs(net, topo, net.edges()[net.edge_index(edge)].tail).arity();
  return to_lookup_table(code.edge_functions.at(edge), arity, code.params.alphabet.size()).table;
}

// Parity of the index bits, optionally complemented.
std::vector<Symbol> parity(int bits, Symbol flip) {
  std::vector<Symbol> t(std::size_t{1} << bits);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<Symbol>(std::popcount(i) % 2) ^ flip;
  return t;
}

}  // namespace

TEST_CASE("scalar linear search examples") {
  expect_reverifies(build_n1(2), linear(build_n1(2), 3));
  CHECK(linear(build_n1(2), 2).status == SearchStatus::exhausted);
  CHECK(linear(build_n3(2, 2), 2).status == SearchStatus::exhausted);
  expect_reverifies(build_n3(2, 2), linear(build_n3(2, 2), 3));
  const auto gf = search_scalar_linear(build_n1(2), AlphabetSpec::prime_field(5));
  expect_reverifies(build_n1(2), gf);
  CHECK(gf.solution->params.alphabet == AlphabetSpec::prime_field(5));
  CHECK(gf.solution->all_linear());
}

TEST_CASE("N1 grid follows the gcd rule") {
  for (int m = 2; m <= 4; ++m)
    for (std::int64_t n = 2; n <= 5; ++n) {
      CAPTURE(m);
      CAPTURE(n);
      const auto net = build_n1(m);
      const auto s = linear(net, n);
      CHECK(s.status == (std::gcd<std::int64_t>(n, m) == 1 ? SearchStatus::found : SearchStatus::exhausted));
      if (s.status == SearchStatus::found) CHECK(verify_linear_basis(net, *s.solution).outcome == Outcome::solution);
    }
}

TEST_CASE("N2 grid follows the divisibility rule") {
  for (int m = 2; m <= 3; ++m)
    for (int w = 1; w <= 2; ++w)
      for (std::int64_t n = 2; n <= 4; ++n) {
        CAPTURE(m);
        CAPTURE(w);
        CAPTURE(n);
        const auto net = build_n2(m, w);
        const auto s = linear(net, n);
        CHECK(s.status == (m % n == 0 ? SearchStatus::found : SearchStatus::exhausted));
        if (s.status == SearchStatus::found) CHECK(verify_linear_basis(net, *s.solution).outcome == Outcome::solution);
      }
}

TEST_CASE("N3 grid follows the gcd rule") {
  for (int m1 = 2; m1 <= 4; ++m1)
    for (int m2 = 2; m2 <= 4; ++m2)
      for (std::int64_t n = 2; n <= 5; ++n) {
        CAPTURE(m1);
        CAPTURE(m2);
        CAPTURE(n);
        const auto net = build_n3(m1, m2);
        const auto s = linear(net, n);
        CHECK(s.status == (gcd3(n, m1, m2) == 1 ? SearchStatus::found : SearchStatus::exhausted));
        if (s.status == SearchStatus::found) CHECK(verify_linear_basis(net, *s.solution).outcome == Outcome::solution);
      }
}

TEST_CASE("scalar linear search does not depend on worker count") {
  for (std::int64_t n : {2, 4, 5}) {
    const auto a = linear(build_n1(3), n, 1), b = linear(build_n1(3), n, 5);
    REQUIRE(a.status == SearchStatus::found);
    REQUIRE(b.status == SearchStatus::found);
    CHECK(code_to_json(*a.solution) == code_to_json(*b.solution));
  }
  CHECK(linear(build_n3(2, 4), 2, 1).status == linear(build_n3(2, 4), 2, 3).status);
}

TEST_CASE("scalar linear search reports the cap") {
  // total work over the bound
  SearchOptions opts;
  opts.cap = 2000;
  const auto s = search_scalar_linear(build_n2(3, 2), AlphabetSpec::cyclic_ring(4), opts);
  CHECK(s.status == SearchStatus::capped);
  CHECK_FALSE(s.solution.has_value());
  // a single edge's coefficient space over the bound
  opts.cap = 10;
  try {
    search_scalar_linear(build_n2(3, 2), AlphabetSpec::cyclic_ring(4), opts);
    FAIL("expected cap error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::cap_exceeded);
  }
  CHECK_THROWS_AS(search_scalar_linear(build_n1(2), AlphabetSpec::plain_set(3)), Error);
}

TEST_CASE("structured search examples") {
  CHECK(search_p_structured(build_n1(2), 2).status == SearchStatus::exhausted);
  expect_reverifies(build_n1(2), search_p_structured(build_n1(2), 3));
  CHECK(search_p_structured(build_n1(2), 4).status == SearchStatus::exhausted);
  expect_reverifies(build_n1(2), search_p_structured(build_n1(2), 5));
  expect_reverifies(build_n0(2), search_p_structured(build_n0(2), 2));
  expect_reverifies(build_n2(2, 2), search_p_structured(build_n2(2, 2), 4));
  expect_reverifies(build_n3(2, 2), search_p_structured(build_n3(2, 2), 4));
  SearchOptions tiny;
  tiny.cap = 5;
  CHECK(search_p_structured(build_n2(2, 2), 4, tiny).status == SearchStatus::capped);
  CHECK_THROWS_AS(search_p_structured(build_n1(2), 1), Error);
}

TEST_CASE("all-codes oracle on N0(2) over two symbols") {
  const auto net = build_n0(2);
  const auto codes = enumerate_all_codes(net, 2);
  // the solutions are exactly the parity codes with a constant added per edge
  REQUIRE(codes.size() == 16);
  std::set<std::vector<Symbol>> flips;
  bool plain_xor = false;
  for (const auto& code : codes) {
    CHECK(verify_exhaustive(net, code).outcome == Outcome::solution);
    std::vector<Symbol> f;
    for (const char* id : {"B1.e0", "B1.e1", "B1.e2"}) {
      const auto t = table_of(net, code, id);
      CHECK((t == parity(2, 0) || t == parity(2, 1)));
      f.push_back(t[0]);
    }
    const auto te = table_of(net, code, "B1.e");
    CHECK((te == parity(3, 0) || te == parity(3, 1)));
    f.push_back(te[0]);
    flips.insert(f);
    plain_xor = plain_xor || f == std::vector<Symbol>{0, 0, 0, 0};
    const auto w = find_p_witness(net, code, "B1/");
    REQUIRE(w.has_value());
    CHECK(check_property_p(net, code, "B1/", *w));
  }
  CHECK(flips.size() == 16);
  CHECK(plain_xor);
}

TEST_CASE("all-codes oracle agrees with structured search") {
  CHECK(enumerate_all_codes(build_n1(2), 2).empty());
  CHECK(search_p_structured(build_n1(2), 2).status == SearchStatus::exhausted);
  CHECK_FALSE(enumerate_all_codes(build_n0(2), 2).empty());
  CHECK(search_p_structured(build_n0(2), 2).status == SearchStatus::found);
  try {
    enumerate_all_codes(build_n0(2), 3);
    FAIL("expected cap error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::cap_exceeded);
  }
}

TEST_CASE("all-codes oracle with an unreachable demand") {
  NetworkSpec net;
  const auto s0 = net.add_node("S0", NodeKind::source);
  const auto s1 = net.add_node("S1", NodeKind::source);
  const auto a = net.add_node("a", NodeKind::intermediate);
  const auto r = net.add_node("R", NodeKind::receiver);
  net.add_message("x0", s0);
  const auto x1 = net.add_message("x1", s1);
  net.add_edge("S1>a", s1, a);
  net.add_edge("a>R", a, r);
  net.add_edge("S0>a", s0, a);
  net.add_demand(r, x1);
  CHECK_FALSE(enumerate_all_codes(net, 2).empty());
  NetworkSpec blocked;
  const auto t0 = blocked.add_node("S0", NodeKind::source);
  const auto t1 = blocked.add_node("S1", NodeKind::source);
  const auto rr = blocked.add_node("R", NodeKind::receiver);
  const auto y0 = blocked.add_message("x0", t0);
  blocked.add_message("x1", t1);
  blocked.add_edge("S1>R", t1, rr);
  blocked.add_demand(rr, y0);
  CHECK(enumerate_all_codes(blocked, 2).empty());
}

TEST_CASE("find_p_witness") {
  const auto net = build_n0(2);
  const Code xor_code = n0_scalar_linear(2, AlphabetSpec::cyclic_ring(2));
  const auto w = find_p_witness(net, xor_code, "B1/");
  REQUIRE(w.has_value());
  CHECK(w->group.size() == 2);
  for (const auto& p : w->pis) CHECK(p.is_identity());
  CHECK(check_property_p(net, xor_code, "B1/", *w));

  Code zero = xor_code;
  for (const char* id : {"B1.e0", "B1.e1", "B1.e2"}) zero.edge_functions[id] = EdgeFunction{LookupTable{{0, 0, 0, 0}}};
  zero.edge_functions["B1.e"] = EdgeFunction{LookupTable{std::vector<Symbol>(8, 0)}};
  zero.params.alphabet = AlphabetSpec::plain_set(2);
  zero.decoders.clear();
  CHECK_FALSE(find_p_witness(net, zero, "B1/").has_value());

  // the sum code over Z3 has a witness; over Z4 the N2 permutation code does too
  const Code z3 = n0_scalar_linear(2, AlphabetSpec::cyclic_ring(3));
  CHECK(find_p_witness(net, z3, "B1/").has_value());
  const auto n2 = build_n2(2, 2);
  const Code perm = n2_nonlinear(2, 2);
  for (const auto& prefix : block_prefixes(n2)) {
    const auto pw = find_p_witness(n2, perm, prefix);
    REQUIRE(pw.has_value());
    CHECK(check_property_p(n2, perm, prefix, *pw));
  }
  CHECK_THROWS_AS(find_p_witness(n2, perm, "B1/", 10), Error);
}

TEST_CASE("search outcome JSON") {
  const auto s = linear(build_n1(2), 3);
  const std::string j = search_outcome_to_json(s);
  for (const char* key : {"\"kind\"", "\"status\"", "\"explored\"", "\"seconds\"", "\"solution\""})
    CHECK(j.find(key) != std::string::npos);
  CHECK(j.find("\"found\"") != std::string::npos);
  CHECK(to_string(SearchStatus::capped) == "capped");
}
