#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncnet/builders.hpp"
#include "ncnet/constructions.hpp"
#include "ncnet/error.hpp"
#include "ncnet/network.hpp"
#include "support.hpp"

using namespace ncnet;
using testing_support::bump_decoder;
using testing_support::corrupt_permutation;
using testing_support::Gen;

namespace {

// Same coefficient pattern read over Z_q.
Code remod(const Code& code, std::int64_t q) {
  const auto carrier = AlphabetSpec::cyclic_ring(q);
  auto fix = [&](EdgeFunction& fn) {
    auto& lf = std::get<LinearForm>(fn.body);
    lf.modulus = q;
    for (auto& b : lf.blocks) b = RingMatrix(b.rows(), b.cols(), carrier, b.entries());
  };
  Code out = code;
  out.params.alphabet = carrier;
  for (auto& [id, fn] : out.edge_functions) fix(fn);
  for (auto& [key, fn] : out.decoders) fix(fn);
  return out;
}

// Uniformly random coefficients in the shape of `code`.
Code randomize(const Code& code, Gen& gen) {
  Code out = code;
  auto fill = [&](EdgeFunction& fn) {
    auto& lf = std::get<LinearForm>(fn.body);
    for (auto& b : lf.blocks)
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c) b.set(r, c, gen.range(0, lf.modulus - 1));
  };
  for (auto& [id, fn] : out.edge_functions) fill(fn);
  for (auto& [key, fn] : out.decoders) fill(fn);
  return out;
}

Assignment zeros(const NetworkSpec& net, int k) {
  return Assignment(net.messages().size(), std::vector<Symbol>(k, 0));
}

}  // namespace

TEST_CASE("validate_network accepts builder output") {
  CHECK_NOTHROW(validate_network(build_n0(2)));
  CHECK_NOTHROW(validate_network(build_n3(2, 3)));
}

TEST_CASE("validate_network rejects a self-loop") {
  NetworkSpec net;
  const auto s = net.add_node("S", NodeKind::source);
  const auto a = net.add_node("a", NodeKind::intermediate);
  const auto r = net.add_node("R", NodeKind::receiver);
  const auto x = net.add_message("x", s);
  net.add_edge("s>a", s, a);
  net.add_edge("loop", a, a);
  net.add_edge("a>r", a, r);
  net.add_demand(r, x);
  try {
    validate_network(net);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_argument);
    CHECK(std::string(e.what()).find("cycle") != std::string::npos);
  }
}

TEST_CASE("validate_network rejects a dangling demand") {
  CHECK_THROWS_AS(
      [] {
        NetworkSpec net;
        const auto s = net.add_node("S", NodeKind::source);
        const auto r = net.add_node("R", NodeKind::receiver);
        net.add_message("x", s);
        net.add_edge("s>r", s, r);
        net.add_demand(r, 7);
        validate_network(net);
      }(),
      Error);
}

TEST_CASE("validate_network rejects a source with in-edges") {
  NetworkSpec net;
  const auto s = net.add_node("S", NodeKind::source);
  const auto t = net.add_node("T", NodeKind::source);
  const auto r = net.add_node("R", NodeKind::receiver);
  const auto x = net.add_message("x", s);
  net.add_edge("s>t", s, t);
  net.add_edge("t>r", t, r);
  net.add_demand(r, x);
  CHECK_THROWS_AS(validate_network(net), Error);
}

TEST_CASE("evaluate N0(2) sum code over Z3") {
  const auto net = build_n0(2);
  const Code code = n0_scalar_linear(2, AlphabetSpec::cyclic_ring(3));
  const Assignment ones(3, std::vector<Symbol>{1});
  const auto res = evaluate_code(net, code, ones);
  CHECK(res.edges.at("B1.e") == std::vector<Symbol>{0});
  for (const char* id : {"B1.e0", "B1.e1", "B1.e2"}) CHECK(res.edges.at(id) == std::vector<Symbol>{2});
  for (const auto& [key, out] : res.decoded) CHECK(out == std::vector<Symbol>{1});
}

TEST_CASE("evaluate linear code on zero assignment is all zero") {
  for (const auto& [net, code] : std::vector<std::pair<NetworkSpec, Code>>{
           {build_n1(3), n1_scalar_linear(3, AlphabetSpec::cyclic_ring(2))},
           {build_n2(2, 3), n2_scalar_linear(2, 3, AlphabetSpec::cyclic_ring(2))},
           {build_n1(2), n1_fractional(2, 2)}}) {
    const auto res = evaluate_code(net, code, zeros(net, code.params.k));
    for (const auto& [id, v] : res.edges)
      for (Symbol s : v) CHECK(s == 0);
  }
}

TEST_CASE("evaluate N2(2,2) non-linear code at zero") {
  const auto net = build_n2(2, 2);
  const Code code = n2_nonlinear(2, 2);
  const auto fam = n2_permutation_family(2, 2);
  const auto res = evaluate_code(net, code, zeros(net, 1));
  // with z = 0 and x = 0, block l's sum edge carries pi_l(0)
  CHECK(res.edges.at("B1.e") == std::vector<Symbol>{fam.pis[0](0)});
  CHECK(res.edges.at("B2.e") == std::vector<Symbol>{fam.pis[1](0)});
  for (const auto& [key, out] : res.decoded) CHECK(out == std::vector<Symbol>{0});
}

TEST_CASE("evaluate rejects a short assignment") {
  const auto net = build_n0(2);
  const Code code = n0_scalar_linear(2, AlphabetSpec::cyclic_ring(3));
  CHECK_THROWS_AS(evaluate_code(net, code, Assignment(2, std::vector<Symbol>{0})), Error);
}

TEST_CASE("exhaustive verification of N1(2)") {
  const auto net = build_n1(2);
  const Code z3 = n1_scalar_linear(2, AlphabetSpec::cyclic_ring(3));
  const Verdict good = verify_exhaustive(net, z3);
  CHECK(good.outcome == Outcome::solution);
  CHECK(good.checked == 27);
  // block code over Z2 plus the R_x decoder pattern read mod 2
  Code z2 = n0_scalar_linear(2, AlphabetSpec::cyclic_ring(2));
  const Code pattern = remod(z3, 2);
  z2.decoders[{"Rx", "x0"}] = pattern.decoders.at({"Rx", "x0"});
  const Verdict bad = verify_exhaustive(net, z2);
  REQUIRE(bad.outcome == Outcome::counterexample);
  REQUIRE(bad.witness.has_value());
  CHECK(bad.witness->receiver == "Rx");
  CHECK(bad.witness->message == "x0");
  CHECK(bad.witness->assignment == Assignment{{0}, {0}, {1}});
}

TEST_CASE("exhaustive verification of N2(2,2) non-linear code") {
  const Verdict v = verify_exhaustive(build_n2(2, 2), n2_nonlinear(2, 2));
  CHECK(v.outcome == Outcome::solution);
  CHECK(v.checked == 16384);
}

TEST_CASE("exhaustive verification respects the cap") {
  VerifyOptions opts;
  opts.cap = 100;
  try {
    verify_exhaustive(build_n2(2, 2), n2_nonlinear(2, 2), opts);
    FAIL("expected cap error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::cap_exceeded);
  }
}

TEST_CASE("basis verification of fractional codes") {
  const Verdict a = verify_linear_basis(build_n1(2), n1_fractional(2, 2));
  CHECK(a.outcome == Outcome::solution);
  CHECK(a.checked == 15);
  const Verdict b = verify_linear_basis(build_n3(2, 2), n3_fractional(2, 2, 2));
  CHECK(b.outcome == Outcome::solution);
  CHECK(b.checked == 50);
  Code bad = n1_fractional(2, 2);
  bump_decoder(bad);
  CHECK(verify_linear_basis(build_n1(2), bad).outcome == Outcome::counterexample);
}

TEST_CASE("basis verification rejects tables") {
  CHECK_THROWS_AS(verify_linear_basis(build_n2(2, 2), n2_nonlinear(2, 2)), Error);
}

TEST_CASE("random verification of N2(4,3) over Z12") {
  VerifyOptions opts;
  opts.workers = 4;
  const Verdict v = verify_random(build_n2(4, 3), n2_nonlinear(4, 3), 1'000'000, 1, opts);
  CHECK(v.outcome == Outcome::inconclusive);
  CHECK(v.checked == 1'000'000);
  Code bad = n2_nonlinear(4, 3);
  REQUIRE(corrupt_permutation(bad));
  CHECK(verify_random(build_n2(4, 3), bad, 10'000, 1).outcome == Outcome::counterexample);
  try {
    verify_random(build_n2(4, 3), n2_nonlinear(4, 3), 0, 1);
    FAIL("expected precondition error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::precondition);
  }
}

TEST_CASE("random verification never claims a solution") {
  const Verdict v = verify_random(build_n0(2), n0_scalar_linear(2, AlphabetSpec::cyclic_ring(3)), 5000, 9);
  CHECK(v.outcome == Outcome::inconclusive);
}

TEST_CASE("basis and exhaustive verdicts agree on random linear codes") {
  Gen gen(2024);
  int solutions = 0;
  for (int t = 0; t < 240; ++t) {
    const bool n1 = t % 2;
    const std::int64_t q = (t / 2) % 2 ? 3 : 2;
    const auto net = n1 ? build_n1(2) : build_n0(2);
    const Code shape = remod(n1 ? n1_scalar_linear(2, AlphabetSpec::cyclic_ring(3))
                                : n0_scalar_linear(2, AlphabetSpec::cyclic_ring(3)),
                             q);
    // every third trial starts from the true code and flips one coefficient
    Code code = randomize(shape, gen);
    if (t % 3 == 0) {
      code = shape;
      if (t % 6 == 0) bump_decoder(code);
    }
    const Verdict a = verify_linear_basis(net, code);
    const Verdict b = verify_exhaustive(net, code);
    CHECK(a.outcome == b.outcome);
    solutions += b.outcome == Outcome::solution;
  }
  CHECK(solutions > 0);
}

TEST_CASE("disjoint union of networks") {
  const auto u = disjoint_union({build_n2(2, 3), build_n2(3, 2)});
  CHECK(u.node_count() == 97);
  CHECK_NOTHROW(validate_network(u));
  const auto one = disjoint_union({build_n1(3)});
  const auto base = build_n1(3);
  CHECK(one.node_count() == base.node_count());
  CHECK(one.edges().size() == base.edges().size());
  CHECK(one.demands().size() == base.demands().size());
  for (std::size_t e = 0; e < base.edges().size(); ++e) {
    CHECK(one.edges()[e].tail == base.edges()[e].tail);
    CHECK(one.edges()[e].head == base.edges()[e].head);
  }
  CHECK(one.has_label("c0/N1/R_x"));
}

TEST_CASE("union of solutions is a solution; a corrupted part breaks it") {
  const auto z3 = AlphabetSpec::cyclic_ring(3);
  const auto net = disjoint_union({build_n0(2), build_n1(2)});
  const Code code = disjoint_union(std::vector<Code>{n0_scalar_linear(2, z3), n1_scalar_linear(2, z3)});
  CHECK(verify_exhaustive(net, code).outcome == Outcome::solution);
  CHECK(verify_linear_basis(net, code).outcome == Outcome::solution);
  for (int which = 0; which < 2; ++which) {
    Code a = n0_scalar_linear(2, z3), b = n1_scalar_linear(2, z3);
    bump_decoder(which == 0 ? a : b);
    const Code broken = disjoint_union(std::vector<Code>{a, b});
    const Verdict v = verify_exhaustive(net, broken);
    REQUIRE(v.outcome == Outcome::counterexample);
    CHECK(v.witness->receiver.rfind("c" + std::to_string(which) + ".", 0) == 0);
  }
  // non-linear parts over Z4
  const auto net2 = disjoint_union({build_n2(2, 2), build_n2(2, 2)});
  const Code c2 = disjoint_union(std::vector<Code>{n2_nonlinear(2, 2), n2_nonlinear(2, 2)});
  CHECK(verify_random(net2, c2, 20000, 4).outcome == Outcome::inconclusive);
  Code part = n2_nonlinear(2, 2);
  REQUIRE(corrupt_permutation(part));
  const Code c3 = disjoint_union(std::vector<Code>{n2_nonlinear(2, 2), part});
  CHECK(verify_random(net2, c3, 20000, 4).outcome == Outcome::counterexample);
}

TEST_CASE("counterexample witness replays") {
  Gen gen(77);
  int seen = 0;
  for (int t = 0; t < 40; ++t) {
    const auto net = build_n1(2);
    const Code code = randomize(remod(n1_scalar_linear(2, AlphabetSpec::cyclic_ring(3)), 3), gen);
    const Verdict v = verify_exhaustive(net, code);
    if (v.outcome != Outcome::counterexample) continue;
    ++seen;
    const auto& w = *v.witness;
    const auto res = evaluate_code(net, code, w.assignment);
    const auto got = res.decoded.at({w.receiver, w.message});
    CHECK(got == w.decoded);
    CHECK(got != w.assignment[net.message_index(w.message)]);
  }
  CHECK(seen > 10);
}

TEST_CASE("results do not depend on worker count") {
  Gen gen(5);
  const auto net = build_n2(2, 2);
  Code bad = n2_nonlinear(2, 2);
  REQUIRE(corrupt_permutation(bad));
  VerifyOptions one, many;
  many.workers = 6;
  const Verdict a = verify_exhaustive(net, bad, one), b = verify_exhaustive(net, bad, many);
  REQUIRE(a.outcome == Outcome::counterexample);
  CHECK(b.outcome == Outcome::counterexample);
  CHECK(a.witness->assignment == b.witness->assignment);
  CHECK(a.witness->receiver == b.witness->receiver);
  const Verdict c = verify_random(net, bad, 20000, 3, one), d = verify_random(net, bad, 20000, 3, many);
  CHECK(c.witness->assignment == d.witness->assignment);
  for (int t = 0; t < 20; ++t) {
    Assignment x;
    for (std::size_t i = 0; i < net.messages().size(); ++i) x.push_back(gen.symbols(1, 4));
    const auto r1 = evaluate_code(net, bad, x), r2 = evaluate_code(net, bad, x);
    CHECK(r1.edges == r2.edges);
    CHECK(r1.decoded == r2.decoded);
  }
}

TEST_CASE("counter_random depends only on its arguments") {
  CHECK(counter_random(1, 2, 3) == counter_random(1, 2, 3));
  CHECK(counter_random(1, 2, 3) != counter_random(1, 2, 4));
  CHECK(counter_random(1, 2, 3) != counter_random(2, 2, 3));
}

TEST_CASE("property P on the sum code") {
  const auto net = build_n0(2);
  const Code code = n0_scalar_linear(2, AlphabetSpec::cyclic_ring(3));
  PropertyPWitness w;
  w.group = AlphabetSpec::cyclic_ring(3);
  w.pis.assign(3, Permutation::identity(3));
  w.sigmas.assign(3, Permutation::identity(3));
  CHECK(check_property_p(net, code, "B1/", w));
  w.pis[0] = Permutation(std::vector<Symbol>{1, 2, 0});
  CHECK_FALSE(check_property_p(net, code, "B1/", w));
  CHECK_THROWS_AS(check_property_p(net, code, "B7/", w), Error);
}

TEST_CASE("property P on the N2 permutation code") {
  const auto net = build_n2(2, 2);
  const Code code = n2_nonlinear(2, 2);
  const auto fam = n2_permutation_family(2, 2);
  for (int l = 1; l <= 2; ++l) {
    PropertyPWitness w;
    w.group = AlphabetSpec::cyclic_ring(4);
    // N2 blocks are B(m+1): z plus m private inputs
    w.pis.assign(4, Permutation::identity(4));
    w.pis[0] = fam.pis[l - 1];
    w.sigmas.assign(4, Permutation::identity(4));
    CHECK(check_property_p(net, code, "B" + std::to_string(l) + "/", w));
  }
}

TEST_CASE("block views") {
  const auto net = build_n3(2, 3);
  const auto prefixes = block_prefixes(net);
  REQUIRE(prefixes.size() == 2);
  CHECK(block_view(net, prefixes[0]).m == 2);
  CHECK(block_view(net, prefixes[1]).m == 3);
  CHECK(block_view(net, prefixes[1]).side_edges.size() == 4);
}
