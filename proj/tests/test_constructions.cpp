#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <numeric>
#include <set>

#include "ncnet/builders.hpp"
#include "ncnet/constructions.hpp"
#include "ncnet/error.hpp"
#include "support.hpp"

using namespace ncnet;
using testing_support::bump_decoder;
using testing_support::corrupt_permutation;
using testing_support::Gen;

namespace {

const AlphabetSpec Z(std::int64_t n) { return AlphabetSpec::cyclic_ring(n); }

void expect_precondition(const std::function<void()>& fn) {
  try {
    fn();
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::precondition);
  }
}

Outcome exhaustive(const NetworkSpec& net, const Code& code) { return verify_exhaustive(net, code).outcome; }

Outcome natural(const NamedCode& nc) {
  if (nc.natural_mode == "exhaustive") return verify_exhaustive(nc.net, nc.code).outcome;
  if (nc.natural_mode == "basis") return verify_linear_basis(nc.net, nc.code).outcome;
  VerifyOptions opts;
  opts.workers = 4;
  return verify_random(nc.net, nc.code, 20000, 1, opts).outcome;
}

// Published permutation tables.
const std::vector<std::vector<std::int64_t>> kTableN2 = {
    {0, 0, 0, 0, 0, 0},  {1, 1, 1, 3, 3, 3},   {2, 2, 2, 6, 6, 6},   {3, 3, 3, 9, 9, 9},
    {4, 4, 5, 0, 0, 3},  {5, 5, 6, 3, 3, 6},   {6, 6, 7, 6, 6, 9},   {7, 7, 4, 9, 9, 0},
    {8, 9, 8, 0, 3, 0},  {9, 10, 9, 3, 6, 3},  {10, 11, 10, 6, 9, 6}, {11, 8, 11, 9, 0, 9},
};
const std::vector<std::vector<std::int64_t>> kTableN3 = {
    {0, 0, 0, 0}, {1, 4, 4, 0}, {2, 1, 0, 2}, {3, 5, 4, 2}, {4, 2, 0, 4}, {5, 6, 4, 4}, {6, 3, 0, 6}, {7, 7, 4, 6},
};

// pi_l bumps the low digit of a = q*m + r when the high digit q equals l.
Symbol n2_pi_oracle(int m, int l, Symbol a) {
  const int q = static_cast<int>(a) / m, r = static_cast<int>(a) % m;
  return q == l ? static_cast<Symbol>(q * m + (r + 1) % m) : a;
}

// Right rotation of the alpha+1 base-m digits.
Symbol n3_pi_oracle(int m, int alpha, Symbol a) {
  return static_cast<Symbol>(a / m + (a % m) * ipow(m, alpha));
}

std::vector<std::int64_t> scaled_tuple(const PermutationFamily& fam, Symbol a) {
  std::vector<std::int64_t> out;
  for (std::size_t l = 0; l < fam.pis.size(); ++l) out.push_back(fam.scales[l] * fam.pis[l](a) % fam.modulus);
  return out;
}

void check_family(const PermutationFamily& fam) {
  std::set<std::vector<std::int64_t>> seen;
  REQUIRE(fam.psi.size() == static_cast<std::size_t>(fam.modulus));
  for (Symbol a = 0; a < fam.modulus; ++a) {
    const auto t = scaled_tuple(fam, a);
    CHECK(seen.insert(t).second);
    const auto stored = fam.tuple(a);
    CHECK(std::vector<std::int64_t>(stored.begin(), stored.end()) == t);
    CHECK(fam.psi[a].second == a);
    CHECK(std::vector<std::int64_t>(fam.psi[a].first.begin(), fam.psi[a].first.end()) == t);
  }
}

}  // namespace

TEST_CASE("n0 scalar linear") {
  CHECK(exhaustive(build_n0(2), n0_scalar_linear(2, Z(2))) == Outcome::solution);
  const Verdict v = verify_exhaustive(build_n0(3), n0_scalar_linear(3, Z(4)));
  CHECK(v.outcome == Outcome::solution);
  CHECK(v.checked == 256);
  CHECK(verify_linear_basis(build_n0(2), n0_scalar_linear(2, AlphabetSpec::prime_field(3))).outcome ==
        Outcome::solution);
  for (int m = 2; m <= 6; ++m)
    for (std::int64_t q = 2; q <= 7; ++q)
      CHECK(verify_linear_basis(build_n0(m), n0_scalar_linear(m, Z(q))).outcome == Outcome::solution);
}

TEST_CASE("n1 scalar linear") {
  CHECK(exhaustive(build_n1(2), n1_scalar_linear(2, Z(3))) == Outcome::solution);
  const Verdict v = verify_exhaustive(build_n1(2), n1_scalar_linear(2, Z(5)));
  CHECK(v.outcome == Outcome::solution);
  CHECK(v.checked == 125);
  expect_precondition([] { n1_scalar_linear(2, Z(2)); });
  for (int m = 2; m <= 6; ++m)
    for (std::int64_t q = 2; q <= 9; ++q) {
      if (std::gcd<std::int64_t>(q, m) != 1) {
        expect_precondition([&] { n1_scalar_linear(m, Z(q)); });
        continue;
      }
      CHECK(verify_linear_basis(build_n1(m), n1_scalar_linear(m, Z(q))).outcome == Outcome::solution);
    }
}

TEST_CASE("n1 fractional codes") {
  const Code a = n1_fractional(2, 2);
  CHECK(a.params.k == 5);
  CHECK(a.params.n == 6);
  CHECK(a.all_linear());
  CHECK(verify_linear_basis(build_n1(2), a).outcome == Outcome::solution);
  const Code b = n1_fractional(3, 3);
  CHECK(b.params.k == 7);
  CHECK(b.params.n == 8);
  CHECK(verify_linear_basis(build_n1(3), b).outcome == Outcome::solution);
  CHECK(verify_linear_basis(build_n1(4), n1_fractional(4, 2)).outcome == Outcome::solution);
  CHECK(verify_linear_basis(build_n1(6), n1_fractional(6, 3)).outcome == Outcome::solution);
  expect_precondition([] { n1_fractional(2, 3); });
  Code bad = n1_fractional(2, 2);
  bump_decoder(bad);
  CHECK(verify_linear_basis(build_n1(2), bad).outcome == Outcome::counterexample);
}

TEST_CASE("n1 fractional edge symbols follow the component formulas") {
  Gen gen(31);
  for (auto [m, p] : std::vector<std::pair<int, int>>{{2, 2}, {3, 3}, {4, 2}}) {
    const auto net = build_n1(m);
    const Code code = n1_fractional(m, p);
    const int k = 2 * m + 1, n = 2 * m + 2;
    for (int t = 0; t < 60; ++t) {
      Assignment x(net.messages().size());
      for (int j = 0; j <= m; ++j) x[net.message_index("x" + std::to_string(j))] = gen.symbols(k, p);
      auto X = [&](int j, int l) -> std::int64_t { return x[net.message_index("x" + std::to_string(j))][l - 1]; };
      const auto res = evaluate_code(net, code, x);
      auto E = [&](const std::string& id, int l) -> std::int64_t { return res.edges.at(id)[l - 1]; };
      for (int l = 1; l <= n; ++l) {
        std::int64_t e0 = 0, e = 0;
        if (l <= m) {
          for (int j = 1; j <= m; ++j) e0 += j != l ? X(j, l) : 0;
          for (int j = 0; j <= m; ++j) e += j != l ? X(j, l) : 0;
        } else if (l <= 2 * m + 1) {
          for (int j = 1; j <= m; ++j) e0 += X(j, l);
          for (int j = 0; j <= m; ++j) e += X(j, l);
        } else {
          for (int j = 2; j <= m; ++j) e0 += X(j, j);
          e = X(0, m + 1);
          for (int j = 1; j <= m; ++j) e += X(j, j);
        }
        CHECK(E("B1.e0", l) == e0 % p);
        CHECK(E("B1.e", l) == e % p);
        for (int i = 1; i <= m; ++i) {
          std::int64_t ei = 0;
          if (l <= m && l != i) {
            for (int j = 0; j <= m; ++j) ei += (j != i && j != l) ? X(j, l) : 0;
          } else if (l == i) {
            ei = X(0, m + 1);
            for (int j = 1; j <= m; ++j) ei += j != i ? X(j, j) : 0;
          } else if (l <= 2 * m + 1) {
            for (int j = 0; j <= m; ++j) ei += j != i ? X(j, l) : 0;
          } else {
            ei = X(0, m + 1 + i);
          }
          CHECK(E("B1.e" + std::to_string(i), l) == ei % p);
        }
      }
      // sum over i != l of [e_i]_l equals minus the sum over j != l of [x_j]_l
      for (int l = 1; l <= m; ++l) {
        std::int64_t lhs = 0, rhs = 0;
        for (int i = 0; i <= m; ++i)
          if (i != l) lhs += E("B1.e" + std::to_string(i), l), rhs += X(i, l);
        CHECK(lhs % p == (p - rhs % p) % p);
      }
    }
  }
}

TEST_CASE("n2 permutation family matches the published table") {
  const auto fam = n2_permutation_family(4, 3);
  CHECK(fam.modulus == 12);
  CHECK(fam.table_rows() == kTableN2);
  CHECK(fam.pis[0](4) == 5);
  CHECK(fam.pis[1](11) == 8);
  CHECK(fam.pis[2].is_identity());
  check_family(fam);
  const auto csv = permutation_table_csv(fam);
  CHECK(csv.find("11,8,11,9,0,9") != std::string::npos);
}

TEST_CASE("n2 permutation families are injective with a left inverse") {
  for (int m = 2; m <= 6; ++m)
    for (int w = 1; w <= 4; ++w) {
      const auto fam = n2_permutation_family(m, w);
      CHECK(fam.modulus == m * w);
      REQUIRE(fam.pis.size() == static_cast<std::size_t>(w));
      CHECK(fam.pis[w - 1].is_identity());
      for (int l = 1; l <= w; ++l)
        for (Symbol a = 0; a < static_cast<Symbol>(m * w); ++a) CHECK(fam.pis[l - 1](a) == n2_pi_oracle(m, l, a));
      for (auto s : fam.scales) CHECK(s == w);
      check_family(fam);
    }
  const auto one = n2_permutation_family(5, 1);
  CHECK(one.pis[0].is_identity());
  for (Symbol a = 0; a < 5; ++a) CHECK(one.psi[a].first == std::vector<Symbol>{a});
}

TEST_CASE("n3 permutation pair matches the published table") {
  const auto fam = n3_permutation_pair(2, 2, 3);
  CHECK(fam.modulus == 8);
  CHECK(fam.table_rows() == kTableN3);
  CHECK(fam.pis[0](1) == 4);
  CHECK(fam.pis[0](2) == 1);
  CHECK(fam.pis[1].is_identity());
  check_family(fam);
  const auto small = n3_permutation_pair(2, 1, 1);
  CHECK(small.modulus == 4);
  for (Symbol a = 0; a < 4; ++a) CHECK(small.pis[0](a) == n3_pi_oracle(2, 1, a));
  check_family(small);
  expect_precondition([] { n3_permutation_pair(2, 1, 4); });
}

TEST_CASE("n3 permutation pairs are injective") {
  for (int m = 2; m <= 5; ++m)
    for (int alpha = 1; alpha <= 3; ++alpha)
      for (int s = 1; s <= 7; ++s) {
        if (std::gcd(s, m) != 1) continue;
        const auto fam = n3_permutation_pair(m, alpha, s);
        CHECK(fam.modulus == ipow(m, alpha + 1));
        CHECK(fam.pis[1].is_identity());
        REQUIRE(fam.scales.size() == 2);
        CHECK(fam.scales[0] % fam.modulus == m % fam.modulus);
        CHECK(fam.scales[1] % fam.modulus == s * ipow(m, alpha) % fam.modulus);
        for (Symbol a = 0; a < fam.modulus; ++a) CHECK(fam.pis[0](a) == n3_pi_oracle(m, alpha, a));
        check_family(fam);
      }
}

TEST_CASE("n2 non-linear codes") {
  const Verdict v = verify_exhaustive(build_n2(2, 2), n2_nonlinear(2, 2));
  CHECK(v.outcome == Outcome::solution);
  CHECK(v.checked == 16384);
  CHECK_FALSE(n2_nonlinear(2, 2).all_linear());
  VerifyOptions opts;
  opts.workers = 4;
  CHECK(verify_random(build_n2(4, 3), n2_nonlinear(4, 3), 100'000, 1, opts).outcome == Outcome::inconclusive);
  const Code lin = n2_nonlinear(2, 1);
  CHECK(lin.all_linear());
  CHECK(lin.params.alphabet.size() == 2);
  CHECK(exhaustive(build_n2(2, 1), lin) == Outcome::solution);
  CHECK(verify_random(build_n2(3, 2), n2_nonlinear(3, 2), 20000, 2).outcome == Outcome::inconclusive);
  Code bad = n2_nonlinear(2, 2);
  REQUIRE(corrupt_permutation(bad));
  CHECK(exhaustive(build_n2(2, 2), bad) == Outcome::counterexample);
}

TEST_CASE("n2 block sums recover w times pi_l(z)") {
  Gen gen(4);
  for (auto [m, w] : std::vector<std::pair<int, int>>{{2, 2}, {4, 3}, {3, 4}, {5, 2}}) {
    const auto net = build_n2(m, w);
    const Code code = n2_nonlinear(m, w);
    const auto fam = n2_permutation_family(m, w);
    const std::int64_t q = m * w;
    // the x terms enter each sum m times, and m*w = 0 in Z_{mw}
    CHECK((std::int64_t{m} * w) % q == 0);
    for (Symbol z = 0; z < q; ++z)
      for (int t = 0; t < 3; ++t) {
        Assignment x(net.messages().size(), std::vector<Symbol>{0});
        if (t > 0)
          for (auto& v : x) v = gen.symbols(1, q);
        x[net.message_index(net.label("z"))] = {z};
        const auto res = evaluate_code(net, code, x);
        for (int l = 1; l <= w; ++l) {
          std::int64_t sum = 0;
          for (int i = 1; i <= m + 1; ++i)
            sum += res.edges.at("B" + std::to_string(l) + ".e" + std::to_string(i))[0];
          CHECK((w * sum) % q == (w * fam.pis[l - 1](z)) % q);
        }
      }
  }
}

TEST_CASE("n2 scalar linear") {
  CHECK(exhaustive(build_n2(2, 1), n2_scalar_linear(2, 1, Z(2))) == Outcome::solution);
  const Verdict v = verify_exhaustive(build_n2(4, 2), n2_scalar_linear(4, 2, Z(2)));
  CHECK(v.outcome == Outcome::solution);
  CHECK(v.checked == 2048);
  expect_precondition([] { n2_scalar_linear(2, 1, Z(3)); });
  for (int m = 2; m <= 6; ++m)
    for (std::int64_t q = 2; q <= 6; ++q)
      if (m % q == 0)
        for (int w = 1; w <= 3; ++w)
          CHECK(verify_linear_basis(build_n2(m, w), n2_scalar_linear(m, w, Z(q))).outcome == Outcome::solution);
}

TEST_CASE("n3 split") {
  CHECK(n3_split(2, 2).alpha == 1);
  CHECK(n3_split(2, 2).s == 1);
  CHECK(n3_split(2, 12).alpha == 2);
  CHECK(n3_split(2, 12).s == 3);
  CHECK(n3_split(3, 9).alpha == 2);
  CHECK(n3_split(5, 80).alpha == 1);
  CHECK(n3_split(5, 80).s == 16);
  expect_precondition([] { n3_split(2, 3); });
  expect_precondition([] { n3_split(4, 8); });
}

TEST_CASE("n3 non-linear codes") {
  const Verdict v = verify_exhaustive(build_n3(2, 2), n3_nonlinear(2, 2));
  CHECK(v.outcome == Outcome::solution);
  CHECK(v.checked == 1024);
  CHECK(n3_nonlinear(2, 2).params.alphabet.size() == 4);
  CHECK_FALSE(n3_nonlinear(2, 2).all_linear());
  const Code c39 = n3_nonlinear(3, 9);
  CHECK(c39.params.alphabet.size() == 27);
  CHECK(verify_random(build_n3(3, 9), c39, 20000, 1).outcome == Outcome::inconclusive);
  CHECK(exhaustive(build_n3(2, 6), n3_nonlinear(2, 6)) == Outcome::solution);
  expect_precondition([] { n3_nonlinear(2, 3); });
  Code bad = n3_nonlinear(2, 2);
  REQUIRE(corrupt_permutation(bad));
  CHECK(exhaustive(build_n3(2, 2), bad) == Outcome::counterexample);
}

TEST_CASE("n3 scalar linear") {
  CHECK(exhaustive(build_n3(2, 2), n3_scalar_linear(2, 2, Z(3))) == Outcome::solution);
  CHECK(verify_linear_basis(build_n3(2, 50), n3_scalar_linear(2, 50, Z(3))).outcome == Outcome::solution);
  CHECK(verify_random(build_n3(2, 50), n3_scalar_linear(2, 50, Z(3)), 5000, 1).outcome == Outcome::inconclusive);
  expect_precondition([] { n3_scalar_linear(2, 2, Z(2)); });
  for (int m1 = 2; m1 <= 5; ++m1)
    for (int m2 = 2; m2 <= 5; ++m2)
      for (std::int64_t q = 2; q <= 6; ++q)
        if (std::gcd(std::gcd<std::int64_t>(q, m1), m2) == 1)
          CHECK(verify_linear_basis(build_n3(m1, m2), n3_scalar_linear(m1, m2, Z(q))).outcome == Outcome::solution);
}

TEST_CASE("n3 fractional codes") {
  const Code a = n3_fractional(2, 2, 2);
  CHECK(a.params.k == 10);
  CHECK(a.params.n == 11);
  const Verdict va = verify_linear_basis(build_n3(2, 2), a);
  CHECK(va.outcome == Outcome::solution);
  CHECK(va.checked == 50);
  const Code b = n3_fractional(2, 4, 2);
  CHECK(b.params.k == 14);
  CHECK(b.params.n == 15);
  CHECK(verify_linear_basis(build_n3(2, 4), b).outcome == Outcome::solution);
  CHECK(verify_linear_basis(build_n3(3, 6), n3_fractional(3, 6, 3)).outcome == Outcome::solution);
  expect_precondition([] { n3_fractional(2, 3, 2); });
  Code bad = n3_fractional(2, 2, 2);
  bump_decoder(bad);
  CHECK(verify_linear_basis(build_n3(2, 2), bad).outcome == Outcome::counterexample);
}

TEST_CASE("product codes") {
  const auto net = build_n3(2, 2);
  const Code prod = product_code(net, {n3_nonlinear(2, 2), n3_scalar_linear(2, 2, Z(3))});
  CHECK(prod.params.alphabet.size() == 12);
  CHECK(exhaustive(net, prod) == Outcome::solution);
  const Code single = product_code(net, {n3_nonlinear(2, 2)});
  CHECK(exhaustive(net, single) == exhaustive(net, n3_nonlinear(2, 2)));
  Code bad_lin = n3_scalar_linear(2, 2, Z(3));
  bump_decoder(bad_lin);
  CHECK(exhaustive(net, product_code(net, {n3_nonlinear(2, 2), bad_lin})) == Outcome::counterexample);
  Code bad_perm = n3_nonlinear(2, 2);
  REQUIRE(corrupt_permutation(bad_perm));
  CHECK(exhaustive(net, product_code(net, {bad_perm, n3_scalar_linear(2, 2, Z(3))})) == Outcome::counterexample);
  CHECK_THROWS_AS(product_code(build_n3(2, 3), {n3_nonlinear(2, 2)}), Error);
}

TEST_CASE("n4 codes") {
  const auto parts4 = n4_parts(4);
  REQUIRE(parts4.size() == 2);
  CHECK(parts4[0].component.name() == "N2(4,1)");
  CHECK(parts4[1].component.name() == "N3(2,2)");
  CHECK(parts4[0].code.all_linear());
  for (const auto& part : parts4) {
    CHECK(part.code.params.alphabet.size() == 4);
    CHECK(exhaustive(part.net, part.code) == Outcome::solution);
  }
  const Code c4 = n4_solution(4);
  CHECK(c4.params.alphabet.size() == 4);
  CHECK(verify_random(build_n4(4), c4, 50000, 1).outcome == Outcome::inconclusive);

  for (const auto& part : n4_parts(6)) {
    CHECK(part.code.params.alphabet.size() == 6);
    CHECK(verify_random(part.net, part.code, 20000, 1).outcome == Outcome::inconclusive);
  }
  for (std::int64_t p : {2, 3, 5, 7, 11}) {
    const Code c = n4_solution(p);
    CHECK(c.all_linear());
    CHECK(c.params.alphabet.size() == p);
    CHECK(verify_linear_basis(build_n4(p), c).outcome == Outcome::solution);
  }
  for (std::int64_t m : {8, 9, 12, 18, 27}) {
    const Code c = n4_solution(m);
    CHECK(c.params.alphabet.size() == m);
    VerifyOptions opts;
    opts.workers = 4;
    CHECK(verify_random(build_n4(m), c, 20000, 1, opts).outcome == Outcome::inconclusive);
  }
}

TEST_CASE("every named construction verifies in its natural mode") {
  std::vector<CodeRequest> reqs;
  for (std::int64_t ring : {2, 3, 4, 5}) {
    reqs.push_back({"n0-linear", 3, 0, 0, 0, 0, ring});
    if (std::gcd<std::int64_t>(ring, 3) == 1) reqs.push_back({"n1-linear", 3, 0, 0, 0, 0, ring});
    if (4 % ring == 0) reqs.push_back({"n2-linear", 4, 2, 0, 0, 0, ring});
    if (std::gcd<std::int64_t>(ring, 2) == 1) reqs.push_back({"n3-linear", 0, 0, 2, 4, 0, ring});
  }
  reqs.push_back({"n1-fractional", 2, 0, 0, 0, 2, 0});
  reqs.push_back({"n2-nonlinear", 2, 2, 0, 0, 0, 0});
  reqs.push_back({"n2-nonlinear", 4, 3, 0, 0, 0, 0});
  reqs.push_back({"n3-nonlinear", 0, 0, 2, 2, 0, 0});
  reqs.push_back({"n3-nonlinear", 0, 0, 2, 12, 0, 0});
  reqs.push_back({"n3-fractional", 0, 0, 2, 2, 2, 0});
  reqs.push_back({"n4", 4, 0, 0, 0, 0, 0});
  reqs.push_back({"n4", 12, 0, 0, 0, 0, 0});
  for (const auto& r : reqs) {
    CAPTURE(r.name);
    CAPTURE(r.ring);
    const NamedCode nc = build_named_code(r);
    const Outcome o = natural(nc);
    CHECK(o != Outcome::counterexample);
    if (nc.natural_mode != "random") CHECK(o == Outcome::solution);
  }
  CHECK(code_names().size() == 9);
  CHECK_THROWS_AS(build_named_code({"n5", 2, 0, 0, 0, 0, 0}), Error);
}
