#pragma once

// Explicit codes for the block networks: scalar linear codes over Z_n or
// GF(p), the fractional linear codes that reach the linear capacity when
// the characteristic divides the block sizes, the permutation-based
// non-linear codes for N2 and N3, Cartesian products and the composite N4
// solution over an alphabet of size m.

#include <cstdint>
#include <string>
#include <vector>

#include "ncnet/builders.hpp"
#include "ncnet/network.hpp"

namespace ncnet {

// Scalar linear codes. `carrier` is a cyclic ring or prime field.
Code n0_scalar_linear(int m, const AlphabetSpec& carrier);
Code n1_scalar_linear(int m, const AlphabetSpec& carrier);        // gcd(|carrier|, m) = 1
Code n2_scalar_linear(int m, int w, const AlphabetSpec& carrier);  // |carrier| divides m
Code n3_scalar_linear(int m1, int m2, const AlphabetSpec& carrier);  // gcd(|carrier|, m1, m2) = 1

// (2m+1, 2m+2) code over GF(p), p | m.
Code n1_fractional(int m, std::int64_t p);
// (2m1+2m2+2, 2m1+2m2+3) code over GF(p), p | m1 and p | m2.
Code n3_fractional(int m1, int m2, std::int64_t p);

// Permutations pi_l of Z_q and the recovery map psi, which sends the tuple
// (scales[0]*pi_1(a), scales[1]*pi_2(a), ...) back to a.
struct PermutationFamily {
  std::string kind;  // "n2" or "n3"
  std::int64_t modulus = 0;
  std::vector<Permutation> pis;
  std::vector<std::int64_t> scales;
  std::vector<std::pair<std::vector<Symbol>, Symbol>> psi;  // ordered by a

  std::vector<Symbol> tuple(Symbol a) const;
  // Header and rows in the published layout (see permutation_table_csv).
  std::vector<std::string> table_header() const;
  std::vector<std::vector<std::int64_t>> table_rows() const;
};

// pi_1..pi_w of Z_{mw}; pi_w is the identity. Scales are all w.
PermutationFamily n2_permutation_family(int m, int w);
// pi_1 (digit rotation) and pi_2 = identity on Z_{m^(alpha+1)}; scales m and s*m^alpha.
PermutationFamily n3_permutation_pair(int m, int alpha, std::int64_t s);

// N2 columns: a, pi_{w-1}(a) .. pi_1(a), w*pi_w(a) .. w*pi_1(a).
// N3 columns: a, pi_1(a), s*m^alpha*a, m*pi_1(a).
std::string permutation_table_csv(const PermutationFamily& fam);

Code n2_nonlinear(int m, int w);       // over Z_{mw}
Code n3_nonlinear(int m1, int m2);     // over Z_{m1^(alpha+1)}, m2 = s*m1^alpha

// Splits m2 = s * m1^alpha with alpha maximal; throws unless alpha >= 1 and
// gcd(s, m1) = 1.
struct N3Split {
  int alpha = 0;
  std::int64_t s = 1;
};
N3Split n3_split(std::int64_t m1, std::int64_t m2);

// Componentwise product of (1,1) codes for `net`; the first factor is the
// most significant digit.
Code product_code(const NetworkSpec& net, const std::vector<Code>& codes);

struct N4Part {
  N4Component component;
  NetworkSpec net;
  Code code;
  std::string recipe;  // human-readable description of the component code
};
std::vector<N4Part> n4_parts(std::int64_t m);
// (1,1) code over an alphabet of size m for build_n4(m).
Code n4_solution(std::int64_t m);

// Named constructions used by the command line.
struct CodeRequest {
  std::string name;  // n0-linear, n1-linear, n1-fractional, n2-linear, n2-nonlinear,
                     // n3-linear, n3-nonlinear, n3-fractional, n4
  std::int64_t m = 0, w = 0, m1 = 0, m2 = 0, p = 0, ring = 0;
};
struct NamedCode {
  NetworkSpec net;
  Code code;
  std::string natural_mode;  // exhaustive, basis or random
};
NamedCode build_named_code(const CodeRequest& req);
std::vector<std::string> code_names();

}  // namespace ncnet
