#pragma once

// Finite algebra used throughout the toolkit: Z_n rings, prime fields,
// finite Abelian groups, permutations, matrices over Z_n and the
// number-theoretic helpers that drive the composite network construction.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ncnet {

using Symbol = std::uint32_t;

// ---------------------------------------------------------------------------
// Integer helpers

std::int64_t gcd(std::int64_t a, std::int64_t b);
std::int64_t ipow(std::int64_t base, int exp);
bool is_prime(std::int64_t n);
// Primes p with 2 <= p < bound, ascending.
std::vector<std::int64_t> primes_below(std::int64_t bound);
// Canonical residue of a modulo n in [0, n).
inline std::int64_t mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

// Inverse of (m mod n) in Z_n, present exactly when gcd(n, m) = 1.
std::optional<std::int64_t> int_inverse_in_zn(std::int64_t n, std::int64_t m);

struct Bezout {
  std::int64_t g;
  std::int64_t u;
  std::int64_t v;
};

// Extended Euclid: g = gcd(a, b) = u*a + v*b.
Bezout bezout(std::int64_t a, std::int64_t b);

// ---------------------------------------------------------------------------
// Prime signature of m and the derived functions f, mu, g.

struct PrimeSignature {
  std::int64_t m = 0;
  std::vector<std::int64_t> primes;  // strictly increasing
  std::vector<int> exponents;        // all >= 1

  std::size_t omega() const { return primes.size(); }
  std::int64_t prime_power(std::size_t i) const;
};

inline constexpr std::int64_t kMaxFactorize = 1'000'000;

// Trial division; 2 <= m <= kMaxFactorize.
PrimeSignature factorize(std::int64_t m);

// prod p_i^(gamma_i - 1)
std::int64_t f_value(const PrimeSignature& sig);
// Smallest alpha >= 0 with p_i^alpha >= f(m). Index i is zero-based.
int mu_value(const PrimeSignature& sig, std::size_t i);
// p_i^(gamma_i - 1) * prod_{j != i} p_j^mu(m, j). Index i is zero-based.
std::int64_t g_value(const PrimeSignature& sig, std::size_t i);

// ---------------------------------------------------------------------------
// Alphabets

class AlphabetSpec {
 public:
  enum class Kind { plain_set, cyclic_ring, prime_field, abelian_group, product };

  static AlphabetSpec plain_set(std::int64_t size);
  static AlphabetSpec cyclic_ring(std::int64_t n);
  static AlphabetSpec prime_field(std::int64_t p);
  // Direct sum of cyclic groups with the given orders (each >= 2).
  static AlphabetSpec abelian_group(std::vector<std::int64_t> orders);
  static AlphabetSpec product(std::vector<AlphabetSpec> components);

  Kind kind() const { return kind_; }
  std::int64_t size() const { return size_; }
  // Cyclic orders (abelian_group) or component sizes (product); {size} for
  // the single-carrier kinds.
  std::vector<std::int64_t> radices() const;
  const std::vector<std::int64_t>& cyclic_orders() const { return orders_; }
  const std::vector<AlphabetSpec>& components() const { return components_; }
  // Modulus of a cyclic ring / prime field.
  std::int64_t modulus() const;
  bool is_ring() const { return kind_ == Kind::cyclic_ring || kind_ == Kind::prime_field; }
  bool has_group_law() const;

  // Group law (requires has_group_law()).
  Symbol add(Symbol a, Symbol b) const;
  Symbol negate(Symbol a) const;
  Symbol sub(Symbol a, Symbol b) const { return add(a, negate(b)); }
  // a added to itself `times` times.
  Symbol scale(Symbol a, std::int64_t times) const;

  // Mixed-radix split/join; leftmost radix is the most significant digit.
  std::vector<Symbol> split(Symbol s) const;
  Symbol join(std::span<const Symbol> digits) const;

  std::string name() const;

  friend bool operator==(const AlphabetSpec& a, const AlphabetSpec& b);

 private:
  AlphabetSpec() = default;

  Kind kind_ = Kind::plain_set;
  std::int64_t size_ = 0;
  std::vector<std::int64_t> orders_;
  std::vector<AlphabetSpec> components_;
};

std::string to_string(AlphabetSpec::Kind kind);

// One representative per isomorphism class, as a list of prime-power cyclic
// orders. Primes ascend; within a prime, exponent partitions are listed in
// reverse lexicographic order so Z_{p^k} comes first.
std::vector<AlphabetSpec> abelian_groups_of_order(std::int64_t n);

// ---------------------------------------------------------------------------
// Permutations of {0, ..., size-1}

class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<Symbol> mapping);  // throws if not a bijection

  static Permutation identity(std::size_t size);

  std::size_t size() const { return map_.size(); }
  Symbol operator()(Symbol a) const { return map_[a]; }
  const std::vector<Symbol>& mapping() const { return map_; }
  bool is_identity() const;
  Permutation inverse() const;
  // (this o other)(a) = this(other(a))
  Permutation compose(const Permutation& other) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Symbol> map_;
};

// ---------------------------------------------------------------------------
// Matrices over Z_n / GF(p)

class RingMatrix {
 public:
  RingMatrix(std::size_t rows, std::size_t cols, const AlphabetSpec& carrier);
  RingMatrix(std::size_t rows, std::size_t cols, const AlphabetSpec& carrier,
             std::vector<std::int64_t> entries);

  static RingMatrix identity(std::size_t n, const AlphabetSpec& carrier);
  static RingMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows,
                              const AlphabetSpec& carrier);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::int64_t modulus() const { return modulus_; }
  bool over_field() const { return field_; }
  AlphabetSpec carrier() const;

  std::int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, std::int64_t v) { data_[r * cols_ + c] = mod(v, modulus_); }
  const std::vector<std::int64_t>& entries() const { return data_; }
  bool is_zero() const;

  RingMatrix row_block(std::size_t first, std::size_t count) const;

  friend bool operator==(const RingMatrix&, const RingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::int64_t modulus_ = 2;
  bool field_ = false;
  std::vector<std::int64_t> data_;
};

RingMatrix mat_mul(const RingMatrix& a, const RingMatrix& b);
RingMatrix mat_add(const RingMatrix& a, const RingMatrix& b);
RingMatrix mat_identity(std::size_t n, const AlphabetSpec& carrier);
// Vertical concatenation.
RingMatrix mat_stack(const RingMatrix& top, const RingMatrix& bottom);

// Row rank over a prime field.
std::size_t mat_rank(const RingMatrix& m);
// For an n x k matrix A of rank k, a nonsingular B with B*A = [I_k; 0].
RingMatrix reduce_to_identity_block(const RingMatrix& a);
// (n - rank) x n matrix Q whose rows complete a row basis of A (m x n) to a
// basis of GF(p)^n; unit vectors are tried in index order.
RingMatrix complement_rows(const RingMatrix& a);
// Inverse of a square matrix over a prime field; empty when singular.
std::optional<RingMatrix> mat_inverse(const RingMatrix& m);

}  // namespace ncnet
