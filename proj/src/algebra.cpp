#include "ncnet/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <utility>

#include "ncnet/error.hpp"

namespace ncnet {

std::int64_t gcd(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::int64_t> primes_below(std::int64_t bound) {
  std::vector<std::int64_t> out;
  if (bound <= 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(bound), false);
  for (std::int64_t i = 2; i < bound; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j < bound; j += i) composite[j] = true;
  }
  return out;
}

std::optional<std::int64_t> int_inverse_in_zn(std::int64_t n, std::int64_t m) {
  require(n >= 2 && m >= 1, Errc::invalid_argument, "int_inverse_in_zn: need n >= 2 and m >= 1");
  const std::int64_t r = mod(m, n);
  if (r == 0) return std::nullopt;
  const Bezout b = bezout(r, n);
  if (b.g != 1) return std::nullopt;
  return mod(b.u, n);
}

Bezout bezout(std::int64_t a, std::int64_t b) {
  require(a >= 1 && b >= 1, Errc::invalid_argument, "bezout: arguments must be positive");
  std::int64_t old_r = a, r = b;
  std::int64_t old_s = 1, s = 0;
  std::int64_t old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    old_r = std::exchange(r, old_r - q * r);
    old_s = std::exchange(s, old_s - q * s);
    old_t = std::exchange(t, old_t - q * t);
  }
  return {old_r, old_s, old_t};
}

std::int64_t PrimeSignature::prime_power(std::size_t i) const {
  return ipow(primes.at(i), exponents.at(i));
}

PrimeSignature factorize(std::int64_t m) {
  require(m >= 2 && m <= kMaxFactorize, Errc::invalid_argument,
          "factorize: m must lie in [2, " + std::to_string(kMaxFactorize) + "]");
  PrimeSignature sig;
  sig.m = m;
  std::int64_t rest = m;
  for (std::int64_t p = 2; p * p <= rest; ++p) {
    if (rest % p != 0) continue;
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    sig.primes.push_back(p);
    sig.exponents.push_back(e);
  }
  if (rest > 1) {
    sig.primes.push_back(rest);
    sig.exponents.push_back(1);
  }
  return sig;
}

std::int64_t f_value(const PrimeSignature& sig) {
  std::int64_t f = 1;
  for (std::size_t i = 0; i < sig.omega(); ++i) f *= ipow(sig.primes[i], sig.exponents[i] - 1);
  return f;
}

int mu_value(const PrimeSignature& sig, std::size_t i) {
  require(i < sig.omega(), Errc::invalid_argument, "mu_value: prime index out of range");
  const std::int64_t f = f_value(sig);
  int alpha = 0;
  for (std::int64_t pw = 1; pw < f; pw *= sig.primes[i]) ++alpha;
  return alpha;
}

std::int64_t g_value(const PrimeSignature& sig, std::size_t i) {
  require(i < sig.omega(), Errc::invalid_argument, "g_value: prime index out of range");
  std::int64_t g = ipow(sig.primes[i], sig.exponents[i] - 1);
  for (std::size_t j = 0; j < sig.omega(); ++j)
    if (j != i) g *= ipow(sig.primes[j], mu_value(sig, j));
  return g;
}

// ---------------------------------------------------------------------------

AlphabetSpec AlphabetSpec::plain_set(std::int64_t size) {
  require(size >= 2, Errc::invalid_argument, "alphabet size must be at least 2");
  AlphabetSpec a;
  a.kind_ = Kind::plain_set;
  a.size_ = size;
  return a;
}

AlphabetSpec AlphabetSpec::cyclic_ring(std::int64_t n) {
  require(n >= 2, Errc::invalid_argument, "Z_n requires n >= 2");
  AlphabetSpec a;
  a.kind_ = Kind::cyclic_ring;
  a.size_ = n;
  return a;
}

AlphabetSpec AlphabetSpec::prime_field(std::int64_t p) {
  require(is_prime(p), Errc::invalid_argument, "GF(p) requires a prime p, got " + std::to_string(p));
  AlphabetSpec a;
  a.kind_ = Kind::prime_field;
  a.size_ = p;
  return a;
}

AlphabetSpec AlphabetSpec::abelian_group(std::vector<std::int64_t> orders) {
  require(!orders.empty(), Errc::invalid_argument, "abelian group needs at least one cyclic factor");
  AlphabetSpec a;
  a.kind_ = Kind::abelian_group;
  a.size_ = 1;
  for (auto o : orders) {
    require(o >= 2, Errc::invalid_argument, "cyclic factor orders must be >= 2");
    a.size_ *= o;
  }
  a.orders_ = std::move(orders);
  return a;
}

AlphabetSpec AlphabetSpec::product(std::vector<AlphabetSpec> components) {
  require(!components.empty(), Errc::invalid_argument, "product alphabet needs components");
  AlphabetSpec a;
  a.kind_ = Kind::product;
  a.size_ = 1;
  for (const auto& c : components) a.size_ *= c.size();
  a.components_ = std::move(components);
  return a;
}

std::vector<std::int64_t> AlphabetSpec::radices() const {
  switch (kind_) {
    case Kind::abelian_group:
      return orders_;
    case Kind::product: {
      std::vector<std::int64_t> r;
      for (const auto& c : components_) r.push_back(c.size());
      return r;
    }
    default:
      return {size_};
  }
}

std::int64_t AlphabetSpec::modulus() const {
  require(is_ring(), Errc::invalid_argument, "alphabet " + name() + " is not Z_n or GF(p)");
  return size_;
}

bool AlphabetSpec::has_group_law() const {
  switch (kind_) {
    case Kind::plain_set:
      return false;
    case Kind::product:
      return std::all_of(components_.begin(), components_.end(),
                         [](const AlphabetSpec& c) { return c.has_group_law(); });
    default:
      return true;
  }
}

std::vector<Symbol> AlphabetSpec::split(Symbol s) const {
  const auto rad = radices();
  std::vector<Symbol> digits(rad.size());
  std::int64_t rest = s;
  for (std::size_t i = rad.size(); i-- > 0;) {
    digits[i] = static_cast<Symbol>(rest % rad[i]);
    rest /= rad[i];
  }
  return digits;
}

Symbol AlphabetSpec::join(std::span<const Symbol> digits) const {
  const auto rad = radices();
  require(digits.size() == rad.size(), Errc::invalid_argument, "mixed-radix digit count mismatch");
  std::int64_t v = 0;
  for (std::size_t i = 0; i < rad.size(); ++i) v = v * rad[i] + digits[i];
  return static_cast<Symbol>(v);
}

Symbol AlphabetSpec::add(Symbol a, Symbol b) const {
  switch (kind_) {
    case Kind::cyclic_ring:
    case Kind::prime_field:
      return static_cast<Symbol>((static_cast<std::int64_t>(a) + b) % size_);
    case Kind::abelian_group: {
      auto da = split(a), db = split(b);
      for (std::size_t i = 0; i < da.size(); ++i)
        da[i] = static_cast<Symbol>((static_cast<std::int64_t>(da[i]) + db[i]) % orders_[i]);
      return join(da);
    }
    case Kind::product: {
      auto da = split(a), db = split(b);
      for (std::size_t i = 0; i < da.size(); ++i) da[i] = components_[i].add(da[i], db[i]);
      return join(da);
    }
    case Kind::plain_set:
      break;
  }
  fail(Errc::invalid_argument, "plain set " + name() + " has no group law");
}

Symbol AlphabetSpec::negate(Symbol a) const {
  switch (kind_) {
    case Kind::cyclic_ring:
    case Kind::prime_field:
      return static_cast<Symbol>((size_ - a) % size_);
    case Kind::abelian_group: {
      auto d = split(a);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<Symbol>((orders_[i] - d[i]) % orders_[i]);
      return join(d);
    }
    case Kind::product: {
      auto d = split(a);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = components_[i].negate(d[i]);
      return join(d);
    }
    case Kind::plain_set:
      break;
  }
  fail(Errc::invalid_argument, "plain set " + name() + " has no group law");
}

Symbol AlphabetSpec::scale(Symbol a, std::int64_t times) const {
  Symbol acc = 0;
  for (std::int64_t i = 0; i < times; ++i) acc = add(acc, a);
  return acc;
}

std::string AlphabetSpec::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::plain_set:
      os << "Set(" << size_ << ")";
      break;
    case Kind::cyclic_ring:
      os << "Z" << size_;
      break;
    case Kind::prime_field:
      os << "GF(" << size_ << ")";
      break;
    case Kind::abelian_group:
      for (std::size_t i = 0; i < orders_.size(); ++i) os << (i ? "xZ" : "Z") << orders_[i];
      break;
    case Kind::product:
      for (std::size_t i = 0; i < components_.size(); ++i) os << (i ? " x " : "") << components_[i].name();
      break;
  }
  return os.str();
}

bool operator==(const AlphabetSpec& a, const AlphabetSpec& b) {
  return a.kind_ == b.kind_ && a.size_ == b.size_ && a.orders_ == b.orders_ && a.components_ == b.components_;
}

std::string to_string(AlphabetSpec::Kind kind) {
  switch (kind) {
    case AlphabetSpec::Kind::plain_set:
      return "plain_set";
    case AlphabetSpec::Kind::cyclic_ring:
      return "cyclic_ring";
    case AlphabetSpec::Kind::prime_field:
      return "prime_field";
    case AlphabetSpec::Kind::abelian_group:
      return "abelian_group";
    case AlphabetSpec::Kind::product:
      return "product";
  }
  return "unknown";
}

namespace {

// Partitions of n with parts in non-increasing order, reverse lexicographic.
void partitions(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<AlphabetSpec> abelian_groups_of_order(std::int64_t n) {
  const PrimeSignature sig = factorize(n);
  std::vector<std::vector<std::int64_t>> acc{{}};
  for (std::size_t i = 0; i < sig.omega(); ++i) {
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    partitions(sig.exponents[i], sig.exponents[i], cur, parts);
    std::vector<std::vector<std::int64_t>> next;
    for (const auto& prefix : acc) {
      for (const auto& part : parts) {
        auto orders = prefix;
        for (int e : part) orders.push_back(ipow(sig.primes[i], e));
        next.push_back(std::move(orders));
      }
    }
    acc = std::move(next);
  }
  std::vector<AlphabetSpec> out;
  out.reserve(acc.size());
  for (auto& orders : acc) out.push_back(AlphabetSpec::abelian_group(std::move(orders)));
  return out;
}

// ---------------------------------------------------------------------------

Permutation::Permutation(std::vector<Symbol> mapping) : map_(std::move(mapping)) {
  std::vector<bool> seen(map_.size(), false);
  for (Symbol v : map_) {
    require(v < map_.size() && !seen[v], Errc::invalid_argument, "permutation mapping is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t size) {
  std::vector<Symbol> m(size);
  std::iota(m.begin(), m.end(), Symbol{0});
  Permutation p;
  p.map_ = std::move(m);
  return p;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < map_.size(); ++i)
    if (map_[i] != i) return false;
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<Symbol> inv(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = static_cast<Symbol>(i);
  Permutation p;
  p.map_ = std::move(inv);
  return p;
}

Permutation Permutation::compose(const Permutation& other) const {
  require(size() == other.size(), Errc::invalid_argument, "permutation sizes differ");
  std::vector<Symbol> m(size());
  for (std::size_t i = 0; i < size(); ++i) m[i] = map_[other.map_[i]];
  Permutation p;
  p.map_ = std::move(m);
  return p;
}

// ---------------------------------------------------------------------------

RingMatrix::RingMatrix(std::size_t rows, std::size_t cols, const AlphabetSpec& carrier)
    : rows_(rows), cols_(cols), modulus_(carrier.modulus()),
      field_(carrier.kind() == AlphabetSpec::Kind::prime_field || is_prime(carrier.modulus())),
      data_(rows * cols, 0) {}

RingMatrix::RingMatrix(std::size_t rows, std::size_t cols, const AlphabetSpec& carrier,
                       std::vector<std::int64_t> entries)
    : RingMatrix(rows, cols, carrier) {
  require(entries.size() == rows * cols, Errc::invalid_argument, "matrix entry count does not match shape");
  for (std::size_t i = 0; i < entries.size(); ++i) data_[i] = mod(entries[i], modulus_);
}

RingMatrix RingMatrix::identity(std::size_t n, const AlphabetSpec& carrier) {
  RingMatrix m(n, n, carrier);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

RingMatrix RingMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows, const AlphabetSpec& carrier) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<std::int64_t> flat;
  for (const auto& r : rows) {
    require(r.size() == cols, Errc::invalid_argument, "ragged matrix rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return RingMatrix(rows.size(), cols, carrier, std::move(flat));
}

AlphabetSpec RingMatrix::carrier() const {
  return field_ ? AlphabetSpec::prime_field(modulus_) : AlphabetSpec::cyclic_ring(modulus_);
}

bool RingMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](std::int64_t v) { return v == 0; });
}

RingMatrix RingMatrix::row_block(std::size_t first, std::size_t count) const {
  require(first + count <= rows_, Errc::invalid_argument, "row block out of range");
  RingMatrix out(count, cols_, carrier());
  std::copy(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((first + count) * cols_), out.data_.begin());
  return out;
}

RingMatrix mat_mul(const RingMatrix& a, const RingMatrix& b) {
  require(a.modulus() == b.modulus(), Errc::invalid_argument, "mat_mul: carriers differ");
  require(a.cols() == b.rows(), Errc::invalid_argument, "mat_mul: dimension mismatch");
  RingMatrix out(a.rows(), b.cols(), a.carrier());
  const std::int64_t q = a.modulus();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      std::int64_t s = 0;
      for (std::size_t t = 0; t < a.cols(); ++t) s = (s + a(i, t) * b(t, j)) % q;
      out.set(i, j, s);
    }
  return out;
}

RingMatrix mat_add(const RingMatrix& a, const RingMatrix& b) {
  require(a.modulus() == b.modulus(), Errc::invalid_argument, "mat_add: carriers differ");
  require(a.rows() == b.rows() && a.cols() == b.cols(), Errc::invalid_argument, "mat_add: dimension mismatch");
  RingMatrix out(a.rows(), a.cols(), a.carrier());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, a(i, j) + b(i, j));
  return out;
}

RingMatrix mat_identity(std::size_t n, const AlphabetSpec& carrier) { return RingMatrix::identity(n, carrier); }

RingMatrix mat_stack(const RingMatrix& top, const RingMatrix& bottom) {
  require(top.modulus() == bottom.modulus() && top.cols() == bottom.cols(), Errc::invalid_argument,
          "mat_stack: incompatible blocks");
  std::vector<std::int64_t> e = top.entries();
  e.insert(e.end(), bottom.entries().begin(), bottom.entries().end());
  return RingMatrix(top.rows() + bottom.rows(), top.cols(), top.carrier(), std::move(e));
}

namespace {

void require_field(const RingMatrix& m, const char* op) {
  require(m.over_field(), Errc::invalid_argument, std::string(op) + ": carrier must be a prime field");
}

std::int64_t field_inv(std::int64_t a, std::int64_t p) { return *int_inverse_in_zn(p, a); }

// Row-reduces `work` in place, applying the same operations to `track` when
// given. Returns pivot columns in order.
std::vector<std::size_t> eliminate(std::vector<std::vector<std::int64_t>>& work, std::int64_t p,
                                   std::vector<std::vector<std::int64_t>>* track) {
  std::vector<std::size_t> pivots;
  const std::size_t rows = work.size();
  const std::size_t cols = rows ? work[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && work[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(work[r], work[piv]);
    if (track) std::swap((*track)[r], (*track)[piv]);
    const std::int64_t inv = field_inv(work[r][c], p);
    for (auto& v : work[r]) v = v * inv % p;
    if (track)
      for (auto& v : (*track)[r]) v = v * inv % p;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || work[i][c] == 0) continue;
      const std::int64_t f = work[i][c];
      for (std::size_t j = 0; j < cols; ++j) work[i][j] = mod(work[i][j] - f * work[r][j], p);
      if (track)
        for (std::size_t j = 0; j < (*track)[i].size(); ++j)
          (*track)[i][j] = mod((*track)[i][j] - f * (*track)[r][j], p);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<std::vector<std::int64_t>> to_rows(const RingMatrix& m) {
  std::vector<std::vector<std::int64_t>> rows(m.rows(), std::vector<std::int64_t>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

}  // namespace

std::size_t mat_rank(const RingMatrix& m) {
  require_field(m, "mat_rank");
  auto rows = to_rows(m);
  return eliminate(rows, m.modulus(), nullptr).size();
}

RingMatrix reduce_to_identity_block(const RingMatrix& a) {
  require_field(a, "reduce_to_identity_block");
  const std::size_t n = a.rows(), k = a.cols();
  require(k <= n && mat_rank(a) == k, Errc::invalid_argument, "reduce_to_identity_block: input must have full column rank");
  auto work = to_rows(a);
  auto track = to_rows(RingMatrix::identity(n, a.carrier()));
  eliminate(work, a.modulus(), &track);
  // Full column rank: the reduced form is [I_k; 0] and `track` holds B.
  std::vector<std::int64_t> flat;
  for (const auto& r : track) flat.insert(flat.end(), r.begin(), r.end());
  return RingMatrix(n, n, a.carrier(), std::move(flat));
}

RingMatrix complement_rows(const RingMatrix& a) {
  require_field(a, "complement_rows");
  const std::size_t n = a.cols();
  const std::int64_t p = a.modulus();
  auto basis = to_rows(a);
  std::size_t rank = eliminate(basis, p, nullptr).size();
  basis.resize(rank);
  std::vector<std::vector<std::int64_t>> extra;
  for (std::size_t u = 0; u < n && rank + extra.size() < n; ++u) {
    auto trial = basis;
    for (const auto& e : extra) trial.push_back(e);
    std::vector<std::int64_t> unit(n, 0);
    unit[u] = 1;
    trial.push_back(unit);
    if (eliminate(trial, p, nullptr).size() == rank + extra.size() + 1) extra.push_back(unit);
  }
  std::vector<std::int64_t> flat;
  for (const auto& r : extra) flat.insert(flat.end(), r.begin(), r.end());
  return RingMatrix(extra.size(), n, a.carrier(), std::move(flat));
}

std::optional<RingMatrix> mat_inverse(const RingMatrix& m) {
  require_field(m, "mat_inverse");
  require(m.rows() == m.cols(), Errc::invalid_argument, "mat_inverse: matrix must be square");
  auto work = to_rows(m);
  auto track = to_rows(RingMatrix::identity(m.rows(), m.carrier()));
  if (eliminate(work, m.modulus(), &track).size() != m.rows()) return std::nullopt;
  std::vector<std::int64_t> flat;
  for (const auto& r : track) flat.insert(flat.end(), r.begin(), r.end());
  return RingMatrix(m.rows(), m.cols(), m.carrier(), std::move(flat));
}

}  // namespace ncnet
