#include "ncnet/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "ncnet/error.hpp"
#include "ncnet/serialize.hpp"

namespace ncnet {

std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::found: return "found";
    case SearchStatus::exhausted: return "exhausted";
    case SearchStatus::capped: return "capped";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// a^b, saturating at limit+1.
std::uint64_t sat_pow(std::uint64_t a, std::uint64_t b, std::uint64_t limit) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < b; ++i) {
    if (a != 0 && r > limit / a) return limit + 1;
    r *= a;
  }
  return r;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b, std::uint64_t limit) {
  if (a != 0 && b > limit / a) return limit + 1;
  return a * b;
}

// ---------------------------------------------------------------------------
// Scalar linear search

using Form = std::vector<std::int64_t>;  // coefficients over messages

// True iff `target` lies in the Z_q-span of `rows`.
bool in_span(const std::vector<const Form*>& rows, const Form& target, std::int64_t q, bool prime) {
  const std::size_t M = target.size();
  if (prime) {
    // Gaussian elimination on [rows; target]; target is in the span iff it
    // reduces to zero.
    std::vector<Form> basis;
    std::vector<std::size_t> pivots;
    auto reduce = [&](Form v) {
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const std::int64_t c = v[pivots[b]];
        if (c == 0) continue;
        for (std::size_t t = 0; t < M; ++t) v[t] = mod(v[t] - c * basis[b][t], q);
      }
      return v;
    };
    for (const Form* r : rows) {
      Form v = reduce(*r);
      std::size_t p = 0;
      while (p < M && v[p] == 0) ++p;
      if (p == M) continue;
      const std::int64_t inv = *int_inverse_in_zn(q, v[p]);
      for (auto& c : v) c = mod(c * inv, q);
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const std::int64_t c = basis[b][p];
        if (c == 0) continue;
        for (std::size_t t = 0; t < M; ++t) basis[b][t] = mod(basis[b][t] - c * v[t], q);
      }
      basis.push_back(std::move(v));
      pivots.push_back(p);
    }
    const Form rest = reduce(target);
    return std::all_of(rest.begin(), rest.end(), [](std::int64_t c) { return c == 0; });
  }
  // Z_q with q composite: the span as a set, grown one generator at a time.
  // Forms are keyed by their base-q value; small spaces use a flat bitmap.
  auto key = [&](const Form& v) {
    std::uint64_t k = 0;
    for (std::int64_t c : v) k = k * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(c);
    return k;
  };
  std::uint64_t space = 1;
  for (std::size_t t = 0; t < M && space <= (std::uint64_t{1} << 26); ++t) space *= static_cast<std::uint64_t>(q);
  const bool flat = space <= (std::uint64_t{1} << 26);
  std::vector<bool> bitmap(flat ? space : 0, false);
  std::unordered_map<std::uint64_t, bool> hashed;
  auto insert = [&](const Form& v) {
    const std::uint64_t k = key(v);
    if (flat) {
      if (bitmap[k]) return false;
      bitmap[k] = true;
      return true;
    }
    return hashed.emplace(k, true).second;
  };
  std::vector<Form> span{Form(M, 0)};
  insert(span[0]);
  for (const Form* r : rows) {
    const std::size_t before = span.size();
    for (std::size_t s = 0; s < before; ++s) {
      Form v = span[s];
      for (std::int64_t c = 1; c < q; ++c) {
        for (std::size_t t = 0; t < M; ++t) {
          v[t] += (*r)[t];
          if (v[t] >= q) v[t] -= q;
        }
        if (insert(v)) span.push_back(v);
      }
    }
  }
  const std::uint64_t want = key(target);
  return flat ? bitmap[want] : hashed.count(want) != 0;
}

// Lexicographically least decoder coefficients, or empty.
std::optional<std::vector<std::int64_t>> find_decoder(const std::vector<const Form*>& rows, const Form& target,
                                                      std::int64_t q) {
  const std::size_t r = rows.size(), M = target.size();
  std::vector<std::int64_t> d(r, 0);
  Form acc(M);
  while (true) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t i = 0; i < r; ++i)
      if (d[i] != 0)
        for (std::size_t t = 0; t < M; ++t) acc[t] = mod(acc[t] + d[i] * (*rows[i])[t], q);
    if (acc == target) return d;
    std::size_t pos = r;
    while (pos > 0) {
      --pos;
      if (++d[pos] < q) break;
      d[pos] = 0;
      if (pos == 0) return std::nullopt;
    }
    if (r == 0) return std::nullopt;
  }
}

struct LinearSearch {
  const NetworkSpec& net;
  Topology topo;
  AlphabetSpec carrier;
  std::int64_t q = 2;
  bool prime = false;
  std::size_t M = 0;

  std::vector<std::size_t> order;                           // searched edges
  std::vector<int> position;                                // edge -> index in order or -1
  std::vector<std::vector<std::int64_t>> candidates;        // per order slot, flattened tuples
  std::vector<std::size_t> arity;                           // per edge, tail arity
  std::vector<std::vector<std::size_t>> compute_at;         // depth+1 -> edges
  std::vector<std::vector<std::size_t>> checks_at;          // depth+1 -> demands
  std::vector<bool> relevant;                               // edge reaches a demanding receiver

  LinearSearch(const NetworkSpec& n, const AlphabetSpec& c) : net(n), topo(validate_network(n)), carrier(c) {
    require(c.is_ring(), Errc::invalid_argument, "linear search needs a cyclic ring or prime field");
    q = c.size();
    prime = is_prime(q);
    M = net.messages().size();
    const std::size_t E = net.edges().size();
    arity.resize(E);
    for (std::size_t e = 0; e < E; ++e) {
      const std::size_t t = net.edges()[e].tail;
      arity[e] = topo.messages_at[t].size() + topo.in_edges[t].size();
    }
    // Edges upstream of some demanding receiver.
    relevant.assign(E, false);
    std::vector<bool> node_rel(net.node_count(), false);
    for (const Demand& d : net.demands()) node_rel[d.receiver] = true;
    for (auto it = topo.node_order.rbegin(); it != topo.node_order.rend(); ++it) {
      if (!node_rel[*it]) continue;
      for (std::size_t e : topo.in_edges[*it]) {
        relevant[e] = true;
        node_rel[net.edges()[e].tail] = true;
      }
    }
    // Upstream searched edges per edge.
    std::vector<std::vector<std::size_t>> up(E);
    for (std::size_t e : topo.edge_order) {
      std::vector<std::size_t> u;
      for (std::size_t in : topo.in_edges[net.edges()[e].tail]) u.insert(u.end(), up[in].begin(), up[in].end());
      if (relevant[e] && arity[e] >= 2) u.push_back(e);
      std::sort(u.begin(), u.end());
      u.erase(std::unique(u.begin(), u.end()), u.end());
      up[e] = std::move(u);
    }
    std::vector<std::size_t> topo_pos(E);
    for (std::size_t i = 0; i < E; ++i) topo_pos[topo.edge_order[i]] = i;
    const std::size_t D = net.demands().size();
    std::vector<std::vector<std::size_t>> need(D);
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t in : topo.in_edges[net.demands()[d].receiver])
        need[d].insert(need[d].end(), up[in].begin(), up[in].end());
      std::sort(need[d].begin(), need[d].end());
      need[d].erase(std::unique(need[d].begin(), need[d].end()), need[d].end());
    }
    // Greedy order: repeatedly complete the demand with fewest open edges.
    position.assign(E, -1);
    std::vector<bool> done(D, false);
    for (std::size_t round = 0; round < D; ++round) {
      std::size_t best = D, best_open = 0;
      for (std::size_t d = 0; d < D; ++d) {
        if (done[d]) continue;
        const std::size_t open = static_cast<std::size_t>(
            std::count_if(need[d].begin(), need[d].end(), [&](std::size_t e) { return position[e] < 0; }));
        if (best == D || open < best_open) best = d, best_open = open;
      }
      done[best] = true;
      std::vector<std::size_t> add;
      for (std::size_t e : need[best])
        if (position[e] < 0) add.push_back(e);
      std::sort(add.begin(), add.end(), [&](std::size_t a, std::size_t b) { return topo_pos[a] < topo_pos[b]; });
      for (std::size_t e : add) {
        position[e] = static_cast<int>(order.size());
        order.push_back(e);
      }
    }
    auto depth_of = [&](const std::vector<std::size_t>& s) {
      int dpt = -1;
      for (std::size_t e : s) dpt = std::max(dpt, position[e]);
      return dpt;
    };
    compute_at.assign(order.size() + 1, {});
    checks_at.assign(order.size() + 1, {});
    for (std::size_t e : topo.edge_order)
      if (relevant[e]) compute_at[depth_of(up[e]) + 1].push_back(e);
    for (std::size_t d = 0; d < D; ++d) checks_at[depth_of(need[d]) + 1].push_back(d);
  }

  // Coefficient tuples whose first nonzero entry is least in its unit orbit.
  std::vector<std::int64_t> canonical_tuples(std::size_t a, std::uint64_t cap) const {
    const std::uint64_t total = sat_pow(static_cast<std::uint64_t>(q), a, cap);
    if (total > cap) fail(Errc::cap_exceeded, "coefficient space of one edge exceeds the cap");
    std::vector<bool> canon(q, false);
    for (std::int64_t c = 0; c < q; ++c) {
      std::int64_t least = c;
      for (std::int64_t u = 1; u < q; ++u)
        if (gcd(u, q) == 1) least = std::min(least, mod(u * c, q));
      canon[c] = least == c;
    }
    std::vector<std::int64_t> out;
    std::vector<std::int64_t> t(a, 0);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t v = idx;
      for (std::size_t i = a; i-- > 0;) {
        t[i] = static_cast<std::int64_t>(v % static_cast<std::uint64_t>(q));
        v /= static_cast<std::uint64_t>(q);
      }
      std::size_t f = 0;
      while (f < a && t[f] == 0) ++f;
      if (f < a && !canon[t[f]]) continue;
      out.insert(out.end(), t.begin(), t.end());
    }
    return out;
  }

  struct State {
    std::vector<Form> forms;                   // per edge
    std::vector<const std::int64_t*> choice;   // per order slot
  };

  void compute(State& st, std::size_t e) const {
    const std::size_t t = net.edges()[e].tail;
    Form f(M, 0);
    const std::int64_t* coef = position[e] >= 0 ? st.choice[position[e]] : nullptr;
    std::size_t pos = 0;
    auto addc = [&](std::int64_t c, const Form& in) {
      if (c == 0) return;
      for (std::size_t i = 0; i < M; ++i) f[i] = mod(f[i] + c * in[i], q);
    };
    for (std::size_t msg : topo.messages_at[t]) {
      const std::int64_t c = coef ? coef[pos] : 1;
      if (c != 0) f[msg] = mod(f[msg] + c, q);
      ++pos;
    }
    for (std::size_t in : topo.in_edges[t]) addc(coef ? coef[pos] : 1, st.forms[in]), ++pos;
    if (!coef && arity[e] != 1) std::fill(f.begin(), f.end(), 0);
    st.forms[e] = std::move(f);
  }

  // Receiver inputs as forms; `own` holds unit rows for generated messages.
  void receiver_rows(const State& st, std::size_t d, std::vector<Form>& own, std::vector<const Form*>& rows) const {
    const std::size_t r = net.demands()[d].receiver;
    own.clear();
    for (std::size_t msg : topo.messages_at[r]) {
      Form u(M, 0);
      u[msg] = 1;
      own.push_back(std::move(u));
    }
    rows.clear();
    for (const Form& f : own) rows.push_back(&f);
    for (std::size_t in : topo.in_edges[r]) rows.push_back(&st.forms[in]);
  }

  bool check(const State& st, std::size_t d) const {
    std::vector<Form> own;
    std::vector<const Form*> rows;
    receiver_rows(st, d, own, rows);
    Form target(M, 0);
    target[net.demands()[d].message] = 1;
    return in_span(rows, target, q, prime);
  }

  bool settle(State& st, std::size_t level) const {
    for (std::size_t e : compute_at[level]) compute(st, e);
    for (std::size_t d : checks_at[level])
      if (!check(st, d)) return false;
    return true;
  }

  Code build(const State& st) const {
    Code code;
    code.params = {1, 1, carrier};
    auto matrix1 = [&](std::int64_t v) {
      RingMatrix mtx(1, 1, carrier);
      mtx.set(0, 0, v);
      return mtx;
    };
    for (std::size_t e = 0; e < net.edges().size(); ++e) {
      if (arity[e] == 1 && position[e] < 0 && relevant[e]) continue;  // identity copy
      if (arity[e] == 1 && !relevant[e]) continue;
      LinearForm lf;
      lf.modulus = q;
      for (std::size_t i = 0; i < arity[e]; ++i)
        lf.blocks.push_back(matrix1(position[e] >= 0 ? st.choice[position[e]][i] : 0));
      code.edge_functions[net.edges()[e].id] = {lf};
    }
    for (std::size_t d = 0; d < net.demands().size(); ++d) {
      std::vector<Form> own;
      std::vector<const Form*> rows;
      receiver_rows(st, d, own, rows);
      Form target(M, 0);
      target[net.demands()[d].message] = 1;
      const auto coef = find_decoder(rows, target, q);
      require(coef.has_value(), Errc::invalid_argument, "internal: decoder vanished");
      LinearForm lf;
      lf.modulus = q;
      for (std::int64_t c : *coef) lf.blocks.push_back(matrix1(c));
      const Demand& dm = net.demands()[d];
      code.decoders[{net.nodes()[dm.receiver].id, net.messages()[dm.message].id}] = {lf};
    }
    return code;
  }
};

}  // namespace

SearchOutcome search_scalar_linear(const NetworkSpec& net, const AlphabetSpec& carrier, const SearchOptions& options) {
  const auto t0 = Clock::now();
  LinearSearch ls(net, carrier);
  SearchOutcome out;
  out.kind = "linear";
  std::vector<std::vector<std::int64_t>> cands;
  for (std::size_t e : ls.order) cands.push_back(ls.canonical_tuples(ls.arity[e], options.cap));

  LinearSearch::State base;
  base.forms.assign(net.edges().size(), Form(ls.M, 0));
  base.choice.assign(ls.order.size(), nullptr);
  if (!ls.settle(base, 0)) {
    out.status = SearchStatus::exhausted;
    out.seconds = since(t0);
    return out;
  }
  if (ls.order.empty()) {
    out.status = SearchStatus::found;
    out.solution = ls.build(base);
    out.seconds = since(t0);
    return out;
  }

  std::atomic<std::uint64_t> explored{0};
  std::atomic<bool> capped{false};
  std::atomic<std::size_t> next_top{0};
  const std::size_t top_count = cands[0].size() / ls.arity[ls.order[0]];
  std::atomic<std::size_t> best_top{top_count};
  std::mutex mu;
  std::optional<LinearSearch::State> best_state;

  auto dfs = [&](auto&& self, LinearSearch::State& st, std::size_t level) -> bool {
    const std::size_t a = ls.arity[ls.order[level]];
    const auto& cs = cands[level];
    for (std::size_t off = 0; off < cs.size(); off += a) {
      if (capped.load(std::memory_order_relaxed)) return false;
      if (explored.fetch_add(1, std::memory_order_relaxed) >= options.cap) {
        capped = true;
        return false;
      }
      st.choice[level] = cs.data() + off;
      if (!ls.settle(st, level + 1)) continue;
      if (level + 1 == ls.order.size() || self(self, st, level + 1)) return true;
    }
    return false;
  };
  auto worker = [&] {
    LinearSearch::State st = base;
    const std::size_t a0 = ls.arity[ls.order[0]];
    while (true) {
      const std::size_t top = next_top.fetch_add(1);
      if (top >= top_count || top >= best_top.load() || capped.load()) return;
      if (explored.fetch_add(1, std::memory_order_relaxed) >= options.cap) {
        capped = true;
        return;
      }
      st.choice[0] = cands[0].data() + top * a0;
      if (!ls.settle(st, 1)) continue;
      if (ls.order.size() == 1 || dfs(dfs, st, 1)) {
        std::lock_guard lock(mu);
        if (top < best_top.load()) {
          best_top = top;
          best_state = st;
        }
        return;
      }
    }
  };
  const unsigned workers = std::max(1u, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  out.explored = std::min<std::uint64_t>(explored.load(), options.cap);
  if (best_state) {
    out.status = SearchStatus::found;
    out.solution = ls.build(*best_state);
  } else {
    out.status = capped ? SearchStatus::capped : SearchStatus::exhausted;
  }
  out.seconds = since(t0);
  return out;
}

// ---------------------------------------------------------------------------
// Block-structured search

namespace {

struct GroupTable {
  AlphabetSpec spec;
  std::vector<Symbol> add;  // s*s
  std::vector<Symbol> neg;
};

GroupTable group_table(const AlphabetSpec& g) {
  const auto s = static_cast<std::size_t>(g.size());
  GroupTable t{g, std::vector<Symbol>(s * s), std::vector<Symbol>(s)};
  for (std::size_t a = 0; a < s; ++a) {
    t.neg[a] = g.negate(static_cast<Symbol>(a));
    for (std::size_t b = 0; b < s; ++b) t.add[a * s + b] = g.add(static_cast<Symbol>(a), static_cast<Symbol>(b));
  }
  return t;
}

std::vector<Permutation> all_permutations(std::size_t s) {
  std::vector<Symbol> p(s);
  std::iota(p.begin(), p.end(), Symbol{0});
  std::vector<Permutation> out;
  do out.emplace_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

struct BlockInfo {
  std::string prefix;
  BlockView view;
  std::vector<std::size_t> receivers;  // R_0..R_m node indices
  std::vector<std::size_t> v_nodes;    // v_0..v_m node indices
  std::size_t v_sum = 0;
};

std::vector<BlockInfo> collect_blocks(const NetworkSpec& net) {
  std::vector<BlockInfo> blocks;
  for (const std::string& prefix : block_prefixes(net)) {
    BlockInfo b;
    b.prefix = prefix;
    b.view = block_view(net, prefix);
    for (std::size_t i = 0; i <= b.view.m; ++i) {
      b.receivers.push_back(net.node_index(net.label(prefix + "R_" + std::to_string(i))));
      b.v_nodes.push_back(net.edges()[b.view.side_edges[i]].head);
    }
    b.v_sum = net.edges()[b.view.sum_edge].head;
    blocks.push_back(std::move(b));
  }
  require(!blocks.empty(), Errc::invalid_argument, "network has no labelled blocks");
  return blocks;
}

// Mixed-radix helper: input symbols of a node's inputs to a table index.
std::uint64_t table_index(std::span<const Symbol> in, std::uint64_t s) {
  std::uint64_t idx = 0;
  for (Symbol v : in) idx = idx * s + v;
  return idx;
}

}  // namespace

SearchOutcome search_p_structured(const NetworkSpec& net, std::int64_t size, const SearchOptions& options) {
  const auto t0 = Clock::now();
  require(size >= 2 && size <= 8, Errc::invalid_argument, "structured search needs 2 <= size <= 8");
  const Topology topo = validate_network(net);
  const std::vector<BlockInfo> blocks = collect_blocks(net);
  const auto s = static_cast<std::size_t>(size);
  const std::size_t M = net.messages().size();
  const std::size_t B = blocks.size();

  // Receivers outside the blocks and where their inputs come from.
  struct Feed {
    std::size_t block;
    int slot;  // -1 for e
  };
  std::vector<bool> block_receiver(net.node_count(), false);
  std::map<std::size_t, Feed> feeds_by_node;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t r : blocks[b].receivers) block_receiver[r] = true;
    for (std::size_t i = 0; i <= blocks[b].view.m; ++i) feeds_by_node[blocks[b].v_nodes[i]] = {b, static_cast<int>(i)};
    feeds_by_node[blocks[b].v_sum] = {b, -1};
  }
  struct Extra {
    std::size_t demand;
    std::vector<Feed> feeds;
  };
  std::vector<Extra> extras;
  for (std::size_t d = 0; d < net.demands().size(); ++d) {
    const std::size_t r = net.demands()[d].receiver;
    if (block_receiver[r]) continue;
    require(topo.messages_at[r].empty(), Errc::invalid_argument, "extra receivers may not generate messages");
    Extra x{d, {}};
    for (std::size_t e : topo.in_edges[r]) {
      const auto it = feeds_by_node.find(net.edges()[e].tail);
      require(it != feeds_by_node.end(), Errc::invalid_argument,
              "edge '" + net.edges()[e].id + "' into an extra receiver does not leave a block");
      x.feeds.push_back(it->second);
    }
    extras.push_back(std::move(x));
  }
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    const std::size_t t = net.edges()[e].tail;
    const std::size_t ar = topo.messages_at[t].size() + topo.in_edges[t].size();
    bool coded = false;
    for (const auto& b : blocks) {
      coded = coded || e == b.view.sum_edge ||
              std::find(b.view.side_edges.begin(), b.view.side_edges.end(), e) != b.view.side_edges.end();
    }
    require(coded || ar == 1, Errc::invalid_argument,
            "edge '" + net.edges()[e].id + "' combines several inputs outside a labelled block");
  }

  // Free relabelings: shared messages outside their first block.
  std::vector<std::pair<std::size_t, std::size_t>> free_slots;  // (block, slot)
  std::vector<bool> seen_msg(M, false);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t j = 0; j <= blocks[b].view.m; ++j) {
      const std::size_t msg = blocks[b].view.inputs[j];
      if (seen_msg[msg]) free_slots.emplace_back(b, j);
      seen_msg[msg] = true;
    }

  const std::vector<AlphabetSpec> groups = abelian_groups_of_order(size);
  std::vector<GroupTable> tables;
  for (const auto& g : groups) tables.push_back(group_table(g));
  const std::vector<Permutation> perms = all_permutations(s);
  const std::vector<Permutation> ident{Permutation::identity(s)};

  const std::uint64_t assignments = sat_pow(s, M, options.cap);
  std::uint64_t witnesses = sat_pow(groups.size(), B, options.cap);
  witnesses = sat_mul(witnesses, sat_pow(perms.size(), free_slots.size(), options.cap), options.cap);
  SearchOutcome out;
  out.kind = "p-structured";
  if (sat_mul(witnesses, assignments, options.cap) > options.cap) {
    out.status = SearchStatus::capped;
    out.seconds = since(t0);
    return out;
  }

  // Odometer over (group per block, permutation per free slot).
  std::vector<std::size_t> gsel(B, 0), psel(free_slots.size(), 0);
  std::vector<Symbol> x(M, 0);
  std::vector<std::vector<Symbol>> side(B);
  std::vector<Symbol> sum(B);
  std::vector<std::unordered_map<std::uint64_t, Symbol>> fmap(extras.size());
  auto pi_of = [&](std::size_t b, std::size_t j) -> const Permutation& {
    for (std::size_t f = 0; f < free_slots.size(); ++f)
      if (free_slots[f] == std::pair{b, j}) return perms[psel[f]];
    return ident[0];
  };
  bool found = false;
  for (std::uint64_t w = 0; w < witnesses && !found; ++w) {
    {
      std::uint64_t v = w;
      for (std::size_t f = free_slots.size(); f-- > 0;) psel[f] = v % perms.size(), v /= perms.size();
      for (std::size_t b = B; b-- > 0;) gsel[b] = v % groups.size(), v /= groups.size();
    }
    for (auto& m : fmap) m.clear();
    bool ok = true;
    for (std::uint64_t a = 0; a < assignments && ok; ++a) {
      std::uint64_t v = a;
      for (std::size_t i = M; i-- > 0;) x[i] = static_cast<Symbol>(v % s), v /= s;
      for (std::size_t b = 0; b < B; ++b) {
        const GroupTable& g = tables[gsel[b]];
        const BlockView& view = blocks[b].view;
        std::vector<Symbol> px(view.m + 1);
        Symbol total = 0;
        for (std::size_t j = 0; j <= view.m; ++j) {
          px[j] = pi_of(b, j)(x[view.inputs[j]]);
          total = g.add[total * s + px[j]];
        }
        side[b].resize(view.m + 1);
        for (std::size_t i = 0; i <= view.m; ++i) side[b][i] = g.add[total * s + g.neg[px[i]]];
        sum[b] = total;
      }
      for (std::size_t k = 0; k < extras.size() && ok; ++k) {
        std::uint64_t key = 0;
        for (const Feed& f : extras[k].feeds) key = key * s + (f.slot < 0 ? sum[f.block] : side[f.block][f.slot]);
        const Symbol want = x[net.demands()[extras[k].demand].message];
        const auto [it, fresh] = fmap[k].emplace(key, want);
        if (!fresh && it->second != want) ok = false;
      }
      ++out.explored;
    }
    if (!ok) continue;
    found = true;

    // Materialize the code as lookup tables.
    Code code;
    bool same = std::all_of(gsel.begin(), gsel.end(), [&](std::size_t g) { return g == gsel[0]; });
    code.params = {1, 1, same ? groups[gsel[0]] : AlphabetSpec::plain_set(size)};
    for (std::size_t b = 0; b < B; ++b) {
      const GroupTable& g = tables[gsel[b]];
      const BlockView& view = blocks[b].view;
      auto slot_of_input = [&](std::size_t node, std::size_t e) {
        const std::size_t msg_src = net.edges()[e].tail;
        for (std::size_t j = 0; j <= view.m; ++j)
          if (net.messages()[view.inputs[j]].source == msg_src) return j;
        fail(Errc::invalid_argument, "block node '" + net.nodes()[node].id + "' has an unexpected input");
      };
      auto encoder = [&](std::size_t e, int skip) {
        const std::size_t t = net.edges()[e].tail;
        require(topo.messages_at[t].empty(), Errc::invalid_argument, "block encoders may not generate messages");
        const auto& ins = topo.in_edges[t];
        std::vector<std::size_t> slots;
        for (std::size_t in : ins) slots.push_back(slot_of_input(t, in));
        LookupTable lt;
        const std::uint64_t n = sat_pow(s, ins.size(), std::uint64_t{1} << 24);
        require(n <= (std::uint64_t{1} << 24), Errc::cap_exceeded, "edge table too large");
        lt.table.resize(n);
        std::vector<Symbol> in(ins.size());
        for (std::uint64_t idx = 0; idx < n; ++idx) {
          std::uint64_t v = idx;
          for (std::size_t i = ins.size(); i-- > 0;) in[i] = static_cast<Symbol>(v % s), v /= s;
          Symbol acc = 0;
          for (std::size_t i = 0; i < ins.size(); ++i)
            if (static_cast<int>(slots[i]) != skip) acc = g.add[acc * s + pi_of(b, slots[i])(in[i])];
          lt.table[idx] = acc;
        }
        code.edge_functions[net.edges()[e].id] = {lt};
      };
      for (std::size_t i = 0; i <= view.m; ++i) encoder(view.side_edges[i], static_cast<int>(i));
      encoder(view.sum_edge, -1);
      for (std::size_t i = 0; i <= view.m; ++i) {
        const std::size_t r = blocks[b].receivers[i];
        require(topo.messages_at[r].empty() && topo.in_edges[r].size() == 2, Errc::invalid_argument,
                "block receiver must have exactly two inputs");
        const bool sum_first = net.edges()[topo.in_edges[r][0]].tail == blocks[b].v_sum;
        const Permutation inv = pi_of(b, i).inverse();
        LookupTable lt;
        lt.table.resize(s * s);
        for (std::size_t p = 0; p < s; ++p)
          for (std::size_t q = 0; q < s; ++q) {
            const Symbol e_sum = static_cast<Symbol>(sum_first ? p : q), e_side = static_cast<Symbol>(sum_first ? q : p);
            lt.table[p * s + q] = inv(g.add[e_sum * s + g.neg[e_side]]);
          }
        code.decoders[{net.nodes()[r].id, net.messages()[view.inputs[i]].id}] = {lt};
      }
    }
    for (std::size_t k = 0; k < extras.size(); ++k) {
      const Demand& dm = net.demands()[extras[k].demand];
      LookupTable lt;
      lt.table.assign(sat_pow(s, extras[k].feeds.size(), std::uint64_t{1} << 24), 0);
      for (const auto& [key, val] : fmap[k]) lt.table[key] = val;
      code.decoders[{net.nodes()[dm.receiver].id, net.messages()[dm.message].id}] = {lt};
    }
    out.solution = std::move(code);
  }
  out.status = found ? SearchStatus::found : SearchStatus::exhausted;
  out.seconds = since(t0);
  return out;
}

// ---------------------------------------------------------------------------
// All (1,1) codes

std::vector<Code> enumerate_all_codes(const NetworkSpec& net, std::int64_t size, std::uint64_t cap) {
  require(size >= 2 && size <= 16, Errc::invalid_argument, "enumeration needs 2 <= size <= 16");
  const Topology topo = validate_network(net);
  const auto s = static_cast<std::uint64_t>(size);
  const std::size_t E = net.edges().size(), M = net.messages().size();

  std::vector<std::size_t> coded;               // edges with tail arity >= 2
  std::vector<std::uint64_t> table_size(E, 0);  // per coded edge
  std::vector<std::size_t> offset(E, 0);        // into the digit odometer
  std::uint64_t codes = 1;
  std::size_t digits = 0;
  for (std::size_t e = 0; e < E; ++e) {
    const std::size_t t = net.edges()[e].tail;
    const std::size_t ar = topo.messages_at[t].size() + topo.in_edges[t].size();
    if (ar < 2) continue;
    const std::uint64_t n = sat_pow(s, ar, cap);
    if (n > cap) fail(Errc::cap_exceeded, "edge '" + net.edges()[e].id + "' has more than cap table entries");
    coded.push_back(e);
    table_size[e] = n;
    offset[e] = digits;
    digits += n;
    codes = sat_mul(codes, sat_pow(s, n, cap), cap);
    if (codes > cap)
      fail(Errc::cap_exceeded, "code space " + std::to_string(size) + "^(table entries) exceeds the cap of " +
                                   std::to_string(cap));
  }
  const std::uint64_t assignments = sat_pow(s, M, cap);
  if (assignments > cap) fail(Errc::cap_exceeded, "too many message assignments");

  std::vector<Symbol> odo(digits, 0);
  std::vector<Symbol> val(E, 0), x(M, 0), in;
  std::vector<std::unordered_map<std::uint64_t, Symbol>> fmap(net.demands().size());
  std::vector<Code> out;
  for (std::uint64_t c = 0; c < codes; ++c) {
    if (c > 0) {
      std::size_t p = digits;
      while (p-- > 0) {
        if (++odo[p] < s) break;
        odo[p] = 0;
      }
    }
    for (auto& m : fmap) m.clear();
    bool ok = true;
    for (std::uint64_t a = 0; a < assignments && ok; ++a) {
      std::uint64_t v = a;
      for (std::size_t i = M; i-- > 0;) x[i] = static_cast<Symbol>(v % s), v /= s;
      for (std::size_t e : topo.edge_order) {
        const std::size_t t = net.edges()[e].tail;
        in.clear();
        for (std::size_t msg : topo.messages_at[t]) in.push_back(x[msg]);
        for (std::size_t ie : topo.in_edges[t]) in.push_back(val[ie]);
        if (in.size() == 1)
          val[e] = in[0];
        else if (in.empty())
          val[e] = 0;
        else
          val[e] = odo[offset[e] + table_index(in, s)];
      }
      for (std::size_t d = 0; d < net.demands().size() && ok; ++d) {
        const std::size_t r = net.demands()[d].receiver;
        in.clear();
        for (std::size_t msg : topo.messages_at[r]) in.push_back(x[msg]);
        for (std::size_t ie : topo.in_edges[r]) in.push_back(val[ie]);
        const Symbol want = x[net.demands()[d].message];
        const auto [it, fresh] = fmap[d].emplace(table_index(in, s), want);
        if (!fresh && it->second != want) ok = false;
      }
    }
    if (!ok) continue;
    Code code;
    code.params = {1, 1, AlphabetSpec::plain_set(size)};
    for (std::size_t e : coded) {
      LookupTable lt;
      lt.table.assign(odo.begin() + static_cast<std::ptrdiff_t>(offset[e]),
                      odo.begin() + static_cast<std::ptrdiff_t>(offset[e] + table_size[e]));
      code.edge_functions[net.edges()[e].id] = {lt};
    }
    for (std::size_t d = 0; d < net.demands().size(); ++d) {
      const Demand& dm = net.demands()[d];
      const std::size_t ar = topo.messages_at[dm.receiver].size() + topo.in_edges[dm.receiver].size();
      LookupTable lt;
      lt.table.assign(sat_pow(s, ar, cap), 0);
      for (const auto& [key, v] : fmap[d]) lt.table[key] = v;
      code.decoders[{net.nodes()[dm.receiver].id, net.messages()[dm.message].id}] = {lt};
    }
    out.push_back(std::move(code));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Property P witnesses

std::optional<PropertyPWitness> find_p_witness(const NetworkSpec& net, const Code& code,
                                               const std::string& block_prefix, std::uint64_t cap) {
  require(code.params.k == 1 && code.params.n == 1, Errc::invalid_argument, "Property P is defined for (1,1) codes");
  const BlockView view = block_view(net, block_prefix);
  const std::int64_t size = code.params.alphabet.size();
  require(size >= 2 && size <= 8, Errc::invalid_argument, "witness search needs 2 <= size <= 8");
  const auto s = static_cast<std::size_t>(size);
  const std::size_t k = view.m + 1;
  const std::vector<Permutation> perms = all_permutations(s);
  const std::vector<AlphabetSpec> groups = abelian_groups_of_order(size);
  const std::uint64_t space = sat_mul(groups.size(), sat_pow(perms.size(), k, cap), cap);
  if (space > cap) fail(Errc::cap_exceeded, "witness space exceeds the cap");

  // Edge symbols for every block input tuple, other messages at 0.
  const Evaluator ev(net, code, false);
  const std::size_t slots = ev.message_slots();
  const std::uint64_t tuples = sat_pow(s, k, cap);
  if (tuples > cap) fail(Errc::cap_exceeded, "block input space exceeds the cap");
  std::vector<std::vector<Symbol>> xs(tuples, std::vector<Symbol>(k));
  std::vector<std::vector<Symbol>> es(tuples, std::vector<Symbol>(k));
  std::vector<Symbol> esum(tuples);
  std::vector<Symbol> buf(ev.buffer_size(), 0);
  for (std::uint64_t t = 0; t < tuples; ++t) {
    std::uint64_t v = t;
    for (std::size_t i = k; i-- > 0;) xs[t][i] = static_cast<Symbol>(v % s), v /= s;
    std::fill(buf.begin(), buf.end(), 0);
    for (std::size_t i = 0; i < k; ++i) buf[view.inputs[i]] = xs[t][i];
    ev.run_edges(buf);
    for (std::size_t i = 0; i < k; ++i) es[t][i] = buf[slots + view.side_edges[i]];
    esum[t] = buf[slots + view.sum_edge];
  }

  std::vector<std::size_t> sel(k, 0);
  for (const AlphabetSpec& g : groups) {
    const GroupTable gt = group_table(g);
    const std::uint64_t combos = sat_pow(perms.size(), k, cap);
    for (std::uint64_t c = 0; c < combos; ++c) {
      std::uint64_t v = c;
      for (std::size_t i = k; i-- > 0;) sel[i] = v % perms.size(), v /= perms.size();
      std::vector<std::vector<int>> sigma(k, std::vector<int>(s, -1));
      bool ok = true;
      for (std::uint64_t t = 0; t < tuples && ok; ++t) {
        Symbol total = 0;
        std::vector<Symbol> px(k);
        for (std::size_t j = 0; j < k; ++j) {
          px[j] = perms[sel[j]](xs[t][j]);
          total = gt.add[total * s + px[j]];
        }
        if (total != esum[t]) {
          ok = false;
          break;
        }
        for (std::size_t i = 0; i < k && ok; ++i) {
          const Symbol part = gt.add[total * s + gt.neg[px[i]]];
          int& slot = sigma[i][part];
          if (slot < 0)
            slot = static_cast<int>(es[t][i]);
          else if (slot != static_cast<int>(es[t][i]))
            ok = false;
        }
      }
      if (!ok) continue;
      PropertyPWitness w;
      w.group = g;
      bool bij = true;
      for (std::size_t i = 0; i < k && bij; ++i) {
        std::vector<Symbol> map(s);
        std::vector<bool> hit(s, false);
        for (std::size_t a = 0; a < s; ++a) {
          if (sigma[i][a] < 0 || hit[sigma[i][a]]) {
            bij = false;
            break;
          }
          hit[sigma[i][a]] = true;
          map[a] = static_cast<Symbol>(sigma[i][a]);
        }
        if (bij) w.sigmas.emplace_back(std::move(map));
      }
      if (!bij) continue;
      for (std::size_t j = 0; j < k; ++j) w.pis.push_back(perms[sel[j]]);
      return w;
    }
  }
  return std::nullopt;
}

std::string search_outcome_to_json(const SearchOutcome& s) {
  nlohmann::ordered_json j;
  j["kind"] = s.kind;
  j["status"] = to_string(s.status);
  j["explored"] = s.explored;
  j["seconds"] = s.seconds;
  j["solution"] = s.solution ? nlohmann::ordered_json::parse(code_to_json(*s.solution)) : nlohmann::ordered_json();
  return j.dump(2) + "\n";
}

}  // namespace ncnet
