#include "ncnet/network.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <queue>
#include <thread>
#include <unordered_map>

#include "ncnet/error.hpp"

namespace ncnet {

// ---------------------------------------------------------------------------
// NetworkSpec

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::source: return "source";
    case NodeKind::intermediate: return "intermediate";
    case NodeKind::receiver: return "receiver";
  }
  return "?";
}

NodeKind node_kind_from_string(std::string_view s) {
  if (s == "source") return NodeKind::source;
  if (s == "intermediate") return NodeKind::intermediate;
  if (s == "receiver") return NodeKind::receiver;
  fail(Errc::parse, "unknown node kind '" + std::string(s) + "'");
}

namespace {

std::size_t register_id(std::map<std::string, std::size_t, std::less<>>& ids, const std::string& id,
                        std::size_t index, const char* what) {
  require(!id.empty(), Errc::invalid_argument, std::string(what) + " id must be nonempty");
  const bool fresh = ids.emplace(id, index).second;
  require(fresh, Errc::invalid_argument, std::string("duplicate ") + what + " id '" + id + "'");
  return index;
}

std::optional<std::size_t> lookup(const std::map<std::string, std::size_t, std::less<>>& ids,
                                  std::string_view id) {
  const auto it = ids.find(id);
  if (it == ids.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::size_t NetworkSpec::add_node(std::string id, NodeKind kind) {
  register_id(node_ids_, id, nodes_.size(), "node");
  nodes_.push_back({std::move(id), kind});
  return nodes_.size() - 1;
}

std::size_t NetworkSpec::add_message(std::string id, std::size_t source) {
  require(source < nodes_.size(), Errc::invalid_argument, "message '" + id + "' references an unknown node");
  register_id(message_ids_, id, messages_.size(), "message");
  messages_.push_back({std::move(id), source});
  return messages_.size() - 1;
}

std::size_t NetworkSpec::add_edge(std::string id, std::size_t tail, std::size_t head) {
  require(tail < nodes_.size() && head < nodes_.size(), Errc::invalid_argument,
          "edge '" + id + "' references an unknown node");
  register_id(edge_ids_, id, edges_.size(), "edge");
  edges_.push_back({std::move(id), tail, head});
  return edges_.size() - 1;
}

void NetworkSpec::add_demand(std::size_t receiver, std::size_t message) {
  require(receiver < nodes_.size(), Errc::invalid_argument, "demand references an unknown receiver");
  require(message < messages_.size(), Errc::invalid_argument, "demand references an unknown message");
  demands_.push_back({receiver, message});
}

void NetworkSpec::set_label(std::string role, std::string id) {
  require(!role.empty(), Errc::invalid_argument, "label role must be nonempty");
  labels_[std::move(role)] = std::move(id);
}

std::optional<std::size_t> NetworkSpec::find_node(std::string_view id) const { return lookup(node_ids_, id); }
std::optional<std::size_t> NetworkSpec::find_message(std::string_view id) const { return lookup(message_ids_, id); }
std::optional<std::size_t> NetworkSpec::find_edge(std::string_view id) const { return lookup(edge_ids_, id); }

std::size_t NetworkSpec::node_index(std::string_view id) const {
  const auto r = find_node(id);
  require(r.has_value(), Errc::invalid_argument, "unknown node '" + std::string(id) + "'");
  return *r;
}

std::size_t NetworkSpec::message_index(std::string_view id) const {
  const auto r = find_message(id);
  require(r.has_value(), Errc::invalid_argument, "unknown message '" + std::string(id) + "'");
  return *r;
}

std::size_t NetworkSpec::edge_index(std::string_view id) const {
  const auto r = find_edge(id);
  require(r.has_value(), Errc::invalid_argument, "unknown edge '" + std::string(id) + "'");
  return *r;
}

const std::string& NetworkSpec::label(std::string_view role) const {
  const auto it = labels_.find(std::string(role));
  require(it != labels_.end(), Errc::invalid_argument, "no label for role '" + std::string(role) + "'");
  return it->second;
}

std::size_t NetworkSpec::count_nodes(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.kind == kind; }));
}

bool operator==(const NetworkSpec& a, const NetworkSpec& b) {
  auto same_nodes = std::equal(a.nodes_.begin(), a.nodes_.end(), b.nodes_.begin(), b.nodes_.end(),
                               [](const Node& x, const Node& y) { return x.id == y.id && x.kind == y.kind; });
  auto same_msgs = std::equal(a.messages_.begin(), a.messages_.end(), b.messages_.begin(), b.messages_.end(),
                              [](const Message& x, const Message& y) { return x.id == y.id && x.source == y.source; });
  auto same_edges = std::equal(a.edges_.begin(), a.edges_.end(), b.edges_.begin(), b.edges_.end(),
                               [](const Edge& x, const Edge& y) {
                                 return x.id == y.id && x.tail == y.tail && x.head == y.head;
                               });
  auto same_demands = std::equal(a.demands_.begin(), a.demands_.end(), b.demands_.begin(), b.demands_.end(),
                                 [](const Demand& x, const Demand& y) {
                                   return x.receiver == y.receiver && x.message == y.message;
                                 });
  return a.family == b.family && same_nodes && same_msgs && same_edges && same_demands && a.labels_ == b.labels_;
}

Topology validate_network(const NetworkSpec& net) {
  const std::size_t N = net.nodes().size();
  Topology topo;
  topo.in_edges.assign(N, {});
  topo.out_edges.assign(N, {});
  topo.messages_at.assign(N, {});

  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    const Edge& ed = net.edges()[e];
    require(ed.tail != ed.head, Errc::invalid_argument, "cycle detected: edge '" + ed.id + "' is a self-loop");
    topo.out_edges[ed.tail].push_back(e);
    topo.in_edges[ed.head].push_back(e);
  }
  for (std::size_t m = 0; m < net.messages().size(); ++m) {
    const Message& msg = net.messages()[m];
    require(net.nodes()[msg.source].kind == NodeKind::source, Errc::invalid_argument,
            "message '" + msg.id + "' originates at non-source node '" + net.nodes()[msg.source].id + "'");
    topo.messages_at[msg.source].push_back(m);
  }
  for (std::size_t v = 0; v < N; ++v) {
    const Node& node = net.nodes()[v];
    if (node.kind == NodeKind::source)
      require(topo.in_edges[v].empty(), Errc::invalid_argument, "source '" + node.id + "' has in-edges");
    if (node.kind == NodeKind::receiver)
      require(topo.out_edges[v].empty(), Errc::invalid_argument, "receiver '" + node.id + "' has out-edges");
  }
  for (const Demand& d : net.demands()) {
    require(d.message < net.messages().size(), Errc::invalid_argument, "dangling demand: unknown message");
    require(net.nodes()[d.receiver].kind == NodeKind::receiver, Errc::invalid_argument,
            "demand placed at non-receiver node '" + net.nodes()[d.receiver].id + "'");
  }

  // Kahn's algorithm, smallest ready index first for a deterministic order.
  std::vector<std::size_t> indeg(N, 0);
  for (std::size_t v = 0; v < N; ++v) indeg[v] = topo.in_edges[v].size();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < N; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<std::size_t> position(N, 0);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    position[v] = topo.node_order.size();
    topo.node_order.push_back(v);
    for (std::size_t e : topo.out_edges[v])
      if (--indeg[net.edges()[e].head] == 0) ready.push(net.edges()[e].head);
  }
  require(topo.node_order.size() == N, Errc::invalid_argument, "cycle detected");

  topo.edge_order.resize(net.edges().size());
  for (std::size_t e = 0; e < net.edges().size(); ++e) topo.edge_order[e] = e;
  std::stable_sort(topo.edge_order.begin(), topo.edge_order.end(), [&](std::size_t a, std::size_t b) {
    return position[net.edges()[a].tail] < position[net.edges()[b].tail];
  });

  std::map<std::string, std::string> seen;
  for (const auto& [role, id] : net.labels()) {
    require(net.find_node(id) || net.find_edge(id) || net.find_message(id), Errc::invalid_argument,
            "label '" + role + "' points at unknown id '" + id + "'");
    const auto [it, fresh] = seen.emplace(id, role);
    require(fresh, Errc::invalid_argument, "labels '" + it->second + "' and '" + role + "' share id '" + id + "'");
  }
  return topo;
}

NetworkSpec disjoint_union(const std::vector<NetworkSpec>& nets) {
  require(!nets.empty(), Errc::invalid_argument, "disjoint_union needs at least one network");
  NetworkSpec out;
  out.family = "union";
  for (std::size_t c = 0; c < nets.size(); ++c) {
    const NetworkSpec& net = nets[c];
    const std::string idp = "c" + std::to_string(c) + ".";
    const std::string rolep = "c" + std::to_string(c) + "/" + (net.family.empty() ? "net" : net.family) + "/";
    const std::size_t base = out.nodes().size();
    const std::size_t mbase = out.messages().size();
    for (const Node& n : net.nodes()) out.add_node(idp + n.id, n.kind);
    for (const Message& m : net.messages()) out.add_message(idp + m.id, base + m.source);
    for (const Edge& e : net.edges()) out.add_edge(idp + e.id, base + e.tail, base + e.head);
    for (const Demand& d : net.demands()) out.add_demand(base + d.receiver, mbase + d.message);
    for (const auto& [role, id] : net.labels()) out.set_label(rolep + role, idp + id);
  }
  return out;
}

std::vector<bool> ancestors(const NetworkSpec& net, const Topology& topo, std::size_t node) {
  std::vector<bool> up(net.nodes().size(), false);
  std::vector<std::size_t> stack{node};
  up[node] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t e : topo.in_edges[v]) {
      const std::size_t t = net.edges()[e].tail;
      if (!up[t]) {
        up[t] = true;
        stack.push_back(t);
      }
    }
  }
  return up;
}

// ---------------------------------------------------------------------------
// Codes

bool Code::all_linear() const {
  for (const auto& [id, fn] : edge_functions)
    if (!fn.is_linear()) return false;
  for (const auto& [key, fn] : decoders)
    if (!fn.is_linear()) return false;
  return true;
}

NodeInputs node_inputs(const NetworkSpec&, const Topology& topo, std::size_t node) {
  return {topo.messages_at[node], topo.in_edges[node]};
}

namespace {

void check_function(const EdgeFunction& fn, const std::vector<int>& in_dims, int out_dim, std::int64_t size,
                    const std::string& where) {
  const std::size_t arity = in_dims.size();
  const bool scalar = out_dim == 1 && std::all_of(in_dims.begin(), in_dims.end(), [](int d) { return d == 1; });
  auto bad = [&](const std::string& why) { fail(Errc::invalid_argument, where + ": " + why); };

  if (const auto* lf = std::get_if<LinearForm>(&fn.body)) {
    if (lf->modulus != size) bad("linear form modulus differs from the alphabet size");
    if (lf->blocks.size() != arity)
      bad("linear form has " + std::to_string(lf->blocks.size()) + " blocks, node has " + std::to_string(arity) +
          " inputs");
    for (std::size_t t = 0; t < arity; ++t) {
      const RingMatrix& b = lf->blocks[t];
      if (b.modulus() != size) bad("matrix carrier differs from the alphabet");
      if (b.rows() != static_cast<std::size_t>(out_dim) || b.cols() != static_cast<std::size_t>(in_dims[t]))
        bad("matrix for input " + std::to_string(t) + " is " + std::to_string(b.rows()) + "x" +
            std::to_string(b.cols()) + ", expected " + std::to_string(out_dim) + "x" + std::to_string(in_dims[t]));
    }
    return;
  }
  if (!scalar) bad("non-linear functions require a (1,1) code");
  if (const auto* lt = std::get_if<LookupTable>(&fn.body)) {
    std::uint64_t expect = 1;
    for (std::size_t t = 0; t < arity; ++t) {
      expect *= static_cast<std::uint64_t>(size);
      if (expect > (std::uint64_t{1} << 32)) bad("lookup table too large");
    }
    if (lt->table.size() != expect)
      bad("lookup table has " + std::to_string(lt->table.size()) + " entries, expected " + std::to_string(expect));
    for (Symbol s : lt->table)
      if (s >= size) bad("lookup table entry out of range");
    return;
  }
  if (const auto* pf = std::get_if<PermutedForm>(&fn.body)) {
    if (pf->modulus != size) bad("permuted form modulus differs from the alphabet size");
    if (pf->input_perms.size() != arity) bad("permuted form input count differs from node arity");
    for (const auto& p : pf->input_perms)
      if (p && p->size() != static_cast<std::size_t>(size)) bad("input permutation has the wrong size");
    if (pf->rows.empty()) bad("permuted form needs at least one row");
    for (const auto& row : pf->rows)
      if (row.size() != arity) bad("permuted form row length differs from node arity");
    if (pf->output_perm && pf->output_perm->size() != static_cast<std::size_t>(size))
      bad("output permutation has the wrong size");
    if (pf->output_table.empty()) {
      if (pf->rows.size() != 1) bad("several rows need an output table");
    } else {
      if (pf->output_perm) bad("output permutation and output table are exclusive");
      for (const auto& [tuple, value] : pf->output_table) {
        if (tuple.size() != pf->rows.size()) bad("output table key has the wrong length");
        if (value >= size) bad("output table value out of range");
        for (Symbol s : tuple)
          if (s >= size) bad("output table key out of range");
      }
    }
    return;
  }
  const auto& pr = std::get<ProductForm>(fn.body);
  if (pr.radices.size() != pr.factors.size() || pr.radices.empty()) bad("product form needs one factor per radix");
  std::int64_t total = 1;
  for (std::int64_t r : pr.radices) {
    if (r < 2) bad("product radix below 2");
    total *= r;
  }
  if (total != size) bad("product radices do not multiply to the alphabet size");
  for (std::size_t f = 0; f < pr.factors.size(); ++f)
    check_function(pr.factors[f], in_dims, 1, pr.radices[f], where + " factor " + std::to_string(f));
}

std::vector<int> input_dims(const NodeInputs& in, const CodeParams& p) {
  std::vector<int> dims(in.messages.size(), p.k);
  dims.insert(dims.end(), in.edges.size(), p.n);
  return dims;
}

}  // namespace

void check_code(const NetworkSpec& net, const Topology& topo, const Code& code, bool require_decoders) {
  const CodeParams& p = code.params;
  require(p.k >= 1 && p.n >= 1, Errc::invalid_argument, "code needs k >= 1 and n >= 1");
  const std::int64_t size = p.alphabet.size();
  for (const auto& [id, fn] : code.edge_functions)
    require(net.find_edge(id).has_value(), Errc::invalid_argument, "code assigns unknown edge '" + id + "'");
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    const Edge& ed = net.edges()[e];
    const NodeInputs in = node_inputs(net, topo, ed.tail);
    const std::vector<int> dims = input_dims(in, p);
    const auto it = code.edge_functions.find(ed.id);
    if (it != code.edge_functions.end()) {
      check_function(it->second, dims, p.n, size, "edge '" + ed.id + "'");
    } else {
      require(dims.size() == 1, Errc::invalid_argument, "edge '" + ed.id + "' has no function and its tail has " +
                                                            std::to_string(dims.size()) + " inputs");
      require(dims[0] <= p.n, Errc::invalid_argument, "edge '" + ed.id + "' cannot embed a k-vector when k > n");
    }
  }
  for (const auto& [key, fn] : code.decoders) {
    const auto r = net.find_node(key.first);
    const auto m = net.find_message(key.second);
    require(r && m, Errc::invalid_argument, "decoder for unknown (" + key.first + ", " + key.second + ")");
    const bool demanded = std::any_of(net.demands().begin(), net.demands().end(),
                                      [&](const Demand& d) { return d.receiver == *r && d.message == *m; });
    require(demanded, Errc::invalid_argument, "decoder (" + key.first + ", " + key.second + ") matches no demand");
    check_function(fn, input_dims(node_inputs(net, topo, *r), p), p.k, size,
                   "decoder (" + key.first + ", " + key.second + ")");
  }
  if (require_decoders)
    for (const Demand& d : net.demands()) {
      const DemandKey key{net.nodes()[d.receiver].id, net.messages()[d.message].id};
      require(code.decoders.count(key) != 0, Errc::invalid_argument,
              "no decoder for demand (" + key.first + ", " + key.second + ")");
    }
}

Code disjoint_union(const std::vector<Code>& codes) {
  require(!codes.empty(), Errc::invalid_argument, "disjoint_union needs at least one code");
  Code out;
  out.params = codes[0].params;
  for (std::size_t c = 0; c < codes.size(); ++c) {
    const CodeParams& p = codes[c].params;
    require(p.k == out.params.k && p.n == out.params.n && p.alphabet.size() == out.params.alphabet.size(),
            Errc::invalid_argument, "component codes must share k, n and the alphabet size");
    if (!(p.alphabet == out.params.alphabet)) out.params.alphabet = AlphabetSpec::plain_set(p.alphabet.size());
    const std::string idp = "c" + std::to_string(c) + ".";
    for (const auto& [id, fn] : codes[c].edge_functions) out.edge_functions.emplace(idp + id, fn);
    for (const auto& [key, fn] : codes[c].decoders)
      out.decoders.emplace(DemandKey{idp + key.first, idp + key.second}, fn);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Compiled functions

namespace {

class CompiledFn {
 public:
  virtual ~CompiledFn() = default;
  // `in` holds the concatenated input components; `out` receives out_dim symbols.
  virtual void apply(const Symbol* in, Symbol* out) const = 0;
};

class LinearFn final : public CompiledFn {
 public:
  LinearFn(const LinearForm& lf, const std::vector<int>& in_dims, int out_dim)
      : q_(lf.modulus), rows_(out_dim) {
    for (int d : in_dims) cols_ += static_cast<std::size_t>(d);
    m_.assign(rows_ * cols_, 0);
    std::size_t off = 0;
    for (std::size_t t = 0; t < in_dims.size(); ++t) {
      const RingMatrix& b = lf.blocks[t];
      for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < b.cols(); ++c) m_[r * cols_ + off + c] = static_cast<std::uint64_t>(b(r, c));
      off += b.cols();
    }
  }
  void apply(const Symbol* in, Symbol* out) const override {
    const auto q = static_cast<std::uint64_t>(q_);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::uint64_t acc = 0;
      const std::uint64_t* row = &m_[r * cols_];
      for (std::size_t c = 0; c < cols_; ++c)
        if (row[c] != 0) acc = (acc + row[c] * in[c]) % q;
      out[r] = static_cast<Symbol>(acc);
    }
  }

 private:
  std::int64_t q_;
  std::size_t rows_;
  std::size_t cols_ = 0;
  std::vector<std::uint64_t> m_;
};

class TableFn final : public CompiledFn {
 public:
  TableFn(const LookupTable& lt, std::size_t arity, std::int64_t size)
      : table_(&lt.table), arity_(arity), size_(static_cast<std::uint64_t>(size)) {}
  void apply(const Symbol* in, Symbol* out) const override {
    std::uint64_t idx = 0;
    for (std::size_t t = 0; t < arity_; ++t) idx = idx * size_ + in[t];
    out[0] = (*table_)[idx];
  }

 private:
  const std::vector<Symbol>* table_;
  std::size_t arity_;
  std::uint64_t size_;
};

struct TupleHash {
  std::size_t operator()(const std::vector<Symbol>& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Symbol s : v) h = (h ^ s) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h);
  }
};

class PermutedFn final : public CompiledFn {
 public:
  PermutedFn(const PermutedForm& pf, std::size_t arity) : pf_(&pf), arity_(arity) {
    for (const auto& row : pf.rows) {
      std::vector<std::uint64_t> r;
      for (std::int64_t c : row) r.push_back(static_cast<std::uint64_t>(mod(c, pf.modulus)));
      rows_.push_back(std::move(r));
    }
    for (const auto& [tuple, value] : pf.output_table) table_.emplace(tuple, value);
  }
  void apply(const Symbol* in, Symbol* out) const override {
    const auto q = static_cast<std::uint64_t>(pf_->modulus);
    thread_local std::vector<Symbol> vals, key;
    vals.resize(arity_);
    for (std::size_t t = 0; t < arity_; ++t) vals[t] = pf_->input_perms[t] ? (*pf_->input_perms[t])(in[t]) : in[t];
    key.resize(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      std::uint64_t acc = 0;
      for (std::size_t t = 0; t < arity_; ++t) acc = (acc + rows_[r][t] * vals[t]) % q;
      key[r] = static_cast<Symbol>(acc);
    }
    if (!table_.empty()) {
      const auto it = table_.find(key);
      out[0] = it == table_.end() ? 0 : it->second;
    } else {
      out[0] = pf_->output_perm ? (*pf_->output_perm)(key[0]) : key[0];
    }
  }

 private:
  const PermutedForm* pf_;
  std::size_t arity_;
  std::vector<std::vector<std::uint64_t>> rows_;
  std::unordered_map<std::vector<Symbol>, Symbol, TupleHash> table_;
};

std::unique_ptr<CompiledFn> compile(const EdgeFunction& fn, const std::vector<int>& in_dims, int out_dim,
                                    std::int64_t size);

class ProductFn final : public CompiledFn {
 public:
  ProductFn(const ProductForm& pr, std::size_t arity) : radices_(pr.radices), arity_(arity) {
    const std::vector<int> ones(arity, 1);
    for (std::size_t f = 0; f < pr.factors.size(); ++f) factors_.push_back(compile(pr.factors[f], ones, 1, pr.radices[f]));
  }
  void apply(const Symbol* in, Symbol* out) const override {
    const std::size_t F = radices_.size();
    std::vector<Symbol> digits(arity_ * F);
    for (std::size_t t = 0; t < arity_; ++t) {
      std::uint64_t v = in[t];
      for (std::size_t f = F; f-- > 0;) {
        digits[f * arity_ + t] = static_cast<Symbol>(v % static_cast<std::uint64_t>(radices_[f]));
        v /= static_cast<std::uint64_t>(radices_[f]);
      }
    }
    std::uint64_t result = 0;
    for (std::size_t f = 0; f < F; ++f) {
      Symbol d = 0;
      factors_[f]->apply(&digits[f * arity_], &d);
      result = result * static_cast<std::uint64_t>(radices_[f]) + d;
    }
    out[0] = static_cast<Symbol>(result);
  }

 private:
  std::vector<std::int64_t> radices_;
  std::size_t arity_;
  std::vector<std::unique_ptr<CompiledFn>> factors_;
};

// Relay / source edge without a stored function: copy, zero-padded.
class EmbedFn final : public CompiledFn {
 public:
  EmbedFn(int in_dim, int out_dim) : in_dim_(in_dim), out_dim_(out_dim) {}
  void apply(const Symbol* in, Symbol* out) const override {
    for (int c = 0; c < out_dim_; ++c) out[c] = c < in_dim_ ? in[c] : 0;
  }

 private:
  int in_dim_;
  int out_dim_;
};

std::unique_ptr<CompiledFn> compile(const EdgeFunction& fn, const std::vector<int>& in_dims, int out_dim,
                                    std::int64_t size) {
  if (const auto* lf = std::get_if<LinearForm>(&fn.body)) return std::make_unique<LinearFn>(*lf, in_dims, out_dim);
  if (const auto* lt = std::get_if<LookupTable>(&fn.body))
    return std::make_unique<TableFn>(*lt, in_dims.size(), size);
  if (const auto* pf = std::get_if<PermutedForm>(&fn.body)) return std::make_unique<PermutedFn>(*pf, in_dims.size());
  return std::make_unique<ProductFn>(std::get<ProductForm>(fn.body), in_dims.size());
}

}  // namespace

Symbol apply_scalar(const EdgeFunction& fn, std::span<const Symbol> inputs, std::int64_t alphabet_size) {
  const std::vector<int> ones(inputs.size(), 1);
  check_function(fn, ones, 1, alphabet_size, "function");
  for (Symbol s : inputs)
    require(s < alphabet_size, Errc::invalid_argument, "input symbol out of range");
  Symbol out = 0;
  compile(fn, ones, 1, alphabet_size)->apply(inputs.data(), &out);
  return out;
}

LookupTable to_lookup_table(const EdgeFunction& fn, std::size_t arity, std::int64_t alphabet_size) {
  const std::vector<int> ones(arity, 1);
  check_function(fn, ones, 1, alphabet_size, "function");
  std::uint64_t total = 1;
  for (std::size_t t = 0; t < arity; ++t) {
    total *= static_cast<std::uint64_t>(alphabet_size);
    require(total <= (std::uint64_t{1} << 28), Errc::cap_exceeded, "dense table would be too large");
  }
  const auto compiled = compile(fn, ones, 1, alphabet_size);
  LookupTable out;
  out.table.resize(total);
  std::vector<Symbol> in(arity, 0);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t v = idx;
    for (std::size_t t = arity; t-- > 0;) {
      in[t] = static_cast<Symbol>(v % static_cast<std::uint64_t>(alphabet_size));
      v /= static_cast<std::uint64_t>(alphabet_size);
    }
    compiled->apply(in.data(), &out.table[idx]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluator

namespace {

struct Op {
  std::unique_ptr<CompiledFn> fn;
  std::vector<std::size_t> in_slots;  // buffer index of every input component
  std::size_t out_slot = 0;
  int out_dim = 0;
};

}  // namespace

struct Evaluator::Impl {
  int k = 1;
  int n = 1;
  std::int64_t size = 2;
  std::size_t msg_slots = 0;
  std::size_t buffer = 0;
  std::vector<Op> edge_ops;                 // topological order
  std::vector<std::optional<Op>> decoders;  // per demand
  std::vector<std::size_t> demand_msg_slot;
  Code code;  // owned copy keeps compiled pointers valid

  static void run(const Op& op, std::vector<Symbol>& buf) {
    thread_local std::vector<Symbol> scratch;
    scratch.resize(op.in_slots.size());
    for (std::size_t i = 0; i < op.in_slots.size(); ++i) scratch[i] = buf[op.in_slots[i]];
    op.fn->apply(scratch.data(), &buf[op.out_slot]);
  }
};

Evaluator::Evaluator(const NetworkSpec& net, const Code& code, bool require_decoders)
    : impl_(std::make_unique<Impl>()) {
  const Topology topo = validate_network(net);
  check_code(net, topo, code, require_decoders);
  Impl& I = *impl_;
  I.code = code;
  I.k = code.params.k;
  I.n = code.params.n;
  I.size = code.params.alphabet.size();
  I.msg_slots = net.messages().size() * static_cast<std::size_t>(I.k);
  I.buffer = I.msg_slots + net.edges().size() * static_cast<std::size_t>(I.n);

  auto slots_for = [&](std::size_t node) {
    std::vector<std::size_t> slots;
    for (std::size_t m : topo.messages_at[node])
      for (int c = 0; c < I.k; ++c) slots.push_back(m * I.k + c);
    for (std::size_t e : topo.in_edges[node])
      for (int c = 0; c < I.n; ++c) slots.push_back(I.msg_slots + e * I.n + c);
    return slots;
  };

  for (std::size_t e : topo.edge_order) {
    const Edge& ed = net.edges()[e];
    const std::vector<int> dims = input_dims(node_inputs(net, topo, ed.tail), code.params);
    Op op;
    op.in_slots = slots_for(ed.tail);
    op.out_slot = I.msg_slots + e * I.n;
    op.out_dim = I.n;
    const auto it = I.code.edge_functions.find(ed.id);
    if (it != I.code.edge_functions.end())
      op.fn = compile(it->second, dims, I.n, I.size);
    else
      op.fn = std::make_unique<EmbedFn>(dims[0], I.n);
    I.edge_ops.push_back(std::move(op));
  }
  for (const Demand& d : net.demands()) {
    I.demand_msg_slot.push_back(d.message * I.k);
    const DemandKey key{net.nodes()[d.receiver].id, net.messages()[d.message].id};
    const auto it = I.code.decoders.find(key);
    if (it == I.code.decoders.end()) {
      Op op;
      op.in_slots = slots_for(d.receiver);
      I.decoders.emplace_back(std::move(op));
      I.decoders.back()->fn.reset();
      continue;
    }
    Op op;
    op.in_slots = slots_for(d.receiver);
    op.out_dim = I.k;
    op.fn = compile(it->second, input_dims(node_inputs(net, topo, d.receiver), code.params), I.k, I.size);
    I.decoders.emplace_back(std::move(op));
  }
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

std::size_t Evaluator::message_slots() const { return impl_->msg_slots; }
std::size_t Evaluator::buffer_size() const { return impl_->buffer; }
int Evaluator::k() const { return impl_->k; }
int Evaluator::n() const { return impl_->n; }
std::int64_t Evaluator::alphabet_size() const { return impl_->size; }

void Evaluator::run_edges(std::vector<Symbol>& buffer) const {
  for (const Op& op : impl_->edge_ops) Impl::run(op, buffer);
}

void Evaluator::decode(std::size_t d, const std::vector<Symbol>& buffer, std::vector<Symbol>& out) const {
  const auto& op = impl_->decoders.at(d);
  require(op && op->fn, Errc::invalid_argument, "demand has no decoder");
  thread_local std::vector<Symbol> scratch;
  scratch.resize(op->in_slots.size());
  for (std::size_t i = 0; i < op->in_slots.size(); ++i) scratch[i] = buffer[op->in_slots[i]];
  out.resize(static_cast<std::size_t>(impl_->k));
  op->fn->apply(scratch.data(), out.data());
}

void Evaluator::decoder_inputs(std::size_t d, const std::vector<Symbol>& buffer, std::vector<Symbol>& out) const {
  const auto& op = impl_->decoders.at(d);
  out.resize(op->in_slots.size());
  for (std::size_t i = 0; i < op->in_slots.size(); ++i) out[i] = buffer[op->in_slots[i]];
}

int Evaluator::first_failure(const std::vector<Symbol>& buffer, std::vector<Symbol>* decoded) const {
  thread_local std::vector<Symbol> out;
  const Impl& I = *impl_;
  for (std::size_t d = 0; d < I.decoders.size(); ++d) {
    decode(d, buffer, out);
    for (int c = 0; c < I.k; ++c)
      if (out[c] != buffer[I.demand_msg_slot[d] + c]) {
        if (decoded) *decoded = out;
        return static_cast<int>(d);
      }
  }
  return -1;
}

EvalResult evaluate_code(const NetworkSpec& net, const Code& code, const Assignment& assignment) {
  const Evaluator ev(net, code, true);
  const std::size_t k = static_cast<std::size_t>(code.params.k);
  require(assignment.size() == net.messages().size(), Errc::invalid_argument,
          "assignment must cover every message (" + std::to_string(net.messages().size()) + ")");
  std::vector<Symbol> buf(ev.buffer_size(), 0);
  for (std::size_t m = 0; m < assignment.size(); ++m) {
    require(assignment[m].size() == k, Errc::invalid_argument,
            "assignment for '" + net.messages()[m].id + "' must have " + std::to_string(k) + " components");
    for (std::size_t c = 0; c < k; ++c) {
      require(assignment[m][c] < ev.alphabet_size(), Errc::invalid_argument, "assignment symbol out of range");
      buf[m * k + c] = assignment[m][c];
    }
  }
  ev.run_edges(buf);
  EvalResult out;
  const std::size_t nn = static_cast<std::size_t>(code.params.n);
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    const auto first = buf.begin() + static_cast<std::ptrdiff_t>(ev.message_slots() + e * nn);
    out.edges[net.edges()[e].id] = std::vector<Symbol>(first, first + static_cast<std::ptrdiff_t>(nn));
  }
  std::vector<Symbol> dec;
  for (std::size_t d = 0; d < net.demands().size(); ++d) {
    ev.decode(d, buf, dec);
    const Demand& dm = net.demands()[d];
    out.decoded[{net.nodes()[dm.receiver].id, net.messages()[dm.message].id}] = dec;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::solution: return "solution";
    case Outcome::counterexample: return "counterexample";
    case Outcome::inconclusive: return "inconclusive";
  }
  return "?";
}

std::uint64_t counter_random(std::uint64_t seed, std::uint64_t stream, std::uint64_t draw) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(stream ^ mix(draw)));
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Assignment to_assignment(const std::vector<Symbol>& buf, std::size_t messages, std::size_t k) {
  Assignment a(messages, std::vector<Symbol>(k));
  for (std::size_t m = 0; m < messages; ++m)
    for (std::size_t c = 0; c < k; ++c) a[m][c] = buf[m * k + c];
  return a;
}

Counterexample make_witness(const NetworkSpec& net, const Evaluator& ev, std::vector<Symbol>& buf) {
  ev.run_edges(buf);
  Counterexample cx;
  const int d = ev.first_failure(buf, &cx.decoded);
  require(d >= 0, Errc::invalid_argument, "internal: counterexample does not replay");
  const Demand& dm = net.demands()[static_cast<std::size_t>(d)];
  cx.receiver = net.nodes()[dm.receiver].id;
  cx.message = net.messages()[dm.message].id;
  cx.assignment = to_assignment(buf, net.messages().size(), static_cast<std::size_t>(ev.k()));
  return cx;
}

// Scans indices [0, total) split into contiguous ranges, `fill(index, buf)`
// writes the message part; returns the smallest failing index or total.
template <class Fill>
std::uint64_t parallel_scan(const Evaluator& ev, std::uint64_t total, unsigned workers, Fill fill) {
  workers = std::max(1u, workers);
  if (total < workers) workers = static_cast<unsigned>(std::max<std::uint64_t>(total, 1));
  std::atomic<std::uint64_t> best{total};
  auto job = [&](std::uint64_t lo, std::uint64_t hi) {
    std::vector<Symbol> buf(ev.buffer_size(), 0);
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      if ((idx & 0xff) == 0 && idx >= best.load(std::memory_order_relaxed)) return;
      fill(idx, buf);
      ev.run_edges(buf);
      if (ev.first_failure(buf) >= 0) {
        std::uint64_t cur = best.load();
        while (idx < cur && !best.compare_exchange_weak(cur, idx)) {
        }
        return;
      }
    }
  };
  if (workers == 1) {
    job(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = std::min(total, w * chunk), hi = std::min(total, lo + chunk);
      pool.emplace_back(job, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return best.load();
}

}  // namespace

Verdict verify_exhaustive(const NetworkSpec& net, const Code& code, const VerifyOptions& options) {
  const auto t0 = Clock::now();
  const Evaluator ev(net, code, true);
  const std::size_t digits = ev.message_slots();
  const auto q = static_cast<std::uint64_t>(ev.alphabet_size());
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < digits; ++i) {
    if (total > options.cap / q)
      fail(Errc::cap_exceeded, "exhaustive verification needs " + std::to_string(q) + "^" + std::to_string(digits) +
                                   " assignments, above the cap of " + std::to_string(options.cap) +
                                   "; use basis or random mode");
    total *= q;
  }
  auto fill = [&](std::uint64_t idx, std::vector<Symbol>& buf) {
    for (std::size_t i = digits; i-- > 0;) {
      buf[i] = static_cast<Symbol>(idx % q);
      idx /= q;
    }
  };
  const std::uint64_t bad = parallel_scan(ev, total, options.workers, fill);
  Verdict v;
  v.mode = "exhaustive";
  if (bad < total) {
    std::vector<Symbol> buf(ev.buffer_size(), 0);
    fill(bad, buf);
    v.outcome = Outcome::counterexample;
    v.witness = make_witness(net, ev, buf);
    v.checked = bad + 1;
  } else {
    v.outcome = Outcome::solution;
    v.checked = total;
  }
  v.seconds = since(t0);
  return v;
}

Verdict verify_linear_basis(const NetworkSpec& net, const Code& code, const VerifyOptions& options) {
  const auto t0 = Clock::now();
  require(code.all_linear(), Errc::invalid_argument, "basis verification requires every function to be linear");
  const Evaluator ev(net, code, true);
  const std::size_t digits = ev.message_slots();
  auto fill = [&](std::uint64_t idx, std::vector<Symbol>& buf) {
    std::fill(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(digits), 0);
    buf[idx] = 1;
  };
  const std::uint64_t bad = parallel_scan(ev, digits, options.workers, fill);
  Verdict v;
  v.mode = "basis";
  if (bad < digits) {
    std::vector<Symbol> buf(ev.buffer_size(), 0);
    fill(bad, buf);
    v.outcome = Outcome::counterexample;
    v.witness = make_witness(net, ev, buf);
    v.checked = bad + 1;
  } else {
    v.outcome = Outcome::solution;
    v.checked = digits;
  }
  v.seconds = since(t0);
  return v;
}

Verdict verify_random(const NetworkSpec& net, const Code& code, std::uint64_t samples, std::uint64_t seed,
                      const VerifyOptions& options) {
  const auto t0 = Clock::now();
  require(samples >= 1, Errc::precondition, "random verification needs at least one sample");
  const Evaluator ev(net, code, true);
  const std::size_t digits = ev.message_slots();
  const auto q = static_cast<std::uint64_t>(ev.alphabet_size());
  auto fill = [&](std::uint64_t idx, std::vector<Symbol>& buf) {
    for (std::size_t i = 0; i < digits; ++i) buf[i] = static_cast<Symbol>(counter_random(seed, idx, i) % q);
  };
  const std::uint64_t bad = parallel_scan(ev, samples, options.workers, fill);
  Verdict v;
  v.mode = "random";
  if (bad < samples) {
    std::vector<Symbol> buf(ev.buffer_size(), 0);
    fill(bad, buf);
    v.outcome = Outcome::counterexample;
    v.witness = make_witness(net, ev, buf);
    v.checked = bad + 1;
  } else {
    v.outcome = Outcome::inconclusive;
    v.checked = samples;
  }
  v.seconds = since(t0);
  return v;
}

// ---------------------------------------------------------------------------
// Blocks and Property P

BlockView block_view(const NetworkSpec& net, std::string_view prefix) {
  const std::string p(prefix);
  BlockView b;
  for (std::size_t i = 0; net.has_label(p + "R_" + std::to_string(i)); ++i) {
    const std::size_t r = net.node_index(net.label(p + "R_" + std::to_string(i)));
    const auto it = std::find_if(net.demands().begin(), net.demands().end(),
                                 [&](const Demand& d) { return d.receiver == r; });
    require(it != net.demands().end(), Errc::invalid_argument, "block receiver " + p + "R_" + std::to_string(i) +
                                                                   " has no demand");
    b.inputs.push_back(it->message);
    b.side_edges.push_back(net.edge_index(net.label(p + "e_" + std::to_string(i))));
  }
  require(b.inputs.size() >= 3, Errc::invalid_argument, "no labelled block at '" + p + "'");
  b.m = b.inputs.size() - 1;
  b.sum_edge = net.edge_index(net.label(p + "e"));
  return b;
}

std::vector<std::string> block_prefixes(const NetworkSpec& net) {
  std::vector<std::string> out;
  for (const auto& [role, id] : net.labels())
    if (role.size() >= 2 && role.compare(role.size() - 2, 2, "/e") == 0) out.push_back(role.substr(0, role.size() - 1));
  return out;
}

bool check_property_p(const NetworkSpec& net, const Code& code, std::string_view block_prefix,
                      const PropertyPWitness& witness) {
  require(code.params.k == 1 && code.params.n == 1, Errc::invalid_argument, "Property P is defined for (1,1) codes");
  const BlockView b = block_view(net, block_prefix);
  const AlphabetSpec& g = witness.group;
  const std::int64_t q = code.params.alphabet.size();
  require(g.has_group_law() && g.size() == q, Errc::invalid_argument, "witness group must match the alphabet size");
  require(witness.pis.size() == b.m + 1 && witness.sigmas.size() == b.m + 1, Errc::invalid_argument,
          "witness needs m+1 permutations pi and sigma");
  for (const auto* fam : {&witness.pis, &witness.sigmas})
    for (const Permutation& p : *fam)
      require(p.size() == static_cast<std::size_t>(q), Errc::invalid_argument, "witness permutation size mismatch");

  const Evaluator ev(net, code, false);
  std::vector<Symbol> buf(ev.buffer_size(), 0);
  const std::size_t slots = ev.message_slots();
  std::vector<Symbol> x(b.m + 1, 0);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i <= b.m; ++i) total *= static_cast<std::uint64_t>(q);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t v = idx;
    for (std::size_t i = b.m + 1; i-- > 0;) {
      x[i] = static_cast<Symbol>(v % static_cast<std::uint64_t>(q));
      v /= static_cast<std::uint64_t>(q);
    }
    std::fill(buf.begin(), buf.end(), 0);
    for (std::size_t i = 0; i <= b.m; ++i) buf[b.inputs[i]] = x[i];
    ev.run_edges(buf);
    Symbol all = 0;
    for (std::size_t j = 0; j <= b.m; ++j) all = g.add(all, witness.pis[j](x[j]));
    if (buf[slots + b.sum_edge] != all) return false;
    for (std::size_t i = 0; i <= b.m; ++i) {
      Symbol s = 0;
      for (std::size_t j = 0; j <= b.m; ++j)
        if (j != i) s = g.add(s, witness.pis[j](x[j]));
      if (buf[slots + b.side_edges[i]] != witness.sigmas[i](s)) return false;
    }
  }
  return true;
}

}  // namespace ncnet
