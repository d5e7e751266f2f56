#pragma once

// Network data model, (k,n) codes and the evaluation / verification engine.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ncnet/algebra.hpp"

namespace ncnet {

// ---------------------------------------------------------------------------
// Networks

enum class NodeKind { source, intermediate, receiver };

std::string to_string(NodeKind kind);
NodeKind node_kind_from_string(std::string_view s);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::intermediate;
};

struct Message {
  std::string id;
  std::size_t source = 0;  // node index
};

struct Edge {
  std::string id;
  std::size_t tail = 0;  // node index
  std::size_t head = 0;  // node index
};

struct Demand {
  std::size_t receiver = 0;  // node index
  std::size_t message = 0;   // message index
};

// Directed acyclic multigraph with messages, demands and a role map. Ids
// are unique within nodes, messages and edges respectively; roles (e.g.
// "B1/e_0") map to exactly one id.
class NetworkSpec {
 public:
  std::string family;  // "N0", "N1", ..., "N4" or free text for imported nets

  std::size_t add_node(std::string id, NodeKind kind);
  std::size_t add_message(std::string id, std::size_t source);
  std::size_t add_edge(std::string id, std::size_t tail, std::size_t head);
  void add_demand(std::size_t receiver, std::size_t message);
  void set_label(std::string role, std::string id);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Message>& messages() const { return messages_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Demand>& demands() const { return demands_; }
  const std::map<std::string, std::string>& labels() const { return labels_; }

  std::optional<std::size_t> find_node(std::string_view id) const;
  std::optional<std::size_t> find_message(std::string_view id) const;
  std::optional<std::size_t> find_edge(std::string_view id) const;
  std::size_t node_index(std::string_view id) const;
  std::size_t message_index(std::string_view id) const;
  std::size_t edge_index(std::string_view id) const;
  // Id bound to a role; throws when the role is unknown.
  const std::string& label(std::string_view role) const;
  bool has_label(std::string_view role) const { return labels_.count(std::string(role)) != 0; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t count_nodes(NodeKind kind) const;

  friend bool operator==(const NetworkSpec& a, const NetworkSpec& b);

 private:
  std::vector<Node> nodes_;
  std::vector<Message> messages_;
  std::vector<Edge> edges_;
  std::vector<Demand> demands_;
  std::map<std::string, std::string> labels_;
  std::map<std::string, std::size_t, std::less<>> node_ids_, message_ids_, edge_ids_;
};

// Derived adjacency plus a topological edge order.
struct Topology {
  std::vector<std::size_t> node_order;               // topological
  std::vector<std::size_t> edge_order;               // edges sorted by tail position
  std::vector<std::vector<std::size_t>> in_edges;    // ascending edge index
  std::vector<std::vector<std::size_t>> out_edges;   // ascending edge index
  std::vector<std::vector<std::size_t>> messages_at; // ascending message index
};

// Checks acyclicity, source/receiver roles, demand references and label
// targets; throws Error(invalid_argument) describing the first problem.
Topology validate_network(const NetworkSpec& net);

// Disjoint union. Component i gets id prefix "c{i}." and role prefix
// "c{i}/{family}/".
NetworkSpec disjoint_union(const std::vector<NetworkSpec>& nets);

// Nodes upstream of `node` (inclusive) and the messages they generate.
std::vector<bool> ancestors(const NetworkSpec& net, const Topology& topo, std::size_t node);

// ---------------------------------------------------------------------------
// Codes

struct CodeParams {
  int k = 1;
  int n = 1;
  AlphabetSpec alphabet = AlphabetSpec::cyclic_ring(2);
};

// Linear map sum_t blocks[t] * input_t over Z_q (one block per input, in
// the node's input order).
struct LinearForm {
  std::int64_t modulus = 2;
  std::vector<RingMatrix> blocks;
};

// Dense table for (1,1) codes; inputs form a mixed-radix index with the
// first input most significant.
struct LookupTable {
  std::vector<Symbol> table;
};

// Compact (1,1) function over Z_q: each input is relabelled by an optional
// permutation, `rows` gives integer combinations of the relabelled inputs,
// and the resulting tuple is mapped through `output_table` (sparse; missing
// tuples give 0) or, for a single row without a table, through the optional
// output permutation.
struct PermutedForm {
  std::int64_t modulus = 2;
  std::vector<std::optional<Permutation>> input_perms;
  std::vector<std::vector<std::int64_t>> rows;
  std::optional<Permutation> output_perm;
  std::vector<std::pair<std::vector<Symbol>, Symbol>> output_table;
};

struct EdgeFunction;

// Componentwise action on a product alphabet (mixed radix, leftmost factor
// most significant).
struct ProductForm {
  std::vector<std::int64_t> radices;
  std::vector<EdgeFunction> factors;
};

struct EdgeFunction {
  std::variant<LinearForm, LookupTable, PermutedForm, ProductForm> body;

  bool is_linear() const { return std::holds_alternative<LinearForm>(body); }
};

using DemandKey = std::pair<std::string, std::string>;  // (receiver id, message id)

struct Code {
  CodeParams params;
  std::map<std::string, EdgeFunction> edge_functions;  // by edge id
  std::map<DemandKey, EdgeFunction> decoders;

  // True when every stored function (edges and decoders) is a LinearForm.
  bool all_linear() const;
};

// Number of inputs seen by a node: generated messages then in-edges.
struct NodeInputs {
  std::vector<std::size_t> messages;
  std::vector<std::size_t> edges;
  std::size_t arity() const { return messages.size() + edges.size(); }
};
NodeInputs node_inputs(const NetworkSpec& net, const Topology& topo, std::size_t node);

// Checks that `code` fits `net`: arities, dimensions, carriers, (1,1)-only
// kinds, and (when require_decoders) a decoder for every demand.
void check_code(const NetworkSpec& net, const Topology& topo, const Code& code, bool require_decoders = true);

// Disjoint union of codes matching disjoint_union() id prefixes.
Code disjoint_union(const std::vector<Code>& codes);

// Applies a (1,1) function to one symbol per input.
Symbol apply_scalar(const EdgeFunction& fn, std::span<const Symbol> inputs, std::int64_t alphabet_size);

// Expands a (1,1) function of the given arity into a dense table.
LookupTable to_lookup_table(const EdgeFunction& fn, std::size_t arity, std::int64_t alphabet_size);

// ---------------------------------------------------------------------------
// Evaluation

// Assignment: one k-vector per message, indexed by message index.
using Assignment = std::vector<std::vector<Symbol>>;

struct EvalResult {
  std::map<std::string, std::vector<Symbol>> edges;      // edge id -> n-vector
  std::map<DemandKey, std::vector<Symbol>> decoded;      // -> k-vector
};

EvalResult evaluate_code(const NetworkSpec& net, const Code& code, const Assignment& assignment);

// Compiled form of (net, code) for repeated evaluation. Symbols live in a
// flat buffer: message m component c at m*k + c, edge e component c at
// M*k + e*n + c.
class Evaluator {
 public:
  Evaluator(const NetworkSpec& net, const Code& code, bool require_decoders = true);
  ~Evaluator();
  Evaluator(Evaluator&&) noexcept;
  Evaluator& operator=(Evaluator&&) noexcept;

  std::size_t message_slots() const;
  std::size_t buffer_size() const;
  int k() const;
  int n() const;
  std::int64_t alphabet_size() const;

  // Fills the edge part of `buffer`; the message part must already be set.
  void run_edges(std::vector<Symbol>& buffer) const;
  // Index of the first demand (in network order) whose decoder output
  // differs from the message, or -1. `decoded` receives that output.
  int first_failure(const std::vector<Symbol>& buffer, std::vector<Symbol>* decoded = nullptr) const;
  // Decoder output for demand `d`.
  void decode(std::size_t d, const std::vector<Symbol>& buffer, std::vector<Symbol>& out) const;
  // Gathers the receiver-side inputs of demand `d` into `out` (flattened).
  void decoder_inputs(std::size_t d, const std::vector<Symbol>& buffer, std::vector<Symbol>& out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Verification

enum class Outcome { solution, counterexample, inconclusive };
std::string to_string(Outcome o);

struct Counterexample {
  Assignment assignment;
  std::string receiver;
  std::string message;
  std::vector<Symbol> decoded;
};

struct Verdict {
  Outcome outcome = Outcome::inconclusive;
  std::optional<Counterexample> witness;
  std::uint64_t checked = 0;
  double seconds = 0.0;
  std::string mode;
};

inline constexpr std::uint64_t kDefaultCap = std::uint64_t{1} << 26;

struct VerifyOptions {
  std::uint64_t cap = kDefaultCap;
  unsigned workers = 1;
};

// Every assignment in lexicographic order (message index, then component,
// most significant first). Throws Error(cap_exceeded) past options.cap.
Verdict verify_exhaustive(const NetworkSpec& net, const Code& code, const VerifyOptions& options = {});
// Standard-basis assignments only; every function must be a LinearForm.
Verdict verify_linear_basis(const NetworkSpec& net, const Code& code, const VerifyOptions& options = {});
// `samples` pseudo-random assignments derived from (seed, sample index).
// Never reports solution.
Verdict verify_random(const NetworkSpec& net, const Code& code, std::uint64_t samples, std::uint64_t seed,
                      const VerifyOptions& options = {});

// Counter-based generator: value depends only on (seed, stream, draw).
std::uint64_t counter_random(std::uint64_t seed, std::uint64_t stream, std::uint64_t draw);

// ---------------------------------------------------------------------------
// Blocks and Property P

// Locates a labelled block: role prefix such as "B1/" or "c0/N2/B1/".
struct BlockView {
  std::size_t m = 0;                         // block B(m) has m+1 inputs
  std::vector<std::size_t> inputs;           // message indices x_0..x_m
  std::vector<std::size_t> side_edges;       // e_0..e_m (edge indices)
  std::size_t sum_edge = 0;                  // e
};

BlockView block_view(const NetworkSpec& net, std::string_view prefix);
// Role prefixes of every block in the network, in label order.
std::vector<std::string> block_prefixes(const NetworkSpec& net);

struct PropertyPWitness {
  AlphabetSpec group = AlphabetSpec::cyclic_ring(2);
  std::vector<Permutation> pis;
  std::vector<Permutation> sigmas;
};

// True iff for every tuple of block inputs (other messages held at 0) the
// block's edge symbols equal sigma_i(sum_{j != i} pi_j(x_j)) and
// sum_j pi_j(x_j) under the witness group.
bool check_property_p(const NetworkSpec& net, const Code& code, std::string_view block_prefix,
                      const PropertyPWitness& witness);

}  // namespace ncnet
