#include "ncnet/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ncnet/error.hpp"

namespace ncnet {

using json = nlohmann::ordered_json;

namespace {

constexpr int kIndent = 2;

std::string dump(const json& j) { return j.dump(kIndent) + "\n"; }

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::parse, std::string("malformed JSON: ") + e.what());
  }
}

// Field access that reports schema problems as parse errors.
const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(Errc::parse, std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    fail(Errc::parse, std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(Errc::parse, std::string(what) + ": " + e.what());
  }
}

json alphabet_json(const AlphabetSpec& a) {
  json j;
  j["kind"] = to_string(a.kind());
  j["size"] = a.size();
  if (a.kind() == AlphabetSpec::Kind::abelian_group) j["orders"] = a.cyclic_orders();
  if (a.kind() == AlphabetSpec::Kind::product) {
    json parts = json::array();
    for (const AlphabetSpec& c : a.components()) parts.push_back(alphabet_json(c));
    j["components"] = parts;
  }
  return j;
}

AlphabetSpec alphabet_parse(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "plain_set") return AlphabetSpec::plain_set(get<std::int64_t>(j, "size"));
  if (kind == "cyclic_ring") return AlphabetSpec::cyclic_ring(get<std::int64_t>(j, "size"));
  if (kind == "prime_field") return AlphabetSpec::prime_field(get<std::int64_t>(j, "size"));
  if (kind == "abelian_group") return AlphabetSpec::abelian_group(get<std::vector<std::int64_t>>(j, "orders"));
  if (kind == "product") {
    std::vector<AlphabetSpec> parts;
    for (const json& c : field(j, "components")) parts.push_back(alphabet_parse(c));
    return AlphabetSpec::product(std::move(parts));
  }
  fail(Errc::parse, "unknown alphabet kind '" + kind + "'");
}

json perm_json(const std::optional<Permutation>& p) { return p ? json(p->mapping()) : json(nullptr); }

std::optional<Permutation> perm_parse(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Permutation(as<std::vector<Symbol>>(j, "permutation"));
}

json function_json(const EdgeFunction& fn) {
  json j;
  if (const auto* lf = std::get_if<LinearForm>(&fn.body)) {
    j["kind"] = "linear";
    j["modulus"] = lf->modulus;
    json blocks = json::array();
    for (const RingMatrix& b : lf->blocks) {
      json rows = json::array();
      for (std::size_t r = 0; r < b.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < b.cols(); ++c) row.push_back(b(r, c));
        rows.push_back(row);
      }
      blocks.push_back(json{{"rows", b.rows()}, {"cols", b.cols()}, {"entries", rows}});
    }
    j["blocks"] = blocks;
  } else if (const auto* lt = std::get_if<LookupTable>(&fn.body)) {
    j["kind"] = "table";
    j["table"] = lt->table;
  } else if (const auto* pf = std::get_if<PermutedForm>(&fn.body)) {
    j["kind"] = "permuted";
    j["modulus"] = pf->modulus;
    json perms = json::array();
    for (const auto& p : pf->input_perms) perms.push_back(perm_json(p));
    j["input_perms"] = perms;
    j["rows"] = pf->rows;
    j["output_perm"] = perm_json(pf->output_perm);
    json table = json::array();
    for (const auto& [tuple, value] : pf->output_table) table.push_back(json::array({tuple, value}));
    j["output_table"] = table;
  } else {
    const auto& pr = std::get<ProductForm>(fn.body);
    j["kind"] = "product";
    j["radices"] = pr.radices;
    json factors = json::array();
    for (const EdgeFunction& f : pr.factors) factors.push_back(function_json(f));
    j["factors"] = factors;
  }
  return j;
}

EdgeFunction function_parse(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "linear") {
    LinearForm lf;
    lf.modulus = get<std::int64_t>(j, "modulus");
    require(lf.modulus >= 2, Errc::parse, "linear modulus must be at least 2");
    const AlphabetSpec carrier = is_prime(lf.modulus) ? AlphabetSpec::prime_field(lf.modulus)
                                                      : AlphabetSpec::cyclic_ring(lf.modulus);
    for (const json& b : field(j, "blocks")) {
      const auto rows = get<std::size_t>(b, "rows");
      const auto cols = get<std::size_t>(b, "cols");
      const auto entries = get<std::vector<std::vector<std::int64_t>>>(b, "entries");
      require(entries.size() == rows, Errc::parse, "matrix row count mismatch");
      std::vector<std::int64_t> flat;
      for (const auto& row : entries) {
        require(row.size() == cols, Errc::parse, "matrix column count mismatch");
        flat.insert(flat.end(), row.begin(), row.end());
      }
      lf.blocks.emplace_back(rows, cols, carrier, std::move(flat));
    }
    return {lf};
  }
  if (kind == "table") return {LookupTable{get<std::vector<Symbol>>(j, "table")}};
  if (kind == "permuted") {
    PermutedForm pf;
    pf.modulus = get<std::int64_t>(j, "modulus");
    for (const json& p : field(j, "input_perms")) pf.input_perms.push_back(perm_parse(p));
    pf.rows = get<std::vector<std::vector<std::int64_t>>>(j, "rows");
    pf.output_perm = perm_parse(field(j, "output_perm"));
    for (const json& entry : field(j, "output_table")) {
      require(entry.is_array() && entry.size() == 2, Errc::parse, "output table entries are [tuple, value] pairs");
      pf.output_table.emplace_back(as<std::vector<Symbol>>(entry[0], "output table key"),
                                   as<Symbol>(entry[1], "output table value"));
    }
    return {pf};
  }
  if (kind == "product") {
    ProductForm pr;
    pr.radices = get<std::vector<std::int64_t>>(j, "radices");
    for (const json& f : field(j, "factors")) pr.factors.push_back(function_parse(f));
    return {pr};
  }
  fail(Errc::parse, "unknown function kind '" + kind + "'");
}

json verdict_json(const Verdict& v) {
  json j;
  j["mode"] = v.mode;
  j["outcome"] = to_string(v.outcome);
  j["checked"] = v.checked;
  j["seconds"] = v.seconds;
  if (v.witness) {
    json w;
    w["assignment"] = v.witness->assignment;
    w["receiver"] = v.witness->receiver;
    w["message"] = v.witness->message;
    w["decoded"] = v.witness->decoded;
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

// Rethrows library errors other than ours as parse failures.
template <class F>
auto guarded(F f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::parse) throw;
    fail(Errc::parse, e.what());
  } catch (const json::exception& e) {
    fail(Errc::parse, e.what());
  }
}

}  // namespace

std::string network_to_json(const NetworkSpec& net) {
  json j;
  j["format"] = "ncnet-network";
  j["version"] = 1;
  j["family"] = net.family;
  json nodes = json::array();
  for (const Node& n : net.nodes()) nodes.push_back(json{{"id", n.id}, {"kind", to_string(n.kind)}});
  j["nodes"] = nodes;
  json msgs = json::array();
  for (const Message& m : net.messages()) msgs.push_back(json{{"id", m.id}, {"source", net.nodes()[m.source].id}});
  j["messages"] = msgs;
  json edges = json::array();
  for (const Edge& e : net.edges())
    edges.push_back(json{{"id", e.id}, {"tail", net.nodes()[e.tail].id}, {"head", net.nodes()[e.head].id}});
  j["edges"] = edges;
  json demands = json::array();
  for (const Demand& d : net.demands())
    demands.push_back(json{{"receiver", net.nodes()[d.receiver].id}, {"message", net.messages()[d.message].id}});
  j["demands"] = demands;
  json labels = json::object();
  for (const auto& [role, id] : net.labels()) labels[role] = id;
  j["labels"] = labels;
  return dump(j);
}

NetworkSpec network_from_json(std::string_view text) {
  const json j = parse(text);
  return guarded([&] {
    require(get<std::string>(j, "format") == "ncnet-network", Errc::parse, "not a network document");
    NetworkSpec net;
    net.family = get<std::string>(j, "family");
    for (const json& n : field(j, "nodes"))
      net.add_node(get<std::string>(n, "id"), node_kind_from_string(get<std::string>(n, "kind")));
    for (const json& m : field(j, "messages"))
      net.add_message(get<std::string>(m, "id"), net.node_index(get<std::string>(m, "source")));
    for (const json& e : field(j, "edges"))
      net.add_edge(get<std::string>(e, "id"), net.node_index(get<std::string>(e, "tail")),
                   net.node_index(get<std::string>(e, "head")));
    for (const json& d : field(j, "demands"))
      net.add_demand(net.node_index(get<std::string>(d, "receiver")),
                     net.message_index(get<std::string>(d, "message")));
    for (const auto& [role, id] : field(j, "labels").items()) net.set_label(role, as<std::string>(id, "label"));
    validate_network(net);
    return net;
  });
}

std::string code_to_json(const Code& code) {
  json j;
  j["format"] = "ncnet-code";
  j["version"] = 1;
  j["k"] = code.params.k;
  j["n"] = code.params.n;
  j["alphabet"] = alphabet_json(code.params.alphabet);
  json edges = json::array();
  for (const auto& [id, fn] : code.edge_functions) edges.push_back(json{{"edge", id}, {"function", function_json(fn)}});
  j["edge_functions"] = edges;
  json decs = json::array();
  for (const auto& [key, fn] : code.decoders)
    decs.push_back(json{{"receiver", key.first}, {"message", key.second}, {"function", function_json(fn)}});
  j["decoders"] = decs;
  return dump(j);
}

Code code_from_json(std::string_view text) {
  const json j = parse(text);
  return guarded([&] {
    require(get<std::string>(j, "format") == "ncnet-code", Errc::parse, "not a code document");
    Code code;
    code.params.k = get<int>(j, "k");
    code.params.n = get<int>(j, "n");
    require(code.params.k >= 1 && code.params.n >= 1, Errc::parse, "k and n must be positive");
    code.params.alphabet = alphabet_parse(field(j, "alphabet"));
    for (const json& e : field(j, "edge_functions")) {
      const bool fresh =
          code.edge_functions.emplace(get<std::string>(e, "edge"), function_parse(field(e, "function"))).second;
      require(fresh, Errc::parse, "edge assigned twice");
    }
    for (const json& d : field(j, "decoders")) {
      const DemandKey key{get<std::string>(d, "receiver"), get<std::string>(d, "message")};
      const bool fresh = code.decoders.emplace(key, function_parse(field(d, "function"))).second;
      require(fresh, Errc::parse, "decoder assigned twice");
    }
    return code;
  });
}

std::string alphabet_to_json(const AlphabetSpec& a) { return dump(alphabet_json(a)); }

AlphabetSpec alphabet_from_json(std::string_view text) {
  const json j = parse(text);
  return guarded([&] { return alphabet_parse(j); });
}

std::string verdict_to_json(const Verdict& v) { return dump(verdict_json(v)); }

std::string network_to_dot(const NetworkSpec& net) {
  std::map<std::string, std::string> role_of;
  for (const auto& [role, id] : net.labels()) role_of.emplace(id, role);
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '\n') {
        out += "\\n";
        continue;
      }
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::vector<std::vector<std::string>> generated(net.nodes().size());
  for (const Message& m : net.messages()) generated[m.source].push_back(m.id);

  std::ostringstream os;
  os << "digraph " << quote(net.family.empty() ? "network" : net.family) << " {\n";
  for (std::size_t v = 0; v < net.nodes().size(); ++v) {
    const Node& n = net.nodes()[v];
    std::string label = n.id;
    for (const std::string& m : generated[v]) label += "\n" + m;
    os << "  " << quote(n.id) << " [label=" << quote(label);
    if (n.kind == NodeKind::source) os << ", shape=box";
    if (n.kind == NodeKind::receiver) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (const Edge& e : net.edges()) {
    os << "  " << quote(net.nodes()[e.tail].id) << " -> " << quote(net.nodes()[e.head].id);
    const auto it = role_of.find(e.id);
    if (it != role_of.end()) os << " [label=" << quote(it->second) << "]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::io, "cannot write '" + path + "'");
  out << text;
  require(out.good(), Errc::io, "write to '" + path + "' failed");
}

}  // namespace ncnet
