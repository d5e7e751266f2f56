#include "ncnet/builders.hpp"

#include <algorithm>
#include <cctype>

#include "ncnet/error.hpp"

namespace ncnet {

namespace {

constexpr std::int64_t kMaxNodes = 5'000'000;

struct BlockNodes {
  std::string tag;
  std::vector<std::size_t> u, v, r;
  std::size_t uu = 0, vv = 0;
};

std::string istr(std::int64_t i) { return std::to_string(i); }

std::size_t link(NetworkSpec& net, std::size_t tail, std::size_t head) {
  return net.add_edge(net.nodes()[tail].id + ">" + net.nodes()[head].id, tail, head);
}

// Internal nodes, coded edges e_i / e and the receiver feeds of B(m).
BlockNodes add_block_nodes(NetworkSpec& net, const std::string& tag, int m) {
  require(m >= 2, Errc::invalid_argument, "block B(m) needs m >= 2, got " + istr(m));
  BlockNodes b;
  b.tag = tag;
  auto node = [&](const std::string& local, const std::string& role, NodeKind kind) {
    const std::size_t idx = net.add_node(tag + "." + local, kind);
    net.set_label(tag + "/" + role, net.nodes()[idx].id);
    return idx;
  };
  for (int i = 0; i <= m; ++i) b.u.push_back(node("u" + istr(i), "u_" + istr(i), NodeKind::intermediate));
  b.uu = node("u", "u", NodeKind::intermediate);
  for (int i = 0; i <= m; ++i) b.v.push_back(node("v" + istr(i), "v_" + istr(i), NodeKind::intermediate));
  b.vv = node("v", "v", NodeKind::intermediate);
  for (int i = 0; i <= m; ++i) b.r.push_back(node("R" + istr(i), "R_" + istr(i), NodeKind::receiver));

  for (int i = 0; i <= m; ++i) {
    net.add_edge(tag + ".e" + istr(i), b.u[i], b.v[i]);
    net.set_label(tag + "/e_" + istr(i), tag + ".e" + istr(i));
  }
  net.add_edge(tag + ".e", b.uu, b.vv);
  net.set_label(tag + "/e", tag + ".e");
  for (int i = 0; i <= m; ++i) {
    link(net, b.v[i], b.r[i]);
    link(net, b.vv, b.r[i]);
  }
  return b;
}

// Delivers input i (message msgs[i]) to u_j for j != i and to u; R_i
// demands it.
void wire_inputs(NetworkSpec& net, const BlockNodes& b, const std::vector<std::size_t>& msgs) {
  const std::size_t m1 = b.u.size();
  for (std::size_t i = 0; i < m1; ++i) {
    const std::size_t src = net.messages()[msgs[i]].source;
    for (std::size_t j = 0; j < m1; ++j)
      if (j != i) link(net, src, b.u[j]);
    link(net, src, b.uu);
  }
  for (std::size_t i = 0; i < m1; ++i) net.add_demand(b.r[i], msgs[i]);
}

void add_output(NetworkSpec& net, const BlockNodes& b, int i, std::size_t head) {
  const std::size_t e = link(net, b.v[i], head);
  net.set_label(b.tag + "/out_" + istr(i), net.edges()[e].id);
}

std::size_t add_source(NetworkSpec& net, const std::string& node_id, const std::string& msg_id,
                       const std::string& node_role, const std::string& msg_role) {
  const std::size_t s = net.add_node(node_id, NodeKind::source);
  const std::size_t x = net.add_message(msg_id, s);
  net.set_label(node_role, node_id);
  net.set_label(msg_role, msg_id);
  return x;
}

// Sources and block shared by N0 and N1.
BlockNodes n0_core(NetworkSpec& net, int m) {
  require(m >= 2, Errc::invalid_argument, "need m >= 2, got " + istr(m));
  require(node_count_formula("N0", {m}) <= kMaxNodes, Errc::invalid_argument, "network too large");
  std::vector<std::size_t> msgs;
  for (int i = 0; i <= m; ++i)
    msgs.push_back(add_source(net, "S" + istr(i), "x" + istr(i), "B1/S_" + istr(i), "B1/x_" + istr(i)));
  BlockNodes b = add_block_nodes(net, "B1", m);
  wire_inputs(net, b, msgs);
  return b;
}

}  // namespace

BlockFragment build_block(int m) {
  BlockFragment f;
  f.m = m;
  const BlockNodes b = add_block_nodes(f.net, "B1", m);
  f.net.family = "B";
  for (int i = 0; i <= m; ++i) {
    std::vector<std::size_t> targets;
    for (int j = 0; j <= m; ++j)
      if (j != i) targets.push_back(b.u[j]);
    targets.push_back(b.uu);
    f.input_targets.push_back(std::move(targets));
  }
  f.receivers = b.r;
  f.output_tails = b.v;
  return f;
}

NetworkSpec build_n0(int m) {
  NetworkSpec net;
  net.family = "N0";
  n0_core(net, m);
  return net;
}

NetworkSpec build_n1(int m) {
  NetworkSpec net;
  net.family = "N1";
  const BlockNodes b = n0_core(net, m);
  const std::size_t rx = net.add_node("Rx", NodeKind::receiver);
  net.set_label("R_x", "Rx");
  for (int i = 0; i <= m; ++i) add_output(net, b, i, rx);
  net.add_demand(rx, net.message_index("x0"));
  return net;
}

NetworkSpec build_n2(int m, int w) {
  require(m >= 2, Errc::invalid_argument, "N2(m,w) needs m >= 2, got m = " + istr(m));
  require(w >= 1, Errc::invalid_argument, "N2(m,w) needs w >= 1, got w = " + istr(w));
  require(node_count_formula("N2", {m, w}) <= kMaxNodes, Errc::invalid_argument, "network too large");
  NetworkSpec net;
  net.family = "N2";
  const std::size_t z = add_source(net, "Sz", "z", "S_z", "z");
  std::vector<BlockNodes> blocks;
  for (int l = 1; l <= w; ++l) {
    const std::string tag = "B" + istr(l);
    std::vector<std::size_t> msgs{z};
    for (int i = 1; i <= m + 1; ++i)
      msgs.push_back(add_source(net, "S" + istr(l) + "." + istr(i), "x" + istr(l) + "." + istr(i),
                                tag + "/S_" + istr(i), tag + "/x_" + istr(i)));
    blocks.push_back(add_block_nodes(net, tag, m + 1));
    wire_inputs(net, blocks.back(), msgs);
  }
  const std::size_t rz = net.add_node("Rz", NodeKind::receiver);
  net.set_label("R_z", "Rz");
  for (const BlockNodes& b : blocks)
    for (int i = 1; i <= m + 1; ++i) add_output(net, b, i, rz);
  net.add_demand(rz, z);
  return net;
}

NetworkSpec build_n3(int m1, int m2) {
  require(m1 >= 2 && m2 >= 2, Errc::invalid_argument,
          "N3(m1,m2) needs m1, m2 >= 2, got (" + istr(m1) + "," + istr(m2) + ")");
  require(node_count_formula("N3", {m1, m2}) <= kMaxNodes, Errc::invalid_argument, "network too large");
  NetworkSpec net;
  net.family = "N3";
  const std::size_t z = add_source(net, "Sz", "z", "S_z", "z");
  std::vector<BlockNodes> blocks;
  const int ms[2] = {m1, m2};
  for (int l = 1; l <= 2; ++l) {
    const std::string tag = "B" + istr(l);
    std::vector<std::size_t> msgs{z};
    for (int i = 1; i <= ms[l - 1]; ++i)
      msgs.push_back(add_source(net, "S" + istr(l) + "." + istr(i), "x" + istr(l) + "." + istr(i),
                                tag + "/S_" + istr(i), tag + "/x_" + istr(i)));
    blocks.push_back(add_block_nodes(net, tag, ms[l - 1]));
    wire_inputs(net, blocks.back(), msgs);
  }
  const std::size_t rz = net.add_node("Rz", NodeKind::receiver);
  net.set_label("R_z", "Rz");
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i <= ms[l]; ++i) add_output(net, blocks[l], i, rz);
  net.add_demand(rz, z);
  return net;
}

std::string N4Component::name() const {
  std::string s = family + "(";
  for (std::size_t i = 0; i < params.size(); ++i) s += (i ? "," : "") + std::to_string(params[i]);
  return s + ")";
}

std::vector<N4Component> n4_components(std::int64_t m) {
  require(m >= 2, Errc::invalid_argument, "N4(m) needs m >= 2, got " + std::to_string(m));
  const PrimeSignature sig = factorize(m);
  std::vector<N4Component> out;
  for (std::int64_t q : primes_below(f_value(sig)))
    if (m % q != 0) out.push_back({"N1", {q}});
  for (std::size_t i = 0; i < sig.omega(); ++i) {
    const std::int64_t pg = sig.prime_power(i);
    out.push_back({"N2", {pg, m / pg}});
  }
  for (std::size_t i = 0; i < sig.omega(); ++i)
    if (sig.exponents[i] > 1) out.push_back({"N3", {sig.primes[i], g_value(sig, i)}});
  return out;
}

NetworkSpec build_component(const N4Component& c) { return build_family(c.family, c.params); }

NetworkSpec build_n4(std::int64_t m) {
  const auto comps = n4_components(m);
  require(node_count_formula("N4", {m}) <= kMaxNodes, Errc::invalid_argument,
          "N4(" + std::to_string(m) + ") would exceed " + std::to_string(kMaxNodes) + " nodes");
  std::vector<NetworkSpec> nets;
  for (const auto& c : comps) nets.push_back(build_component(c));
  NetworkSpec net = disjoint_union(nets);
  net.family = "N4";
  return net;
}

std::int64_t node_count_formula(const std::string& family, const std::vector<std::int64_t>& p) {
  auto need = [&](std::size_t count) {
    require(p.size() == count, Errc::invalid_argument,
            family + " takes " + std::to_string(count) + " parameter(s), got " + std::to_string(p.size()));
  };
  if (family == "N0") return need(1), 4 * p[0] + 6;
  if (family == "N1") return need(1), 4 * p[0] + 7;
  if (family == "N2") return need(2), 4 * p[0] * p[1] + 9 * p[1] + 2;
  if (family == "N3") return need(2), 4 * p[0] + 4 * p[1] + 12;
  if (family == "N4") {
    need(1);
    std::int64_t total = 0;
    for (const auto& c : n4_components(p[0])) total += node_count_formula(c.family, c.params);
    return total;
  }
  fail(Errc::invalid_argument, "unknown family '" + family + "'");
}

NetworkSpec build_family(const std::string& family, const std::vector<std::int64_t>& p) {
  std::string f = family;
  std::transform(f.begin(), f.end(), f.begin(), [](unsigned char c) { return std::toupper(c); });
  auto need = [&](std::size_t count) {
    require(p.size() == count, Errc::invalid_argument,
            f + " takes " + std::to_string(count) + " parameter(s), got " + std::to_string(p.size()));
    for (std::int64_t v : p)
      require(v >= -1'000'000'000 && v <= 1'000'000'000, Errc::invalid_argument, "parameter out of range");
  };
  if (f == "N0") return need(1), build_n0(static_cast<int>(p[0]));
  if (f == "N1") return need(1), build_n1(static_cast<int>(p[0]));
  if (f == "N2") return need(2), build_n2(static_cast<int>(p[0]), static_cast<int>(p[1]));
  if (f == "N3") return need(2), build_n3(static_cast<int>(p[0]), static_cast<int>(p[1]));
  if (f == "N4") return need(1), build_n4(p[0]);
  fail(Errc::invalid_argument, "unknown family '" + family + "'");
}

}  // namespace ncnet
