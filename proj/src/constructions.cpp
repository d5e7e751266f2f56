#include "ncnet/constructions.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ncnet/error.hpp"

namespace ncnet {

namespace {

std::string istr(std::int64_t v) { return std::to_string(v); }

// Network plus the code under construction.
struct Ctx {
  NetworkSpec net;
  Topology topo;
  AlphabetSpec carrier;
  int k = 1;
  int n = 1;
  Code code;

  Ctx(NetworkSpec network, AlphabetSpec alphabet, int k_, int n_)
      : net(std::move(network)), topo(validate_network(net)), carrier(std::move(alphabet)), k(k_), n(n_) {
    code.params = {k, n, carrier};
  }

  std::size_t edge_into(std::size_t node, std::size_t tail) const {
    for (std::size_t e : topo.in_edges[node])
      if (net.edges()[e].tail == tail) return e;
    fail(Errc::invalid_argument, "no edge " + net.nodes()[tail].id + " -> " + net.nodes()[node].id);
  }
  std::size_t msg_edge_into(std::size_t node, std::size_t msg) const {
    return edge_into(node, net.messages()[msg].source);
  }
  std::size_t position(std::size_t node, std::size_t edge) const {
    const auto& in = topo.in_edges[node];
    const auto it = std::find(in.begin(), in.end(), edge);
    require(it != in.end(), Errc::invalid_argument, "edge does not enter node");
    return topo.messages_at[node].size() + static_cast<std::size_t>(it - in.begin());
  }
  std::size_t arity(std::size_t node) const { return topo.messages_at[node].size() + topo.in_edges[node].size(); }
  DemandKey key(std::size_t receiver, std::size_t msg) const {
    return {net.nodes()[receiver].id, net.messages()[msg].id};
  }
};

// Labelled block B(m) inside a network.
struct Blk {
  std::string tag;  // role prefix, e.g. "B1/"
  int m = 0;
  std::vector<std::size_t> u, v, r, msgs, side;
  std::vector<std::optional<std::size_t>> out;
  std::size_t uu = 0, vv = 0, sum = 0;
};

Blk block(const Ctx& c, const std::string& tag) {
  const BlockView view = block_view(c.net, tag);
  Blk b;
  b.tag = tag;
  b.m = static_cast<int>(view.m);
  b.msgs = view.inputs;
  b.side = view.side_edges;
  b.sum = view.sum_edge;
  auto node = [&](const std::string& role) { return c.net.node_index(c.net.label(tag + role)); };
  for (int i = 0; i <= b.m; ++i) {
    b.u.push_back(node("u_" + istr(i)));
    b.v.push_back(node("v_" + istr(i)));
    b.r.push_back(node("R_" + istr(i)));
    const std::string out_role = tag + "out_" + istr(i);
    b.out.push_back(c.net.has_label(out_role) ? std::optional(c.net.edge_index(c.net.label(out_role)))
                                              : std::nullopt);
  }
  b.uu = node("u");
  b.vv = node("v");
  return b;
}

// Linear function at one node; components are 1-based in add().
class Lin {
 public:
  Lin(const Ctx& c, std::size_t node, int out_dim) : c_(c), node_(node), out_dim_(out_dim) {}

  void add(std::size_t in_edge, int out_comp, int in_comp, std::int64_t coef) {
    require(out_comp >= 1 && out_comp <= out_dim_ && in_comp >= 1 && in_comp <= c_.n, Errc::invalid_argument,
            "internal: component index out of range");
    auto it = parts_.find(in_edge);
    if (it == parts_.end()) it = parts_.emplace(in_edge, RingMatrix(out_dim_, c_.n, c_.carrier)).first;
    RingMatrix& mtx = it->second;
    mtx.set(out_comp - 1, in_comp - 1, mtx(out_comp - 1, in_comp - 1) + coef);
  }
  // Term on the message carried by the in-edge from its source.
  void add_msg(std::size_t msg, int out_comp, int in_comp, std::int64_t coef) {
    add(c_.msg_edge_into(node_, msg), out_comp, in_comp, coef);
  }

  EdgeFunction build() const {
    LinearForm lf;
    lf.modulus = c_.carrier.size();
    for (std::size_t mm : c_.topo.messages_at[node_]) {
      (void)mm;
      lf.blocks.emplace_back(out_dim_, c_.k, c_.carrier);
    }
    for (std::size_t e : c_.topo.in_edges[node_]) {
      const auto it = parts_.find(e);
      lf.blocks.push_back(it != parts_.end() ? it->second : RingMatrix(out_dim_, c_.n, c_.carrier));
    }
    return {lf};
  }

 private:
  const Ctx& c_;
  std::size_t node_;
  int out_dim_;
  std::map<std::size_t, RingMatrix> parts_;
};

// Single-row (1,1) function sum_t coef_t * perm_t(input_t), optionally
// followed by an output permutation; linear when no permutation is used.
EdgeFunction scalar_fn(const Ctx& c, std::size_t node, const std::vector<std::pair<std::size_t, std::int64_t>>& terms,
                       const std::map<std::size_t, Permutation>& perms = {},
                       const std::optional<Permutation>& out_perm = std::nullopt) {
  const bool plain = std::all_of(perms.begin(), perms.end(), [](const auto& kv) { return kv.second.is_identity(); }) &&
                     (!out_perm || out_perm->is_identity());
  if (plain) {
    Lin lin(c, node, 1);
    for (const auto& [e, coef] : terms) lin.add(e, 1, 1, coef);
    return lin.build();
  }
  const std::int64_t q = c.carrier.size();
  PermutedForm pf;
  pf.modulus = q;
  pf.input_perms.assign(c.arity(node), std::nullopt);
  std::vector<std::int64_t> row(c.arity(node), 0);
  for (const auto& [e, coef] : terms) {
    const std::size_t pos = c.position(node, e);
    row[pos] = mod(row[pos] + coef, q);
  }
  for (const auto& [e, p] : perms)
    if (!p.is_identity()) pf.input_perms[c.position(node, e)] = p;
  pf.rows.push_back(row);
  if (out_perm && !out_perm->is_identity()) pf.output_perm = out_perm;
  return {pf};
}

// Scalar block code e_i = sum_{j != i} x_j, e = sum_j x_j with x_0 read
// through pi0; R_0 applies pi0^-1 to e - e_0, R_i decodes e - e_i.
void scalar_block(Ctx& c, const Blk& b, const std::optional<Permutation>& pi0 = std::nullopt) {
  auto enc = [&](std::size_t node, int skip) {
    std::vector<std::pair<std::size_t, std::int64_t>> terms;
    std::map<std::size_t, Permutation> perms;
    for (int j = 0; j <= b.m; ++j) {
      if (j == skip) continue;
      const std::size_t e = c.msg_edge_into(node, b.msgs[j]);
      terms.emplace_back(e, 1);
      if (j == 0 && pi0) perms.emplace(e, *pi0);
    }
    return scalar_fn(c, node, terms, perms);
  };
  for (int i = 0; i <= b.m; ++i) c.code.edge_functions[c.net.edges()[b.side[i]].id] = enc(b.u[i], i);
  c.code.edge_functions[c.net.edges()[b.sum].id] = enc(b.uu, -1);
  for (int i = 0; i <= b.m; ++i) {
    const std::vector<std::pair<std::size_t, std::int64_t>> terms{{c.edge_into(b.r[i], b.vv), 1},
                                                                  {c.edge_into(b.r[i], b.v[i]), -1}};
    std::optional<Permutation> out;
    if (i == 0 && pi0) out = pi0->inverse();
    c.code.decoders[c.key(b.r[i], b.msgs[i])] = scalar_fn(c, b.r[i], terms, {}, out);
  }
}

void require_carrier(const AlphabetSpec& carrier) {
  require(carrier.is_ring(), Errc::invalid_argument, "carrier must be a cyclic ring or a prime field");
}

std::size_t demand_msg(const NetworkSpec& net, const std::string& receiver_role) {
  const std::size_t r = net.node_index(net.label(receiver_role));
  for (const Demand& d : net.demands())
    if (d.receiver == r) return d.message;
  fail(Errc::invalid_argument, "receiver without demand");
}

std::vector<std::pair<std::vector<Symbol>, Symbol>> invert(const std::vector<std::vector<Symbol>>& images,
                                                          const std::string& what) {
  std::map<std::vector<Symbol>, Symbol> seen;
  std::vector<std::pair<std::vector<Symbol>, Symbol>> out;
  for (std::size_t a = 0; a < images.size(); ++a) {
    const bool fresh = seen.emplace(images[a], static_cast<Symbol>(a)).second;
    require(fresh, Errc::invalid_argument, "internal: " + what + " tuple map is not injective");
    out.emplace_back(images[a], static_cast<Symbol>(a));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scalar linear codes

Code n0_scalar_linear(int m, const AlphabetSpec& carrier) {
  require_carrier(carrier);
  Ctx c(build_n0(m), carrier, 1, 1);
  scalar_block(c, block(c, "B1/"));
  return c.code;
}

Code n1_scalar_linear(int m, const AlphabetSpec& carrier) {
  require_carrier(carrier);
  const std::int64_t q = carrier.size();
  const auto inv = int_inverse_in_zn(q, m);
  require(inv.has_value(), Errc::precondition,
          "N1(" + istr(m) + ") has no scalar linear solution over " + carrier.name() + ": needs gcd(" + istr(q) +
              ", " + istr(m) + ") = 1 so that m is invertible");
  Ctx c(build_n1(m), carrier, 1, 1);
  const Blk b = block(c, "B1/");
  scalar_block(c, b);
  const std::size_t rx = c.net.node_index(c.net.label("R_x"));
  std::vector<std::pair<std::size_t, std::int64_t>> terms;
  for (int i = 0; i <= b.m; ++i) terms.emplace_back(*b.out[i], *inv - (i == 0 ? 1 : 0));
  c.code.decoders[c.key(rx, b.msgs[0])] = scalar_fn(c, rx, terms);
  return c.code;
}

Code n2_scalar_linear(int m, int w, const AlphabetSpec& carrier) {
  require_carrier(carrier);
  const std::int64_t q = carrier.size();
  require(m % q == 0, Errc::precondition,
          "N2(" + istr(m) + "," + istr(w) + ") has no scalar linear solution over " + carrier.name() + ": needs " +
              istr(q) + " to divide m");
  Ctx c(build_n2(m, w), carrier, 1, 1);
  std::vector<Blk> blocks;
  for (int l = 1; l <= w; ++l) {
    blocks.push_back(block(c, "B" + istr(l) + "/"));
    scalar_block(c, blocks.back());
  }
  const std::size_t rz = c.net.node_index(c.net.label("R_z"));
  std::vector<std::pair<std::size_t, std::int64_t>> terms;
  for (int i = 1; i <= blocks[0].m; ++i) terms.emplace_back(*blocks[0].out[i], 1);
  c.code.decoders[c.key(rz, demand_msg(c.net, "R_z"))] = scalar_fn(c, rz, terms);
  return c.code;
}

Code n3_scalar_linear(int m1, int m2, const AlphabetSpec& carrier) {
  require_carrier(carrier);
  const std::int64_t q = carrier.size();
  const std::int64_t g = gcd(m1, m2);
  require(gcd(q, g) == 1, Errc::precondition,
          "N3(" + istr(m1) + "," + istr(m2) + ") has no scalar linear solution over " + carrier.name() +
              ": needs gcd(" + istr(q) + ", " + istr(m1) + ", " + istr(m2) + ") = 1");
  Ctx c(build_n3(m1, m2), carrier, 1, 1);
  const Blk b1 = block(c, "B1/"), b2 = block(c, "B2/");
  scalar_block(c, b1);
  scalar_block(c, b2);
  const Bezout bz = bezout(m1 / g, m2 / g);
  const std::int64_t ginv = *int_inverse_in_zn(q, g);
  const std::int64_t coef[2] = {mod(mod(bz.u, q) * ginv, q), mod(mod(bz.v, q) * ginv, q)};
  const std::size_t rz = c.net.node_index(c.net.label("R_z"));
  std::vector<std::pair<std::size_t, std::int64_t>> terms;
  const Blk* bs[2] = {&b1, &b2};
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i <= bs[l]->m; ++i)
      terms.emplace_back(*bs[l]->out[i], i == 0 ? coef[l] * (1 - bs[l]->m) : coef[l]);
  c.code.decoders[c.key(rz, demand_msg(c.net, "R_z"))] = scalar_fn(c, rz, terms);
  return c.code;
}

// ---------------------------------------------------------------------------
// Fractional linear codes

Code n1_fractional(int m, std::int64_t p) {
  require(is_prime(p), Errc::precondition, "p = " + istr(p) + " must be prime");
  require(m >= 2 && m % p == 0, Errc::precondition,
          "the (2m+1, 2m+2) code needs p | m; " + istr(p) + " does not divide " + istr(m));
  const int k = 2 * m + 1, n = 2 * m + 2;
  Ctx c(build_n1(m), AlphabetSpec::prime_field(p), k, n);
  const Blk b = block(c, "B1/");
  const auto& x = b.msgs;

  {  // e_0
    Lin L(c, b.u[0], n);
    for (int l = 1; l <= m; ++l)
      for (int j = 1; j <= m; ++j)
        if (j != l) L.add_msg(x[j], l, l, 1);
    for (int l = m + 1; l <= 2 * m + 1; ++l)
      for (int j = 1; j <= m; ++j) L.add_msg(x[j], l, l, 1);
    for (int j = 2; j <= m; ++j) L.add_msg(x[j], n, j, 1);
    c.code.edge_functions[c.net.edges()[b.side[0]].id] = L.build();
  }
  for (int i = 1; i <= m; ++i) {  // e_i
    Lin L(c, b.u[i], n);
    for (int l = 1; l <= m; ++l) {
      if (l == i) {
        L.add_msg(x[0], l, m + 1, 1);
        for (int j = 1; j <= m; ++j)
          if (j != i) L.add_msg(x[j], l, j, 1);
      } else {
        for (int j = 0; j <= m; ++j)
          if (j != i && j != l) L.add_msg(x[j], l, l, 1);
      }
    }
    for (int l = m + 1; l <= 2 * m + 1; ++l)
      for (int j = 0; j <= m; ++j)
        if (j != i) L.add_msg(x[j], l, l, 1);
    L.add_msg(x[0], n, m + 1 + i, 1);
    c.code.edge_functions[c.net.edges()[b.side[i]].id] = L.build();
  }
  {  // e
    Lin L(c, b.uu, n);
    for (int l = 1; l <= m; ++l)
      for (int j = 0; j <= m; ++j)
        if (j != l) L.add_msg(x[j], l, l, 1);
    for (int l = m + 1; l <= 2 * m + 1; ++l)
      for (int j = 0; j <= m; ++j) L.add_msg(x[j], l, l, 1);
    L.add_msg(x[0], n, m + 1, 1);
    for (int j = 1; j <= m; ++j) L.add_msg(x[j], n, j, 1);
    c.code.edge_functions[c.net.edges()[b.sum].id] = L.build();
  }
  for (int i = 0; i <= m; ++i) {  // R_i: [e]_l - [e_i]_l, with component i read from [e]_n
    const std::size_t r = b.r[i];
    const std::size_t ee = c.edge_into(r, b.vv), ei = c.edge_into(r, b.v[i]);
    Lin L(c, r, k);
    for (int l = 1; l <= k; ++l) {
      if (i >= 1 && l == i) {
        L.add(ee, l, n, 1);
        L.add(ei, l, i, -1);
      } else {
        L.add(ee, l, l, 1);
        L.add(ei, l, l, -1);
      }
    }
    c.code.decoders[c.key(r, x[i])] = L.build();
  }
  {  // R_x
    const std::size_t rx = c.net.node_index(c.net.label("R_x"));
    Lin L(c, rx, k);
    for (int l = 1; l <= m; ++l) {
      L.add(*b.out[0], l, l, -1);
      for (int i = 0; i <= m; ++i)
        if (i != l) L.add(*b.out[i], l, l, -1);
    }
    L.add(*b.out[1], m + 1, 1, 1);
    L.add(*b.out[0], m + 1, n, -1);
    for (int l = m + 2; l <= 2 * m + 1; ++l) L.add(*b.out[l - m - 1], l, n, 1);
    c.code.decoders[c.key(rx, x[0])] = L.build();
  }
  return c.code;
}

Code n3_fractional(int m1, int m2, std::int64_t p) {
  require(is_prime(p), Errc::precondition, "p = " + istr(p) + " must be prime");
  require(m1 >= 2 && m2 >= 2 && m1 % p == 0 && m2 % p == 0, Errc::precondition,
          "the (2m1+2m2+2, 2m1+2m2+3) code needs p | m1 and p | m2; got p = " + istr(p) + ", m1 = " + istr(m1) +
              ", m2 = " + istr(m2));
  const int k = 2 * m1 + 2 * m2 + 2, n = k + 1;
  const int delta = 2 * m1 + m2 + 2;
  Ctx c(build_n3(m1, m2), AlphabetSpec::prime_field(p), k, n);
  const Blk b1 = block(c, "B1/"), b2 = block(c, "B2/");
  const std::size_t z = b1.msgs[0];

  // Left-hand block.
  {
    const auto& x = b1.msgs;
    Lin L(c, b1.u[0], n);
    for (int l = 1; l <= m1; ++l)
      for (int j = 1; j <= m1; ++j)
        if (j != l) L.add_msg(x[j], l, l, 1);
    for (int l = m1 + 1; l <= k; ++l)
      for (int j = 1; j <= m1; ++j) L.add_msg(x[j], l, l, 1);
    for (int j = 2; j <= m1; ++j) L.add_msg(x[j], n, j, 1);
    c.code.edge_functions[c.net.edges()[b1.side[0]].id] = L.build();
  }
  for (int i = 1; i <= m1; ++i) {
    const auto& x = b1.msgs;
    Lin L(c, b1.u[i], n);
    for (int l = 1; l <= m1; ++l) {
      if (l == i) {
        L.add_msg(z, l, m1 + 1, 1);
        for (int j = 1; j <= m1; ++j)
          if (j != i) L.add_msg(x[j], l, j, 1);
      } else {
        L.add_msg(z, l, l, 1);
        for (int j = 1; j <= m1; ++j)
          if (j != i && j != l) L.add_msg(x[j], l, l, 1);
      }
    }
    for (int l = m1 + 1; l <= k; ++l) {
      L.add_msg(z, l, l, 1);
      for (int j = 1; j <= m1; ++j)
        if (j != i) L.add_msg(x[j], l, l, 1);
    }
    L.add_msg(z, n, m1 + i + 1, 1);
    c.code.edge_functions[c.net.edges()[b1.side[i]].id] = L.build();
  }
  {
    const auto& x = b1.msgs;
    Lin L(c, b1.uu, n);
    for (int l = 1; l <= m1; ++l) {
      L.add_msg(z, l, l, 1);
      for (int j = 1; j <= m1; ++j)
        if (j != l) L.add_msg(x[j], l, l, 1);
    }
    for (int l = m1 + 1; l <= k; ++l) {
      L.add_msg(z, l, l, 1);
      for (int j = 1; j <= m1; ++j) L.add_msg(x[j], l, l, 1);
    }
    L.add_msg(z, n, m1 + 1, 1);
    for (int j = 1; j <= m1; ++j) L.add_msg(x[j], n, j, 1);
    c.code.edge_functions[c.net.edges()[b1.sum].id] = L.build();
  }

  // Right-hand block.
  {
    const auto& x = b2.msgs;
    Lin L(c, b2.u[0], n);
    for (int l = 1; l <= delta; ++l)
      for (int j = 1; j <= m2; ++j) L.add_msg(x[j], l, l, 1);
    for (int l = delta + 1; l <= delta + m2; ++l)
      for (int j = 1; j <= m2; ++j)
        if (j != l - delta) L.add_msg(x[j], l, l, 1);
    for (int j = 2; j <= m2; ++j) L.add_msg(x[j], n, delta + j, 1);
    c.code.edge_functions[c.net.edges()[b2.side[0]].id] = L.build();
  }
  for (int i = 1; i <= m2; ++i) {
    const auto& x = b2.msgs;
    Lin L(c, b2.u[i], n);
    for (int l = 1; l <= delta; ++l) {
      L.add_msg(z, l, l, 1);
      for (int j = 1; j <= m2; ++j)
        if (j != i) L.add_msg(x[j], l, l, 1);
    }
    for (int l = delta + 1; l <= delta + m2; ++l) {
      if (l == delta + i) {
        L.add_msg(z, l, delta, 1);
        for (int j = 1; j <= m2; ++j)
          if (j != i) L.add_msg(x[j], l, delta + j, 1);
      } else {
        L.add_msg(z, l, l, 1);
        for (int j = 1; j <= m2; ++j)
          if (j != i && j != l - delta) L.add_msg(x[j], l, l, 1);
      }
    }
    L.add_msg(z, n, 2 * m1 + 1 + i, 1);
    c.code.edge_functions[c.net.edges()[b2.side[i]].id] = L.build();
  }
  {
    const auto& x = b2.msgs;
    Lin L(c, b2.uu, n);
    for (int l = 1; l <= delta; ++l) {
      L.add_msg(z, l, l, 1);
      for (int j = 1; j <= m2; ++j) L.add_msg(x[j], l, l, 1);
    }
    for (int l = delta + 1; l <= delta + m2; ++l) {
      L.add_msg(z, l, l, 1);
      for (int j = 1; j <= m2; ++j)
        if (j != l - delta) L.add_msg(x[j], l, l, 1);
    }
    L.add_msg(z, n, delta, 1);
    for (int j = 1; j <= m2; ++j) L.add_msg(x[j], n, delta + j, 1);
    c.code.edge_functions[c.net.edges()[b2.sum].id] = L.build();
  }

  // Block receivers; R_i of block 1 reads component i from [e]_n, R_i of
  // block 2 reads component delta+i from [e]_n.
  const Blk* bs[2] = {&b1, &b2};
  for (int l = 0; l < 2; ++l) {
    const Blk& b = *bs[l];
    for (int i = 0; i <= b.m; ++i) {
      const std::size_t r = b.r[i];
      const std::size_t ee = c.edge_into(r, b.vv), ei = c.edge_into(r, b.v[i]);
      const int special = i == 0 ? 0 : (l == 0 ? i : delta + i);
      Lin L(c, r, k);
      for (int comp = 1; comp <= k; ++comp) {
        if (comp == special) {
          L.add(ee, comp, n, 1);
          L.add(ei, comp, special, -1);
        } else {
          L.add(ee, comp, comp, 1);
          L.add(ei, comp, comp, -1);
        }
      }
      c.code.decoders[c.key(r, b.msgs[i])] = L.build();
    }
  }

  {  // R_z
    const std::size_t rz = c.net.node_index(c.net.label("R_z"));
    Lin L(c, rz, k);
    for (int l = 1; l <= m1; ++l) {
      L.add(*b1.out[0], l, l, -2);
      for (int i = 1; i <= m1; ++i)
        if (i != l) L.add(*b1.out[i], l, l, -1);
    }
    L.add(*b1.out[1], m1 + 1, 1, 1);
    L.add(*b1.out[0], m1 + 1, n, -1);
    for (int l = m1 + 2; l <= 2 * m1 + 1; ++l) L.add(*b1.out[l - m1 - 1], l, n, 1);
    for (int l = 2 * m1 + 2; l <= 2 * m1 + m2 + 1; ++l) L.add(*b2.out[l - 2 * m1 - 1], l, n, 1);
    L.add(*b2.out[1], delta, delta + 1, 1);
    L.add(*b2.out[0], delta, n, -1);
    for (int l = delta + 1; l <= delta + m2; ++l) {
      L.add(*b2.out[0], l, l, -2);
      for (int i = 1; i <= m2; ++i)
        if (i != l - delta) L.add(*b2.out[i], l, l, -1);
    }
    c.code.decoders[c.key(rz, z)] = L.build();
  }
  return c.code;
}

// ---------------------------------------------------------------------------
// Permutation families

std::vector<Symbol> PermutationFamily::tuple(Symbol a) const {
  std::vector<Symbol> t;
  for (std::size_t l = 0; l < pis.size(); ++l)
    t.push_back(static_cast<Symbol>(mod(scales[l] * static_cast<std::int64_t>(pis[l](a)), modulus)));
  return t;
}

std::vector<std::string> PermutationFamily::table_header() const {
  std::vector<std::string> h;
  if (kind == "n2") {
    const std::size_t w = pis.size();
    h.push_back(w == 1 ? "a" : "a=pi_" + istr(static_cast<std::int64_t>(w)));
    for (std::size_t l = w - 1; l >= 1; --l) h.push_back("pi_" + istr(static_cast<std::int64_t>(l)));
    for (std::size_t l = w; l >= 1; --l)
      h.push_back(istr(scales[l - 1]) + "pi_" + istr(static_cast<std::int64_t>(l)));
  } else {
    h = {"a", "pi_1", istr(scales[1]) + "a", istr(scales[0]) + "pi_1"};
  }
  return h;
}

std::vector<std::vector<std::int64_t>> PermutationFamily::table_rows() const {
  std::vector<std::vector<std::int64_t>> rows;
  for (std::int64_t a = 0; a < modulus; ++a) {
    const auto s = static_cast<Symbol>(a);
    const std::vector<Symbol> t = tuple(s);
    std::vector<std::int64_t> row{a};
    if (kind == "n2") {
      const std::size_t w = pis.size();
      for (std::size_t l = w - 1; l >= 1; --l) row.push_back(pis[l - 1](s));
      for (std::size_t l = w; l >= 1; --l) row.push_back(t[l - 1]);
    } else {
      row.push_back(pis[0](s));
      row.push_back(t[1]);
      row.push_back(t[0]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string permutation_table_csv(const PermutationFamily& fam) {
  std::ostringstream os;
  const auto header = fam.table_header();
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : fam.table_rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

PermutationFamily n2_permutation_family(int m, int w) {
  require(m >= 2 && w >= 1, Errc::invalid_argument, "permutation family needs m >= 2 and w >= 1");
  const std::int64_t q = static_cast<std::int64_t>(m) * w;
  require(q <= 1'000'000, Errc::invalid_argument, "m*w too large");
  PermutationFamily fam;
  fam.kind = "n2";
  fam.modulus = q;
  for (int l = 1; l <= w; ++l) {
    std::vector<Symbol> map(static_cast<std::size_t>(q));
    for (std::int64_t a = 0; a < q; ++a) {
      const std::int64_t qa = a / m, ra = a % m;
      map[a] = static_cast<Symbol>(l < w && qa == l ? qa * m + (ra + 1) % m : a);
    }
    fam.pis.emplace_back(std::move(map));
    fam.scales.push_back(w);
  }
  std::vector<std::vector<Symbol>> images;
  for (std::int64_t a = 0; a < q; ++a) images.push_back(fam.tuple(static_cast<Symbol>(a)));
  fam.psi = invert(images, "N2 permutation family");
  return fam;
}

PermutationFamily n3_permutation_pair(int m, int alpha, std::int64_t s) {
  require(m >= 2 && alpha >= 1 && s >= 1, Errc::invalid_argument, "permutation pair needs m >= 2, alpha, s >= 1");
  require(gcd(s, m) == 1, Errc::precondition, "permutation pair needs gcd(s, m) = 1");
  std::int64_t ma = 1;
  for (int i = 0; i < alpha; ++i) {
    ma *= m;
    require(ma <= 1'000'000, Errc::invalid_argument, "m^(alpha+1) too large");
  }
  const std::int64_t q = ma * m;
  require(q <= 1'000'000, Errc::invalid_argument, "m^(alpha+1) too large");
  PermutationFamily fam;
  fam.kind = "n3";
  fam.modulus = q;
  std::vector<Symbol> rot(static_cast<std::size_t>(q));
  for (std::int64_t a = 0; a < q; ++a) rot[a] = static_cast<Symbol>(a / m + ma * (a % m));
  fam.pis.emplace_back(std::move(rot));
  fam.pis.push_back(Permutation::identity(static_cast<std::size_t>(q)));
  fam.scales = {m, mod(s * ma, q)};
  std::vector<std::vector<Symbol>> images;
  for (std::int64_t a = 0; a < q; ++a) images.push_back(fam.tuple(static_cast<Symbol>(a)));
  fam.psi = invert(images, "N3 permutation pair");
  return fam;
}

// ---------------------------------------------------------------------------
// Non-linear codes

Code n2_nonlinear(int m, int w) {
  const PermutationFamily fam = n2_permutation_family(m, w);
  Ctx c(build_n2(m, w), AlphabetSpec::cyclic_ring(fam.modulus), 1, 1);
  std::vector<Blk> blocks;
  for (int l = 1; l <= w; ++l) {
    blocks.push_back(block(c, "B" + istr(l) + "/"));
    scalar_block(c, blocks.back(), fam.pis[l - 1]);
  }
  const std::size_t rz = c.net.node_index(c.net.label("R_z"));
  const DemandKey key = c.key(rz, demand_msg(c.net, "R_z"));
  if (w == 1) {
    std::vector<std::pair<std::size_t, std::int64_t>> terms;
    for (int i = 1; i <= blocks[0].m; ++i) terms.emplace_back(*blocks[0].out[i], 1);
    c.code.decoders[key] = scalar_fn(c, rz, terms);
    return c.code;
  }
  PermutedForm pf;
  pf.modulus = fam.modulus;
  pf.input_perms.assign(c.arity(rz), std::nullopt);
  for (int l = 0; l < w; ++l) {
    std::vector<std::int64_t> row(c.arity(rz), 0);
    for (int i = 1; i <= blocks[l].m; ++i) row[c.position(rz, *blocks[l].out[i])] = mod(w, fam.modulus);
    pf.rows.push_back(std::move(row));
  }
  pf.output_table = fam.psi;
  c.code.decoders[key] = {pf};
  return c.code;
}

N3Split n3_split(std::int64_t m1, std::int64_t m2) {
  require(m1 >= 2 && m2 >= 2, Errc::invalid_argument, "N3 needs m1, m2 >= 2");
  N3Split sp;
  sp.s = m2;
  while (sp.s % m1 == 0) {
    sp.s /= m1;
    ++sp.alpha;
  }
  require(sp.alpha >= 1, Errc::precondition,
          "the non-linear N3 code needs m2 = s*m1^alpha with alpha >= 1; " + istr(m1) + " does not divide " +
              istr(m2));
  require(gcd(sp.s, m1) == 1, Errc::precondition,
          "the non-linear N3 code needs m2 = s*m1^alpha with gcd(s, m1) = 1; got s = " + istr(sp.s) +
              " for m1 = " + istr(m1));
  return sp;
}

Code n3_nonlinear(int m1, int m2) {
  const N3Split sp = n3_split(m1, m2);
  const PermutationFamily fam = n3_permutation_pair(m1, sp.alpha, sp.s);
  const std::int64_t q = fam.modulus;
  Ctx c(build_n3(m1, m2), AlphabetSpec::cyclic_ring(q), 1, 1);
  const Blk b1 = block(c, "B1/"), b2 = block(c, "B2/");
  scalar_block(c, b1, fam.pis[0]);
  scalar_block(c, b2);
  const std::size_t rz = c.net.node_index(c.net.label("R_z"));
  PermutedForm pf;
  pf.modulus = q;
  pf.input_perms.assign(c.arity(rz), std::nullopt);
  for (const Blk* b : {&b1, &b2}) {
    std::vector<std::int64_t> row(c.arity(rz), 0);
    for (int i = 0; i <= b->m; ++i) row[c.position(rz, *b->out[i])] = mod(i == 0 ? 1 - b->m : 1, q);
    pf.rows.push_back(std::move(row));
  }
  pf.output_table = fam.psi;
  c.code.decoders[c.key(rz, demand_msg(c.net, "R_z"))] = {pf};
  return c.code;
}

// ---------------------------------------------------------------------------
// Products and the composite network

Code product_code(const NetworkSpec& net, const std::vector<Code>& codes) {
  require(!codes.empty(), Errc::invalid_argument, "product_code needs at least one factor");
  const Topology topo = validate_network(net);
  std::vector<AlphabetSpec> alphabets;
  std::vector<std::int64_t> radices;
  for (const Code& f : codes) {
    require(f.params.k == 1 && f.params.n == 1, Errc::invalid_argument, "product_code needs (1,1) factors");
    check_code(net, topo, f, true);
    alphabets.push_back(f.params.alphabet);
    radices.push_back(f.params.alphabet.size());
  }
  if (codes.size() == 1) return codes[0];
  Code out;
  out.params = {1, 1, AlphabetSpec::product(alphabets)};
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    const std::string& id = net.edges()[e].id;
    const bool any = std::any_of(codes.begin(), codes.end(), [&](const Code& f) { return f.edge_functions.count(id); });
    if (!any) continue;
    ProductForm pr;
    pr.radices = radices;
    for (const Code& f : codes) {
      const auto it = f.edge_functions.find(id);
      if (it != f.edge_functions.end()) {
        pr.factors.push_back(it->second);
      } else {
        const AlphabetSpec carrier = AlphabetSpec::cyclic_ring(f.params.alphabet.size());
        pr.factors.push_back({LinearForm{carrier.size(), {RingMatrix::identity(1, carrier)}}});
      }
    }
    out.edge_functions.emplace(id, EdgeFunction{pr});
  }
  for (const auto& [key, fn] : codes[0].decoders) {
    ProductForm pr;
    pr.radices = radices;
    for (const Code& f : codes) pr.factors.push_back(f.decoders.at(key));
    out.decoders.emplace(key, EdgeFunction{pr});
  }
  return out;
}

std::vector<N4Part> n4_parts(std::int64_t m) {
  std::vector<N4Part> parts;
  for (const N4Component& comp : n4_components(m)) {
    N4Part part;
    part.component = comp;
    part.net = build_component(comp);
    const auto& p = comp.params;
    if (comp.family == "N1") {
      part.code = n1_scalar_linear(static_cast<int>(p[0]), AlphabetSpec::cyclic_ring(m));
      part.recipe = "scalar linear over Z" + istr(m);
    } else if (comp.family == "N2") {
      part.code = n2_nonlinear(static_cast<int>(p[0]), static_cast<int>(p[1]));
      part.recipe = p[1] == 1 ? "linear over Z" + istr(m) : "permutation code over Z" + istr(m);
    } else {
      const std::int64_t pr = p[0];
      const N3Split sp = n3_split(pr, p[1]);
      const std::int64_t head = ipow(pr, sp.alpha + 1);
      const std::int64_t t = m / head;
      require(head * t == m, Errc::invalid_argument, "internal: N3 component alphabet does not divide m");
      const Code nl = n3_nonlinear(static_cast<int>(pr), static_cast<int>(p[1]));
      if (t == 1) {
        part.code = nl;
        part.recipe = "permutation code over Z" + istr(head);
      } else {
        const Code lin = n3_scalar_linear(static_cast<int>(pr), static_cast<int>(p[1]), AlphabetSpec::cyclic_ring(t));
        part.code = product_code(part.net, {nl, lin});
        part.recipe = "product of the permutation code over Z" + istr(head) + " and the linear code over Z" + istr(t);
      }
    }
    parts.push_back(std::move(part));
  }
  return parts;
}

Code n4_solution(std::int64_t m) {
  std::vector<Code> codes;
  for (N4Part& part : n4_parts(m)) codes.push_back(std::move(part.code));
  return disjoint_union(codes);
}

// ---------------------------------------------------------------------------
// Named constructions

std::vector<std::string> code_names() {
  return {"n0-linear",    "n1-linear",     "n1-fractional", "n2-linear", "n2-nonlinear",
          "n3-linear",    "n3-nonlinear",  "n3-fractional", "n4"};
}

NamedCode build_named_code(const CodeRequest& req) {
  auto need = [&](std::int64_t v, const char* flag, std::int64_t lo = 2) {
    require(v >= lo && v <= 1'000'000, Errc::invalid_argument,
            req.name + " needs --" + flag + " >= " + istr(lo) + " (got " + istr(v) + ")");
    return static_cast<int>(v);
  };
  auto ring = [&] {
    need(req.ring, "ring");
    return AlphabetSpec::cyclic_ring(req.ring);
  };
  NamedCode out;
  const std::string& n = req.name;
  if (n == "n0-linear") {
    const int m = need(req.m, "m");
    out.code = n0_scalar_linear(m, ring());
    out.net = build_n0(m);
  } else if (n == "n1-linear") {
    const int m = need(req.m, "m");
    out.code = n1_scalar_linear(m, ring());
    out.net = build_n1(m);
  } else if (n == "n1-fractional") {
    const int m = need(req.m, "m");
    out.code = n1_fractional(m, need(req.p, "p"));
    out.net = build_n1(m);
  } else if (n == "n2-linear") {
    const int m = need(req.m, "m"), w = need(req.w, "w", 1);
    out.code = n2_scalar_linear(m, w, ring());
    out.net = build_n2(m, w);
  } else if (n == "n2-nonlinear") {
    const int m = need(req.m, "m"), w = need(req.w, "w", 1);
    out.code = n2_nonlinear(m, w);
    out.net = build_n2(m, w);
  } else if (n == "n3-linear") {
    const int m1 = need(req.m1, "m1"), m2 = need(req.m2, "m2");
    out.code = n3_scalar_linear(m1, m2, ring());
    out.net = build_n3(m1, m2);
  } else if (n == "n3-nonlinear") {
    const int m1 = need(req.m1, "m1"), m2 = need(req.m2, "m2");
    out.code = n3_nonlinear(m1, m2);
    out.net = build_n3(m1, m2);
  } else if (n == "n3-fractional") {
    const int m1 = need(req.m1, "m1"), m2 = need(req.m2, "m2");
    out.code = n3_fractional(m1, m2, need(req.p, "p"));
    out.net = build_n3(m1, m2);
  } else if (n == "n4") {
    const int m = need(req.m, "m");
    out.code = n4_solution(m);
    out.net = build_n4(m);
  } else {
    fail(Errc::invalid_argument, "unknown code '" + n + "'");
  }
  // Natural verification mode: exhaustive when it fits the default cap.
  const auto q = static_cast<std::uint64_t>(out.code.params.alphabet.size());
  std::uint64_t total = 1;
  bool fits = true;
  for (std::size_t i = 0; i < out.net.messages().size() * static_cast<std::size_t>(out.code.params.k); ++i) {
    if (total > kDefaultCap / q) {
      fits = false;
      break;
    }
    total *= q;
  }
  out.natural_mode = fits ? "exhaustive" : out.code.all_linear() ? "basis" : "random";
  return out;
}

}  // namespace ncnet
