#pragma once

// The block gadget B(m), the families N0..N3 and the composite N4(m).
//
// Id scheme: block l has nodes "B{l}.u{i}", "B{l}.u", "B{l}.v{i}", "B{l}.v",
// "B{l}.R{i}"; its coded edges are "B{l}.e{i}" (u_i -> v_i) and "B{l}.e"
// (u -> v); every other edge is named "{tail}>{head}". Roles mirror this as
// "B{l}/u_i", "B{l}/e_i", "B{l}/out_i", ... plus "z", "S_z", "R_z", "R_x".

#include <cstdint>
#include <string>
#include <vector>

#include "ncnet/network.hpp"

namespace ncnet {

// Stand-alone B(m): internal nodes and receivers only. Input i must be
// delivered to every node in input_targets[i]; receiver i demands input i.
struct BlockFragment {
  int m = 0;
  NetworkSpec net;
  std::vector<std::vector<std::size_t>> input_targets;  // node indices per input slot
  std::vector<std::size_t> receivers;                   // R_0..R_m
  std::vector<std::size_t> output_tails;                // v_0..v_m
};

BlockFragment build_block(int m);

NetworkSpec build_n0(int m);
NetworkSpec build_n1(int m);
NetworkSpec build_n2(int m, int w);
NetworkSpec build_n3(int m1, int m2);

struct N4Component {
  std::string family;                // "N1", "N2" or "N3"
  std::vector<std::int64_t> params;  // (q), (m, w) or (m1, m2)

  std::string name() const;  // e.g. "N2(2,3)"
  friend bool operator==(const N4Component&, const N4Component&) = default;
};

std::vector<N4Component> n4_components(std::int64_t m);
NetworkSpec build_component(const N4Component& c);
NetworkSpec build_n4(std::int64_t m);

// Closed-form node counts; family is "N0".."N4".
std::int64_t node_count_formula(const std::string& family, const std::vector<std::int64_t>& params);

// Dispatch on family name ("n0".."n4", case-insensitive).
NetworkSpec build_family(const std::string& family, const std::vector<std::int64_t>& params);

}  // namespace ncnet
