#pragma once

// Bounded code searches: scalar linear codes over Z_n or GF(p), (1,1) codes
// with the block structure (Abelian group plus message relabelings), and a
// brute-force enumeration of every (1,1) code on tiny networks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncnet/network.hpp"

namespace ncnet {

enum class SearchStatus { found, exhausted, capped };
std::string to_string(SearchStatus s);

struct SearchOutcome {
  SearchStatus status = SearchStatus::exhausted;
  std::optional<Code> solution;
  std::uint64_t explored = 0;  // candidate evaluations
  double seconds = 0.0;
  std::string kind;            // "linear", "p-structured"
};

struct SearchOptions {
  std::uint64_t cap = kDefaultCap;
  unsigned workers = 1;
};

// Scalar linear (1,1) codes. Edges whose tail has a single input carry it
// unchanged and each coded edge's first nonzero coefficient is a canonical
// representative of its orbit under units; neither choice changes whether
// a solution exists. Coded edges are assigned in an order that completes
// receivers early, and a branch is dropped as soon as a receiver with all
// inputs fixed cannot decode its demand.
SearchOutcome search_scalar_linear(const NetworkSpec& net, const AlphabetSpec& carrier,
                                   const SearchOptions& options = {});

// (1,1) codes e_i = sum_{j != i} pi_j(x_j), e = sum_j pi_j(x_j) per block,
// one group from abelian_groups_of_order(size) per block. Relabelings of
// block-private messages are the identity; a message shared by several
// blocks keeps the identity in its first block and ranges over all
// permutations in the others. Extra receivers are checked by exhaustive
// decodability.
SearchOutcome search_p_structured(const NetworkSpec& net, std::int64_t size, const SearchOptions& options = {});

// Every (1,1) code over {0..size-1} whose receivers all decode. Edges
// whose tail has a single input are the identity; every other edge ranges
// over all functions of its inputs. Throws Error(cap_exceeded) when the
// number of codes exceeds `cap`.
std::vector<Code> enumerate_all_codes(const NetworkSpec& net, std::int64_t size, std::uint64_t cap = kDefaultCap);

// Witness for the block at `block_prefix`: tries each group of the right
// order and every choice of pi; sigma is then forced. Throws
// Error(cap_exceeded) when the pi space exceeds `cap`.
std::optional<PropertyPWitness> find_p_witness(const NetworkSpec& net, const Code& code,
                                               const std::string& block_prefix, std::uint64_t cap = kDefaultCap);

std::string search_outcome_to_json(const SearchOutcome& s);

}  // namespace ncnet
