#pragma once

// JSON and DOT interchange. JSON output uses a fixed key order and two-space
// indentation, so load -> save is byte-identical.

#include <string>
#include <string_view>

#include "ncnet/network.hpp"

namespace ncnet {

std::string network_to_json(const NetworkSpec& net);
NetworkSpec network_from_json(std::string_view text);

std::string code_to_json(const Code& code);
Code code_from_json(std::string_view text);

std::string alphabet_to_json(const AlphabetSpec& a);
AlphabetSpec alphabet_from_json(std::string_view text);

std::string verdict_to_json(const Verdict& v);

// Sources are boxes, receivers double circles; edges carry their role name.
std::string network_to_dot(const NetworkSpec& net);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

}  // namespace ncnet
