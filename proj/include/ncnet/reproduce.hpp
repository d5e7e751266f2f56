#pragma once

// Regenerates published tables and counts and diffs them against embedded
// golden data.

#include <string>
#include <vector>

#include "ncnet/search.hpp"

namespace ncnet {

struct ReproduceReport {
  std::string item;
  bool match = false;
  std::string text;                // regenerated table or listing
  std::vector<std::string> diff;   // "expected ... got ..." lines on mismatch
  double seconds = 0.0;
};

// example-4.2, example-5.2, example-6.2, example-6.6, grid-n1, grid-n2, grid-n3
std::vector<std::string> reproduce_items();
ReproduceReport reproduce(const std::string& item, const SearchOptions& options = {});

std::string reproduce_report_to_json(const ReproduceReport& r);

}  // namespace ncnet
