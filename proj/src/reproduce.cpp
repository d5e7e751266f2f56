#include "ncnet/reproduce.hpp"

#include <chrono>
#include <sstream>

#include <json.hpp>

#include "ncnet/builders.hpp"
#include "ncnet/constructions.hpp"
#include "ncnet/error.hpp"

namespace ncnet {

namespace {

using Rows = std::vector<std::vector<std::int64_t>>;

// m = 4, w = 3 over Z_12: a = pi_3(a), pi_2(a), pi_1(a), 3pi_3(a), 3pi_2(a), 3pi_1(a).
const Rows kTable42 = {
    {0, 0, 0, 0, 0, 0}, {1, 1, 1, 3, 3, 3},  {2, 2, 2, 6, 6, 6},   {3, 3, 3, 9, 9, 9},
    {4, 4, 5, 0, 0, 3}, {5, 5, 6, 3, 3, 6},  {6, 6, 7, 6, 6, 9},   {7, 7, 4, 9, 9, 0},
    {8, 9, 8, 0, 3, 0}, {9, 10, 9, 3, 6, 3}, {10, 11, 10, 6, 9, 6}, {11, 8, 11, 9, 0, 9},
};

// m = 2, s = 3, alpha = 2 over Z_8: a, pi_1(a), 12a, 2pi_1(a).
const Rows kTable52 = {
    {0, 0, 0, 0}, {1, 4, 4, 0}, {2, 1, 0, 2}, {3, 5, 4, 2},
    {4, 2, 0, 4}, {5, 6, 4, 4}, {6, 3, 0, 6}, {7, 7, 4, 6},
};

struct Decomposition {
  std::int64_t m;
  std::int64_t f;
  std::vector<int> mu;
  std::vector<std::int64_t> g;
  std::vector<std::string> components;
  std::vector<std::int64_t> nodes;
  std::int64_t total;
};

const std::vector<Decomposition> kN4 = {
    {6, 1, {}, {}, {"N2(2,3)", "N2(3,2)"}, {53, 44}, 97},
    {27, 9, {}, {9}, {"N1(2)", "N1(5)", "N1(7)", "N2(27,1)", "N3(3,9)"}, {15, 27, 35, 119, 60}, 256},
    {100, 10, {4, 2}, {50, 80},
     {"N1(3)", "N1(7)", "N2(4,25)", "N2(25,4)", "N3(2,50)", "N3(5,80)"}, {19, 35, 627, 438, 220, 352}, 1691},
};

template <class T>
std::string join(const std::vector<T>& v, const char* sep = ",") {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
  return os.str();
}

void compare_table(ReproduceReport& r, const PermutationFamily& fam, const Rows& golden) {
  r.text = permutation_table_csv(fam);
  const Rows got = fam.table_rows();
  if (got.size() != golden.size()) r.diff.push_back("expected " + std::to_string(golden.size()) + " rows, got " +
                                                    std::to_string(got.size()));
  for (std::size_t i = 0; i < std::min(got.size(), golden.size()); ++i)
    if (got[i] != golden[i])
      r.diff.push_back("row " + std::to_string(i) + ": expected " + join(golden[i]) + " got " + join(got[i]));
}

void decomposition(ReproduceReport& r, bool counts) {
  std::ostringstream os;
  for (const Decomposition& d : kN4) {
    const PrimeSignature sig = factorize(d.m);
    const auto comps = n4_components(d.m);
    std::vector<std::string> names;
    std::vector<std::int64_t> nodes;
    for (const auto& c : comps) {
      names.push_back(c.name());
      nodes.push_back(counts ? static_cast<std::int64_t>(build_component(c).node_count())
                             : node_count_formula(c.family, c.params));
    }
    const std::string tag = "m=" + std::to_string(d.m) + ": ";
    auto check = [&](const std::string& what, const std::string& want, const std::string& got) {
      if (want != got) r.diff.push_back(tag + what + " expected " + want + " got " + got);
    };
    if (counts) {
      const auto total = static_cast<std::int64_t>(build_n4(d.m).node_count());
      os << "N4(" << d.m << ") " << total << " nodes: ";
      for (std::size_t i = 0; i < names.size(); ++i) os << (i ? ", " : "") << nodes[i] << " from " << names[i];
      os << "\n";
      check("components", join(d.components), join(names));
      check("component nodes", join(d.nodes), join(nodes));
      check("total", std::to_string(d.total), std::to_string(total));
      check("closed form", std::to_string(d.total), std::to_string(node_count_formula("N4", {d.m})));
    } else {
      std::vector<int> mu;
      std::vector<std::int64_t> g;
      for (std::size_t i = 0; i < sig.omega(); ++i) {
        if (sig.exponents[i] > 1) g.push_back(g_value(sig, i));
        if (!d.mu.empty()) mu.push_back(mu_value(sig, i));
      }
      const std::int64_t f = f_value(sig);
      os << "N4(" << d.m << ") f=" << f;
      if (!mu.empty()) os << " mu=" << join(mu);
      if (!g.empty()) os << " g=" << join(g);
      os << ": " << join(names, " u ") << "\n";
      check("f", std::to_string(d.f), std::to_string(f));
      check("mu", join(d.mu), join(mu));
      check("g", join(d.g), join(g));
      check("components", join(d.components), join(names));
    }
  }
  r.text = os.str();
}

void grid(ReproduceReport& r, const std::string& family, const SearchOptions& options) {
  std::ostringstream os;
  auto run = [&](const std::string& label, const NetworkSpec& net, std::int64_t n, bool expect) {
    const SearchOutcome s = search_scalar_linear(net, AlphabetSpec::cyclic_ring(n), options);
    os << label << " over Z" << n << ": " << to_string(s.status) << "\n";
    const bool found = s.status == SearchStatus::found;
    if (s.status == SearchStatus::capped || found != expect)
      r.diff.push_back(label + " over Z" + std::to_string(n) + ": expected " + (expect ? "found" : "exhausted") +
                       " got " + to_string(s.status));
  };
  if (family == "n1") {
    for (int m : {2, 3, 4})
      for (int n = 2; n <= 5; ++n) run("N1(" + std::to_string(m) + ")", build_n1(m), n, gcd(n, m) == 1);
  } else if (family == "n2") {
    for (int m : {2, 3})
      for (int w : {1, 2})
        for (int n = 2; n <= 4; ++n)
          run("N2(" + std::to_string(m) + "," + std::to_string(w) + ")", build_n2(m, w), n, m % n == 0);
  } else {
    for (int m1 : {2, 3})
      for (int m2 : {2, 3})
        for (int n = 2; n <= 5; ++n)
          run("N3(" + std::to_string(m1) + "," + std::to_string(m2) + ")", build_n3(m1, m2), n,
              gcd(gcd(n, m1), m2) == 1);
  }
  r.text = os.str();
}

}  // namespace

std::vector<std::string> reproduce_items() {
  return {"example-4.2", "example-5.2", "example-6.2", "example-6.6", "grid-n1", "grid-n2", "grid-n3"};
}

ReproduceReport reproduce(const std::string& item, const SearchOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  ReproduceReport r;
  r.item = item;
  if (item == "example-4.2")
    compare_table(r, n2_permutation_family(4, 3), kTable42);
  else if (item == "example-5.2")
    compare_table(r, n3_permutation_pair(2, 2, 3), kTable52);
  else if (item == "example-6.2")
    decomposition(r, false);
  else if (item == "example-6.6")
    decomposition(r, true);
  else if (item == "grid-n1" || item == "grid-n2" || item == "grid-n3")
    grid(r, item.substr(5), options);
  else
    fail(Errc::invalid_argument, "unknown item '" + item + "'; expected one of " + join(reproduce_items(), ", "));
  r.match = r.diff.empty();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string reproduce_report_to_json(const ReproduceReport& r) {
  nlohmann::ordered_json j;
  j["item"] = r.item;
  j["match"] = r.match;
  j["text"] = r.text;
  j["diff"] = r.diff;
  j["seconds"] = r.seconds;
  return j.dump(2) + "\n";
}

}  // namespace ncnet
