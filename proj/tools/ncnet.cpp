// Command-line front end over the C interface.
//
// Exit codes: 0 success / solution, 1 counterexample / mismatch / no
// solution, 2 precondition, parse or usage error, 3 work bound exceeded.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncnet/ncnet.h"

namespace {

enum Exit { kOk = 0, kFail = 1, kError = 2, kCapped = 3 };

struct Failure {
  int code;
  std::string message;
};

void check(ncnet_status s) {
  if (s == NCNET_OK) return;
  throw Failure{s == NCNET_E_CAP ? kCapped : kError, ncnet_last_error()};
}

struct Str {
  char* p = nullptr;
  ~Str() { ncnet_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

using NetPtr = std::unique_ptr<ncnet_network, decltype(&ncnet_network_free)>;
using CodePtr = std::unique_ptr<ncnet_code, decltype(&ncnet_code_free)>;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kError, "cannot read '" + path + "'"};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{kError, "cannot write '" + path + "'"};
}

// Writes to `path`, or to stdout when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty())
    std::cout << text;
  else
    write_text(path, text);
}

std::string one_line(const std::string& json) { return nlohmann::ordered_json::parse(json).dump(); }

struct Flags {
  std::int64_t m = 0, w = 0, m1 = 0, m2 = 0, p = 0, ring = 0, size = 0;
  std::string mode, format = "json", out, net, code, net_out;
  std::uint64_t samples = 0, seed = 1, cap = 0;
  unsigned workers = 1;
};

std::vector<std::int64_t> family_params(const std::string& family, const Flags& f) {
  std::string fam = family;
  for (auto& c : fam) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (fam == "n2") return {f.m, f.w};
  if (fam == "n3") return {f.m1, f.m2};
  return {f.m};
}

void report(const std::string& command, const std::string& params, const std::string& outcome,
            const std::string& json, int code) {
  std::cout << "command: " << command << "\n";
  if (!params.empty()) std::cout << "params: " << params << "\n";
  std::cout << "outcome: " << outcome << "\n";
  if (!json.empty()) std::cout << "result: " << one_line(json) << "\n";
  std::cout << "exit: " << code << "\n";
}

std::string join_params(const std::string& family, const std::vector<std::int64_t>& p) {
  std::string s = family + "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
  return s + ")";
}

int cmd_build(const std::string& family, const Flags& f) {
  const auto p = family_params(family, f);
  ncnet_network* raw = nullptr;
  check(ncnet_network_build(family.c_str(), p.data(), p.size(), &raw));
  NetPtr net(raw, ncnet_network_free);
  Str text;
  if (f.format == "dot")
    check(ncnet_network_to_dot(net.get(), &text.p));
  else if (f.format == "json")
    check(ncnet_network_to_json(net.get(), &text.p));
  else
    throw Failure{kError, "--format must be json or dot"};
  if (f.out.empty()) {
    std::cout << text.str();
    return kOk;
  }
  write_text(f.out, text.str());
  report("build", join_params(family, p) + " format=" + f.format + " out=" + f.out,
         std::to_string(ncnet_network_node_count(net.get())) + " nodes", "", kOk);
  return kOk;
}

int cmd_nodes(const std::string& family, const Flags& f) {
  const auto p = family_params(family, f);
  Str json;
  check(ncnet_nodes_report(family.c_str(), p.data(), p.size(), &json.p));
  ncnet_network* raw = nullptr;
  check(ncnet_network_build(family.c_str(), p.data(), p.size(), &raw));
  NetPtr net(raw, ncnet_network_free);
  report("nodes", join_params(family, p), std::to_string(ncnet_network_node_count(net.get())) + " nodes",
         json.str(), kOk);
  return kOk;
}

int cmd_code(const std::string& name, const Flags& f) {
  ncnet_code_request req{name.c_str(), f.m, f.w, f.m1, f.m2, f.p, f.ring};
  ncnet_network* rn = nullptr;
  ncnet_code* rc = nullptr;
  Str natural;
  check(ncnet_code_build(&req, &rn, &rc, &natural.p));
  NetPtr net(rn, ncnet_network_free);
  CodePtr code(rc, ncnet_code_free);
  int k = 0, n = 0;
  std::int64_t size = 0;
  Str alpha;
  check(ncnet_code_params(code.get(), &k, &n, &size, &alpha.p));
  Str json;
  check(ncnet_code_to_json(code.get(), &json.p));
  if (f.out.empty()) {
    std::cout << json.str();
    return kOk;
  }
  write_text(f.out, json.str());
  if (!f.net_out.empty()) {
    Str nj;
    check(ncnet_network_to_json(net.get(), &nj.p));
    write_text(f.net_out, nj.str());
  }
  std::ostringstream os;
  os << "(" << k << "," << n << ") code over " << alpha.str() << ", rate " << k << "/" << n << ", "
     << (ncnet_code_is_linear(code.get()) ? "linear" : "non-linear") << ", natural mode " << natural.str();
  report("code", name + " out=" + f.out, os.str(), "", kOk);
  return kOk;
}

int cmd_verify(const Flags& f) {
  if (f.net.empty() || f.code.empty()) throw Failure{kError, "verify needs --net and --code"};
  ncnet_network* rn = nullptr;
  check(ncnet_network_from_json(read_text(f.net).c_str(), &rn));
  NetPtr net(rn, ncnet_network_free);
  ncnet_code* rc = nullptr;
  check(ncnet_code_from_json(read_text(f.code).c_str(), &rc));
  CodePtr code(rc, ncnet_code_free);
  ncnet_verify_options o{f.mode.empty() ? nullptr : f.mode.c_str(), f.samples, f.seed, f.cap, f.workers};
  ncnet_outcome outcome = NCNET_INCONCLUSIVE;
  Str json;
  check(ncnet_verify(net.get(), code.get(), &o, &outcome, &json.p));
  const int rc_exit = outcome == NCNET_COUNTEREXAMPLE ? kFail : kOk;
  const char* names[] = {"solution", "counterexample", "no counterexample found (inconclusive)"};
  report("verify", "net=" + f.net + " code=" + f.code + (f.mode.empty() ? "" : " mode=" + f.mode), names[outcome],
         json.str(), rc_exit);
  return rc_exit;
}

int cmd_search(const std::string& kind, const Flags& f) {
  if (f.net.empty()) throw Failure{kError, "search needs --net"};
  const std::int64_t value = kind == "linear" ? f.ring : f.size;
  if (value <= 0) throw Failure{kError, kind == "linear" ? "linear search needs --ring" : "search needs --size"};
  ncnet_network* rn = nullptr;
  check(ncnet_network_from_json(read_text(f.net).c_str(), &rn));
  NetPtr net(rn, ncnet_network_free);
  ncnet_search_status status = NCNET_EXHAUSTED;
  ncnet_code* rc = nullptr;
  Str json;
  check(ncnet_search(kind.c_str(), net.get(), value, f.cap, f.workers, &status, &rc, &json.p));
  CodePtr code(rc, ncnet_code_free);
  std::string outcome = status == NCNET_FOUND ? "found" : status == NCNET_EXHAUSTED ? "exhausted" : "capped";
  if (code) {
    std::filesystem::path p(f.net);
    const std::filesystem::path found = p.parent_path() / (p.stem().string() + ".found.json");
    Str cj;
    check(ncnet_code_to_json(code.get(), &cj.p));
    write_text(found.string(), cj.str());
    outcome += ", solution written to " + found.string();
  }
  const int rc_exit = status == NCNET_FOUND ? kOk : status == NCNET_EXHAUSTED ? kFail : kCapped;
  report("search", kind + " net=" + f.net + (kind == "linear" ? " ring=" : " size=") + std::to_string(value),
         outcome, json.str(), rc_exit);
  return rc_exit;
}

int cmd_reproduce(const std::string& item, const Flags& f) {
  int match = 0;
  Str json;
  check(ncnet_reproduce(item.c_str(), f.cap, f.workers, &match, &json.p));
  if (!f.out.empty()) write_text(f.out, json.str());
  const int rc_exit = match ? kOk : kFail;
  report("reproduce", item, match ? "match" : "mismatch", json.str(), rc_exit);
  return rc_exit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network coding constructions, verification and search"};
  app.require_subcommand(1);
  Flags f;
  std::string family, name, kind, item;

  auto params = [&](CLI::App* c) {
    c->add_option("--m", f.m, "block size m");
    c->add_option("--w", f.w, "number of blocks w");
    c->add_option("--m1", f.m1, "first block size");
    c->add_option("--m2", f.m2, "second block size");
  };
  auto work = [&](CLI::App* c) {
    c->add_option("--cap", f.cap, "work bound (default NCNET_CAP or 2^26)");
    c->add_option("--workers", f.workers, "worker threads")->check(CLI::Range(1u, 256u));
  };

  auto* build = app.add_subcommand("build", "build a network");
  build->add_option("family", family, "n0, n1, n2, n3 or n4")->required();
  params(build);
  build->add_option("--format", f.format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  build->add_option("--out", f.out, "output file (default stdout)");

  auto* nodes = app.add_subcommand("nodes", "node counts");
  nodes->add_option("family", family, "n0, n1, n2, n3 or n4")->required();
  params(nodes);

  auto* code = app.add_subcommand("code", "emit a named code construction");
  code->add_option("name", name, "construction name")->required();
  params(code);
  code->add_option("--p", f.p, "prime characteristic");
  code->add_option("--ring", f.ring, "ring modulus");
  code->add_option("--out", f.out, "code output file (default stdout)");
  code->add_option("--net-out", f.net_out, "also write the network here");

  auto* verify = app.add_subcommand("verify", "verify a code on a network");
  verify->add_option("--net", f.net, "network JSON");
  verify->add_option("--code", f.code, "code JSON");
  verify->add_option("--mode", f.mode, "exhaustive, basis or random")
      ->check(CLI::IsMember({"exhaustive", "basis", "random"}));
  verify->add_option("--samples", f.samples, "random samples");
  verify->add_option("--seed", f.seed, "random seed");
  work(verify);

  auto* search = app.add_subcommand("search", "search for codes");
  search->add_option("kind", kind, "linear, p-structured or all-codes")
      ->required()
      ->check(CLI::IsMember({"linear", "p-structured", "all-codes"}));
  search->add_option("--net", f.net, "network JSON");
  search->add_option("--ring", f.ring, "ring modulus (linear)");
  search->add_option("--size", f.size, "alphabet size");
  work(search);

  auto* repro = app.add_subcommand("reproduce", "regenerate a published table or count");
  repro->add_option("item", item, "example-4.2, example-5.2, example-6.2, example-6.6, grid-n1, grid-n2, grid-n3")
      ->required();
  repro->add_option("--out", f.out, "write the JSON report here");
  work(repro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (*build) return cmd_build(family, f);
    if (*nodes) return cmd_nodes(family, f);
    if (*code) return cmd_code(name, f);
    if (*verify) return cmd_verify(f);
    if (*search) return cmd_search(kind, f);
    if (*repro) return cmd_reproduce(item, f);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return kError;
}
