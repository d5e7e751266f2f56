#include "ncnet/ncnet.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "ncnet/builders.hpp"
#include "ncnet/constructions.hpp"
#include "ncnet/error.hpp"
#include "ncnet/reproduce.hpp"
#include "ncnet/search.hpp"
#include "ncnet/serialize.hpp"

struct ncnet_network {
  ncnet::NetworkSpec net;
};

struct ncnet_code {
  ncnet::Code code;
};

namespace {

thread_local std::string g_last_error;

ncnet_status status_of(ncnet::Errc c) {
  switch (c) {
    case ncnet::Errc::invalid_argument: return NCNET_E_INVALID;
    case ncnet::Errc::precondition: return NCNET_E_PRECONDITION;
    case ncnet::Errc::parse: return NCNET_E_PARSE;
    case ncnet::Errc::cap_exceeded: return NCNET_E_CAP;
    case ncnet::Errc::io: return NCNET_E_IO;
  }
  return NCNET_E_INTERNAL;
}

template <class F>
ncnet_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return NCNET_OK;
  } catch (const ncnet::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NCNET_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NCNET_E_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* what) {
  ncnet::require(p != nullptr, ncnet::Errc::invalid_argument, std::string(what) + " must not be null");
}

std::uint64_t cap_or_default(std::uint64_t cap) { return cap ? cap : ncnet_default_cap(); }

std::string natural_mode(const ncnet::NetworkSpec& net, const ncnet::Code& code, std::uint64_t cap) {
  const auto q = static_cast<std::uint64_t>(code.params.alphabet.size());
  const std::size_t digits = net.messages().size() * static_cast<std::size_t>(code.params.k);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < digits; ++i) {
    if (total > cap / q) return code.all_linear() ? "basis" : "random";
    total *= q;
  }
  return "exhaustive";
}

}  // namespace

extern "C" {

const char* ncnet_last_error(void) { return g_last_error.c_str(); }

void ncnet_string_free(char* s) { std::free(s); }

const char* ncnet_version(void) { return "1.0.0"; }

uint64_t ncnet_default_cap(void) {
  if (const char* env = std::getenv("NCNET_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return ncnet::kDefaultCap;
}

ncnet_status ncnet_network_build(const char* family, const int64_t* params, size_t count, ncnet_network** out) {
  return guarded([&] {
    need(family, "family");
    need(out, "out");
    ncnet::require(count == 0 || params, ncnet::Errc::invalid_argument, "params must not be null");
    std::vector<std::int64_t> p(params, params + count);
    *out = new ncnet_network{ncnet::build_family(family, p)};
  });
}

ncnet_status ncnet_network_from_json(const char* json, ncnet_network** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new ncnet_network{ncnet::network_from_json(json)};
  });
}

ncnet_status ncnet_network_to_json(const ncnet_network* net, char** out) {
  return guarded([&] {
    need(net, "network");
    need(out, "out");
    *out = dup(ncnet::network_to_json(net->net));
  });
}

ncnet_status ncnet_network_to_dot(const ncnet_network* net, char** out) {
  return guarded([&] {
    need(net, "network");
    need(out, "out");
    *out = dup(ncnet::network_to_dot(net->net));
  });
}

size_t ncnet_network_node_count(const ncnet_network* net) { return net ? net->net.node_count() : 0; }

void ncnet_network_free(ncnet_network* net) { delete net; }

ncnet_status ncnet_nodes_report(const char* family, const int64_t* params, size_t count, char** out) {
  return guarded([&] {
    need(family, "family");
    need(out, "out");
    ncnet::require(count == 0 || params, ncnet::Errc::invalid_argument, "params must not be null");
    std::string f = family;
    for (auto& c : f) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    std::vector<std::int64_t> p(params, params + count);
    nlohmann::ordered_json j;
    j["family"] = f;
    j["params"] = p;
    j["nodes"] = ncnet::node_count_formula(f, p);
    if (f == "N4") {
      const auto sig = ncnet::factorize(p[0]);
      j["f"] = ncnet::f_value(sig);
      nlohmann::ordered_json comps = nlohmann::ordered_json::array();
      for (const auto& c : ncnet::n4_components(p[0]))
        comps.push_back({{"component", c.name()}, {"nodes", ncnet::node_count_formula(c.family, c.params)}});
      j["components"] = comps;
    }
    *out = dup(j.dump(2) + "\n");
  });
}

ncnet_status ncnet_code_build(const ncnet_code_request* req, ncnet_network** net_out, ncnet_code** code_out,
                              char** natural) {
  return guarded([&] {
    need(req, "request");
    need(req->name, "request name");
    need(code_out, "code_out");
    ncnet::CodeRequest r{req->name, req->m, req->w, req->m1, req->m2, req->p, req->ring};
    ncnet::NamedCode nc = ncnet::build_named_code(r);
    char* mode = natural ? dup(nc.natural_mode) : nullptr;
    if (net_out) *net_out = new ncnet_network{std::move(nc.net)};
    *code_out = new ncnet_code{std::move(nc.code)};
    if (natural) *natural = mode;
  });
}

ncnet_status ncnet_code_from_json(const char* json, ncnet_code** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new ncnet_code{ncnet::code_from_json(json)};
  });
}

ncnet_status ncnet_code_to_json(const ncnet_code* code, char** out) {
  return guarded([&] {
    need(code, "code");
    need(out, "out");
    *out = dup(ncnet::code_to_json(code->code));
  });
}

ncnet_status ncnet_code_params(const ncnet_code* code, int* k, int* n, int64_t* alphabet_size, char** alphabet_name) {
  return guarded([&] {
    need(code, "code");
    const auto& p = code->code.params;
    if (k) *k = p.k;
    if (n) *n = p.n;
    if (alphabet_size) *alphabet_size = p.alphabet.size();
    if (alphabet_name) *alphabet_name = dup(p.alphabet.name());
  });
}

int ncnet_code_is_linear(const ncnet_code* code) { return code && code->code.all_linear() ? 1 : 0; }

void ncnet_code_free(ncnet_code* code) { delete code; }

ncnet_status ncnet_permutation_table(const char* kind, int64_t a, int64_t b, int64_t c, char** csv) {
  return guarded([&] {
    need(kind, "kind");
    need(csv, "csv");
    const std::string k = kind;
    if (k == "n2")
      *csv = dup(ncnet::permutation_table_csv(ncnet::n2_permutation_family(static_cast<int>(a), static_cast<int>(b))));
    else if (k == "n3")
      *csv = dup(ncnet::permutation_table_csv(ncnet::n3_permutation_pair(static_cast<int>(a), static_cast<int>(b), c)));
    else
      ncnet::fail(ncnet::Errc::invalid_argument, "permutation table kind must be n2 or n3");
  });
}

ncnet_status ncnet_verify(const ncnet_network* net, const ncnet_code* code, const ncnet_verify_options* options,
                          ncnet_outcome* outcome, char** report_json) {
  return guarded([&] {
    need(net, "network");
    need(code, "code");
    ncnet_verify_options o{};
    if (options) o = *options;
    ncnet::VerifyOptions vo;
    vo.cap = cap_or_default(o.cap);
    vo.workers = o.workers ? o.workers : 1;
    const std::string mode = o.mode && *o.mode ? o.mode : natural_mode(net->net, code->code, vo.cap);
    ncnet::Verdict v;
    if (mode == "exhaustive")
      v = ncnet::verify_exhaustive(net->net, code->code, vo);
    else if (mode == "basis")
      v = ncnet::verify_linear_basis(net->net, code->code, vo);
    else if (mode == "random")
      v = ncnet::verify_random(net->net, code->code, o.samples ? o.samples : 1000000, o.seed, vo);
    else
      ncnet::fail(ncnet::Errc::invalid_argument, "mode must be exhaustive, basis or random, got '" + mode + "'");
    if (outcome)
      *outcome = v.outcome == ncnet::Outcome::solution         ? NCNET_SOLUTION
                 : v.outcome == ncnet::Outcome::counterexample ? NCNET_COUNTEREXAMPLE
                                                               : NCNET_INCONCLUSIVE;
    if (report_json) *report_json = dup(ncnet::verdict_to_json(v));
  });
}

ncnet_status ncnet_search(const char* kind, const ncnet_network* net, int64_t value, uint64_t cap, unsigned workers,
                          ncnet_search_status* status, ncnet_code** solution_out, char** report_json) {
  return guarded([&] {
    need(kind, "kind");
    need(net, "network");
    const std::string k = kind;
    ncnet::SearchOptions so;
    so.cap = cap_or_default(cap);
    so.workers = workers ? workers : 1;
    ncnet::SearchOutcome out;
    std::string report;
    if (k == "linear") {
      ncnet::require(value >= 2, ncnet::Errc::invalid_argument, "linear search needs a ring modulus >= 2");
      const auto carrier = ncnet::AlphabetSpec::cyclic_ring(value);
      try {
        out = ncnet::search_scalar_linear(net->net, carrier, so);
      } catch (const ncnet::Error& e) {
        if (e.code() != ncnet::Errc::cap_exceeded) throw;
        out.kind = "linear";
        out.status = ncnet::SearchStatus::capped;
      }
      report = ncnet::search_outcome_to_json(out);
    } else if (k == "p-structured") {
      out = ncnet::search_p_structured(net->net, value, so);
      report = ncnet::search_outcome_to_json(out);
    } else if (k == "all-codes") {
      out.kind = "all-codes";
      nlohmann::ordered_json j;
      j["kind"] = "all-codes";
      try {
        const auto codes = ncnet::enumerate_all_codes(net->net, value, so.cap);
        out.status = codes.empty() ? ncnet::SearchStatus::exhausted : ncnet::SearchStatus::found;
        if (!codes.empty()) out.solution = codes.front();
        j["status"] = ncnet::to_string(out.status);
        j["solutions"] = codes.size();
        const auto blocks = ncnet::block_prefixes(net->net);
        if (!blocks.empty() && codes.size() <= 10000 && value <= 4) {
          std::size_t witnessed = 0;
          for (const auto& c : codes) {
            bool all = true;
            for (const auto& b : blocks) all = all && ncnet::find_p_witness(net->net, c, b, so.cap).has_value();
            witnessed += all ? 1 : 0;
          }
          j["witnessed"] = witnessed;
        }
      } catch (const ncnet::Error& e) {
        if (e.code() != ncnet::Errc::cap_exceeded) throw;
        out.status = ncnet::SearchStatus::capped;
        j["status"] = "capped";
        j["reason"] = e.what();
      }
      report = j.dump(2) + "\n";
    } else {
      ncnet::fail(ncnet::Errc::invalid_argument, "search kind must be linear, p-structured or all-codes");
    }
    if (status)
      *status = out.status == ncnet::SearchStatus::found       ? NCNET_FOUND
                : out.status == ncnet::SearchStatus::exhausted ? NCNET_EXHAUSTED
                                                               : NCNET_CAPPED;
    if (solution_out) *solution_out = out.solution ? new ncnet_code{*out.solution} : nullptr;
    if (report_json) *report_json = dup(report);
  });
}

ncnet_status ncnet_reproduce(const char* item, uint64_t cap, unsigned workers, int* match, char** report_json) {
  return guarded([&] {
    need(item, "item");
    ncnet::SearchOptions so;
    so.cap = cap_or_default(cap);
    so.workers = workers ? workers : 1;
    const ncnet::ReproduceReport r = ncnet::reproduce(item, so);
    if (match) *match = r.match ? 1 : 0;
    if (report_json) *report_json = dup(ncnet::reproduce_report_to_json(r));
  });
}

}  // extern "C"
