#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qlab/witness_io.hpp"

namespace qlab {

/// Effective settings of one command; every field has a text form so the config round-trips.
struct RunConfig {
  std::string command;
  std::string a = "20";
  std::string tau;  // empty: taken from the witness or tuned
  std::string eta = "1.5";
  int depth = 0;
  std::vector<long> M;  // empty: generated from (eta, a)
  long precision_bits = 256;
  int max_period = 3;
  std::string delta = "auto";  // shrink probe radius; auto = lambda^-5
  std::string N0 = "auto";     // auto = least N0 with lambda^-N0 <= delta
  int n_max = 60;
  int samples = 33;
  std::string suite = "all";
  std::string witness;
  std::string out_dir = ".";
  int threads = 1;
  bool long_run = false;

  bool operator==(const RunConfig&) const = default;
};

inline std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << "command = " << c.command << "\n";
  os << "a = " << c.a << "\n";
  os << "tau = " << c.tau << "\n";
  os << "eta = " << c.eta << "\n";
  os << "depth = " << c.depth << "\n";
  os << "M = " << detail::join_longs(c.M) << "\n";
  os << "precision_bits = " << c.precision_bits << "\n";
  os << "max_period = " << c.max_period << "\n";
  os << "delta = " << c.delta << "\n";
  os << "N0 = " << c.N0 << "\n";
  os << "n_max = " << c.n_max << "\n";
  os << "samples = " << c.samples << "\n";
  os << "suite = " << c.suite << "\n";
  os << "witness = " << c.witness << "\n";
  os << "out_dir = " << c.out_dir << "\n";
  os << "threads = " << c.threads << "\n";
  os << "long_run = " << (c.long_run ? 1 : 0) << "\n";
  return os.str();
}

namespace detail {
inline long to_long(const std::string& key, const std::string& v) {
  auto xs = parse_longs(v);
  require(xs.size() == 1, ErrorKind::Format, "bad integer for " + key + ": '" + v + "'");
  return xs[0];
}
}  // namespace detail

/// Applies `key = value` lines on top of base. Unknown keys are an error; '#' starts a comment.
inline RunConfig parse_config(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::Format, "expected key = value: '" + line + "'");
    std::string k = detail::trim(line.substr(0, eq));
    std::string v = detail::trim(line.substr(eq + 1));
    if (k == "command") base.command = v;
    else if (k == "a") base.a = v;
    else if (k == "tau") base.tau = v;
    else if (k == "eta") base.eta = v;
    else if (k == "depth") base.depth = static_cast<int>(detail::to_long(k, v));
    else if (k == "M") base.M = detail::parse_longs(v);
    else if (k == "precision_bits") base.precision_bits = detail::to_long(k, v);
    else if (k == "max_period") base.max_period = static_cast<int>(detail::to_long(k, v));
    else if (k == "delta") base.delta = v;
    else if (k == "N0") base.N0 = v;
    else if (k == "n_max") base.n_max = static_cast<int>(detail::to_long(k, v));
    else if (k == "samples") base.samples = static_cast<int>(detail::to_long(k, v));
    else if (k == "suite") base.suite = v;
    else if (k == "witness") base.witness = v;
    else if (k == "out_dir") base.out_dir = v;
    else if (k == "threads") base.threads = static_cast<int>(detail::to_long(k, v));
    else if (k == "long_run") base.long_run = detail::to_long(k, v) != 0;
    else throw Error(ErrorKind::Format, "unknown config key '" + k + "'");
  }
  return base;
}

/// FNV-1a over the formatted config.
inline std::uint64_t config_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : format_config(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace qlab
