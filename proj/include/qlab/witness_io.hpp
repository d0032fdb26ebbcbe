#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qlab/combinatorics.hpp"

namespace qlab {

inline constexpr int kWitnessFormatVersion = 1;

namespace detail {
inline std::string join_longs(const std::vector<long>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}
inline std::string join_flags(const std::vector<bool>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::string(v[i] ? "1" : "0");
  return s;
}
inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}
inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
inline std::vector<long> parse_longs(const std::string& s) {
  std::vector<long> out;
  for (const auto& t : split(s, ',')) {
    std::string x = trim(t);
    if (x.empty()) continue;
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(x, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Format, "not an integer: '" + x + "'");
    }
    if (used != x.size()) throw Error(ErrorKind::Format, "not an integer: '" + x + "'");
    out.push_back(v);
  }
  return out;
}
inline std::vector<bool> parse_flags(const std::string& s) {
  std::vector<bool> out;
  for (long v : parse_longs(s)) out.push_back(v != 0);
  return out;
}
}  // namespace detail

/// Versioned text: header, tau data, then per-level decimal enclosures.
inline std::string format_witness(const CombinatoricsWitness& w) {
  std::ostringstream os;
  os << "qlab-witness " << kWitnessFormatVersion << "\n";
  os << "a = " << w.a_text << "\n";
  os << "tau = " << w.tau_text << "\n";
  os << "eta = " << w.eta << "\n";
  os << "M = " << detail::join_longs(w.M) << "\n";
  os << "depth = " << w.depth << "\n";
  os << "bits = " << w.bits << "\n";
  os << "tau_enclosure = " << w.tau.lo.str() << " " << w.tau.hi.str() << "\n";
  for (std::size_t n = 0; n < w.tau_levels.size(); ++n)
    os << "T_" << n << " = " << w.tau_levels[n].lo.str() << " " << w.tau_levels[n].hi.str() << "\n";
  os << "flags_A = " << detail::join_flags(w.flags_A) << "\n";
  os << "flags_B = " << detail::join_flags(w.flags_B) << "\n";
  for (std::size_t n = 0; n < w.x_seq.size(); ++n)
    os << "x_" << n << " = " << w.x_seq[n].lo.str() << " " << w.x_seq[n].hi.str() << "\n";
  for (std::size_t n = 0; n < w.y_seq.size(); ++n)
    os << "y_" << n << " = " << w.y_seq[n].lo.str() << " " << w.y_seq[n].hi.str() << "\n";
  return os.str();
}

inline void write_witness(const CombinatoricsWitness& w, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Format, "cannot write " + path);
  out << format_witness(w);
}

struct LoadedWitness {
  CombinatoricsWitness witness;  // recomputed by check_type_M from the stored parameters
  std::vector<bool> stored_A, stored_B;
  bool flags_reproduced = false;
};

/// Parses a witness file and re-runs check_type_M at the stored precision.
inline LoadedWitness parse_witness(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  auto head = detail::split(detail::trim(line), ' ');
  require(head.size() == 2 && head[0] == "qlab-witness", ErrorKind::Format, "not a witness file");
  require(std::stoi(head[1]) == kWitnessFormatVersion, ErrorKind::Format, "unsupported witness version");
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  for (const char* k : {"a", "tau", "eta", "M", "depth", "bits"})
    require(kv.count(k) > 0, ErrorKind::Format, std::string("witness missing key ") + k);

  LoadedWitness out;
  long bits = std::stol(kv["bits"]);
  PrecisionScope scope(bits);
  ReturnTimeSequence seq;
  seq.M = detail::parse_longs(kv["M"]);
  seq.eta = std::stod(kv["eta"]);
  int depth = std::stoi(kv["depth"]);
  QuarticMap map(kv["a"], kv["tau"]);
  out.witness = check_type_M(map, seq, depth);
  auto pair = [&](const std::string& key) {
    auto parts = detail::split(kv[key], ' ');
    require(parts.size() == 2, ErrorKind::Format, "bad enclosure for " + key);
    return Enclosure(Real(parts[0]), Real(parts[1]), bits);
  };
  if (kv.count("tau_enclosure")) out.witness.tau = pair("tau_enclosure");
  out.witness.tau_levels.clear();
  for (int n = 0; kv.count("T_" + std::to_string(n)); ++n) out.witness.tau_levels.push_back(pair("T_" + std::to_string(n)));
  out.stored_A = detail::parse_flags(kv["flags_A"]);
  out.stored_B = detail::parse_flags(kv["flags_B"]);
  out.flags_reproduced = out.stored_A == out.witness.flags_A && out.stored_B == out.witness.flags_B;
  return out;
}

inline LoadedWitness read_witness(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Format, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_witness(ss.str());
}

}  // namespace qlab
