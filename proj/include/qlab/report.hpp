#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlab/complex.hpp"
#include "qlab/config.hpp"
#include "qlab/spectrum.hpp"
#include "qlab/verify.hpp"

namespace qlab {

inline constexpr int kReportFormatVersion = 1;

/// Round-trippable decimal text of a double.
inline std::string dec(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Comment lines that make a data file self-describing.
inline std::string file_header(const RunConfig& c, long bits, const std::string& kind) {
  std::ostringstream os;
  os << "# qlab-" << kind << " " << kReportFormatVersion << "\n";
  os << "# config_hash = " << hex64(config_hash(c)) << "\n";
  os << "# precision_bits = " << bits << "\n";
  std::istringstream cfg(format_config(c));
  std::string line;
  while (std::getline(cfg, line)) os << "# " << line << "\n";
  return os.str();
}

inline std::string word_text(const std::vector<int>& w) {
  std::string s;
  for (int b : w) s += static_cast<char>('0' + b);
  return s;
}

inline std::string rate_csv(const RunConfig& c, long bits, const RateSeries& s) {
  std::ostringstream os;
  os << file_header(c, bits, "rate");
  os << "# truncated = " << (s.truncated ? 1 : 0) << "\n";
  os << "n,max_len,log_rate\n";
  for (const auto& r : s.samples) os << r.n << "," << r.max_len.str() << "," << dec(r.log_rate) << "\n";
  return os.str();
}

inline std::string spectrum_csv(const RunConfig& c, long bits, const std::vector<PeriodicOrbitRecord>& recs) {
  std::ostringstream os;
  os << file_header(c, bits, "spectrum");
  os << "period,itinerary,point_lo,point_hi,log_multiplier,repelling\n";
  for (const auto& r : recs)
    os << r.period << "," << word_text(r.itinerary) << "," << r.point.lo.str() << "," << r.point.hi.str() << ","
       << r.log_multiplier.str(30) << "," << (r.repelling ? 1 : 0) << "\n";
  return os.str();
}

inline std::string complex_spectrum_csv(const RunConfig& c, long bits, const ComplexSpectrum& s) {
  std::ostringstream os;
  os << file_header(c, bits, "complex-spectrum");
  os << "period,re_lo,re_hi,im_lo,im_hi,log_multiplier,least_period\n";
  for (const auto& [n, roots] : s.by_period)
    for (const auto& r : roots) {
      const Complex& z = r.root.z;
      const Real& h = r.root.radius;
      os << n << "," << (z.re - h).str(30) << "," << (z.re + h).str(30) << "," << (z.im - h).str(30) << ","
         << (z.im + h).str(30) << "," << r.log_multiplier.str(30) << "," << r.least_period << "\n";
    }
  return os.str();
}

inline nlohmann::json check_json(const NamedCheck& c) {
  return {{"id", c.id},       {"lhs", dec(c.lhs)},       {"rhs", dec(c.rhs)},
          {"relation", c.relation}, {"margin", dec(c.margin)}, {"pass", c.pass}};
}

inline nlohmann::json gap_json(const GapReport& g) {
  nlohmann::json wn = nlohmann::json::array();
  for (const auto& m : g.wn) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : m.checks) checks.push_back(check_json(c));
    nlohmann::json e = {{"n", m.n},
                        {"steps", m.steps},
                        {"in_hypothesis", m.in_hypothesis},
                        {"log_len", dec(m.log_len)},
                        {"log_bound", dec(m.log_bound)},
                        {"itinerary", word_text(m.itinerary)},
                        {"checks", checks}};
    if (m.shrink_log_max) {
      e["shrink_log_max"] = dec(*m.shrink_log_max);
      e["shrink_truncated"] = m.shrink_truncated;
    }
    wn.push_back(e);
  }
  return {{"eta", dec(g.eta)},
          {"lambda", dec(g.lambda)},
          {"gate", g.gate},
          {"N0", g.N0},
          {"chi_lower", dec(g.chi_lower)},
          {"chi_per_empirical", dec(g.chi_per_empirical)},
          {"chi_max_period", g.chi_max_period},
          {"rate_bound", dec(g.rate_bound)},
          {"wn", wn},
          {"verdict", g.verdict}};
}

/// The report skeleton: format, config echo and precision annotation.
inline nlohmann::json report_json(const RunConfig& c, long bits, const std::vector<NamedCheck>& checks) {
  nlohmann::json cfg = nlohmann::json::object();
  std::istringstream in(format_config(c));
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    cfg[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& ch : checks) cs.push_back(check_json(ch));
  return {{"format", "qlab-report"},
          {"version", kReportFormatVersion},
          {"config", cfg},
          {"config_hash", hex64(config_hash(c))},
          {"precision", {{"bits", bits}, {"double_digits", 17}}},
          {"checks", cs},
          {"all_pass", all_pass(checks)}};
}

/// Rebuilds the RunConfig echoed in a report.
inline RunConfig config_from_report(const nlohmann::json& j) {
  std::string text;
  for (const auto& [k, v] : j.at("config").items()) text += k + " = " + v.get<std::string>() + "\n";
  return parse_config(text);
}

inline void write_text(const std::string& dir, const std::string& name, const std::string& body) {
  std::filesystem::create_directories(dir);
  std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Format, "cannot write " + path);
  out << body;
}

}  // namespace qlab
