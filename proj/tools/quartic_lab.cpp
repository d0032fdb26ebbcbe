#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "qlab/report.hpp"
#include "qlab/tuner.hpp"

using namespace qlab;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kCheckFail = 1, kUsage = 2, kPrecisionCap = 3 };

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::PrecisionCapExceeded:
    case ErrorKind::PrecisionExhausted:
      return kPrecisionCap;
    case ErrorKind::Precondition:
    case ErrorKind::Format:
    case ErrorKind::DegenerateParameter:
    case ErrorKind::NotThreeComponents:
    case ErrorKind::DepthInsufficient:
    case ErrorKind::DepthExceeded:
      return kUsage;
    default:
      return kCheckFail;
  }
}

void print_error(const std::string& kind, const std::string& message, int code) {
  json e = {{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << e.dump() << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Format, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// tau from the config, or the witness when only a witness is given
std::string resolve_tau(RunConfig& c) {
  if (c.tau.empty() && !c.witness.empty()) {
    auto L = read_witness(c.witness);
    c.a = L.witness.a_text;
    c.tau = L.witness.tau_text;
  }
  require(!c.tau.empty(), ErrorKind::Precondition, "tau is required (--tau or --witness)");
  return c.tau;
}

LoadedWitness load_witness(const RunConfig& c) {
  require(!c.witness.empty(), ErrorKind::Precondition, "this command needs --witness");
  auto L = read_witness(c.witness);
  require(L.flags_reproduced, ErrorKind::Format, "stored flags differ from the recomputed ones");
  return L;
}

void finish(const RunConfig& c, json report, const std::string& name) {
  write_text(c.out_dir, name, report.dump(2) + "\n");
}

int cmd_tune(RunConfig& c) {
  require(Real(c.a) >= 20, ErrorKind::Precondition, "a must be at least 20");
  require(c.depth <= 2 || c.long_run, ErrorKind::Precondition, "depth >= 3 needs --long-run");
  ReturnTimeSequence seq;
  if (c.M.empty()) {
    seq = generate_M(std::stod(c.eta), std::stod(c.a), c.depth + 1);
    c.M = seq.M;
  } else {
    seq.M = c.M;
    seq.eta = std::stod(c.eta);
    seq.a = std::stod(c.a);
  }
  TunerConfig tc;
  tc.precision_cap = std::max<long>(tc.precision_cap, c.precision_bits);
  tc.log = [](const std::string& m) { std::cerr << m << "\n"; };
  TuneResult r = tune_tau(c.a, seq, c.depth, tc);
  const auto& w = r.witness;
  std::string path = c.witness.empty() ? (std::filesystem::path(c.out_dir) / "witness.txt").string() : c.witness;
  if (c.witness.empty()) c.witness = path;
  std::filesystem::create_directories(std::filesystem::path(path).parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : std::filesystem::path(path).parent_path());
  write_witness(w, path);

  std::vector<NamedCheck> checks;
  for (std::size_t n = 0; n < w.flags_A.size(); ++n) {
    checks.push_back(log_check("property-A-n" + std::to_string(n), w.flags_A[n] ? 0 : -1, ">=", 0));
    checks.push_back(log_check("property-B-n" + std::to_string(n), w.flags_B[n] ? 0 : -1, ">=", 0));
  }
  checks.push_back(log_check("cutting-point-ordering", w.ordering_ok ? 0 : -1, ">=", 0));
  json rep = report_json(c, w.bits, checks);
  rep["tau"] = {{"lo", w.tau.lo.str(40)}, {"hi", w.tau.hi.str(40)}, {"mid", w.tau_text.substr(0, 60)}};
  rep["M"] = w.M;
  rep["witness"] = path;
  finish(c, rep, "tune.json");
  std::cout << "tau in [" << w.tau.lo.str(30) << ", " << w.tau.hi.str(30) << "]\n";
  for (std::size_t n = 0; n < w.flags_A.size(); ++n)
    std::cout << "level " << n << ": A=" << w.flags_A[n] << " B=" << w.flags_B[n] << "\n";
  std::cout << "witness " << path << "\n";
  return w.passes() ? kPass : kCheckFail;
}

int cmd_check(RunConfig& c) {
  auto L = read_witness(c.witness);
  const auto& w = L.witness;
  std::vector<NamedCheck> checks;
  for (std::size_t n = 0; n < w.flags_A.size(); ++n) {
    checks.push_back(log_check("property-A-n" + std::to_string(n), w.flags_A[n] ? 0 : -1, ">=", 0));
    checks.push_back(log_check("property-B-n" + std::to_string(n), w.flags_B[n] ? 0 : -1, ">=", 0));
    checks.push_back(log_check("return-residual-n" + std::to_string(n), w.levels[n].log10_residual_return * std::log(10.0),
                               "<=", -20 * std::log(10.0)));
  }
  checks.push_back(log_check("stored-flags-reproduced", L.flags_reproduced ? 0 : -1, ">=", 0));
  checks.push_back(log_check("cutting-point-ordering", w.ordering_ok ? 0 : -1, ">=", 0));
  finish(c, report_json(c, w.bits, checks), "check.json");
  std::cout << (all_pass(checks) ? "pass" : "fail") << "\n";
  return all_pass(checks) ? kPass : kCheckFail;
}

Real resolve_delta(const RunConfig& c, const QuarticMap& map) {
  if (c.delta == "auto") return pow(map.lambda(), Real(-5));
  Real d(c.delta);
  require(d > 0, ErrorKind::Precondition, "delta must be positive");
  return d;
}

int cmd_rate(RunConfig& c) {
  resolve_tau(c);
  require(c.n_max >= 1, ErrorKind::Precondition, "n_max must be positive");
  PrecisionScope scope(c.precision_bits);
  QuarticMap map(c.a, c.tau);
  Real delta = resolve_delta(c, map);
  auto p = shrink_probe(map, delta, c.n_max);
  write_text(c.out_dir, "rate.csv", rate_csv(c, c.precision_bits, p.series));
  double ll = std::log(map.lambda().to_double());
  std::vector<NamedCheck> checks = {
      log_check("shrink-rho-above-one", std::log(p.fitted_rho), ">=", 0),
      log_check("shrink-rate-floor", p.min_normalized_rate, ">=", -ll - 0.01),
  };
  json rep = report_json(c, c.precision_bits, checks);
  rep["shrink"] = {{"delta", delta.str(20)},
                   {"fitted_rho", dec(p.fitted_rho)},
                   {"min_normalized_rate", dec(p.min_normalized_rate)},
                   {"limsup_estimate", dec(p.series.limsup_estimate)},
                   {"liminf_estimate", dec(p.series.liminf_estimate)},
                   {"truncated", p.series.truncated}};
  finish(c, rep, "rate.json");
  if (p.series.truncated) std::cerr << "warning: component cap reached, series keeps the largest components\n";
  std::cout << "rho " << p.fitted_rho << "\n";
  return all_pass(checks) ? kPass : kCheckFail;
}

int cmd_spectrum(RunConfig& c) {
  resolve_tau(c);
  PrecisionScope scope(c.precision_bits);
  QuarticMap map(c.a, c.tau);
  auto recs = enumerate_periodic(map, c.max_period);
  auto s = summarize_spectrum(recs, c.max_period, chi_lower_bound(map, std::stod(c.eta)));
  write_text(c.out_dir, "spectrum.csv", spectrum_csv(c, c.precision_bits, recs));
  // the lower bound is only claimed at tuned parameters
  std::vector<NamedCheck> checks;
  if (!c.witness.empty()) checks.push_back(log_check("chi-per-above-lower", s.chi_per_empirical, ">=", s.chi_lower));
  json rep = report_json(c, c.precision_bits, checks);
  json counts = json::object();
  for (auto [p, k] : s.count_by_period) counts[std::to_string(p)] = k;
  json running = json::array();
  for (double r : s.running_min) running.push_back(dec(r));
  rep["spectrum"] = {{"chi_per_empirical", dec(s.chi_per_empirical)},
                     {"chi_lower", dec(s.chi_lower)},
                     {"count_by_period", counts},
                     {"running_min", running},
                     {"non_repelling", s.non_repelling}};
  finish(c, rep, "spectrum.json");
  std::cout << recs.size() << " periodic points, chi_per " << s.chi_per_empirical << "\n";
  return all_pass(checks) ? kPass : kCheckFail;
}

int cmd_complex(RunConfig& c) {
  resolve_tau(c);
  require(c.max_period <= kComplexPeriodCap || c.long_run, ErrorKind::Precondition,
          "complex periods above " + std::to_string(kComplexPeriodCap) + " need --long-run");
  PrecisionScope scope(c.precision_bits);
  QuarticMap map(c.a, c.tau);
  auto cs = complex_periodic_spectrum(map, c.max_period, c.long_run ? 8 : kComplexPeriodCap);
  auto rs = summarize_spectrum(enumerate_periodic(map, c.max_period), c.max_period, 0);
  write_text(c.out_dir, "complex_spectrum.csv", complex_spectrum_csv(c, c.precision_bits, cs));
  std::vector<NamedCheck> checks = {log_check("chi-complex-below-real", cs.chi_per_complex, "<=", rs.chi_per_empirical)};
  for (auto [n, be] : cs.backward_error)
    checks.push_back(log_check("backward-error-p" + std::to_string(n), std::log(be), "<=", -64 * std::log(2.0)));
  json rep = report_json(c, c.precision_bits, checks);
  rep["complex"] = {{"chi_per_complex", dec(cs.chi_per_complex)},
                    {"chi_per_real", dec(rs.chi_per_empirical)},
                    {"strict", cs.chi_per_complex < rs.chi_per_empirical},
                    {"note", "strictness is empirical evidence only"}};
  finish(c, rep, "complex.json");
  std::cout << "chi_complex " << cs.chi_per_complex << " chi_real " << rs.chi_per_empirical << "\n";
  return all_pass(checks) ? kPass : kCheckFail;
}

int cmd_verify(RunConfig& c) {
  const std::string& s = c.suite;
  const bool all = s == "all";
  require(all || s == "macro" || s == "close-return" || s == "long-branch" || s == "collet-eckmann" || s == "induced",
          ErrorKind::Precondition, "unknown suite '" + s + "'");
  std::vector<NamedCheck> checks;
  long bits = c.precision_bits;
  if (all || s == "macro") {
    resolve_tau(c);
    PrecisionScope scope(c.precision_bits);
    QuarticMap map(c.a, c.tau);
    auto m = verify_macro(map, std::stod(c.eta), c.samples);
    checks.insert(checks.end(), m.begin(), m.end());
  }
  if (!all && s == "macro") {
    finish(c, report_json(c, bits, checks), "verify.json");
    std::cout << (all_pass(checks) ? "pass" : "fail") << "\n";
    return all_pass(checks) ? kPass : kCheckFail;
  }
  auto L = load_witness(c);
  const auto& w = L.witness;
  bits = w.bits;
  auto add = [&](const std::vector<NamedCheck>& v) { checks.insert(checks.end(), v.begin(), v.end()); };
  if (all || s == "close-return") add(verify_close_return(w, c.samples));
  if (all || s == "long-branch") add(verify_long_branch(w, c.samples));
  if (all || s == "collet-eckmann") add(verify_collet_eckmann(w));
  json rep;
  if (all || s == "induced") {
    auto r = verify_induced_expansion(w, 1000, 1);
    add(r.checks);
    rep["induced"] = {{"sampled", r.sampled}, {"dropped", r.dropped}};
  }
  json full = report_json(c, bits, checks);
  if (!rep.is_null()) full.update(rep);
  finish(c, full, "verify.json");
  for (const auto& ch : checks)
    if (!ch.pass) std::cerr << "fail " << ch.id << " margin " << ch.margin << "\n";
  std::cout << (all_pass(checks) ? "pass" : "fail") << " (" << checks.size() << " checks)\n";
  return all_pass(checks) ? kPass : kCheckFail;
}

int cmd_gap(RunConfig& c) {
  auto L = load_witness(c);
  const auto& w = L.witness;
  int N0;
  {
    PrecisionScope scope(256);
    QuarticMap map(w.a_text, w.tau_text);
    N0 = c.N0 == "auto" ? n0_for_delta(map, resolve_delta(c, map).to_double())
                        : static_cast<int>(detail::to_long("N0", c.N0));
  }
  std::vector<int> levels;
  for (int n = 0; n + 2 <= w.depth + 1; ++n)
    if (w.M[n + 1] - 2 * w.M[n] >= N0) levels.push_back(n);
  auto g = verify_main_gap(w, N0, levels, c.max_period);
  std::vector<NamedCheck> checks = {
      log_check("gap-gate", std::log(g.lambda), ">=", 19 * std::log(g.eta)),
      log_check("rate-below-chi-lower", g.rate_bound, "<=", g.chi_lower),
      log_check("chi-per-above-lower", g.chi_per_empirical, ">=", g.chi_lower),
  };
  for (const auto& m : g.wn)
    if (m.in_hypothesis) checks.insert(checks.end(), m.checks.begin(), m.checks.end());
  json rep = report_json(c, w.bits, checks);
  rep["gap"] = gap_json(g);
  finish(c, rep, "gap.json");
  std::cout << "verdict " << (g.verdict ? "pass" : "fail") << "\n";
  return g.verdict ? kPass : kCheckFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quartic family laboratory"};
  app.require_subcommand(1);
  std::string config_file;
  RunConfig flags;
  std::vector<std::function<void(RunConfig&)>> overrides;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "key = value config file");
    auto str = [&](const char* name, std::string RunConfig::*field, const char* help) {
      auto* o = sub->add_option(name, flags.*field, help);
      overrides.push_back([o, field, &flags](RunConfig& c) { if (o->count()) c.*field = flags.*field; });
    };
    auto num = [&](const char* name, auto RunConfig::*field, const char* help) {
      auto* o = sub->add_option(name, flags.*field, help);
      overrides.push_back([o, field, &flags](RunConfig& c) { if (o->count()) c.*field = flags.*field; });
    };
    str("--a", &RunConfig::a, "parameter a");
    str("--tau", &RunConfig::tau, "parameter tau");
    str("--eta", &RunConfig::eta, "distortion constant eta");
    num("--depth", &RunConfig::depth, "witness depth");
    auto* m = sub->add_option("--M", flags.M, "return times, comma separated")->delimiter(',');
    overrides.push_back([m, &flags](RunConfig& c) { if (m->count()) c.M = flags.M; });
    num("--precision-bits", &RunConfig::precision_bits, "working precision");
    num("--max-period", &RunConfig::max_period, "largest period");
    str("--delta", &RunConfig::delta, "probe radius or auto");
    str("--N0", &RunConfig::N0, "N0 or auto");
    num("--n-max", &RunConfig::n_max, "pull-back depth");
    num("--samples", &RunConfig::samples, "sample points per interval");
    str("--suite", &RunConfig::suite, "macro, close-return, long-branch, collet-eckmann, induced or all");
    str("--witness", &RunConfig::witness, "witness file");
    str("--out-dir", &RunConfig::out_dir, "output directory");
    num("--threads", &RunConfig::threads, "worker bound");
    auto* lr = sub->add_flag("--long-run", flags.long_run, "allow jobs longer than ten minutes");
    overrides.push_back([lr](RunConfig& c) { if (lr->count()) c.long_run = true; });
  };

  std::map<std::string, std::function<int(RunConfig&)>> commands = {
      {"tune", cmd_tune},         {"check", cmd_check},     {"rate", cmd_rate}, {"spectrum", cmd_spectrum},
      {"complex", cmd_complex},   {"verify", cmd_verify},   {"gap", cmd_gap},
  };
  const std::map<std::string, std::string> help = {
      {"tune", "tune tau to a combinatorial type and write a witness"},
      {"check", "re-validate a witness file"},
      {"rate", "shrink rate of pull-backs of a ball around -1"},
      {"spectrum", "real periodic spectrum"},
      {"complex", "complex periodic spectrum"},
      {"verify", "named inequality suites"},
      {"gap", "rate-gap report"},
  };
  for (const auto& [name, text] : help) common(app.add_subcommand(name, text));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("Usage", e.what(), kUsage);
    return kUsage;
  }

  try {
    RunConfig c;
    if (!config_file.empty()) c = parse_config(read_file(config_file));
    for (auto& o : overrides) o(c);
    c.command = app.get_subcommands().front()->get_name();
    require(c.threads >= 1, ErrorKind::Precondition, "threads must be positive");
    require(c.precision_bits >= 64, ErrorKind::Precondition, "precision_bits must be at least 64");
    return commands.at(c.command)(c);
  } catch (const Error& e) {
    int code = exit_for(e.kind());
    print_error(std::string(to_string(e.kind())), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    print_error("Usage", e.what(), kUsage);
    return kUsage;
  }
}
