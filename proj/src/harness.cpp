#include "wishlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "wishlab/acceptance.hpp"
#include "wishlab/cir.hpp"
#include "wishlab/collision.hpp"
#include "wishlab/csv.hpp"
#include "wishlab/error.hpp"
#include "wishlab/rng.hpp"
#include "wishlab/stationary.hpp"
#include "wishlab/stats.hpp"

namespace wishlab {

namespace fs = std::filesystem;

namespace {

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::simulate, "simulate"},
    {Command::regime, "regime"},
    {Command::phase_diagram, "phase-diagram"},
    {Command::verify, "verify"},
    {Command::stationary_compare, "stationary-compare"},
    {Command::laplace_check, "laplace-check"},
    {Command::collision_scan, "collision-scan"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError(key, "'" + text + "' is not a number");
  return out;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError(key, "'" + text + "' is not an integer");
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError(key, "'" + text + "' is not an unsigned integer");
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

int narrow_int(const std::string& key, long long v) {
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(key, "value out of range");
  return static_cast<int>(v);
}

fs::path prepare_out_dir(const ExperimentSpec& spec) {
  if (spec.out_dir.empty()) throw ConfigError("out", "empty output directory");
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  if (ec) throw ConfigError("out", "cannot create " + spec.out_dir + ": " + ec.message());
  return fs::path(spec.out_dir);
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary);
  os << text;
  if (!os) throw ConfigError("out", "failed writing " + file.string());
}

std::string regime_text(const ModelParams& params) {
  const RegimeReport r = classify_regime(params);
  const CirParams cir = sum_process(params);
  std::ostringstream os;
  os << "n=" << params.n << '\n'
     << "alpha=" << format_double(params.alpha) << '\n'
     << "beta=" << format_double(params.beta) << '\n'
     << "gamma=" << format_double(params.gamma) << '\n'
     << "kappa=" << format_double(r.kappa) << '\n'
     << "global_solution=" << to_string(r.global_solution) << '\n'
     << "pair_collisions=" << to_string(r.pair_collisions) << '\n'
     << "zero_hit_lambda1=" << to_string(r.zero_hit_lambda1) << '\n';
  for (const auto& [k, v] : r.multiple_collision_k) {
    const ThresholdVerdict tv = multiple_collision_threshold(params, k);
    os << "multiple_collision_k" << k << '=' << to_string(v) << " threshold=" << format_double(tv.value) << '\n';
  }
  const BesselDimension bd = bessel_collision_dimension(params.beta);
  os << "gap_bessel_dimension=" << format_double(bd.dimension) << '\n'
     << "sum_process=a:" << format_double(cir.a) << " b:" << format_double(cir.b) << " sigma:"
     << format_double(cir.sigma) << '\n'
     << "sum_boundary=" << to_string(cir_boundary_classification(cir)) << '\n'
     << "stationary_density=" << (stationary_density(params).evaluable ? "evaluable" : "not_evaluable") << '\n';
  return os.str();
}

Scheme scheme_for(const ModelParams& params, Scheme requested) {
  if (params.kappa() < 0.0) return Scheme::c_epsilon;
  return requested == Scheme::c_epsilon ? Scheme::truncated_euler : requested;
}

int cmd_simulate(const ExperimentSpec& spec, const fs::path& dir, const std::string& prov, std::ostream& out) {
  const ModelParams& params = spec.params;
  const SimConfig& cfg = spec.config;
  if (cfg.scheme == Scheme::c_epsilon && params.kappa() >= 0.0)
    throw RegimeMismatch("c_epsilon scheme needs kappa < 0");
  const auto results =
      run_paths<PathResult>(cfg.paths, cfg.threads, [&](long long p) { return simulate_path(params, cfg, p); });
  write_trajectories(dir / "trajectories.csv", prov, results, params.n);
  write_events(dir / "events.csv", prov, results);

  std::map<std::string, long long> ends;
  long long events = 0, failures = 0;
  for (const PathResult& r : results) {
    ++ends[to_string(r.record.terminated)];
    events += static_cast<long long>(r.events.events.size());
    failures += r.record.terminated == Termination::numerical_failure;
  }
  out << "# " << prov << '\n';
  out << "paths=" << cfg.paths << '\n';
  for (const auto& [name, count] : ends) out << "terminated_" << name << '=' << count << '\n';
  out << "events=" << events << '\n';
  out << "trajectories=" << (dir / "trajectories.csv").string() << '\n';
  out << "events_csv=" << (dir / "events.csv").string() << '\n';
  return failures ? 3 : 0;
}

int cmd_regime(const ExperimentSpec& spec, const fs::path& dir, const std::string& prov, std::ostream& out) {
  const std::string text = "# " + prov + '\n' + regime_text(spec.params);
  write_text(dir / "regime.txt", text);
  out << text;
  return 0;
}

int cmd_phase_diagram(const ExperimentSpec& spec, const fs::path& dir, const std::string& prov, std::ostream& out) {
  const std::vector<ModelParams> grid = spec.sweep ? spec.sweep->points(spec.params)
                                                   : std::vector<ModelParams>{spec.params};
  const int n = spec.params.n;
  std::vector<std::string> header{"alpha", "beta", "gamma", "n", "kappa", "global_solution", "pair_collisions",
                                  "zero_hit_lambda1"};
  for (int k = 1; k <= n; ++k) header.push_back("multiple_collision_k" + std::to_string(k));
  for (const char* h : {"scheme", "paths", "freq_pair_collision", "freq_zero_hit_lambda1", "freq_stopped",
                        "freq_multiple_collision", "ci_low", "ci_high"})
    header.emplace_back(h);
  CsvWriter w(dir / "phase_diagram.csv", prov, header);

  long long failures = 0;
  for (const ModelParams& p : grid) {
    p.validate();
    const RegimeReport r = classify_regime(p);
    SimConfig cfg = spec.config;
    cfg.scheme = scheme_for(p, spec.config.scheme);
    cfg.record_stride = std::max<long long>(cfg.record_stride, cfg.steps());
    struct Flags {
      bool pair = false, zero = false, stopped = false, multiple = false, failed = false;
    };
    const auto flags = run_paths<Flags>(cfg.paths, cfg.threads, [&](long long path) {
      const PathResult res = simulate_path(p, cfg, path);
      Flags f;
      f.pair = res.events.has(EventKind::pair_collision);
      f.zero = res.events.has(EventKind::zero_hit_partial_sum, 1);
      f.multiple = res.events.multiple_observations > 0;
      f.stopped = res.record.terminated == Termination::stopped_at_S_eps ||
                  res.record.terminated == Termination::stopped_at_zeta_eps;
      f.failed = res.record.terminated == Termination::numerical_failure;
      return f;
    });
    long long pair = 0, zero = 0, stopped = 0, multiple = 0;
    for (const Flags& f : flags) {
      pair += f.pair;
      zero += f.zero;
      stopped += f.stopped;
      multiple += f.multiple;
      failures += f.failed;
    }
    const double N = static_cast<double>(cfg.paths);
    const StatSummary ps = proportion_summary("pair_collision", pair, cfg.paths);
    w.cell(p.alpha).cell(p.beta).cell(p.gamma).cell(p.n).cell(r.kappa);
    w.cell(to_string(r.global_solution)).cell(to_string(r.pair_collisions)).cell(to_string(r.zero_hit_lambda1));
    for (int k = 1; k <= n; ++k) w.cell(to_string(r.multiple_collision_k.at(k)));
    w.cell(to_string(cfg.scheme)).cell(cfg.paths);
    w.cell(pair / N).cell(zero / N).cell(stopped / N).cell(multiple / N).cell(ps.ci95.first).cell(ps.ci95.second);
    w.end_row();
  }
  w.close();
  out << "# " << prov << '\n'
      << "grid_points=" << grid.size() << '\n'
      << "phase_diagram=" << (dir / "phase_diagram.csv").string() << '\n';
  return failures ? 3 : 0;
}

int cmd_verify(const ExperimentSpec& spec, const fs::path& dir, const std::string& prov, std::ostream& out) {
  AcceptanceOptions opt;
  opt.only = spec.only;
  opt.threads = spec.config.threads;
  out << "# " << prov << '\n';
  const auto results = run_acceptance(opt, out);
  std::string text = "# " + prov + '\n';
  bool ok = true;
  for (const CriterionResult& r : results) {
    text += format_result(r);
    ok = ok && r.passed;
  }
  write_text(dir / "acceptance.txt", text);
  return ok ? 0 : 2;
}

void summary_row(CsvWriter& w, const StatSummary& s) {
  w.cell(s.name).cell(s.estimate).cell(s.stderr_).cell(s.ci95.first).cell(s.ci95.second);
  if (s.ks_D)
    w.cell(*s.ks_D).cell(*s.ks_p);
  else
    w.cell(std::string_view("")).cell(std::string_view(""));
  w.cell(s.n_samples);
  w.end_row();
}

int cmd_stationary_compare(const ExperimentSpec& spec, const fs::path& dir, const std::string& prov,
                           std::ostream& out) {
  const ModelParams& params = spec.params;
  MhConfig mc;
  mc.samples = spec.mh_samples;
  mc.seed = spec.config.seed;
  const MhResult mh = mh_sampler(params, mc);
  const LongRunReport rep = compare_long_run(params, spec.config, mh.samples);

  const std::vector<double> mh_sums = mh.samples.sums();
  StatSummary mh_sum = mean_summary("mh_sum", mh_sums);
  const KsResult ks = ks_test(mh_sums, [&](double x) { return gamma_cdf(x, 0.5 * params.n * params.alpha, params.gamma); });
  mh_sum.ks_D = ks.D;
  mh_sum.ks_p = ks.p;
  const LogZEstimate lz = estimate_logZ(params, 200000, spec.config.seed);

  CsvWriter w(dir / "stationary.csv", prov,
              {"statistic", "estimate", "stderr", "ci_low", "ci_high", "ks_D", "ks_p", "n_samples"});
  summary_row(w, rep.sum_vs_gamma);
  for (const StatSummary& s : rep.marginal_vs_mh) summary_row(w, s);
  summary_row(w, mh_sum);
  StatSummary acc;
  acc.name = "mh_acceptance";
  acc.estimate = mh.acceptance;
  acc.ci95 = {mh.acceptance, mh.acceptance};
  acc.n_samples = mc.samples * mc.thin;
  summary_row(w, acc);
  StatSummary z;
  z.name = "log_normalizer_" + lz.method;
  z.estimate = lz.value;
  z.stderr_ = lz.stderr_;
  z.ci95 = {lz.value - 1.96 * lz.stderr_, lz.value + 1.96 * lz.stderr_};
  summary_row(w, z);
  w.close();

  std::vector<std::string> header{"sample_id"};
  for (int i = 1; i <= params.n; ++i) header.push_back("lambda_" + std::to_string(i));
  CsvWriter s(dir / "mh_samples.csv", prov, header);
  for (std::size_t k = 0; k < mh.samples.size(); ++k) {
    s.cell(static_cast<long long>(k));
    for (double x : mh.samples.point(k)) s.cell(x);
    s.end_row();
  }
  s.close();

  out << "# " << prov << '\n'
      << "endpoint_sum_ks_p=" << format_double(*rep.sum_vs_gamma.ks_p) << '\n'
      << "mh_sum_ks_p=" << format_double(ks.p) << '\n'
      << "failed_paths=" << rep.failed_paths << '\n'
      << "stationary=" << (dir / "stationary.csv").string() << '\n';
  return rep.failed_paths ? 3 : 0;
}

int cmd_laplace_check(const ExperimentSpec& spec, const fs::path& dir, const std::string& prov, std::ostream& out) {
  const ModelParams& params = spec.params;
  const SimConfig& cfg = spec.config;
  const CirParams cir = sum_process(params);
  const std::vector<double> start = cfg.start(params.n);
  double sum0 = 0.0;
  for (double x : start) sum0 += x;
  std::vector<double> times = spec.t;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.empty()) throw ConfigError("t", "no times given");
  for (double t : times) {
    if (!(t > 0.0)) throw ConfigError("t", "times must be > 0");
    if (std::abs(t / cfg.dt - std::round(t / cfg.dt)) > 1e-6) throw ConfigError("t", "times must be multiples of dt");
  }
  const auto integrals = run_paths<std::vector<double>>(cfg.paths, cfg.threads, [&](long long p) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(p), 5);
    return integrated_cir_sample(cir, sum0, times, cfg.dt, rng);
  });

  CsvWriter w(dir / "laplace.csv", prov,
              {"mu", "t", "phi", "psi", "closed_form", "mc_estimate", "mc_stderr", "z_score"});
  double worst = 0.0;
  for (double mu : spec.mu) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      std::vector<double> col;
      col.reserve(integrals.size());
      for (const auto& v : integrals) col.push_back(v[j]);
      const LaplaceQuery q = integrated_cir_laplace(params, sum0, mu, times[j]);
      const StatSummary mc = empirical_laplace(col, mu);
      const double z = mc.stderr_ > 0.0 ? (mc.estimate - q.value) / mc.stderr_ : 0.0;
      worst = std::max(worst, std::abs(z));
      w.cell(mu).cell(times[j]).cell(q.phi).cell(q.psi).cell(q.value).cell(mc.estimate).cell(mc.stderr_).cell(z);
      w.end_row();
    }
  }
  w.close();
  out << "# " << prov << '\n'
      << "sum0=" << format_double(sum0) << '\n'
      << "max_abs_z=" << format_double(worst) << '\n'
      << "laplace=" << (dir / "laplace.csv").string() << '\n';
  return 0;
}

int cmd_collision_scan(const ExperimentSpec& spec, const fs::path& dir, const std::string& prov, std::ostream& out) {
  const ModelParams& params = spec.params;
  if (spec.k < 0 || spec.k > params.n) throw ConfigError("k", "must lie in 0..n");
  std::vector<double> ladder = kDeltaLadder;
  if (std::find(ladder.begin(), ladder.end(), spec.config.collision_tol) == ladder.end())
    ladder.push_back(spec.config.collision_tol);
  std::sort(ladder.rbegin(), ladder.rend());
  SimConfig cfg = spec.config;
  cfg.scheme = scheme_for(params, spec.config.scheme);

  CsvWriter w(dir / "collision_scan.csv", prov,
              {"k", "threshold", "verdict", "delta", "hits", "paths", "hit_fraction", "stderr", "ci_low", "ci_high"});
  out << "# " << prov << '\n';
  const int lo = spec.k == 0 ? 1 : spec.k;
  const int hi = spec.k == 0 ? params.n : spec.k;
  for (int k = lo; k <= hi; ++k) {
    const ThresholdVerdict tv = multiple_collision_threshold(params, k);
    const FirstPassageReport rep = first_passage_partial_sum(params, cfg, k, ladder);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const StatSummary& s = rep.hit[i];
      const auto hits = static_cast<long long>(std::llround(s.estimate * static_cast<double>(rep.paths)));
      w.cell(k).cell(tv.value).cell(to_string(tv.verdict)).cell(ladder[i]).cell(hits).cell(rep.paths);
      w.cell(s.estimate).cell(s.stderr_).cell(s.ci95.first).cell(s.ci95.second);
      w.end_row();
    }
    out << "k=" << k << " threshold=" << format_double(tv.value) << " verdict=" << to_string(tv.verdict)
        << " multiple_observations=" << rep.multiple_observations << '\n';
  }
  w.close();
  out << "collision_scan=" << (dir / "collision_scan.csv").string() << '\n';
  return 0;
}

}  // namespace

const char* to_string(Command c) noexcept {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "?";
}

Command parse_command(const std::string& name) {
  for (const auto& [cmd, n] : kCommands)
    if (name == n) return cmd;
  throw ConfigError("command", "unknown command '" + name + "'");
}

SweepGrid parse_sweep(const std::string& text) {
  SweepGrid g;
  for (const std::string& part : split(text, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("sweep", "expected name=values in '" + part + "'");
    SweepAxis axis{trim(part.substr(0, eq)), {}};
    if (axis.name != "alpha" && axis.name != "beta" && axis.name != "gamma")
      throw ConfigError("sweep", "can only sweep alpha, beta or gamma, not '" + axis.name + "'");
    for (const auto& a : g.axes)
      if (a.name == axis.name) throw ConfigError("sweep", "axis '" + axis.name + "' given twice");
    const std::string values = part.substr(eq + 1);
    if (values.find(':') != std::string::npos) {
      const auto r = split(values, ':');
      if (r.size() != 3) throw ConfigError("sweep", "range must be start:stop:step");
      const double a = parse_double("sweep", r[0]), b = parse_double("sweep", r[1]), h = parse_double("sweep", r[2]);
      if (!(h > 0.0) || b < a) throw ConfigError("sweep", "range needs step > 0 and stop >= start");
      const auto count = static_cast<long long>(std::floor((b - a) / h + 1e-9)) + 1;
      if (count > 100000) throw ConfigError("sweep", "range has too many points");
      for (long long i = 0; i < count; ++i) axis.values.push_back(a + static_cast<double>(i) * h);
    } else {
      axis.values = parse_list("sweep", values);
    }
    if (axis.values.empty()) throw ConfigError("sweep", "axis '" + axis.name + "' has no values");
    g.axes.push_back(std::move(axis));
  }
  if (g.axes.empty()) throw ConfigError("sweep", "empty grid");
  return g;
}

std::vector<ModelParams> SweepGrid::points(const ModelParams& base) const {
  std::vector<ModelParams> out{base};
  for (const SweepAxis& axis : axes) {
    std::vector<ModelParams> next;
    for (const ModelParams& p : out) {
      for (double v : axis.values) {
        ModelParams q = p;
        if (axis.name == "alpha") q.alpha = v;
        if (axis.name == "beta") q.beta = v;
        if (axis.name == "gamma") q.gamma = v;
        next.push_back(q);
      }
    }
    out = std::move(next);
  }
  return out;
}

void apply_setting(ExperimentSpec& spec, const std::string& raw_key, const std::string& value) {
  std::string key = trim(raw_key);
  key.erase(0, key.find_first_not_of('-'));
  std::replace(key.begin(), key.end(), '-', '_');
  SimConfig& c = spec.config;
  ModelParams& p = spec.params;
  if (key == "alpha") p.alpha = parse_double(key, value);
  else if (key == "beta") p.beta = parse_double(key, value);
  else if (key == "gamma") p.gamma = parse_double(key, value);
  else if (key == "n") p.n = narrow_int(key, parse_integer(key, value));
  else if (key == "scheme") c.scheme = parse_scheme(trim(value));
  else if (key == "dt") c.dt = parse_double(key, value);
  else if (key == "horizon") c.horizon = parse_double(key, value);
  else if (key == "epsilon") c.epsilon = parse_double(key, value);
  else if (key == "collision_tol") c.collision_tol = parse_double(key, value);
  else if (key == "guard") c.guard = parse_double(key, value);
  else if (key == "seed") c.seed = parse_unsigned(key, value);
  else if (key == "paths") c.paths = parse_integer(key, value);
  else if (key == "record_stride") c.record_stride = parse_integer(key, value);
  else if (key == "initial") c.initial = parse_list(key, value);
  else if (key == "noise_substeps") c.noise_substeps = narrow_int(key, parse_integer(key, value));
  else if (key == "threads") c.threads = narrow_int(key, parse_integer(key, value));
  else if (key == "out") spec.out_dir = trim(value);
  else if (key == "sweep") {
    spec.sweep_text = trim(value);
    spec.sweep = parse_sweep(spec.sweep_text);
  } else if (key == "k") spec.k = narrow_int(key, parse_integer(key, value));
  else if (key == "mu") spec.mu = parse_list(key, value);
  else if (key == "t") spec.t = parse_list(key, value);
  else if (key == "mh_samples") spec.mh_samples = parse_integer(key, value);
  else if (key == "only") {
    spec.only.clear();
    for (double v : parse_list(key, value)) {
      if (v != std::floor(v) || v < 1 || v > 10) throw ConfigError(key, "criteria are numbered 1..10");
      spec.only.push_back(static_cast<int>(v));
    }
  } else {
    throw ConfigError(key.empty() ? "config" : key, "unknown setting");
  }
}

void apply_config_text(ExperimentSpec& spec, std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config", "line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(spec, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_config_file(ExperimentSpec& spec, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("config", "cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  apply_config_text(spec, ss.str());
}

std::string provenance(const ExperimentSpec& spec) {
  const ModelParams& p = spec.params;
  const SimConfig& c = spec.config;
  std::ostringstream os;
  os << "wishlab " << kCodeVersion << " command=" << to_string(spec.command) << " alpha=" << format_double(p.alpha)
     << " beta=" << format_double(p.beta) << " gamma=" << format_double(p.gamma) << " n=" << p.n
     << " scheme=" << to_string(c.scheme) << " dt=" << format_double(c.dt) << " horizon=" << format_double(c.horizon)
     << " epsilon=" << format_double(c.eps()) << " collision_tol=" << format_double(c.collision_tol)
     << " guard=" << format_double(interaction_guard(c)) << " seed=" << c.seed << " paths=" << c.paths
     << " record_stride=" << c.record_stride << " noise_substeps=" << c.noise_substeps
     << " initial=" << join(c.initial.empty() ? c.start(p.n) : c.initial)
     << " sweep=" << (spec.sweep_text.empty() ? "none" : spec.sweep_text) << " k=" << spec.k
     << " mu=" << join(spec.mu) << " t=" << join(spec.t) << " mh_samples=" << spec.mh_samples << " only=";
  if (spec.only.empty()) os << "all";
  for (std::size_t i = 0; i < spec.only.size(); ++i) os << (i ? "," : "") << spec.only[i];
  return os.str();
}

int run_command(const ExperimentSpec& spec, std::ostream& out) {
  spec.params.validate();
  spec.config.validate();
  if (spec.mh_samples < 1) throw ConfigError("mh_samples", "must be >= 1");
  if (spec.command == Command::laplace_check && spec.mu.empty()) throw ConfigError("mu", "no values given");
  const fs::path dir = prepare_out_dir(spec);
  const std::string prov = provenance(spec);
  switch (spec.command) {
    case Command::simulate: return cmd_simulate(spec, dir, prov, out);
    case Command::regime: return cmd_regime(spec, dir, prov, out);
    case Command::phase_diagram: return cmd_phase_diagram(spec, dir, prov, out);
    case Command::verify: return cmd_verify(spec, dir, prov, out);
    case Command::stationary_compare: return cmd_stationary_compare(spec, dir, prov, out);
    case Command::laplace_check: return cmd_laplace_check(spec, dir, prov, out);
    case Command::collision_scan: return cmd_collision_scan(spec, dir, prov, out);
  }
  return 1;
}

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const NumericalFailure*>(&e) || dynamic_cast<const NumericOverflow*>(&e)) return 3;
  return 1;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo laboratory for a Wishart-type eigenvalue particle system"};
  std::string command;
  app.add_option("command", command,
                 "simulate | regime | phase-diagram | verify | stationary-compare | laplace-check | collision-scan")
      ->required();
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value configuration file");

  struct Flag {
    const char* key;
    const char* help;
    std::string value;
    CLI::Option* opt = nullptr;
  };
  std::vector<Flag> flags{
      {"out", "output directory", {}},
      {"seed", "master seed", {}},
      {"paths", "number of Monte Carlo paths", {}},
      {"dt", "time step", {}},
      {"horizon", "final time", {}},
      {"epsilon", "regularization level (0: 10 sqrt(dt))", {}},
      {"scheme", "truncated_euler | regularized_switching | root_coordinates | c_epsilon", {}},
      {"alpha", "alpha", {}},
      {"beta", "beta", {}},
      {"gamma", "gamma", {}},
      {"n", "number of particles", {}},
      {"sweep", "grid such as alpha=0.4,0.7;beta=0.5:1.5:0.5", {}},
      {"collision-tol", "event detection level delta", {}},
      {"guard", "interaction cap level (0: max(delta^2, sqrt(dt)))", {}},
      {"record-stride", "record every k-th step", {}},
      {"initial", "comma separated starting point", {}},
      {"noise-substeps", "fine normals per increment", {}},
      {"threads", "worker threads (0: all cores)", {}},
      {"k", "collision-scan partial sum (0: all)", {}},
      {"mu", "laplace-check mu values", {}},
      {"t", "laplace-check times", {}},
      {"mh-samples", "stationary-compare Metropolis samples", {}},
      {"only", "verify: comma separated criteria", {}},
  };
  for (Flag& f : flags) f.opt = app.add_option(std::string("--") + f.key, f.value, f.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    ExperimentSpec spec;
    spec.command = parse_command(command);
    if (!config_path.empty()) apply_config_file(spec, config_path);
    for (const Flag& f : flags)
      if (f.opt->count() > 0) apply_setting(spec, f.key, f.value);
    return run_command(spec, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    err << (code == 3 ? "numerical failure: " : "error: ") << e.what() << '\n';
    return code;
  }
}

}  // namespace wishlab
