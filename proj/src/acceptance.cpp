#include "wishlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "wishlab/cir.hpp"
#include "wishlab/collision.hpp"
#include "wishlab/csv.hpp"
#include "wishlab/harness.hpp"
#include "wishlab/integrators.hpp"
#include "wishlab/model.hpp"
#include "wishlab/rng.hpp"
#include "wishlab/stationary.hpp"
#include "wishlab/stats.hpp"

namespace wishlab {

namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kKsLevel = 0.01;
constexpr double kMultipleDelta = 1e-4;
constexpr double kContractionSigmas = 3.0;
constexpr double kPairFreqMin = 0.99;
constexpr double kStopFreqMin = 0.99;
constexpr double kZeroHitMin = 0.95;
constexpr double kZeroHitMax = 0.01;
constexpr double kLaplaceSigmas = 4.0;
constexpr double kLimitTol = 1e-9;
constexpr double kGradRelTol = 1e-6;
constexpr double kDriftUlps = 8.0;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Context {
  AcceptanceOptions opt;
  long long multiple = 0;
  std::vector<std::string> multiple_sources;

  void count_multiple(const std::string& run, long long m) {
    multiple += m;
    multiple_sources.push_back(fmt("%s: %lld", run.c_str(), m));
  }

  SimConfig config(double dt, double horizon, long long paths) const {
    SimConfig c;
    c.dt = dt;
    c.horizon = horizon;
    c.paths = paths;
    c.seed = opt.seed;
    c.threads = opt.threads;
    c.collision_tol = kMultipleDelta;
    c.record_stride = c.steps();
    return c;
  }
};

double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

CriterionResult sum_is_cir(Context& ctx) {
  CriterionResult r{1, "sum-is-CIR law", false, {}, {}, 0.0};
  const ModelParams params{2.0, 0.4, 1.0, 3};
  const std::vector<double> start{1.0, 2.0, 3.0};
  const long long paths = 10000;
  const long long ref_size = 1000000;
  const CirParams cir = sum_process(params);

  std::vector<double> ref = run_paths<double>(ref_size, ctx.opt.threads, [&](long long q) {
    RandomStream rng(ctx.opt.seed, static_cast<std::uint64_t>(q), 3);
    return cir_exact_step(cir, sum_of(start), 1.0, rng);
  });
  std::sort(ref.begin(), ref.end());

  const double dts[] = {4e-3, 2e-3, 1e-3};
  const int substeps[] = {4, 2, 1};
  std::vector<KsResult> ks;
  std::vector<std::vector<double>> by_path;
  for (int l = 0; l < 3; ++l) {
    SimConfig cfg = ctx.config(dts[l], 1.0, paths);
    cfg.initial = start;
    cfg.noise_substeps = substeps[l];
    struct End {
      double sum = 0.0;
      long long multiple = 0;
    };
    const auto ends = run_paths<End>(paths, cfg.threads, [&](long long p) {
      const PathResult res = simulate_path(params, cfg, p);
      return End{sum_of(res.record.final_state()), res.events.multiple_observations};
    });
    std::vector<double> sums;
    long long multiple = 0;
    for (const End& e : ends) {
      sums.push_back(e.sum);
      multiple += e.multiple;
    }
    by_path.push_back(sums);
    std::sort(sums.begin(), sums.end());
    ks.push_back(ks_two_sample(sums, ref));
    ctx.count_multiple(fmt("criterion 1 dt=%g", dts[l]), multiple);
    r.details.push_back(fmt("dt=%g: KS D=%.5f p=%.4f mean=%.5f (exact mean %.5f)", dts[l], ks.back().D, ks.back().p,
                            sample_mean(sums), cir_conditional_mean(cir, sum_of(start), 1.0)));
  }
  for (int l = 1; l < 3; ++l) {
    std::vector<double> diff(paths);
    for (long long p = 0; p < paths; ++p) diff[p] = by_path[l][p] - by_path[l - 1][p];
    const double m = sample_mean(diff);
    r.details.push_back(fmt("paired mean shift dt=%g -> %g: %+.5f +- %.5f (sampling se of one mean %.4f)", dts[l - 1],
                            dts[l], m, std::sqrt(sample_variance(diff) / paths),
                            std::sqrt(sample_variance(by_path[l]) / paths)));
  }
  const bool decreasing = ks[0].D > ks[1].D && ks[1].D > ks[2].D;
  r.passed = ks[2].p >= kKsLevel && decreasing;
  r.summary = fmt("p(dt=1e-3)=%.4f >= %.2f, D decreasing over dt: %s", ks[2].p, kKsLevel, decreasing ? "yes" : "no");
  return r;
}

CriterionResult stationary_gamma(Context& ctx) {
  CriterionResult r{2, "stationary Gamma sum law", false, {}, {}, 0.0};
  const ModelParams params{2.0, 0.5, 1.0, 2};
  const double shape = 0.5 * params.n * params.alpha, rate = params.gamma;
  const auto cdf = [&](double x) { return gamma_cdf(x, shape, rate); };

  const SimConfig cfg = ctx.config(1e-3, 20.0, 10000);
  struct End {
    double sum = 0.0;
    long long multiple = 0;
  };
  const auto ends = run_paths<End>(cfg.paths, cfg.threads, [&](long long p) {
    const PathResult res = simulate_path(params, cfg, p);
    return End{sum_of(res.record.final_state()), res.events.multiple_observations};
  });
  std::vector<double> sums;
  long long multiple = 0;
  for (const End& e : ends) {
    sums.push_back(e.sum);
    multiple += e.multiple;
  }
  ctx.count_multiple("criterion 2", multiple);
  std::sort(sums.begin(), sums.end());
  const KsResult sim = ks_test(sums, cdf);

  MhConfig mc;
  mc.samples = 10000;
  mc.seed = ctx.opt.seed;
  const MhResult mh = mh_sampler(params, mc);
  const KsResult chain = ks_test(mh.samples.sums(), cdf);

  r.details.push_back(fmt("endpoint sum at t=20, %lld paths: D=%.5f p=%.4f mean=%.4f (law mean %.4f)", cfg.paths,
                          sim.D, sim.p, sample_mean(sums), shape / rate));
  r.details.push_back(fmt("Metropolis sum, %lld samples (acceptance %.3f): D=%.5f p=%.4f", mc.samples, mh.acceptance,
                          chain.D, chain.p));
  r.passed = sim.p >= kKsLevel && chain.p >= kKsLevel;
  r.summary = fmt("simulated p=%.4f, Metropolis p=%.4f, both >= %.2f required", sim.p, chain.p, kKsLevel);
  return r;
}

CriterionResult contraction(Context& ctx) {
  CriterionResult r{3, "contraction under shared noise", false, {}, {}, 0.0};
  const ModelParams params{2.0, 0.4, 1.0, 3};
  SimConfig cfg = ctx.config(1e-3, 2.0, 1000);
  cfg.record_stride = 500;
  cfg.initial = {1.0, 2.0, 3.0};
  const std::vector<double> other{1.5, 1.8, 3.4};
  const std::vector<double> targets{0.5, 1.0, 2.0};
  double initial_gap = 0.0;
  for (int i = 0; i < params.n; ++i) initial_gap += std::abs(cfg.initial[i] - other[i]);

  struct Out {
    std::vector<double> gaps;
    long long multiple = 0;
  };
  const auto outs = run_paths<Out>(cfg.paths, cfg.threads, [&](long long p) {
    EventDetector da(params.n, kMultipleDelta), db(params.n, kMultipleDelta);
    const auto [a, b] = simulate_coupled(params, params, cfg, p, other, &da, &db);
    Out o;
    for (double t : targets) {
      double g = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t k = 0; k < a.size() && k < b.size(); ++k) {
        if (std::abs(a.times[k] - t) < 1e-9) {
          g = 0.0;
          for (int i = 0; i < params.n; ++i) g += std::abs(a.state(k)[i] - b.state(k)[i]);
        }
      }
      o.gaps.push_back(g);
    }
    o.multiple = da.log().multiple_observations + db.log().multiple_observations;
    return o;
  });
  long long multiple = 0;
  for (const Out& o : outs) multiple += o.multiple;
  ctx.count_multiple("criterion 3", multiple);

  bool ok = true;
  std::string line;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    std::vector<double> g;
    for (const Out& o : outs) g.push_back(o.gaps[j]);
    const StatSummary s = mean_summary("gap", g);
    const double bound = std::exp(-2.0 * params.gamma * targets[j]) * initial_gap *
                         (1.0 + kContractionSigmas * s.stderr_ / s.estimate);
    const bool pass = std::isfinite(s.estimate) && s.estimate <= bound;
    ok = ok && pass;
    r.details.push_back(fmt("t=%g: E sum|gap| = %.5f +- %.5f, bound %.5f %s", targets[j], s.estimate, s.stderr_, bound,
                            pass ? "ok" : "exceeded"));
  }
  r.passed = ok;
  r.summary = fmt("initial sum|gap| = %g, %lld coupled pairs, all three times within bound: %s", initial_gap,
                  cfg.paths, ok ? "yes" : "no");
  return r;
}

CriterionResult phase_diagram(Context& ctx) {
  CriterionResult r{4, "collision phase diagram", false, {}, {}, 0.0};

  // (a) beta > 1: no pair collisions.
  const ModelParams pa{3.0, 1.2, 1.0, 3};
  const SimConfig ca = ctx.config(1e-3, 10.0, 1000);
  const std::vector<double> ladder{1e-2, 1e-3};
  struct OutA {
    std::vector<char> hit;
    long long multiple = 0;
  };
  const auto outs_a = run_paths<OutA>(ca.paths, ca.threads, [&](long long p) {
    std::vector<std::unique_ptr<EventDetector>> dets;
    ObserverList list;
    for (double lv : ladder) {
      dets.push_back(std::make_unique<EventDetector>(pa.n, lv));
      list.add(dets.back().get());
    }
    const PathResult res = simulate_path(pa, ca, p, &list);
    OutA o;
    for (const auto& d : dets) o.hit.push_back(d->log().has(EventKind::pair_collision));
    o.hit.push_back(res.events.has(EventKind::pair_collision));
    o.multiple = res.events.multiple_observations;
    return o;
  });
  std::vector<long long> hits_a(ladder.size() + 1, 0);
  long long multiple = 0;
  for (const OutA& o : outs_a) {
    for (std::size_t i = 0; i < o.hit.size(); ++i) hits_a[i] += o.hit[i];
    multiple += o.multiple;
  }
  ctx.count_multiple("criterion 4a", multiple);
  const bool pass_a = hits_a.back() == 0;
  r.details.push_back(fmt("(a) beta=1.2, kappa=%g, horizon 10, %lld paths: pair-collision paths at delta 1e-2/1e-3/1e-4 = "
                          "%lld/%lld/%lld (required 0 at 1e-4) %s",
                          pa.kappa(), ca.paths, hits_a[0], hits_a[1], hits_a[2], pass_a ? "ok" : "FAIL"));

  // (b) beta < 1, kappa = 1.1, gamma = 1: neighbours touch.
  const ModelParams pb{1.6, 0.5, 1.0, 2};
  const SimConfig cb = ctx.config(1e-3, 100.0, 1000);
  const double delta_b = 1e-3;
  struct OutB {
    bool hit = false;
    long long multiple = 0;
  };
  const auto outs_b = run_paths<OutB>(cb.paths, cb.threads, [&](long long p) {
    EventDetector det(pb.n, delta_b);
    det.stop_on_pair(1);
    const PathResult res = simulate_path(pb, cb, p, &det);
    return OutB{det.log().has(EventKind::pair_collision, 1), res.events.multiple_observations};
  });
  long long hits_b = 0;
  multiple = 0;
  for (const OutB& o : outs_b) {
    hits_b += o.hit;
    multiple += o.multiple;
  }
  ctx.count_multiple("criterion 4b", multiple);
  const double freq_b = static_cast<double>(hits_b) / static_cast<double>(cb.paths);
  const bool pass_b = freq_b >= kPairFreqMin;
  r.details.push_back(fmt("(b) beta=0.5, kappa=%g, gamma=1, horizon 100: pair-collision frequency at delta=%g is %.4f "
                          "(required >= %.2f) %s",
                          pb.kappa(), delta_b, freq_b, kPairFreqMin, pass_b ? "ok" : "FAIL"));

  // (c) kappa < 0, gamma = 0: the regularized root scheme stops at S_eps.
  const ModelParams pc{0.4, 0.5, 0.0, 2};
  SimConfig cc = ctx.config(1e-3, 100.0, 1000);
  cc.scheme = Scheme::c_epsilon;
  cc.epsilon = 1e-3;
  struct OutC {
    bool stopped = false;
    long long multiple = 0;
  };
  const auto outs_c = run_paths<OutC>(cc.paths, cc.threads, [&](long long p) {
    const PathResult res = simulate_path(pc, cc, p);
    return OutC{res.record.terminated == Termination::stopped_at_S_eps, res.events.multiple_observations};
  });
  long long stopped = 0;
  multiple = 0;
  for (const OutC& o : outs_c) {
    stopped += o.stopped;
    multiple += o.multiple;
  }
  ctx.count_multiple("criterion 4c", multiple);
  const double freq_c = static_cast<double>(stopped) / static_cast<double>(cc.paths);
  const bool pass_c = freq_c >= kStopFreqMin;
  r.details.push_back(fmt("(c) kappa=%g, gamma=0, epsilon=%g, horizon 100: stopped_at_S_eps fraction %.4f (required >= "
                          "%.2f) %s",
                          pc.kappa(), cc.epsilon, freq_c, kStopFreqMin, pass_c ? "ok" : "FAIL"));

  r.passed = pass_a && pass_b && pass_c;
  r.summary = fmt("(a) %s, (b) %s, (c) %s", pass_a ? "pass" : "fail", pass_b ? "pass" : "fail",
                  pass_c ? "pass" : "fail");
  return r;
}

CriterionResult multiple_collision_zero(Context& ctx) {
  CriterionResult r{5, "multiple collision in zero", false, {}, {}, 0.0};
  const int k = 2;
  const std::vector<double> levels{1e-2, 1e-3, 1e-4};
  const std::size_t at = 1;

  const ModelParams hit{1.0, 0.4, 0.5, 3};
  const SimConfig ch = ctx.config(1e-3, 200.0, 1000);
  const FirstPassageReport rh = first_passage_partial_sum(hit, ch, k, levels);
  ctx.count_multiple("criterion 5 alpha=1", rh.multiple_observations);
  const double fh = rh.hit[at].estimate;
  const bool pass_hit = fh >= kZeroHitMin;
  r.details.push_back(fmt("alpha=1, gamma=0.5 (threshold %g): hit fractions at delta 1e-2/1e-3/1e-4 = %.4f/%.4f/%.4f, "
                          "required >= %.2f at 1e-3 %s",
                          multiple_collision_threshold(hit, k).value, rh.hit[0].estimate, rh.hit[1].estimate,
                          rh.hit[2].estimate, kZeroHitMin, pass_hit ? "ok" : "FAIL"));

  const ModelParams miss{2.0, 0.4, 0.0, 3};
  const double dts[] = {4e-3, 2e-3, 1e-3};
  const int substeps[] = {4, 2, 1};
  std::vector<double> fm;
  for (int l = 0; l < 3; ++l) {
    SimConfig cm = ctx.config(dts[l], 200.0, 1000);
    cm.noise_substeps = substeps[l];
    const FirstPassageReport rm = first_passage_partial_sum(miss, cm, k, levels);
    ctx.count_multiple(fmt("criterion 5 alpha=2 dt=%g", dts[l]), rm.multiple_observations);
    fm.push_back(rm.hit[at].estimate);
    r.details.push_back(fmt("alpha=2, gamma=0 (threshold %g), dt=%g: hit fractions at delta 1e-2/1e-3/1e-4 = "
                            "%.4f/%.4f/%.4f",
                            multiple_collision_threshold(miss, k).value, dts[l], rm.hit[0].estimate,
                            rm.hit[1].estimate, rm.hit[2].estimate));
  }
  const bool nonincreasing = fm[0] >= fm[1] && fm[1] >= fm[2];
  const bool pass_miss = fm[2] <= kZeroHitMax && nonincreasing;
  r.passed = pass_hit && pass_miss;
  r.summary = fmt("alpha=1: %.4f >= %.2f; alpha=2: %.4f <= %.2f and non-increasing under refinement (%.4f, %.4f, %.4f)",
                  fh, kZeroHitMin, fm[2], kZeroHitMax, fm[0], fm[1], fm[2]);
  return r;
}

CriterionResult no_multiple(Context& ctx) {
  CriterionResult r{6, "no multiple collisions", false, {}, {}, 0.0};
  r.details = ctx.multiple_sources;
  r.passed = ctx.multiple == 0;
  r.summary = fmt("%lld same-step double events at delta=%g across %zu runs of criteria 1-5", ctx.multiple,
                  kMultipleDelta, ctx.multiple_sources.size());
  return r;
}

CriterionResult laplace(Context& ctx) {
  CriterionResult r{7, "integrated-CIR Laplace transform", false, {}, {}, 0.0};
  const ModelParams params{1.0, 0.5, 1.0, 3};
  const double sum0 = 1.0;
  const CirParams cir = sum_process(params);
  const std::vector<double> times{0.5, 1.0, 2.0};
  const std::vector<double> mus{0.5, 1.0};
  const double h = 1.0 / 256.0;
  const long long paths = 100000;
  const auto integrals = run_paths<std::vector<double>>(paths, ctx.opt.threads, [&](long long p) {
    RandomStream rng(ctx.opt.seed, static_cast<std::uint64_t>(p), 5);
    return integrated_cir_sample(cir, sum0, times, h, rng);
  });
  bool ok = true;
  double worst = 0.0, worst_alt = 0.0;
  for (double mu : mus) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      std::vector<double> col;
      col.reserve(integrals.size());
      for (const auto& v : integrals) col.push_back(v[j]);
      const StatSummary mc = empirical_laplace(col, mu);
      const LaplaceQuery q = integrated_cir_laplace(params, sum0, mu, times[j]);
      const LaplaceQuery alt =
          integrated_cir_laplace_with_constant(2.0 * params.alpha, params.gamma, sum0, mu, times[j]);
      const double z = (mc.estimate - q.value) / mc.stderr_;
      const double z_alt = (mc.estimate - alt.value) / mc.stderr_;
      worst = std::max(worst, std::abs(z));
      worst_alt = std::max(worst_alt, std::abs(z_alt));
      ok = ok && std::abs(z) <= kLaplaceSigmas;
      r.details.push_back(fmt("mu=%g t=%g: closed %.6f, Monte Carlo %.6f +- %.6f, z=%+.2f (prefactor 2 alpha: z=%+.1f)",
                              mu, times[j], q.value, mc.estimate, mc.stderr_, z, z_alt));
    }
  }
  const double gamma = 1.0, mu = 1.0;
  const double psi_inf = integrated_cir_laplace_with_constant(1.0, gamma, 1.0, mu, 1e3).psi;
  const double limit = mu / (std::sqrt(gamma * gamma + 2.0 * mu) + gamma);
  const bool pass_limit = std::abs(psi_inf - limit) <= kLimitTol;
  r.details.push_back(fmt("psi at t=1000, gamma=1, mu=1: %.17g vs limit %.17g, diff %.2e", psi_inf, limit,
                          std::abs(psi_inf - limit)));
  r.passed = ok && pass_limit;
  r.summary = fmt("max |z| = %.2f over 6 (mu, t) pairs with %lld paths (<= %.0f required); psi limit %s", worst, paths,
                  kLaplaceSigmas, pass_limit ? "within 1e-9" : "off");
  return r;
}

CriterionResult gradient(Context& ctx) {
  CriterionResult r{8, "gradient and drift consistency", false, {}, {}, 0.0};
  RandomStream rng(ctx.opt.seed, 0, 21);

  const ModelParams pv{2.0, 0.4, 0.7, 3};
  double worst_grad = 0.0;
  for (int s = 0; s < 100; ++s) {
    std::vector<double> x(pv.n);
    bool spaced = false;
    while (!spaced) {
      for (double& v : x) v = 0.3 + 2.7 * rng.uniform();
      std::sort(x.begin(), x.end());
      spaced = true;
      for (int i = 1; i < pv.n; ++i) spaced = spaced && x[i] - x[i - 1] > 0.05;
    }
    const auto f = [&](std::span<const double> y) { return potential_V(pv, y); };
    const std::vector<double> fd = finite_diff_gradient(f, x, 1e-5);
    const std::vector<double> g = grad_V(pv, x);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < pv.n; ++i) {
      num = std::max(num, std::abs(fd[i] - g[i]));
      den = std::max(den, std::abs(g[i]));
    }
    worst_grad = std::max(worst_grad, num / std::max(den, 1.0));
  }
  const bool pass_grad = worst_grad <= kGradRelTol;
  r.details.push_back(fmt("grad_V vs central differences (h=1e-5) at 100 interior points: max relative error %.2e", worst_grad));

  double worst_ulps = 0.0;
  const int sizes[] = {2, 3, 5, 8};
  for (int s = 0; s < 10000; ++s) {
    ModelParams p;
    p.n = sizes[s % 4];
    p.alpha = 4.0 * rng.uniform();
    p.beta = 0.05 + 1.5 * rng.uniform();
    p.gamma = 2.0 * rng.uniform();
    std::vector<double> l(p.n);
    for (double& v : l) v = 10.0 * rng.uniform();
    std::sort(l.begin(), l.end());
    if (std::adjacent_find(l.begin(), l.end()) != l.end()) continue;
    const std::vector<double> b = drift_lambda(p, l);
    double total = 0.0, scale = 0.0, sum_l = 0.0;
    for (int i = 0; i < p.n; ++i) {
      total += b[i];
      sum_l += l[i];
      scale += std::abs(p.alpha) + 2.0 * p.gamma * l[i];
      for (int j = 0; j < p.n; ++j)
        if (j != i) scale += p.beta * std::abs((l[i] + l[j]) / (l[i] - l[j]));
    }
    const double expect = p.n * p.alpha - 2.0 * p.gamma * sum_l;
    worst_ulps = std::max(worst_ulps, std::abs(total - expect) / (std::numeric_limits<double>::epsilon() * scale));
  }
  const bool pass_drift = worst_ulps <= kDriftUlps;
  r.details.push_back(fmt("drift sum identity at 10^4 random states (n in 2,3,5,8): max error %.3f ulps of the term scale",
                          worst_ulps));
  r.passed = pass_grad && pass_drift;
  r.summary = fmt("gradient %.2e <= %.0e relative; drift sum %.3f <= %.0f ulps", worst_grad, kGradRelTol, worst_ulps,
                  kDriftUlps);
  return r;
}

CriterionResult comparison(Context& ctx) {
  CriterionResult r{9, "pathwise comparison of coupled CIR", false, {}, {}, 0.0};
  const CirParams hi{2.0, 1.0, 2.0}, lo{1.5, 1.0, 2.0};
  const double r0 = 0.5;
  SimConfig cfg = ctx.config(1e-3, 5.0, 1000);
  cfg.record_stride = 1;
  struct Out {
    long long violations = 0;
    long long points = 0;
    double min_diff = 0.0;
  };
  const auto outs = run_paths<Out>(cfg.paths, cfg.threads, [&](long long p) {
    const std::vector<double> a = simulate_cir_path(hi, r0, cfg, p);
    const std::vector<double> b = simulate_cir_path(lo, r0, cfg, p);
    Out o;
    o.min_diff = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.size(); ++k) {
      o.violations += a[k] < b[k];
      o.min_diff = std::min(o.min_diff, a[k] - b[k]);
    }
    o.points = static_cast<long long>(a.size());
    return o;
  });
  long long violations = 0, points = 0;
  double min_diff = std::numeric_limits<double>::infinity();
  for (const Out& o : outs) {
    violations += o.violations;
    points += o.points;
    min_diff = std::min(min_diff, o.min_diff);
  }
  r.details.push_back(fmt("a1=%g > a2=%g, b=%g, sigma=%g, r0=%g, dt=%g, horizon %g; min over paths and times of "
                          "r1 - r2 = %.3g",
                          hi.a, lo.a, hi.b, hi.sigma, r0, cfg.dt, cfg.horizon, min_diff));
  r.passed = violations == 0;
  r.summary = fmt("%lld ordering violations in %lld recorded points over %lld paths", violations, points, cfg.paths);
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  if (from.empty()) return s;
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

CriterionResult determinism(Context& ctx) {
  CriterionResult r{10, "determinism", false, {}, {}, 0.0};
  std::random_device rd;
  const fs::path root = fs::temp_directory_path() / fmt("wishlab-acceptance-%08x", rd());

  struct Case {
    Command command;
    std::vector<std::pair<std::string, std::string>> settings;
  };
  const std::vector<Case> cases{
      {Command::simulate, {{"paths", "2"}, {"n", "3"}, {"record_stride", "10"}}},
      {Command::regime, {{"alpha", "2.6"}}},
      {Command::phase_diagram, {{"sweep", "alpha=0.4,0.7,1.2,2.6"}, {"paths", "8"}, {"horizon", "0.5"}}},
      {Command::collision_scan, {{"n", "3"}, {"paths", "16"}, {"horizon", "0.5"}}},
      {Command::laplace_check, {{"n", "3"}, {"gamma", "1"}, {"paths", "200"}, {"dt", "0.00390625"}}},
      {Command::stationary_compare, {{"gamma", "1"}, {"paths", "64"}, {"mh_samples", "500"}}},
  };
  bool ok = true;
  for (const Case& c : cases) {
    std::string texts[2];
    std::vector<std::pair<std::string, std::string>> files[2];
    int codes[2] = {0, 0};
    for (int run = 0; run < 2; ++run) {
      ExperimentSpec spec;
      spec.command = c.command;
      for (const auto& [k, v] : c.settings) apply_setting(spec, k, v);
      spec.config.seed = ctx.opt.seed;
      spec.config.threads = run == 0 ? 1 : 4;
      const fs::path dir = root / fmt("%s-%d", to_string(c.command), run);
      spec.out_dir = dir.string();
      std::ostringstream os;
      codes[run] = run_command(spec, os);
      texts[run] = replace_all(os.str(), dir.string(), "<out>");
      std::vector<fs::path> names;
      for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path());
      std::sort(names.begin(), names.end());
      for (const fs::path& p : names) files[run].emplace_back(p.filename().string(), read_file(p));
    }
    const bool same = codes[0] == codes[1] && texts[0] == texts[1] && files[0] == files[1] && !files[0].empty();
    std::size_t bytes = 0;
    for (const auto& f : files[0]) bytes += f.second.size();
    ok = ok && same;
    r.details.push_back(fmt("%s: %zu files, %zu bytes, threads 1 vs 4: %s", to_string(c.command), files[0].size(),
                            bytes, same ? "identical" : "DIFFERENT"));
  }

  const ModelParams params{2.0, 0.5, 0.0, 3};
  SimConfig cfg;
  cfg.seed = ctx.opt.seed;
  cfg.scheme = Scheme::regularized_switching;
  const PathResult a = simulate_path(params, cfg, 7), b = simulate_path(params, cfg, 7);
  const bool same_path = a.record.states == b.record.states && a.record.times == b.record.times;
  ok = ok && same_path;
  r.details.push_back(fmt("simulate_path twice, regularized_switching: %s", same_path ? "identical" : "DIFFERENT"));

  std::error_code ec;
  fs::remove_all(root, ec);
  r.passed = ok;
  r.summary = fmt("%zu commands and one direct path rerun with the same seed: %s", cases.size(),
                  ok ? "byte-identical" : "outputs differ");
  return r;
}

using Runner = CriterionResult (*)(Context&);
constexpr Runner kRunners[] = {sum_is_cir, stationary_gamma, contraction, phase_diagram, multiple_collision_zero,
                               no_multiple, laplace, gradient, comparison, determinism};

}  // namespace

std::string format_result(const CriterionResult& r) {
  std::string s = fmt("[%s] %d %s: ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str()) + r.summary + '\n';
  for (const std::string& d : r.details) s += "    " + d + '\n';
  return s;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& out) {
  std::set<int> report(options.only.begin(), options.only.end());
  if (report.empty())
    for (int i = 1; i <= 10; ++i) report.insert(i);
  std::set<int> run = report;
  if (run.count(6))
    for (int i = 1; i <= 5; ++i) run.insert(i);

  Context ctx{options, 0, {}};
  std::vector<CriterionResult> results;
  for (int id : run) {
    if (id < 1 || id > 10) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = kRunners[id - 1](ctx);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!report.count(id)) continue;
    out << format_result(r) << std::flush;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace wishlab
