#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wishlab/csv.hpp"
#include "wishlab/error.hpp"
#include "wishlab/harness.hpp"

using namespace wishlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wishlab-test-harness-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "wishlab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream o, e;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

}  // namespace

TEST_CASE("number formatting round trips") {
  CHECK(format_double(2.1) == "2.1");
  CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
  CHECK(format_double(-3.0) == "-3");
  for (double v : {1e-300, 3.141592653589793, 123456789.125}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("config text and overrides") {
  ExperimentSpec s;
  apply_config_text(s, "# comment\nalpha = 1.5\nbeta=0.25  # trailing\n\nn = 4\nscheme = root_coordinates\n"
                       "initial = 1, 2, 3, 4\nsweep = alpha=0.4,0.7;gamma=0:1:0.5\n");
  CHECK(s.params.alpha == 1.5);
  CHECK(s.params.beta == 0.25);
  CHECK(s.params.n == 4);
  CHECK(s.config.scheme == Scheme::root_coordinates);
  CHECK(s.config.initial == std::vector<double>{1, 2, 3, 4});
  REQUIRE(s.sweep);
  CHECK(s.sweep->points(s.params).size() == 6);
  apply_setting(s, "--alpha", "2");
  apply_setting(s, "collision-tol", "1e-5");
  CHECK(s.params.alpha == 2.0);
  CHECK(s.config.collision_tol == 1e-5);

  try {
    apply_setting(s, "alpah", "1");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "alpah");
  }
  try {
    apply_setting(s, "dt", "fast");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "dt");
  }
  CHECK_THROWS_AS(apply_config_text(s, "alpha 2\n"), ConfigError);
}

TEST_CASE("sweep grammar") {
  SweepGrid g = parse_sweep("alpha=0.4,0.7,1.2,2.6");
  CHECK(g.axes.size() == 1);
  CHECK(g.axes[0].values.size() == 4);
  g = parse_sweep("beta=0.5:1.5:0.5;alpha=1");
  CHECK(g.axes[0].values == std::vector<double>{0.5, 1.0, 1.5});
  const auto pts = g.points(ModelParams{});
  CHECK(pts.size() == 3);
  CHECK(pts[2].beta == 1.5);
  CHECK(pts[2].alpha == 1.0);
  CHECK_THROWS_AS(parse_sweep("n=2,3"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("alpha="), ConfigError);
  CHECK_THROWS_AS(parse_sweep(""), ConfigError);
  CHECK_THROWS_AS(parse_sweep("alpha=1:0:0.1"), ConfigError);
}

TEST_CASE("regime report") {
  std::string out;
  const fs::path dir = scratch("regime");
  CHECK(cli({"regime", "--n", "2", "--beta", "0.5", "--alpha", "2.6", "--gamma", "0", "--out", dir.string()}, &out) ==
        0);
  CHECK(out.find("kappa=2.1\n") != std::string::npos);
  CHECK(out.find("global_solution=global\n") != std::string::npos);
  CHECK(out.find("pair_collisions=almost_sure\n") != std::string::npos);
  CHECK(out.find("zero_hit_lambda1=never\n") != std::string::npos);
  CHECK(out.rfind("# wishlab ", 0) == 0);
  CHECK(slurp(dir / "regime.txt") == out);
}

TEST_CASE("simulate writes the fixed CSV schemas deterministically") {
  const fs::path a = scratch("sim-a"), b = scratch("sim-b");
  const std::vector<std::string> common{"simulate", "--paths", "2", "--n", "3", "--seed", "11", "--record-stride", "50"};
  auto args = common;
  args.insert(args.end(), {"--out", a.string(), "--threads", "1"});
  CHECK(cli(args) == 0);
  args = common;
  args.insert(args.end(), {"--out", b.string(), "--threads", "3"});
  CHECK(cli(args) == 0);
  for (const char* f : {"trajectories.csv", "events.csv"}) {
    const std::string x = slurp(a / f), y = slurp(b / f);
    CHECK(!x.empty());
    CHECK(x == y);
    const auto l = lines(x);
    REQUIRE(l.size() >= 2);
    CHECK(l[0].rfind("# wishlab ", 0) == 0);
    CHECK(l[0].find("seed=11") != std::string::npos);
  }
  const auto traj = lines(slurp(a / "trajectories.csv"));
  CHECK(traj[1] == "path_id,t,lambda_1,lambda_2,lambda_3");
  CHECK(traj.size() == 2 + 2 * 21);
  CHECK(traj[2] == "0,0,1,2,3");
  CHECK(lines(slurp(a / "events.csv"))[1] == "path_id,kind,index,time,level");
}

TEST_CASE("phase diagram rows match the classifier") {
  const fs::path dir = scratch("phase");
  CHECK(cli({"phase-diagram", "--sweep", "alpha=0.4,0.7,1.2,2.6", "--beta", "0.5", "--n", "2", "--gamma", "0",
             "--paths", "4", "--horizon", "0.2", "--out", dir.string()}) == 0);
  const auto l = lines(slurp(dir / "phase_diagram.csv"));
  REQUIRE(l.size() == 6);
  CHECK(l[1].rfind("alpha,beta,gamma,n,kappa,global_solution,pair_collisions,zero_hit_lambda1,", 0) == 0);
  CHECK(l[1].find("ci_low,ci_high") != std::string::npos);
  const double alphas[] = {0.4, 0.7, 1.2, 2.6};
  for (int i = 0; i < 4; ++i) {
    const RegimeReport r = classify_regime({alphas[i], 0.5, 0.0, 2});
    std::istringstream row(l[2 + i]);
    std::vector<std::string> cells;
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() >= 10);
    CHECK(std::stod(cells[0]) == alphas[i]);
    CHECK(std::stod(cells[4]) == doctest::Approx(r.kappa));
    CHECK(cells[5] == to_string(r.global_solution));
    CHECK(cells[6] == to_string(r.pair_collisions));
    CHECK(cells[7] == to_string(r.zero_hit_lambda1));
    CHECK(cells[8] == to_string(r.multiple_collision_k.at(1)));
    CHECK(cells[9] == to_string(r.multiple_collision_k.at(2)));
  }
}

TEST_CASE("exit codes") {
  std::string err;
  CHECK(cli({"simulate", "--alpha", "x"}, nullptr, &err) == 1);
  CHECK(err.find("alpha") != std::string::npos);
  CHECK(cli({"simulate", "--scheme", "rk4"}, nullptr, &err) == 1);
  CHECK(err.find("scheme") != std::string::npos);
  CHECK(cli({"teleport"}) == 1);
  CHECK(cli({"simulate", "--no-such-flag", "1"}) == 1);
  CHECK(cli({"simulate", "--dt", "2"}, nullptr, &err) == 1);
  CHECK(err.find("dt") != std::string::npos);
  CHECK(cli({"simulate", "--scheme", "c_epsilon", "--out", scratch("mismatch").string()}) == 1);
  CHECK(cli({"stationary-compare", "--gamma", "0", "--out", scratch("noteval").string()}) == 1);
  CHECK(cli({"simulate", "--config", "/nonexistent/wishlab.cfg"}, nullptr, &err) == 1);
  CHECK(err.find("config") != std::string::npos);
  CHECK(cli({"--help"}) == 0);
  CHECK(exit_code_for(NumericalFailure("x")) == 3);
  CHECK(exit_code_for(NumericOverflow("x")) == 3);
  CHECK(exit_code_for(RegimeMismatch("x")) == 1);
}

TEST_CASE("config file with command line override") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "run.cfg");
    os << "alpha = 2.6\nbeta = 0.5\nn = 2\n";
  }
  std::string out;
  CHECK(cli({"regime", "--config", (dir / "run.cfg").string(), "--alpha", "3.1", "--out", dir.string()}, &out) == 0);
  CHECK(out.find("alpha=3.1\n") != std::string::npos);
  CHECK(out.find("kappa=2.6\n") != std::string::npos);
}

TEST_CASE("stats commands write CSVs") {
  const fs::path dir = scratch("stats");
  CHECK(cli({"laplace-check", "--n", "3", "--alpha", "1", "--gamma", "1", "--paths", "200", "--dt", "0.0078125",
             "--out", dir.string()}) == 0);
  auto l = lines(slurp(dir / "laplace.csv"));
  CHECK(l[1] == "mu,t,phi,psi,closed_form,mc_estimate,mc_stderr,z_score");
  CHECK(l.size() == 8);
  CHECK(cli({"stationary-compare", "--gamma", "1", "--paths", "50", "--mh-samples", "300", "--out", dir.string()}) ==
        0);
  l = lines(slurp(dir / "stationary.csv"));
  CHECK(l[1] == "statistic,estimate,stderr,ci_low,ci_high,ks_D,ks_p,n_samples");
  CHECK(lines(slurp(dir / "mh_samples.csv")).size() == 302);
  CHECK(cli({"collision-scan", "--n", "3", "--k", "2", "--paths", "8", "--horizon", "0.5", "--out", dir.string()}) ==
        0);
  l = lines(slurp(dir / "collision_scan.csv"));
  CHECK(l[1] == "k,threshold,verdict,delta,hits,paths,hit_fraction,stderr,ci_low,ci_high");
  CHECK(l.size() == 5);
}

TEST_CASE("verify reports pass lines and exit status") {
  const fs::path dir = scratch("verify");
  std::string out;
  CHECK(cli({"verify", "--only", "8", "--out", dir.string()}, &out) == 0);
  CHECK(out.find("[PASS] 8 ") != std::string::npos);
  CHECK(slurp(dir / "acceptance.txt").find("[PASS] 8 ") != std::string::npos);
}
