// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Runs single-threaded unless VPERC_WORKERS is set.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>

#include "support.hpp"

using namespace vperc;
using namespace testing_support;

namespace {

unsigned workers() {
  if (const char* w = std::getenv("VPERC_WORKERS")) return static_cast<unsigned>(std::max(1, std::atoi(w)));
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t g_duality = 0;         // violations seen anywhere
std::uint64_t g_duality_checked = 0;  // colourings checked

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

VoronoiGraph eta(std::size_t n, Seed s) {
  Rectangle R = Rectangle::with_area(static_cast<double>(n));
  return build_tessellation(sample_binomial(n, R, RegionMode::plane(), s), R);
}

void exhaustive_duality(const VoronoiGraph& g) {
  g_duality += exhaustive_duality_violations(g);
  g_duality_checked += std::uint64_t{1} << g.size();
}

// Spot check on instances whose pipeline does not count duality itself.
void sampled_duality(const VoronoiGraph& g, Seed s, int k) {
  for (int j = 0; j < k; ++j) {
    Coloring w = random_coloring(g.size(), derive_seed(s, 77 + j));
    g_duality += !duality_holds(g, w);
    ++g_duality_checked;
  }
}

void add_summary_duality(const ExperimentResult& r, std::uint64_t checked) {
  g_duality += r.summary.value("duality_violations", std::uint64_t{0});
  g_duality_checked += checked;
}

ExperimentConfig config(const std::string& e) {
  ExperimentConfig c;
  c.experiment = e;
  c.seed = 20240601;
  c.workers = workers();
  return c;
}

Outcome magic_identity() {
  int equal = 0;
  for (int i = 0; i < 200; ++i) {
    auto g = eta(2 + i % 15, derive_seed(101, i));
    equal += exact_quenched_crossing(g) == exact_two_pow_negX(g);
    exhaustive_duality(g);
  }
  return {equal == 200, fmt("%d/200 point sets with n in 2..16 exactly equal", equal)};
}

Outcome colour_switching() {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto g = eta(3 + i % 10, derive_seed(102, i));
    worst = std::max(worst, colour_switching_check(g).max_deviation);
    exhaustive_duality(g);
  }
  return {worst == 0.0, fmt("max deviation over 100 point sets with n in 3..12 = %g", worst)};
}

// Criteria 3 and 8 share one sample of 10^4 point sets x 10 colourings.
ExperimentResult xtail_run;

Outcome crossing_probability() {
  auto c = config("xtail");
  c.n = {10000};
  c.reps = 100000;
  c.eta_reps = 10000;
  xtail_run = run_experiment(c);
  add_summary_duality(xtail_run, 100000);
  const auto& r = xtail_run.summary["results"][0];
  double p = r["crossing_probability"], se = r["crossing_stderr"];
  return {std::abs(p - 0.5) <= 0.005, fmt("P = %.5f (stderr %.5f over point sets), |P - 0.5| <= 0.005", p, se)};
}

Outcome efron_stein() {
  auto c = config("efron-stein");
  c.n = {2, 8, 14};
  c.eta_reps = 1000;
  auto res = run_experiment(c);
  std::uint64_t checked = 0;
  bool ok = true;
  std::string d;
  for (const auto& r : res.summary["results"]) {
    ok = ok && r["holds_within_3se"].get<bool>();
    checked += 1000ull << r["n"].get<int>();
    d += fmt("n=%d Var=%.4g bound=%.4g se=%.2g; ", r["n"].get<int>(), r["variance"].get<double>(),
             r["bound"].get<double>(), r["combined_stderr"].get<double>());
  }
  add_summary_duality(res, checked);
  return {ok, d};
}

Outcome determination() {
  std::uint64_t runs = 0, wrong = 0;
  for (int i = 0; i < 50; ++i) {
    auto g = eta(1 + i % 12, derive_seed(105, i));
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << g.size()); ++m) {
      auto w = Coloring::from_bits(g.size(), m);
      wrong += ss_run(g, w, derive_seed(i, m)).decision != oracle_crossing(g, signs_of(w), 1, Side::Left, Side::Right);
      ++runs;
    }
    exhaustive_duality(g);
  }
  std::uint64_t sampled = 0;
  for (int i = 0; i < 10000; ++i) {
    auto g = eta(500, derive_seed(205, i));
    auto w = random_coloring(g.size(), derive_seed(305, i));
    bool truth = oracle_crossing(g, signs_of(w), 1, Side::Left, Side::Right);
    wrong += ss_run(g, w, derive_seed(405, i)).decision != truth;
    g_duality += truth == oracle_crossing(g, signs_of(w), -1, Side::Bottom, Side::Top);
    ++g_duality_checked;
    ++sampled;
  }
  return {wrong == 0, fmt("%llu exhaustive + %llu sampled runs at n=500, %llu wrong", (unsigned long long)runs,
                          (unsigned long long)sampled, (unsigned long long)wrong)};
}

Outcome influence_revealment() {
  int ok = 0;
  double worst = -1.0;
  for (int i = 0; i < 50; ++i) {
    auto g = eta(1 + i % 16, derive_seed(106, i));
    double ssi = sum_squared_influences(exact_influences(g));
    auto r = revealment(g, 10000, derive_seed(206, i), workers());
    ok += ssi <= r.delta + 4 * r.delta_stderr;
    worst = std::max(worst, ssi - r.delta);
    g_duality += r.duality_violations;
    g_duality_checked += 10000;
  }
  return {ok == 50, fmt("%d/50 point sets with n in 1..16 satisfy the bound; max(sum Inf^2 - delta) = %.4f", ok, worst)};
}

Outcome revealment_decay() {
  auto c = config("revealment");
  c.n = {1000, 4000, 16000};
  c.reps = 10000;
  c.eta_reps = 1;
  auto res = run_experiment(c);
  add_summary_duality(res, 30000);
  std::vector<double> d;
  for (const auto& r : res.summary["results"]) d.push_back(r["delta"]);
  double slope = res.summary["log_log_slope"];
  bool ok = d[0] > d[1] && d[1] > d[2] && slope < 0 && res.summary["wrong_decisions"].get<int>() == 0;
  return {ok, fmt("delta = %.4f, %.4f, %.4f at n = 1000, 4000, 16000; log-log slope %.3f", d[0], d[1], d[2], slope)};
}

Outcome xtail_geometry() {
  const auto& r = xtail_run.summary["results"][0];
  bool dec = r["log_tail_decreasing"];
  double r2 = r["log_tail_r2"], slope = r["log_tail_slope"];
  int pts = r["fit_points"];
  bool ok = dec && r2 >= 0.95 && slope < 0 && pts >= 2;
  return {ok, fmt("log P(X>=k) over k=%d..%d: decreasing=%s slope %.3f R^2 %.4f", r["fit_k_min"].get<int>(),
                  r["fit_k_max"].get<int>(), dec ? "yes" : "no", slope, r2)};
}

Outcome quenched_concentration() {
  auto c = config("quenched-spread");
  c.n = {1000, 4000, 16000};
  c.reps = 500;
  c.eta_reps = 200;
  auto res = run_experiment(c);
  add_summary_duality(res, 3 * 200 * 500);
  const auto& rs = res.summary["results"];
  double s0 = rs[0]["sd"], s1 = rs[1]["sd"], s2 = rs[2]["sd"];
  double inside = rs[2]["fraction_inside_0.05_0.95"];
  return {s2 < s0 && inside >= 0.99,
          fmt("sd over 200 point sets = %.4f, %.4f, %.4f at n = 1000, 4000, 16000; inside (0.05,0.95) at 16000: %.3f",
              s0, s1, s2, inside)};
}

Outcome noise_sensitivity() {
  auto c = config("noise");
  c.n = {500, 2000, 8000};
  c.eps = {0.1, 1.0};
  c.reps = 1000;
  c.eta_reps = 50;
  auto res = run_experiment(c);
  for (std::size_t n : c.n)
    for (std::size_t i = 0; i < 50; ++i) sampled_duality(detail::eta_graph(c, n, i), derive_seed(n, i), 10);
  std::vector<double> m, se;
  bool full_ok = true;
  std::string d = "eps=0.1:";
  for (const auto& r : res.summary["results"]) {
    double v = r["mean_covariance"], s = r["stderr"];
    if (r["eps"].get<double>() == 0.1) {
      m.push_back(v);
      se.push_back(s);
      d += fmt(" %.4f(%.4f)", v, s);
    } else {
      full_ok = full_ok && std::abs(v) <= 3 * s;
    }
  }
  bool trend = true;
  for (std::size_t k = 1; k < m.size(); ++k) trend = trend && m[k] <= m[k - 1] + 2 * std::hypot(se[k], se[k - 1]);
  // Without noise the covariance is the exact variance q(1-q).
  int exact_ok = 0;
  for (int i = 0; i < 20; ++i) {
    auto g = eta(4 + i % 13, derive_seed(110, i));
    double q = exact_quenched_crossing(g).value();
    auto r = noise_covariance(g, 0.0, 10000, derive_seed(210, i), workers());
    exact_ok += std::abs(r.value - q * (1 - q)) <= 3 * r.std_error;
    exhaustive_duality(g);
  }
  d += fmt("; eps=1 within 3se of 0: %s; eps=0 matches q(1-q) on %d/20", full_ok ? "yes" : "no", exact_ok);
  return {trend && full_ok && exact_ok == 20, d};
}

Outcome one_arm() {
  auto c = config("one-arm");
  c.n = {256, 1024, 4096, 16384};
  c.reps = 200;
  c.eta_reps = 100;
  auto res = run_experiment(c);
  for (std::size_t n : c.n)
    for (std::size_t i = 0; i < 100; ++i) sampled_duality(detail::eta_graph(c, n, i), derive_seed(n, i), 5);
  double e = res.summary["exponent_in_n"];
  std::string d = "P(M) =";
  for (const auto& r : res.summary["results"]) d += fmt(" %.4f", r["probability"].get<double>());
  d += fmt("; fitted exponent in n %.3f", e);
  return {e < 0, d};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all = {
      {"magic identity", magic_identity},
      {"colour switching", colour_switching},
      {"square crossing probability", crossing_probability},
      {"variance bound", efron_stein},
      {"exploration determines crossing", determination},
      {"influence-revealment", influence_revealment},
      {"revealment decay", revealment_decay},
      {"X tail", xtail_geometry},
      {"quenched concentration", quenched_concentration},
      {"noise sensitivity", noise_sensitivity},
      {"one-arm decay", one_arm},
  };
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s (%.0fs)\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  bool dual = g_duality == 0 && g_duality_checked > 0;
  failed += !dual;
  std::printf("[%s] 12 planar duality: %llu violations in %llu colourings checked across criteria 1-11\n",
              dual ? "PASS" : "FAIL", (unsigned long long)g_duality, (unsigned long long)g_duality_checked);
  return failed == 0 ? 0 : 1;
}
