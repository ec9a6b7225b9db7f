#pragma once

// Named experiments over the library, their configuration, and CSV/JSON
// output. Every replication draws its randomness from
// derive_seed(derive_seed(master, n), index), recorded as "master:index" in
// the CSV together with n, so any row can be recomputed on its own.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vperc/estimators.hpp"
#include "vperc/explorer.hpp"
#include "vperc/geometry.hpp"
#include "vperc/io.hpp"
#include "vperc/noise.hpp"
#include "vperc/parallel.hpp"
#include "vperc/percolation.hpp"
#include "vperc/stats.hpp"

namespace vperc {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string experiment;
  std::vector<std::size_t> n;  // empty: experiment default
  double aspect = 1.0;         // width / height of the target
  RegionKind mode = RegionKind::Plane;
  double padding = 0.0;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> eta_reps;
  std::optional<std::size_t> suffix_reps;
  std::vector<double> eps;  // empty: experiment default
  double exponent = 0.0;    // noise: eps = n^-exponent when > 0
  std::optional<double> d;  // one-arm distance; default n^(1/4)
  Seed seed = 1;
  unsigned workers = 1;
  std::string out = ".";
};

struct Row {
  std::string experiment;
  std::size_t n = 0;
  std::string param;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
  Seed master = 0;
  std::size_t index = 0;
};

struct ExperimentResult {
  std::vector<Row> rows;
  nlohmann::json summary;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"crossing",         "quenched-spread", "xtail", "efron-stein",
                                                 "colour-switching", "magic-check",     "revealment",
                                                 "noise",            "one-arm",         "martingale"};
  return names;
}

inline bool is_experiment(const std::string& name) {
  for (const auto& e : experiment_names())
    if (e == name) return true;
  return false;
}

inline const char* mode_name(RegionKind k) { return k == RegionKind::HalfPlane ? "halfplane" : "plane"; }

inline RegionKind parse_mode(const std::string& s) {
  if (s == "plane") return RegionKind::Plane;
  if (s == "halfplane") return RegionKind::HalfPlane;
  throw ConfigError("mode must be plane or halfplane, got '" + s + "'");
}

/// Config keys are the long CLI flag names.
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = c.experiment;
  j["n"] = c.n;
  j["aspect"] = c.aspect;
  j["mode"] = mode_name(c.mode);
  j["padding"] = c.padding;
  if (c.reps) j["reps"] = *c.reps;
  if (c.eta_reps) j["eta-reps"] = *c.eta_reps;
  if (c.suffix_reps) j["suffix-reps"] = *c.suffix_reps;
  j["eps"] = c.eps;
  j["exponent"] = c.exponent;
  if (c.d) j["d"] = *c.d;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["out"] = c.out;
  return j;
}

inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char* known[] = {"experiment", "n",        "aspect", "mode", "padding", "reps",    "eta-reps",
                                "suffix-reps", "eps",     "exponent", "d",  "seed",    "workers", "out"};
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* k : known) ok = ok || it.key() == k;
      if (!ok) throw ConfigError("unknown config key '" + it.key() + "'");
    }
    if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();
    if (j.contains("n")) {
      c.n.clear();
      if (j["n"].is_array()) c.n = j["n"].get<std::vector<std::size_t>>();
      else c.n.push_back(j["n"].get<std::size_t>());
    }
    if (j.contains("aspect")) c.aspect = j["aspect"].get<double>();
    if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("padding")) c.padding = j["padding"].get<double>();
    if (j.contains("reps")) c.reps = j["reps"].get<std::size_t>();
    if (j.contains("eta-reps")) c.eta_reps = j["eta-reps"].get<std::size_t>();
    if (j.contains("suffix-reps")) c.suffix_reps = j["suffix-reps"].get<std::size_t>();
    if (j.contains("eps")) {
      c.eps.clear();
      if (j["eps"].is_array()) c.eps = j["eps"].get<std::vector<double>>();
      else c.eps.push_back(j["eps"].get<double>());
    }
    if (j.contains("exponent")) c.exponent = j["exponent"].get<double>();
    if (j.contains("d")) c.d = j["d"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<Seed>();
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

namespace detail {

struct Defaults {
  std::vector<std::size_t> n;
  std::size_t reps;
  std::size_t eta_reps;
};

inline Defaults defaults_for(const std::string& e) {
  if (e == "crossing") return {{10000}, 100000, 10000};
  if (e == "quenched-spread") return {{1000, 4000, 16000}, 500, 200};
  if (e == "xtail") return {{10000}, 100000, 10000};
  if (e == "efron-stein") return {{2, 8, 14}, 1, 1000};
  if (e == "colour-switching") return {{12}, 1, 100};
  if (e == "magic-check") return {{10}, 1, 100};
  if (e == "revealment") return {{1000, 4000, 16000}, 10000, 1};
  if (e == "noise") return {{500, 2000, 8000}, 1000, 50};
  if (e == "one-arm") return {{256, 1024, 4096, 16384}, 200, 100};
  if (e == "martingale") return {{2, 6}, 1, 500};
  throw ConfigError("unknown experiment '" + e + "'");
}

struct Resolved {
  ExperimentConfig cfg;
  std::size_t reps = 0;
  std::size_t eta_reps = 0;
};

inline Resolved resolve(const ExperimentConfig& in) {
  Resolved r{in};
  Defaults d = defaults_for(in.experiment);
  if (r.cfg.n.empty()) r.cfg.n = d.n;
  r.reps = in.reps.value_or(d.reps);
  r.eta_reps = in.eta_reps.value_or(d.eta_reps);
  for (std::size_t i = 0; i < r.cfg.n.size(); ++i) {
    if (r.cfg.n[i] < 1) throw ConfigError("n must be at least 1");
    if (i > 0 && r.cfg.n[i] <= r.cfg.n[i - 1]) throw ConfigError("n schedule must be strictly increasing");
  }
  if (r.reps < 1 || r.eta_reps < 1) throw ConfigError("reps and eta-reps must be at least 1");
  if (in.suffix_reps && *in.suffix_reps < 2) throw ConfigError("suffix-reps must be at least 2");
  if (!(in.aspect > 0.0) || !std::isfinite(in.aspect)) throw ConfigError("aspect must be positive");
  if (!(in.padding >= 0.0) || !std::isfinite(in.padding)) throw ConfigError("padding must be nonnegative");
  if (in.workers < 1) throw ConfigError("workers must be at least 1");
  for (double e : in.eps)
    if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("eps values must lie in [0, 1]");
  if (in.exponent < 0.0) throw ConfigError("exponent must be nonnegative");
  if (in.d && !(*in.d > 0.0)) throw ConfigError("d must be positive");
  const std::string& e = in.experiment;
  std::size_t nmax = r.cfg.n.back();
  if ((e == "efron-stein" || e == "magic-check") && nmax > kEnumerationCap)
    throw ConfigError(e + " enumerates colourings and needs n <= " + std::to_string(kEnumerationCap));
  if (e == "colour-switching" && nmax > kSwitchingCap)
    throw ConfigError("colour-switching needs n <= " + std::to_string(kSwitchingCap));
  if (e == "martingale" && nmax > 12) throw ConfigError("martingale needs n <= 12");
  if ((e == "efron-stein" || e == "martingale") && r.eta_reps < 2) throw ConfigError(e + " needs eta-reps >= 2");
  if (e == "noise" && r.reps < 2) throw ConfigError("noise needs reps >= 2");
  if ((e == "crossing" || e == "xtail") && r.eta_reps > r.reps)
    throw ConfigError(e + ": eta-reps cannot exceed reps (reps counts all samples)");
  return r;
}

inline Rectangle target_for(const ExperimentConfig& c, std::size_t n) {
  return Rectangle::with_area(static_cast<double>(n), c.aspect);
}

inline RegionMode mode_for(const ExperimentConfig& c) { return RegionMode{c.mode, c.padding}; }

inline Seed n_seed(Seed master, std::size_t n) { return derive_seed(master, n); }

inline VoronoiGraph eta_graph(const ExperimentConfig& c, std::size_t n, std::size_t i) {
  Rectangle R = target_for(c, n);
  return build_tessellation(sample_binomial(n, R, mode_for(c), derive_seed(n_seed(c.seed, n), i)), R);
}

inline Seed eta_seed(const ExperimentConfig& c, std::size_t n, std::size_t i) {
  return derive_seed(n_seed(c.seed, n), i);
}

}  // namespace detail

/// Per-sample outcomes of (point set, colouring) pairs: crossing indicator
/// and, on request, X.
struct CrossingSamples {
  std::size_t n = 0;
  std::size_t per_eta = 0;
  std::vector<double> eta_fraction;  // crossing frequency per point set
  std::vector<double> eta_mean_x;
  std::vector<std::vector<int>> x;   // per point set, per colouring
  double mean_two_pow_negx = 0.0;
  std::uint64_t duality_violations = 0;
};

inline CrossingSamples sample_crossings(const ExperimentConfig& c, std::size_t n, std::size_t eta_reps,
                                        std::size_t per_eta, bool with_x) {
  CrossingSamples s;
  s.n = n;
  s.per_eta = per_eta;
  s.eta_fraction.assign(eta_reps, 0.0);
  s.eta_mean_x.assign(eta_reps, 0.0);
  s.x.assign(eta_reps, {});
  std::vector<std::uint64_t> dual(eta_reps, 0), menger(eta_reps, 0);
  std::vector<double> tp(eta_reps, 0.0);
  parallel_for(eta_reps, c.workers, [&](std::size_t i) {
    VoronoiGraph g = detail::eta_graph(c, n, i);
    Seed es = detail::eta_seed(c, n, i);
    detail::SearchScratch sc;
    detail::SplitFlow flow;
    Coloring w;
    w.signs.resize(g.size());
    double hits = 0.0, xs = 0.0, t = 0.0;
    for (std::size_t j = 0; j < per_eta; ++j) {
      Rng rng = make_rng(derive_seed(es, j + 1));
      fill_uniform(w, rng);
      bool red = monochromatic_crossing(g, w.signs, 1, Side::Left, Side::Right, sc);
      bool blue = monochromatic_crossing(g, w.signs, -1, Side::Bottom, Side::Top, sc);
      dual[i] += red == blue;
      hits += red;
      if (with_x) {
        int X = flow.max_flow(g, w.signs, 1) + flow.max_flow(g, w.signs, -1);
        s.x[i].push_back(X);
        xs += X;
        t += std::ldexp(1.0, -X);
      }
    }
    s.eta_fraction[i] = hits / static_cast<double>(per_eta);
    s.eta_mean_x[i] = xs / static_cast<double>(per_eta);
    tp[i] = t / static_cast<double>(per_eta);
  });
  for (std::size_t i = 0; i < eta_reps; ++i) s.duality_violations += dual[i];
  s.mean_two_pow_negx = mean_of(tp);
  return s;
}

namespace detail {

inline Row make_row(const ExperimentConfig& c, std::size_t n, std::string param, double v, double se, std::size_t reps,
                    std::size_t index) {
  return Row{c.experiment, n, std::move(param), v, se, reps, c.seed, index};
}

inline ExperimentResult run_crossing(const Resolved& r, bool xtail) {
  const ExperimentConfig& c = r.cfg;
  ExperimentResult out;
  out.summary["results"] = nlohmann::json::array();
  std::uint64_t dual = 0;
  for (std::size_t n : c.n) {
    const std::size_t per = std::max<std::size_t>(1, r.reps / r.eta_reps);
    CrossingSamples s = sample_crossings(c, n, r.eta_reps, per, xtail);
    dual += s.duality_violations;
    std::vector<double> frac = s.eta_fraction;
    for (std::size_t i = 0; i < r.eta_reps; ++i) {
      if (xtail) out.rows.push_back(make_row(c, n, "mean_X", s.eta_mean_x[i], 0.0, per, i));
      else {
        double p = frac[i];
        double se = per > 1 ? std::sqrt(p * (1.0 - p) / static_cast<double>(per - 1)) : 0.0;
        out.rows.push_back(make_row(c, n, "crossing_fraction", p, se, per, i));
      }
    }
    nlohmann::json res;
    res["n"] = n;
    res["samples"] = per * r.eta_reps;
    res["colourings_per_eta"] = per;
    res["crossing_probability"] = mean_of(frac);
    // Point sets are the independent units; colourings within one are not.
    res["crossing_stderr"] = stderr_of(frac);
    res["duality_violations"] = s.duality_violations;
    if (xtail) {
      std::map<int, std::uint64_t> ge;
      std::uint64_t total = 0;
      int xmax = 0;
      for (const auto& v : s.x)
        for (int X : v) {
          xmax = std::max(xmax, X);
          ++total;
        }
      std::vector<std::uint64_t> hist(static_cast<std::size_t>(xmax) + 2, 0);
      for (const auto& v : s.x)
        for (int X : v) ++hist[X];
      nlohmann::json tail = nlohmann::json::array();
      std::vector<double> ks, logs;
      std::uint64_t at_least = total;
      for (int k = 0; k <= xmax; ++k) {
        if (k > 0) at_least -= hist[k - 1];
        double p = static_cast<double>(at_least) / static_cast<double>(total);
        tail.push_back({{"k", k}, {"hits", at_least}, {"p", p}});
        if (k >= 1 && at_least >= 30) {
          ks.push_back(k);
          logs.push_back(std::log(p));
        }
      }
      LinearFit f = linear_fit(ks, logs);
      res["tail"] = tail;
      res["fit_k_min"] = ks.empty() ? 0 : ks.front();
      res["fit_k_max"] = ks.empty() ? 0 : ks.back();
      res["fit_points"] = ks.size();
      res["log_tail_slope"] = f.slope;
      res["log_tail_r2"] = f.r2;
      bool decreasing = true;
      for (std::size_t i = 1; i < logs.size(); ++i) decreasing = decreasing && logs[i] < logs[i - 1];
      res["log_tail_decreasing"] = decreasing;
      res["mean_two_pow_negX"] = s.mean_two_pow_negx;
    }
    out.summary["results"].push_back(res);
  }
  out.summary["duality_violations"] = dual;
  return out;
}

inline ExperimentResult run_quenched_spread(const Resolved& r) {
  const ExperimentConfig& c = r.cfg;
  ExperimentResult out;
  out.summary["results"] = nlohmann::json::array();
  std::uint64_t dual_all = 0;
  for (std::size_t n : c.n) {
    CrossingSamples s = sample_crossings(c, n, r.eta_reps, r.reps, false);
    dual_all += s.duality_violations;
    const auto& q = s.eta_fraction;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double se = r.reps > 1 ? std::sqrt(q[i] * (1.0 - q[i]) / static_cast<double>(r.reps - 1)) : 0.0;
      out.rows.push_back(make_row(c, n, "q_hat", q[i], se, r.reps, i));
    }
    std::size_t inside = 0;
    for (double v : q) inside += v > 0.05 && v < 0.95;
    nlohmann::json res;
    res["n"] = n;
    res["mean"] = mean_of(q);
    res["sd"] = std::sqrt(variance_of(q));
    res["fraction_inside_0.05_0.95"] = static_cast<double>(inside) / static_cast<double>(q.size());
    nlohmann::json tails = nlohmann::json::array();
    for (int k = 1; k <= 6; ++k) {
      double thr = std::ldexp(1.0, -k);
      std::size_t below = 0;
      for (double v : q) below += v < thr;
      tails.push_back({{"k", k}, {"fraction_below_2^-k", static_cast<double>(below) / static_cast<double>(q.size())}});
    }
    res["lower_tail"] = tails;
    res["duality_violations"] = s.duality_violations;
    out.summary["results"].push_back(res);
  }
  out.summary["duality_violations"] = dual_all;
  return out;
}

inline ExperimentResult run_efron_stein(const Resolved& r) {
  const ExperimentConfig& c = r.cfg;
  ExperimentResult out;
  out.summary["results"] = nlohmann::json::array();
  std::uint64_t dual = 0;
  for (std::size_t n : c.n) {
    EfronSteinReport es =
        efron_stein_experiment(n, target_for(c, n), r.eta_reps, n_seed(c.seed, n), mode_for(c), c.workers);
    dual += es.duality_violations;
    for (std::size_t i = 0; i < r.eta_reps; ++i) {
      out.rows.push_back(make_row(c, n, "q", es.q[i], 0.0, 1, i));
      out.rows.push_back(make_row(c, n, "sum_inf2", es.sum_inf2[i], 0.0, 1, i));
    }
    nlohmann::json res;
    res["n"] = n;
    res["variance"] = es.variance;
    res["variance_stderr"] = es.variance_stderr;
    res["bound"] = es.bound;
    res["bound_stderr"] = es.bound_stderr;
    res["combined_stderr"] = es.combined_stderr();
    res["holds_within_3se"] = es.variance <= es.bound + 3.0 * es.combined_stderr();
    res["duality_violations"] = es.duality_violations;
    out.summary["results"].push_back(res);
  }
  out.summary["duality_violations"] = dual;
  return out;
}

inline ExperimentResult run_colour_switching(const Resolved& r) {
  const ExperimentConfig& c = r.cfg;
  ExperimentResult out;
  out.summary["results"] = nlohmann::json::array();
  std::uint64_t dual = 0;
  for (std::size_t n : c.n) {
    std::vector<double> dev(r.eta_reps);
    std::vector<std::uint64_t> bad(r.eta_reps);
    std::vector<std::map<int, std::uint64_t>> totals(r.eta_reps);
    parallel_for(r.eta_reps, c.workers, [&](std::size_t i) {
      VoronoiGraph g = eta_graph(c, n, i);
      ColourSwitchReport cs = colour_switching_check(g);
      dev[i] = cs.max_deviation;
      totals[i] = cs.totals;
      bad[i] = exhaustive_duality_violations(g);
    });
    std::map<int, std::uint64_t> by_k;
    double worst = 0.0;
    for (std::size_t i = 0; i < r.eta_reps; ++i) {
      out.rows.push_back(make_row(c, n, "max_deviation", dev[i], 0.0, std::size_t{1} << n, i));
      worst = std::max(worst, dev[i]);
      dual += bad[i];
      for (auto [k, t] : totals[i]) by_k[k] += t;
    }
    nlohmann::json res;
    res["n"] = n;
    res["max_deviation"] = worst;
    nlohmann::json ks = nlohmann::json::object();
    for (auto [k, t] : by_k) ks[std::to_string(k)] = t;
    res["colourings_by_X"] = ks;
    out.summary["results"].push_back(res);
  }
  out.summary["duality_violations"] = dual;
  return out;
}

inline ExperimentResult run_magic_check(const Resolved& r) {
  const ExperimentConfig& c = r.cfg;
  ExperimentResult out;
  out.summary["results"] = nlohmann::json::array();
  std::uint64_t dual = 0;
  for (std::size_t n : c.n) {
    std::vector<double> q(r.eta_reps), diff(r.eta_reps);
    std::vector<char> equal(r.eta_reps);
    std::vector<std::uint64_t> bad(r.eta_reps);
    parallel_for(r.eta_reps, c.workers, [&](std::size_t i) {
      VoronoiGraph g = eta_graph(c, n, i);
      Dyadic a = exact_quenched_crossing(g), b = exact_two_pow_negX(g);
      q[i] = a.value();
      equal[i] = a == b;
      diff[i] = std::abs(a.value() - b.value());
      bad[i] = exhaustive_duality_violations(g);
    });
    std::size_t eq = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < r.eta_reps; ++i) {
      out.rows.push_back(make_row(c, n, "abs_diff", diff[i], 0.0, std::size_t{1} << n, i));
      eq += equal[i];
      worst = std::max(worst, diff[i]);
      dual += bad[i];
    }
    nlohmann::json res;
    res["n"] = n;
    res["exactly_equal"] = eq;
    res["point_sets"] = r.eta_reps;
    res["max_abs_diff"] = worst;
    res["mean_q"] = mean_of(q);
    out.summary["results"].push_back(res);
  }
  out.summary["duality_violations"] = dual;
  return out;
}

inline ExperimentResult run_revealment(const Resolved& r) {
  const ExperimentConfig& c = r.cfg;
  ExperimentResult out;
  out.summary["results"] = nlohmann::json::array();
  std::uint64_t dual = 0, wrong = 0;
  std::vector<double> logn, logd;
  for (std::size_t n : c.n) {
    std::vector<double> deltas;
    for (std::size_t i = 0; i < r.eta_reps; ++i) {
      VoronoiGraph g = eta_graph(c, n, i);
      RevealmentReport rv = revealment(g, r.reps, derive_seed(eta_seed(c, n, i), 1), c.workers);
      dual += rv.duality_violations;
      wrong += rv.wrong_decisions;
      deltas.push_back(rv.delta);
      out.rows.push_back(make_row(c, n, "delta", rv.delta, rv.delta_stderr, r.reps, i));
    }
    nlohmann::json res;
    res["n"] = n;
    res["delta"] = mean_of(deltas);
    res["delta_stderr"] = deltas.size() > 1
                              ? stderr_of(deltas)
                              : std::sqrt(deltas[0] * (1.0 - deltas[0]) / static_cast<double>(r.reps));
    out.summary["results"].push_back(res);
    logn.push_back(std::log(static_cast<double>(n)));
    logd.push_back(std::log(std::max(mean_of(deltas), 1e-300)));
  }
  LinearFit f = linear_fit(logn, logd);
  out.summary["log_log_slope"] = f.slope;
  out.summary["wrong_decisions"] = wrong;
  out.summary["duality_violations"] = dual;
  return out;
}

inline ExperimentResult run_noise(const Resolved& r) {
  const ExperimentConfig& c = r.cfg;
  ExperimentResult out;
  out.summary["results"] = nlohmann::json::array();
  std::vector<double> eps_list = c.eps;
  if (eps_list.empty() && c.exponent <= 0.0) eps_list = {0.1};
  for (std::size_t n : c.n) {
    std::vector<double> here = eps_list;
    if (c.exponent > 0.0) here = {NoiseParams{0.0, c.exponent}.eps_for(n)};
    for (std::size_t e = 0; e < here.size(); ++e) {
      const double eps = here[e];
      std::vector<EstimateReport> cov(r.eta_reps);
      std::vector<double> exact_var(r.eta_reps, -1.0);
      parallel_for(r.eta_reps, c.workers, [&](std::size_t i) {
        VoronoiGraph g = eta_graph(c, n, i);
        cov[i] = noise_covariance(g, eps, r.reps, derive_seed(eta_seed(c, n, i), 2 + e));
        if (g.size() <= 16) {
          double q = exact_quenched_crossing(g).value();
          exact_var[i] = q * (1.0 - q);
        }
      });
      std::vector<double> vals;
      const std::string param = "cov_eps=" + fmt12(eps);
      for (std::size_t i = 0; i < r.eta_reps; ++i) {
        out.rows.push_back(make_row(c, n, param, cov[i].value, cov[i].std_error, r.reps, i));
        if (exact_var[i] >= 0.0) out.rows.push_back(make_row(c, n, "exact_q(1-q)", exact_var[i], 0.0, 1, i));
        vals.push_back(cov[i].value);
      }
      nlohmann::json res;
      res["n"] = n;
      res["eps"] = eps;
      res["mean_covariance"] = mean_of(vals);
      // Sampling noise within each point set is included in the spread over point sets.
      res["stderr"] = vals.size() > 1 ? stderr_of(vals) : cov[0].std_error;
      out.summary["results"].push_back(res);
    }
  }
  return out;
}

inline ExperimentResult run_one_arm(const Resolved& r) {
  const ExperimentConfig& c = r.cfg;
  ExperimentResult out;
  out.summary["results"] = nlohmann::json::array();
  std::vector<double> logn, logp, logdist;
  for (std::size_t n : c.n) {
    const double d = c.d.value_or(std::pow(static_cast<double>(n), 0.25));
    std::vector<double> p(r.eta_reps);
    parallel_for(r.eta_reps, c.workers, [&](std::size_t i) {
      VoronoiGraph g = eta_graph(c, n, i);
      CellId u = locate_cell(g, g.target().center());
      Seed es = eta_seed(c, n, i);
      std::size_t hits = 0;
      for (std::size_t j = 0; j < r.reps; ++j) hits += monochromatic_arm(g, random_coloring(g.size(), derive_seed(es, j + 1)), u, d);
      p[i] = static_cast<double>(hits) / static_cast<double>(r.reps);
    });
    for (std::size_t i = 0; i < r.eta_reps; ++i) out.rows.push_back(make_row(c, n, "P(M)", p[i], 0.0, r.reps, i));
    nlohmann::json res;
    res["n"] = n;
    res["d"] = d;
    res["probability"] = mean_of(p);
    res["stderr"] = stderr_of(p);
    out.summary["results"].push_back(res);
    logn.push_back(std::log(static_cast<double>(n)));
    logdist.push_back(std::log(d));
    logp.push_back(std::log(std::max(mean_of(p), 1e-300)));
  }
  out.summary["exponent_in_n"] = linear_fit(logn, logp).slope;
  out.summary["exponent_in_d"] = linear_fit(logdist, logp).slope;
  return out;
}

inline ExperimentResult run_martingale(const Resolved& r) {
  const ExperimentConfig& c = r.cfg;
  ExperimentResult out;
  out.summary["results"] = nlohmann::json::array();
  const std::size_t suffix = c.suffix_reps.value_or(200);
  for (std::size_t n : c.n) {
    MartingaleReport m = martingale_decomposition_check(n, target_for(c, n), r.eta_reps, n_seed(c.seed, n), suffix,
                                                        mode_for(c), c.workers);
    for (std::size_t i = 0; i < r.eta_reps; ++i) {
      out.rows.push_back(make_row(c, n, "q", m.q[i], 0.0, 1, i));
      out.rows.push_back(make_row(c, n, "sum_sq_increments", m.increments[i], 0.0, suffix, i));
    }
    nlohmann::json res;
    res["n"] = n;
    res["variance"] = m.lhs;
    res["variance_stderr"] = m.lhs_stderr;
    res["sum_sq_increments"] = m.rhs;
    res["sum_sq_increments_stderr"] = m.rhs_stderr;
    res["difference_stderr"] = m.diff_stderr;
    res["equal_within_3se"] = std::abs(m.lhs - m.rhs) <= 3.0 * m.diff_stderr;
    out.summary["results"].push_back(res);
  }
  return out;
}

}  // namespace detail

/// Runs one experiment in memory. Throws ConfigError for invalid settings.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (!is_experiment(cfg.experiment)) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  detail::Resolved r = detail::resolve(cfg);
  const std::string& e = cfg.experiment;
  ExperimentResult res;
  if (e == "crossing") res = detail::run_crossing(r, false);
  else if (e == "xtail") res = detail::run_crossing(r, true);
  else if (e == "quenched-spread") res = detail::run_quenched_spread(r);
  else if (e == "efron-stein") res = detail::run_efron_stein(r);
  else if (e == "colour-switching") res = detail::run_colour_switching(r);
  else if (e == "magic-check") res = detail::run_magic_check(r);
  else if (e == "revealment") res = detail::run_revealment(r);
  else if (e == "noise") res = detail::run_noise(r);
  else if (e == "one-arm") res = detail::run_one_arm(r);
  else res = detail::run_martingale(r);
  ExperimentConfig shown = r.cfg;
  shown.reps = r.reps;
  shown.eta_reps = r.eta_reps;
  res.summary["experiment"] = e;
  res.summary["config"] = config_to_json(shown);
  res.summary["config"].erase("workers");
  res.summary["config"].erase("out");
  return res;
}

inline void write_csv(std::ostream& os, const std::vector<Row>& rows) {
  os << "experiment,n,param,value,stderr,reps,seed\n";
  for (const Row& r : rows)
    os << r.experiment << ',' << r.n << ',' << r.param << ',' << fmt12(r.value) << ',' << fmt12(r.std_error) << ','
       << r.reps << ',' << r.master << ':' << r.index << '\n';
}

/// Runs and writes <out>/<experiment>.csv and <out>/<experiment>.json.
/// Returns the process exit code: 0 ok, 2 configuration error, 3 runtime error.
inline int run(const ExperimentConfig& cfg, std::ostream& err) {
  ExperimentResult res;
  try {
    res = run_experiment(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 3;
  }
  namespace fs = std::filesystem;
  try {
    fs::path dir(cfg.out);
    fs::create_directories(dir);
    std::ofstream csv(dir / (cfg.experiment + ".csv"));
    std::ofstream js(dir / (cfg.experiment + ".json"));
    if (!csv || !js) throw std::runtime_error("cannot open output files in " + dir.string());
    write_csv(csv, res.rows);
    js << res.summary.dump(2) << '\n';
    if (!csv || !js) throw std::runtime_error("write failed in " + dir.string());
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace vperc
