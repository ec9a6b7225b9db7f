// vperc: run experiments, or sample / evaluate / trace single instances.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vperc/vperc.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

int parse_or_exit(CLI::App& app, int argc, char** argv, bool& done) {
  done = false;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    done = true;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    done = true;
    return kConfigError;
  }
  return 0;
}

struct InstanceFlags {
  std::string points, coloring, out, mode = "plane";
  double aspect = 1.0, padding = 0.0;
  std::size_t n = 0;
  vperc::Seed seed = 1;
};

vperc::Rectangle instance_target(const InstanceFlags& f, std::size_t n) {
  return vperc::Rectangle::with_area(static_cast<double>(n), f.aspect);
}

vperc::RegionMode instance_mode(const InstanceFlags& f) {
  return vperc::RegionMode{vperc::parse_mode(f.mode), f.padding};
}

vperc::PointSet load_points(const InstanceFlags& f) {
  std::ifstream in(f.points);
  if (!in) throw std::runtime_error("cannot read " + f.points);
  std::size_t n = 0;
  {
    std::ifstream peek(f.points);
    peek >> n;
  }
  if (n == 0) throw std::runtime_error(f.points + ": empty point set");
  return vperc::read_points(in, vperc::sampling_region(instance_target(f, n), instance_mode(f)));
}

vperc::Coloring load_coloring(const InstanceFlags& f) {
  std::ifstream in(f.coloring);
  if (!in) throw std::runtime_error("cannot read " + f.coloring);
  return vperc::read_coloring(in);
}

void add_instance_flags(CLI::App& app, InstanceFlags& f) {
  app.add_option("--aspect", f.aspect, "width/height of the target (area n)");
  app.add_option("--mode", f.mode, "plane or halfplane")->check(CLI::IsMember({"plane", "halfplane"}));
  app.add_option("--padding", f.padding, "margin around the target for sampling");
}

int instance_main(const std::string& cmd, int argc, char** argv) {
  CLI::App app{"vperc " + cmd};
  InstanceFlags f;
  add_instance_flags(app, f);
  if (cmd == "sample") {
    app.add_option("--n", f.n, "number of sites")->required();
    app.add_option("--seed", f.seed, "seed")->envname("VPERC_SEED");
    app.add_option("--out", f.out, "point-set file (default stdout)");
    app.add_option("--coloring", f.coloring, "also write a uniform colouring here");
  } else {
    app.add_option("--points", f.points, "point-set file")->required();
    app.add_option("--coloring", f.coloring, "colouring file")->required();
    if (cmd == "trace") {
      app.add_option("--seed", f.seed, "seed of the start point")->envname("VPERC_SEED");
      app.add_option("--out", f.out, "trace CSV (default stdout)");
    }
  }
  bool done = false;
  int rc = parse_or_exit(app, argc - 1, argv + 1, done);
  if (done) return rc;
  try {
    if (cmd == "sample") {
      auto ps = vperc::sample_binomial(f.n, instance_target(f, f.n), instance_mode(f), f.seed);
      if (f.out.empty()) vperc::write_points(std::cout, ps);
      else {
        std::ofstream os(f.out);
        if (!os) throw std::runtime_error("cannot write " + f.out);
        vperc::write_points(os, ps);
      }
      if (!f.coloring.empty()) {
        std::ofstream os(f.coloring);
        if (!os) throw std::runtime_error("cannot write " + f.coloring);
        vperc::write_coloring(os, vperc::random_coloring(f.n, vperc::derive_seed(f.seed, 1)));
      }
      return 0;
    }
    auto ps = load_points(f);
    auto w = load_coloring(f);
    auto g = vperc::build_tessellation(ps, instance_target(f, ps.size()));
    if (cmd == "evaluate") {
      auto x = vperc::max_disjoint_vertical_crossings(g, w);
      auto fam = vperc::leftmost_crossing_family(g, w);
      nlohmann::json j;
      j["cells"] = g.size();
      j["red_horizontal_crossing"] = vperc::red_horizontal_crossing(g, w);
      j["blue_vertical_crossing"] = vperc::blue_vertical_crossing(g, w);
      j["X"] = x.X;
      j["Xplus"] = x.Xplus;
      j["Xminus"] = x.Xminus;
      j["family_signs"] = fam.signs;
      j["family_paths"] = fam.paths;
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    auto tr = vperc::ss_run(g, w, f.seed);
    if (f.out.empty()) vperc::write_trace_csv(std::cout, tr);
    else {
      std::ofstream os(f.out);
      if (!os) throw std::runtime_error("cannot write " + f.out);
      vperc::write_trace_csv(os, tr);
    }
    std::cerr << "decision " << tr.decision << " phase " << vperc::phase_name(tr.phase) << " queried "
              << tr.queried.size() << '\n';
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

int experiment_main(int argc, char** argv) {
  CLI::App app{"Quenched Voronoi percolation experiments"};
  app.footer("experiments: crossing quenched-spread xtail efron-stein colour-switching magic-check revealment noise "
             "one-arm martingale\ninstance tools: vperc sample|evaluate|trace --help");
  std::string experiment, config, mode;
  std::vector<std::size_t> n;
  std::size_t reps = 0, eta_reps = 0, suffix_reps = 0;
  std::vector<double> eps;
  double exponent = 0.0, d = 0.0, aspect = 1.0, padding = 0.0;
  vperc::Seed seed = 0;
  unsigned workers = 1;
  std::string out;
  app.add_option("experiment", experiment, "experiment name");
  app.add_option("--config", config, "JSON config; flags override its fields");
  auto* o_n = app.add_option("--n", n, "number of sites, or an increasing schedule")->delimiter(',');
  auto* o_reps = app.add_option("--reps", reps, "colourings (per point set; in total for crossing/xtail)");
  auto* o_eta = app.add_option("--eta-reps", eta_reps, "point sets per n");
  auto* o_suffix = app.add_option("--suffix-reps", suffix_reps, "martingale: resampled suffixes per level");
  auto* o_eps = app.add_option("--eps", eps, "noise resampling probabilities")->delimiter(',');
  auto* o_exp = app.add_option("--exponent", exponent, "noise: use eps = n^-exponent");
  auto* o_d = app.add_option("--d", d, "one-arm distance (default n^(1/4))");
  auto* o_aspect = app.add_option("--aspect", aspect, "width/height of the target");
  auto* o_pad = app.add_option("--padding", padding, "sampling margin around the target");
  auto* o_seed = app.add_option("--seed", seed, "master seed (default $VPERC_SEED, else 1)");
  auto* o_workers = app.add_option("--workers", workers, "worker threads");
  auto* o_mode = app.add_option("--mode", mode, "plane or halfplane");
  auto* o_out = app.add_option("--out", out, "output directory");
  bool done = false;
  int rc = parse_or_exit(app, argc, argv, done);
  if (done) return rc;

  vperc::ExperimentConfig cfg;
  try {
    if (const char* env = std::getenv("VPERC_SEED")) cfg.seed = std::stoull(env);
  } catch (const std::exception&) {
    std::cerr << "config error: VPERC_SEED is not an unsigned integer\n";
    return kConfigError;
  }
  try {
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw vperc::ConfigError("cannot read config " + config);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw vperc::ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      vperc::apply_json(cfg, j);
    }
    if (!experiment.empty()) cfg.experiment = experiment;
    if (o_n->count()) cfg.n = n;
    if (o_reps->count()) cfg.reps = reps;
    if (o_eta->count()) cfg.eta_reps = eta_reps;
    if (o_suffix->count()) cfg.suffix_reps = suffix_reps;
    if (o_eps->count()) cfg.eps = eps;
    if (o_exp->count()) cfg.exponent = exponent;
    if (o_d->count()) cfg.d = d;
    if (o_aspect->count()) cfg.aspect = aspect;
    if (o_pad->count()) cfg.padding = padding;
    if (o_seed->count()) cfg.seed = seed;
    if (o_workers->count()) cfg.workers = workers;
    if (o_mode->count()) cfg.mode = vperc::parse_mode(mode);
    if (o_out->count()) cfg.out = out;
    if (cfg.experiment.empty()) throw vperc::ConfigError("no experiment given");
  } catch (const vperc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return vperc::run(cfg, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    std::string cmd = argv[1];
    if (cmd == "sample" || cmd == "evaluate" || cmd == "trace") return instance_main(cmd, argc, argv);
  }
  return experiment_main(argc, argv);
}
