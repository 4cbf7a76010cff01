// epcap: service sizing for heterogeneous storage fleets.
//
// Exit codes: 0 success (and "feasible"), 1 runtime error, 2 malformed input
// or arguments, 3 "infeasible" from the feasible subcommand.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "epcap/epcap.hpp"

namespace {

using namespace epcap;

constexpr int kExitError = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitInfeasible = 3;

struct FleetSource {
  std::string fleet_path;
  bool case_study = false;
};

struct ShapeArgs {
  std::string shape = "trapezoid";
  std::vector<double> durations{2.0};
  double magnitude = 1.0;
  std::string profile_path;
};

struct RunConfig {
  FleetSource fleet;
  ShapeArgs shape;
  std::uint64_t seed = 1;
  std::string out;
  double rel_tol = kDefaultRelTol;
  std::string method = "ep";
  double period_min = 60.0 * kDefaultPeriod;
  std::string plot_dir;
  // gen-fleet
  std::size_t count = 0;
  double p_mean = 3.3, p_std = 1.0, e_mean = 40.0, e_std = 10.0;
  // stochastic
  double q = 0.6;
  std::vector<double> confidence{0.5, 0.1, 0.01};
  std::size_t samples = 10000;
  unsigned workers = 0;
  std::size_t bootstrap = 1000;
  bool with_quantile = false;
  bool json_stdout = false;
  std::size_t grid_points = 2000;
};

void add_fleet_options(CLI::App* cmd, RunConfig& cfg) {
  auto* f = cmd->add_option("--fleet", cfg.fleet.fleet_path,
                            "Fleet CSV (id,p_max_kw,energy_kwh; kW and kWh)");
  auto* cs = cmd->add_flag("--case-study", cfg.fleet.case_study,
                           "Use the generated 500-device case-study fleet (seeded by --seed)");
  f->excludes(cs);
}

void add_shape_options(CLI::App* cmd, RunConfig& cfg, bool sweep) {
  cmd->add_option("--shape", cfg.shape.shape, "Service shape: pulse | trapezoid (unit peak, kW)")
      ->check(CLI::IsMember({"pulse", "trapezoid"}));
  auto* d = cmd->add_option("--duration", cfg.shape.durations,
                            sweep ? "Total duration(s) in hours; several values run a sweep"
                                  : "Total duration in hours");
  if (!sweep) d->expected(1);
  cmd->add_option("--profile", cfg.shape.profile_path,
                  "Profile JSON (breakpoints [[t_h, P_kW], ...]) used as the shape instead");
}

void add_seed(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "Master seed; every random draw derives from it");
}

Fleet load_fleet(const RunConfig& cfg) {
  if (cfg.fleet.case_study) return generate_case_study(cfg.seed);
  if (cfg.fleet.fleet_path.empty()) throw ParseError("--fleet", "a fleet CSV or --case-study is required");
  return read_fleet_csv_file(cfg.fleet.fleet_path);
}

RequestProfile make_shape(const ShapeArgs& s, double duration, double magnitude = 1.0) {
  if (!s.profile_path.empty()) return scale(read_profile_json_file(s.profile_path), magnitude);
  return s.shape == "pulse" ? pulse(duration, magnitude) : trapezoid(duration, magnitude);
}

double first_duration(const ShapeArgs& s) {
  if (s.durations.empty()) throw ParseError("--duration", "at least one duration is required");
  return s.durations.front();
}

std::uint64_t ensemble_seed(std::uint64_t master) { return stream_seed(master, 1); }

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw Error("cannot open '" + path + "' for writing");
  return file;
}

int cmd_gen_fleet(const RunConfig& cfg) {
  Fleet fleet;
  if (cfg.fleet.case_study) {
    fleet = generate_case_study(cfg.seed);
  } else {
    if (cfg.count == 0) throw ParseError("--count", "use --case-study or give --count > 0");
    fleet = generate({{cfg.count, ValueSpec::lognormal_of(cfg.p_mean, cfg.p_std),
                       ValueSpec::lognormal_of(cfg.e_mean, cfg.e_std), "d"}},
                     cfg.seed);
  }
  std::ofstream file;
  write_fleet_csv(open_out(cfg.out, file), fleet);
  return 0;
}

int cmd_capacity(const RunConfig& cfg) {
  const auto fleet = load_fleet(cfg);
  const auto curve = capacity_curve(fleet.p_max(), time_to_go(fleet));
  std::ofstream file;
  write_curve_csv(open_out(cfg.out, file), curve);
  return 0;
}

int cmd_feasible(const RunConfig& cfg) {
  const auto fleet = load_fleet(cfg);
  const auto request = make_shape(cfg.shape, first_duration(cfg.shape), cfg.shape.magnitude);
  const auto p = fleet.p_max();
  const auto x = time_to_go(fleet);
  bool ok = false;
  if (cfg.method == "policy") {
    const auto steps = discretize(request, cfg.period_min / 60.0);
    ok = simulate_feasible(p, x, steps);
  } else {
    ok = dominated_by(ep_transform(request), capacity_curve(p, x));
  }
  std::cout << (ok ? "feasible" : "infeasible") << '\n';
  return ok ? 0 : kExitInfeasible;
}

int cmd_max_magnitude(const RunConfig& cfg) {
  const auto fleet = load_fleet(cfg);
  const auto p = fleet.p_max();
  const auto x = time_to_go(fleet);
  const auto cap = capacity_curve(p, x);
  if (cfg.shape.durations.empty()) throw ParseError("--duration", "at least one duration is required");
  if (!cfg.plot_dir.empty()) {
    std::filesystem::create_directories(cfg.plot_dir);
    std::ofstream f(std::filesystem::path(cfg.plot_dir) / "capacity.csv");
    write_curve_csv(f, cap);
  }
  std::vector<std::pair<double, double>> rows;
  for (double d : cfg.shape.durations) {
    const auto shape = make_shape(cfg.shape, d);
    const double m = cfg.method == "policy"
                         ? max_magnitude_simulated(shape, p, x, cfg.period_min / 60.0, cfg.rel_tol)
                         : max_magnitude_ep(shape, p, x, cfg.rel_tol);
    rows.emplace_back(d, m);
    if (!cfg.plot_dir.empty()) {
      std::ostringstream tag;
      tag << "_" << d << "h";
      const auto dir = std::filesystem::path(cfg.plot_dir);
      const auto request = scale(shape, m);
      std::ofstream cf(dir / ("request" + tag.str() + ".csv"));
      write_curve_csv(cf, ep_transform(request));
      std::ofstream pf(dir / ("profile" + tag.str() + ".json"));
      write_profile_json(pf, request);
    }
  }
  std::ofstream file;
  auto& out = open_out(cfg.out, file);
  out << std::setprecision(10);
  if (rows.size() == 1) {
    out << rows.front().second << '\n';
  } else {
    out << "duration_h,magnitude_kw\n";
    for (const auto& [d, m] : rows) out << d << ',' << m << '\n';
  }
  return 0;
}

CcOptions cc_options(const RunConfig& cfg) {
  CcOptions o;
  o.rel_tol = cfg.rel_tol;
  o.bootstrap_resamples = cfg.bootstrap;
  o.workers = cfg.workers;
  return o;
}

int cmd_cc_solve(const RunConfig& cfg) {
  const auto fleet = load_fleet(cfg);
  const auto shape = make_shape(cfg.shape, first_duration(cfg.shape));
  const auto model = AvailabilityModel::uniform(fleet.size(), cfg.q);
  const auto ensemble = draw_ensemble(model, cfg.samples, ensemble_seed(cfg.seed), cfg.workers);
  const auto opts = cc_options(cfg);
  const auto sols = cc_solve(fleet, ensemble, shape, cfg.confidence, opts);

  std::vector<double> approx;
  if (cfg.with_quantile) {
    for (double c : cfg.confidence) {
      const auto qc = quantile_curve(fleet, ensemble, c, {cfg.grid_points}, cfg.workers);
      approx.push_back(max_magnitude_vs_quantile(qc, shape, cfg.rel_tol));
    }
  }

  auto json = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < sols.size(); ++i) {
    auto obj = nlohmann::ordered_json::parse(cc_solution_json(sols[i]));
    if (cfg.with_quantile) obj["approx_magnitude_kw"] = approx[i];
    json.push_back(std::move(obj));
  }
  const std::string text = (sols.size() == 1 ? json.front().dump() : json.dump()) + "\n";
  if (!cfg.out.empty()) {
    std::ofstream file;
    open_out(cfg.out, file) << text;
  }
  if (cfg.json_stdout) {
    std::cout << text;
    return 0;
  }
  std::cout << "c value   accurate (MW)   95% CI (MW)          order index";
  if (cfg.with_quantile) std::cout << "   approx (MW)   rel. error";
  std::cout << '\n';
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const auto& s = sols[i];
    std::cout << std::fixed << std::setprecision(2) << std::setw(6) << 100.0 * s.c << "%  "
              << std::setprecision(4) << std::setw(12) << s.magnitude / 1000.0 << "    ["
              << s.ci95.lo / 1000.0 << ", " << s.ci95.hi / 1000.0 << "]" << std::setw(11)
              << s.order_index;
    if (cfg.with_quantile) {
      const double err = s.magnitude > 0.0 ? (approx[i] - s.magnitude) / s.magnitude : 0.0;
      std::cout << std::setw(14) << approx[i] / 1000.0 << std::setw(11) << std::setprecision(2)
                << 100.0 * err << '%';
    }
    std::cout << '\n';
    if (s.few_samples) {
      std::cerr << "warning: c*N < 1 at c=" << s.c << "; magnitude is the sample minimum\n";
    }
  }
  return 0;
}

int cmd_quantile_curve(const RunConfig& cfg) {
  if (cfg.confidence.size() != 1) throw ParseError("--confidence", "give exactly one level");
  const auto fleet = load_fleet(cfg);
  const auto model = AvailabilityModel::uniform(fleet.size(), cfg.q);
  const auto curve = quantile_curve(fleet, model, cfg.confidence.front(), cfg.samples,
                                    ensemble_seed(cfg.seed), {cfg.grid_points}, cfg.workers);
  std::ofstream file;
  write_quantile_csv(open_out(cfg.out, file), curve);
  if (!cfg.shape.durations.empty() && !cfg.out.empty()) {
    const auto shape = make_shape(cfg.shape, first_duration(cfg.shape));
    std::cout << std::setprecision(10) << max_magnitude_vs_quantile(curve, shape, cfg.rel_tol)
              << '\n';
  }
  return 0;
}

int cmd_bench(const RunConfig& cfg) {
  const auto fleet = load_fleet(cfg);
  const auto shape = make_shape(cfg.shape, first_duration(cfg.shape));
  const auto model = AvailabilityModel::uniform(fleet.size(), cfg.q);
  BenchOptions opts;
  opts.period = cfg.period_min / 60.0;
  opts.rel_tol = cfg.rel_tol;
  const auto report = run_bench(fleet, model, shape, cfg.samples, ensemble_seed(cfg.seed), opts);
  if (!cfg.out.empty()) {
    std::ofstream file;
    open_out(cfg.out, file) << bench_report_json(report) << '\n';
  }
  std::cout << bench_report_table(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum deliverable magnitude of shaped discharge services for storage fleets.\n"
               "Units: power kW, energy kWh, time h."};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* gen = app.add_subcommand("gen-fleet", "Generate a fleet CSV");
  gen->add_flag("--case-study", cfg.fleet.case_study,
                "450 devices LN(3.3 kW, 1 kW) + 50 at 50 kW; energies LN(40 kWh, 10 kWh)");
  gen->add_option("--count", cfg.count, "Devices in a single log-normal group");
  gen->add_option("--p-mean", cfg.p_mean, "Mean maximum power, kW");
  gen->add_option("--p-std", cfg.p_std, "Standard deviation of maximum power, kW");
  gen->add_option("--e-mean", cfg.e_mean, "Mean energy, kWh");
  gen->add_option("--e-std", cfg.e_std, "Standard deviation of energy, kWh");
  add_seed(gen, cfg);
  gen->add_option("--out", cfg.out, "Output CSV path (default stdout)");

  auto* cap = app.add_subcommand("capacity", "Capacity curve of a fleet as CSV p_kw,e_kwh");
  add_fleet_options(cap, cfg);
  add_seed(cap, cfg);
  cap->add_option("--out", cfg.out, "Output CSV path (default stdout)");

  auto* feas = app.add_subcommand("feasible", "Check one request; prints feasible|infeasible");
  add_fleet_options(feas, cfg);
  add_shape_options(feas, cfg, false);
  feas->add_option("--magnitude", cfg.shape.magnitude, "Peak power of the request, kW");
  feas->add_option("--method", cfg.method, "Oracle: ep | policy")
      ->check(CLI::IsMember({"ep", "policy"}));
  feas->add_option("--period-min", cfg.period_min, "Policy simulation period, minutes");
  add_seed(feas, cfg);

  auto* mm = app.add_subcommand("max-magnitude", "Largest feasible magnitude, kW (duration sweep)");
  add_fleet_options(mm, cfg);
  add_shape_options(mm, cfg, true);
  mm->add_option("--method", cfg.method, "Oracle: ep | policy")
      ->check(CLI::IsMember({"ep", "policy"}));
  mm->add_option("--period-min", cfg.period_min, "Policy simulation period, minutes");
  mm->add_option("--tol", cfg.rel_tol, "Bisection tolerance relative to the bracket top");
  mm->add_option("--plot-dir", cfg.plot_dir,
                 "Write capacity.csv and per-duration request curves (kW, kWh) here");
  mm->add_option("--out", cfg.out, "Output path (default stdout)");
  add_seed(mm, cfg);

  auto add_stochastic = [&](CLI::App* cmd) {
    add_fleet_options(cmd, cfg);
    add_seed(cmd, cfg);
    cmd->add_option("--availability", cfg.q, "Per-device availability probability in [0, 1]");
    cmd->add_option("--samples", cfg.samples, "Monte Carlo samples N");
    cmd->add_option("--workers", cfg.workers, "Worker threads (0 = hardware); output is unaffected");
    cmd->add_option("--tol", cfg.rel_tol, "Bisection tolerance relative to the bracket top");
    cmd->add_option("--grid-points", cfg.grid_points, "Quantile curve grid cap, points");
  };

  auto* cc = app.add_subcommand("cc-solve", "Chance-constrained maximum magnitude (Monte Carlo)");
  add_stochastic(cc);
  add_shape_options(cc, cfg, false);
  cc->add_option("--confidence", cfg.confidence, "Risk level(s) c in (0, 1); repeatable");
  cc->add_option("--bootstrap", cfg.bootstrap, "Bootstrap resamples for the 95% CI");
  cc->add_flag("--quantile", cfg.with_quantile, "Also report the quantile-curve approximation");
  cc->add_flag("--json", cfg.json_stdout, "Print JSON (magnitudes in kW) instead of the table");
  cc->add_option("--out", cfg.out, "Also write the JSON result to this path");

  auto* qc = app.add_subcommand("quantile-curve", "Quantile capacity curve as CSV p_kw,e_kwh");
  add_stochastic(qc);
  add_shape_options(qc, cfg, false);
  qc->add_option("--confidence", cfg.confidence, "Risk level c in (0, 1)");
  qc->add_option("--out", cfg.out,
                 "Output CSV path (default stdout); with a file, also prints the magnitude of "
                 "the shape against the curve, kW");

  auto* bench = app.add_subcommand("bench", "Time E-p vs policy-simulation bisection");
  add_stochastic(bench);
  add_shape_options(bench, cfg, false);
  bench->add_option("--period-min", cfg.period_min, "Simulation period, minutes");
  bench->add_option("--out", cfg.out, "Write the JSON report to this path");

  // Defaults that differ per subcommand.
  bool duration_given = false;
  for (int i = 1; i < argc; ++i) duration_given |= std::string(argv[i]) == "--duration";

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }
  if (!duration_given && cfg.shape.shape == "pulse") cfg.shape.durations = {4.0};
  if (qc->parsed() && !duration_given) cfg.shape.durations.clear();

  try {
    if (gen->parsed()) return cmd_gen_fleet(cfg);
    if (cap->parsed()) return cmd_capacity(cfg);
    if (feas->parsed()) return cmd_feasible(cfg);
    if (mm->parsed()) return cmd_max_magnitude(cfg);
    if (cc->parsed()) return cmd_cc_solve(cfg);
    if (qc->parsed()) return cmd_quantile_curve(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
