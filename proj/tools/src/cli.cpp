#include "wpcm_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "wpcm/csv.hpp"
#include "wpcm/error.hpp"
#include "wpcm/experiment.hpp"
#include "wpcm_cli/config.hpp"

namespace wpcm::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  int runs = 0;
  std::vector<std::string> cases;
  std::string out;
  int threads = 0;
  std::string measurements;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSpd:
    case ErrorCode::SizeGuard:
      return kExitNumerical;
    default:
      return kExitConfig;
  }
}

fs::path output_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + cfg.out_dir.string() + "': " + ec.message());
  return cfg.out_dir;
}

ExperimentCase first_case(const RunConfig& cfg) {
  if (cfg.cases.empty()) throw Error(ErrorCode::ConfigError, "no case selected");
  return airliner_case(cfg.cases.front(), cfg.scenario, cfg.last_known_waypoint + 1);
}

int effective_threads(int threads) {
  if (threads > 0) return threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const auto markov = build_ncv(cfg.scenario.step_seconds, cfg.noise_intensity, 2, cfg.scenario.horizon());
  const auto model = build_waypoint_model(cfg.scenario, markov);
  const auto runs = simulate_runs(model, cfg.runs, cfg.master_seed);
  const auto path = output_dir(cfg) / "trajectories.csv";
  csv::write_trajectories(path, runs);
  out << "wrote " << runs.size() << " trajectories to " << path.string() << "\n";
}

void cmd_filter(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto setup = cfg.setup();
  const auto prepared = prepare_case(first_case(cfg), setup);
  const auto dir = output_dir(cfg);
  std::vector<Gaussian> estimates;
  if (!opt.measurements.empty()) {
    const auto z = csv::read_measurements(fs::path(opt.measurements));
    // no measurements, no rows
    if (!z.empty()) estimates = run_filter(prepared.assumed, setup.measurement, z).estimates;
  } else {
    const auto rep = run_replicate(prepared, setup, cfg.master_seed, 0);
    csv::write_measurements(dir / "measurements.csv", rep.measurements);
    estimates = rep.filtered.estimates;
  }
  csv::write_estimates(dir / "estimates.csv", estimates);
  out << "wrote " << estimates.size() << " estimates to " << (dir / "estimates.csv").string() << "\n";
}

void cmd_predict(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto setup = cfg.setup();
  const auto prepared = prepare_case(first_case(cfg), setup);
  const auto dir = output_dir(cfg);
  const KnownWaypointSet known{cfg.last_known_waypoint};
  std::vector<PredictionResult> preds;
  std::vector<Vector> truth;
  int from = cfg.measured_through;
  if (!opt.measurements.empty()) {
    const auto z = csv::read_measurements(fs::path(opt.measurements));
    from = static_cast<int>(z.size());
    const auto res = run_filter(prepared.assumed, setup.measurement, z);
    preds = predict_range(res.terminal, prepared.assumed, from, cfg.last_target, known, prepared.markov);
  } else {
    auto rep = run_replicate(prepared, setup, cfg.master_seed, 0);
    preds = predict_range(rep.filtered.terminal, prepared.assumed, from, cfg.last_target, known, prepared.markov);
    truth = std::move(rep.truth);
  }
  csv::write_predictions(dir / "predictions.csv", preds, from, truth);
  out << "wrote " << preds.size() << " predictions to " << (dir / "predictions.csv").string() << "\n";
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const auto setup = cfg.setup();
  const int threads = effective_threads(cfg.threads);
  std::vector<ExperimentCase> cases;
  for (const auto& id : cfg.cases) cases.push_back(airliner_case(id, cfg.scenario, cfg.last_known_waypoint + 1));
  const auto dir = output_dir(cfg);
  std::vector<AeeSeries> series;
  for (const auto& c : cases) series.push_back(run_case(c, setup, cfg.runs, cfg.master_seed, threads));
  csv::write_aee(dir / "aee.csv", series);
  out << "case  runs  mean_aee_m\n";
  for (const auto& s : series) {
    out << std::left << std::setw(6) << s.case_id << std::setw(6) << s.runs << csv::format_number(s.horizon_mean())
        << "\n";
  }
  out << "wrote " << (dir / "aee.csv").string() << "\n";
}

void cmd_config(const RunConfig& cfg, bool to_file, std::ostream& out) {
  const std::string text = dump_config(cfg);
  if (!to_file) {
    out << text;
    return;
  }
  const auto path = output_dir(cfg) / "config.json";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  os << text;
  if (!os) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
  out << "wrote " << path.string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Waypoint-constrained CM trajectory models: simulate, filter, predict, evaluate", "wpcm"};
  Options opt;
  auto* o_config = app.add_option("--config", opt.config, "JSON run configuration")->check(CLI::ExistingFile);
  auto* o_seed = app.add_option("--seed", opt.seed, "master seed");
  auto* o_runs = app.add_option("--runs", opt.runs, "Monte Carlo runs")->check(CLI::NonNegativeNumber);
  auto* o_cases = app.add_option("--cases", opt.cases, "case ids, e.g. i,ii,iii")->delimiter(',');
  auto* o_out = app.add_option("--out", opt.out, "output directory");
  auto* o_threads = app.add_option("--threads", opt.threads, "worker threads (0 = all cores)")
                        ->check(CLI::NonNegativeNumber);
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "sample trajectories -> trajectories.csv")->fallthrough();
  auto* filter = app.add_subcommand("filter", "filter one replicate -> estimates.csv")->fallthrough();
  auto* predict = app.add_subcommand("predict", "predict one replicate -> predictions.csv")->fallthrough();
  auto* evaluate = app.add_subcommand("evaluate", "Monte Carlo AEE per case -> aee.csv")->fallthrough();
  auto* config = app.add_subcommand("config", "print the effective configuration")->fallthrough();
  filter->add_option("--measurements", opt.measurements, "measurement CSV (k,z_x_m,z_y_m)");
  predict->add_option("--measurements", opt.measurements, "measurement CSV (k,z_x_m,z_y_m)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    RunConfig cfg = o_config->count() ? load_config(opt.config) : default_config();
    if (o_seed->count()) cfg.master_seed = opt.seed;
    if (o_runs->count()) cfg.runs = opt.runs;
    if (o_cases->count()) cfg.cases = opt.cases;
    if (o_out->count()) cfg.out_dir = opt.out;
    if (o_threads->count()) cfg.threads = opt.threads;

    if (simulate->parsed()) cmd_simulate(cfg, out);
    else if (filter->parsed()) cmd_filter(cfg, opt, out);
    else if (predict->parsed()) cmd_predict(cfg, opt, out);
    else if (evaluate->parsed()) cmd_evaluate(cfg, out);
    else if (config->parsed()) cmd_config(cfg, o_out->count() > 0, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace wpcm::cli
