#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "wdeloc/dynamics.hpp"
#include "wdeloc/oracle.hpp"
#include "wdeloc/refstate.hpp"
#include "wdeloc/sampling.hpp"
#include "wdeloc/state_io.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitNumerical = 4;

std::string format_double(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, x);
  return buf;
}

int thread_count(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("WDELOC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 2;
}

std::string resolve_output(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  if (const char* env = std::getenv("WDELOC_OUTDIR")) {
    std::string dir(env);
    if (!dir.empty()) {
      if (dir.back() != '/') dir += '/';
      return dir + path;
    }
  }
  return path;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                        "cannot open output file " + path);
  }
  return out;
}

// ---------------------------------------------------------------------------
// measure

int cmd_measure(const std::string& state_path, int k_max) {
  const wdeloc::DensityMatrix rho = wdeloc::load_state_file(state_path);
  const wdeloc::DelocalizationProfile p = wdeloc::profile(rho, k_max);

  ordered_json doc;
  doc["dim"] = p.dim;
  doc["purity"] = p.purity;
  ordered_json moments, tau, e, method;
  for (std::size_t i = 0; i < p.moments.size(); ++i) {
    const std::string k = std::to_string(i + 2);
    moments["M" + k] = p.moments[i];
    tau["tau" + k] = p.tau[i];
    e["E" + k] = p.e[i];
    method["E" + k] = wdeloc::to_string(p.method[i]);
  }
  doc["moments"] = moments;
  doc["tau"] = tau;
  doc["e"] = e;
  doc["method"] = method;
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// scatter

struct ScatterArgs {
  int n = 3;
  int k = 2;
  std::string kind = "mixed";
  long samples = 1000;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  int threads = 0;
};

wdeloc::SamplerConfig parse_kind(const ScatterArgs& args) {
  wdeloc::SamplerConfig cfg;
  cfg.n = args.n;
  cfg.seed = args.seed;
  cfg.count = args.samples;

  std::string kind = args.kind;
  std::string params;
  if (const auto colon = kind.find(':'); colon != std::string::npos) {
    params = kind.substr(colon + 1);
    kind = kind.substr(0, colon);
  }
  if (kind == "pure") {
    cfg.kind = wdeloc::SampleKind::PureHaar;
  } else if (kind == "mixed") {
    cfg.kind = wdeloc::SampleKind::MixedGinibre;
    cfg.rank = params.empty() ? 0 : std::stoi(params);
  } else if (kind == "diagonal") {
    cfg.kind = wdeloc::SampleKind::DiagonalSeparable;
  } else if (kind == "producible") {
    cfg.kind = wdeloc::SampleKind::Producible;
    if (params.empty()) {
      throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                          "producible kind needs a block size, e.g. producible:2");
    }
    const auto comma = params.find(',');
    cfg.max_block = std::stoi(params.substr(0, comma));
    cfg.max_components =
        comma == std::string::npos ? 3 : std::stoi(params.substr(comma + 1));
  } else {
    throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                        "unknown kind " + args.kind);
  }
  return cfg;
}

const char* kind_name(wdeloc::SampleKind kind) {
  switch (kind) {
    case wdeloc::SampleKind::PureHaar: return "pure";
    case wdeloc::SampleKind::MixedGinibre: return "mixed";
    case wdeloc::SampleKind::DiagonalSeparable: return "diagonal";
    case wdeloc::SampleKind::Producible: return "producible";
  }
  return "unknown";
}

int cmd_scatter(const ScatterArgs& args) {
  const wdeloc::SamplerConfig cfg = parse_kind(args);
  const bool binary = args.format == "bin";
  if (args.format != "csv" && args.format != "bin") {
    throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                        "--format must be csv or bin");
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  std::string out_path;
  if (!args.out.empty()) {
    out_path = resolve_output(args.out);
    file = open_output(out_path);
    out = &file;
  } else if (binary) {
    throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                        "--format bin requires --out");
  }

  if (!binary) *out << "purity,tau\n";
  wdeloc::scatter_experiment(
      cfg, args.k,
      [&](const wdeloc::ScatterPoint* data, long count) {
        if (binary) {
          out->write(reinterpret_cast<const char*>(data),
                     count * static_cast<long>(sizeof(wdeloc::ScatterPoint)));
        } else {
          for (long i = 0; i < count; ++i) {
            *out << format_double("%.17g", data[i].purity) << ','
                 << format_double("%.17g", data[i].tau) << '\n';
          }
        }
      },
      thread_count(args.threads));

  if (!out_path.empty()) {
    ordered_json sidecar;
    sidecar["n"] = cfg.n;
    sidecar["k"] = args.k;
    sidecar["kind"] = kind_name(cfg.kind);
    if (cfg.kind == wdeloc::SampleKind::MixedGinibre) {
      sidecar["rank"] = cfg.rank > 0 ? cfg.rank : cfg.n;
    }
    if (cfg.kind == wdeloc::SampleKind::Producible) {
      sidecar["max_block"] = cfg.max_block;
      sidecar["max_components"] = cfg.max_components;
    }
    sidecar["samples"] = cfg.count;
    sidecar["seed"] = cfg.seed;
    sidecar["format"] = args.format;
    std::ofstream meta = open_output(out_path + ".json");
    meta << sidecar.dump(2) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// border

struct BorderArgs {
  int n = 3;
  int k = 3;
  int grid = 50;
  bool fit = false;
  long samples = 1000000;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;
};

int cmd_border(const BorderArgs& args) {
  if (args.grid < 2) {
    throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                        "--grid needs at least 2 points");
  }
  const wdeloc::ReferencePlan plan = wdeloc::partition_plan(args.n, args.k);
  const double pmin = wdeloc::min_purity(plan);
  std::vector<double> grid(args.grid);
  for (int i = 0; i < args.grid; ++i) {
    grid[i] = pmin + (1.0 - pmin) * i / (args.grid - 1);
  }

  std::vector<std::pair<double, double>> curve;
  std::string method;
  if (args.fit) {
    const wdeloc::FittedBorder fitted = wdeloc::fitted_border(
        args.n, args.k, args.samples, args.seed, thread_count(args.threads));
    for (double s : grid) curve.emplace_back(s, fitted(s));
    method = "fitted";
  } else {
    curve = wdeloc::border_curve(args.n, args.k, grid);
    method = wdeloc::to_string(
        wdeloc::solve_weights(plan, 0.5 * (pmin + 1.0)).method);
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  std::string out_path;
  if (!args.out.empty()) {
    out_path = resolve_output(args.out);
    file = open_output(out_path);
    out = &file;
  }
  *out << "purity,tau_k\n";
  for (const auto& [s, tau] : curve) {
    *out << format_double("%.15e", s) << ',' << format_double("%.15e", tau)
         << '\n';
  }

  ordered_json meta;
  meta["n"] = args.n;
  meta["k"] = args.k;
  meta["blocks"] = plan.blocks;
  meta["category"] = wdeloc::to_string(plan.category);
  meta["method"] = method;
  std::cerr << meta.dump() << "\n";
  if (!out_path.empty()) {
    std::ofstream side = open_output(out_path + ".json");
    side << meta.dump(2) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evolve

struct EvolveConfig {
  wdeloc::SiteHamiltonian hamiltonian;
  wdeloc::BathSpec bath;
  double bath_scale = 1.0;
  double dt = 1.0;
  long steps = 10000;
  long stride = 10;
  double gap_tol = 1e-6;
  std::string initial = "W6";
  std::string method = "rk4";
};

EvolveConfig load_evolve_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                        "cannot open config " + path);
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                        std::string("bad config JSON: ") + e.what());
  }

  auto number = [&](const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    if (!doc[key].is_number()) {
      throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                          std::string(key) + " must be a number");
    }
    return doc[key].get<double>();
  };

  Eigen::MatrixXd h;
  if (!doc.contains("hamiltonian") || doc["hamiltonian"] == "ring6") {
    h = wdeloc::ring_hamiltonian().matrix;
  } else if (doc["hamiltonian"].is_array()) {
    const auto& rows = doc["hamiltonian"];
    const int n = static_cast<int>(rows.size());
    h.resize(n, n);
    for (int i = 0; i < n; ++i) {
      if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n) {
        throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                            "hamiltonian must be a square array of rows");
      }
      for (int j = 0; j < n; ++j) h(i, j) = rows[i][j].get<double>();
    }
  } else {
    throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                        "hamiltonian must be \"ring6\" or a matrix");
  }

  EvolveConfig cfg{wdeloc::SiteHamiltonian(std::move(h)), {}, 1.0};
  cfg.bath.reorganization_energy = number("E_r", 300.0);
  cfg.bath.cutoff = number("omega_c", 150.0);
  cfg.bath.temperature = number("T", 77.0);
  cfg.bath_scale = number("bath_scale", 1.0);
  cfg.dt = number("dt", 1.0);
  cfg.steps = static_cast<long>(number("steps", 10000));
  cfg.stride = static_cast<long>(number("stride", 10));
  cfg.gap_tol = number("gap_tol", 1e-6);
  if (doc.contains("initial_state")) {
    if (!doc["initial_state"].is_string()) {
      throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                          "initial_state must be a string");
    }
    cfg.initial = doc["initial_state"].get<std::string>();
  }
  if (doc.contains("method")) cfg.method = doc["method"].get<std::string>();
  if (cfg.bath_scale < 0.0 || cfg.dt <= 0.0 || cfg.steps < 1 || cfg.stride < 1) {
    throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                        "need bath_scale >= 0, dt > 0, steps >= 1, stride >= 1");
  }
  return cfg;
}

wdeloc::DensityMatrix initial_state(const EvolveConfig& cfg) {
  const int n = cfg.hamiltonian.dim();
  if (cfg.initial == "W6" || cfg.initial == "W") {
    return wdeloc::from_pure(wdeloc::PureState::block_w(n, 0, n));
  }
  if (cfg.initial.rfind("exciton:", 0) == 0) {
    const int index = std::stoi(cfg.initial.substr(8));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cfg.hamiltonian.matrix);
    if (index < 0 || index >= n) {
      throw wdeloc::Error(wdeloc::ErrorKind::IndexOutOfRange,
                          "exciton index outside [0, n)");
    }
    const Eigen::VectorXcd v =
        solver.eigenvectors().col(index).cast<std::complex<double>>();
    return wdeloc::from_pure(wdeloc::PureState(v));
  }
  return wdeloc::load_state_file(cfg.initial);
}

int cmd_evolve(const std::string& config_path, const std::string& out_arg) {
  const EvolveConfig cfg = load_evolve_config(config_path);
  const wdeloc::ExcitonDecomposition decomp =
      wdeloc::lindblad_operators(cfg.hamiltonian, cfg.gap_tol);
  const wdeloc::Dissipator dissipator =
      wdeloc::build_dissipator(decomp, cfg.bath, cfg.bath_scale);

  wdeloc::PropagateOptions options;
  options.dt_fs = cfg.dt;
  options.steps = cfg.steps;
  options.stride = cfg.stride;
  options.method = cfg.method == "expm" ? wdeloc::StepMethod::MatrixExp
                                        : wdeloc::StepMethod::Rk4;

  const wdeloc::Trajectory traj =
      wdeloc::propagate(initial_state(cfg), cfg.hamiltonian, dissipator, options);
  const wdeloc::EkSeries series = wdeloc::ek_trajectory(traj);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_arg.empty()) {
    file = open_output(resolve_output(out_arg));
    out = &file;
  }
  *out << "t_fs";
  for (int k = 2; k <= series.dim; ++k) *out << ",E" << k;
  *out << ",purity,trace_error\n";
  for (std::size_t i = 0; i < series.times_fs.size(); ++i) {
    *out << format_double("%.17g", series.times_fs[i]);
    for (int k = 2; k <= series.dim; ++k) {
      *out << ',' << format_double("%.17g", series.e(static_cast<Eigen::Index>(i), k - 2));
    }
    *out << ',' << format_double("%.17g", series.purity[i]) << ','
         << format_double("%.17g", series.trace_error[i]) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

ordered_json report_json(const wdeloc::VerificationReport& report) {
  ordered_json doc;
  doc["check"] = report.check_name;
  doc["instances"] = report.instances;
  doc["max_violation"] = report.max_violation;
  doc["tolerance"] = report.tolerance;
  doc["worst_case"] = report.worst_case;
  doc["passed"] = report.passed;
  return doc;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, long budget,
               int threads) {
  const std::vector<std::pair<int, int>> pairs = {{3, 3}, {5, 3}, {6, 3},
                                                  {6, 4}, {6, 5}, {6, 6}};
  std::vector<wdeloc::VerificationReport> reports;

  if (suite == "weights" || suite == "all") {
    reports.push_back(wdeloc::weight_consistency_check(
        {{3, 3}, {4, 3}, {5, 3}, {6, 3}, {6, 4}, {6, 5}, {6, 6}, {7, 3}, {7, 4}, {8, 3}}));
  }
  if (suite == "overlap" || suite == "all") {
    for (int k = 3; k <= 6; ++k) {
      for (int m = 2; m <= k - 1; ++m) {
        reports.push_back(
            wdeloc::overlap_inequality_check(k, m, 10000, wdeloc::mix_seed(seed, k * 16 + m)));
      }
    }
  }
  if (suite == "reference" || suite == "all") {
    reports.push_back(
        wdeloc::reference_dominance_check(pairs, 10, budget, seed, threads));
  }
  if (reports.empty()) {
    throw wdeloc::Error(wdeloc::ErrorKind::MalformedInput,
                        "--suite must be reference|overlap|weights|all");
  }

  ordered_json doc = ordered_json::array();
  bool all_passed = true;
  for (const auto& report : reports) {
    doc.push_back(report_json(report));
    all_passed = all_passed && report.passed;
    if (!report.passed) {
      std::cerr << "check failed: " << report.check_name
                << " max_violation=" << report.max_violation
                << " worst_case=" << report.worst_case << "\n";
    }
  }
  std::cout << doc.dump(2) << "\n";
  return all_passed ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analytic k-partite delocalization measures for W-like states"};
  app.require_subcommand(1);

  // measure
  auto* measure = app.add_subcommand("measure", "profile a state file");
  std::string state_path;
  int k_max = 0;
  measure->add_option("state", state_path, "state JSON file")->required();
  measure->add_option("--k-max", k_max, "largest k to report");

  // scatter
  auto* scatter = app.add_subcommand("scatter", "sample a (purity, tau_k) cloud");
  ScatterArgs scatter_args;
  scatter->add_option("--n", scatter_args.n, "number of modes")->required();
  scatter->add_option("--k", scatter_args.k, "measure order")->required();
  scatter->add_option("--kind", scatter_args.kind,
                      "pure | mixed[:rank] | diagonal | producible:block[,comps]")
      ->required();
  scatter->add_option("--samples", scatter_args.samples, "sample count")->required();
  scatter->add_option("--seed", scatter_args.seed, "RNG seed");
  scatter->add_option("--out", scatter_args.out, "output file (default stdout)");
  scatter->add_option("--format", scatter_args.format, "csv | bin");
  scatter->add_option("--threads", scatter_args.threads, "worker threads");

  // border
  auto* border = app.add_subcommand("border", "emit the analytic border curve");
  BorderArgs border_args;
  border->add_option("--n", border_args.n, "number of modes")->required();
  border->add_option("--k", border_args.k, "measure order")->required();
  border->add_option("--grid", border_args.grid, "grid points");
  border->add_flag("--fit", border_args.fit, "fit the border from samples");
  border->add_option("--samples", border_args.samples, "samples for --fit");
  border->add_option("--seed", border_args.seed, "RNG seed for --fit");
  border->add_option("--out", border_args.out, "output file (default stdout)");
  border->add_option("--threads", border_args.threads, "worker threads");

  // evolve
  auto* evolve = app.add_subcommand("evolve", "propagate the master equation");
  std::string config_path, evolve_out;
  evolve->add_option("--config", config_path, "config JSON")->required();
  evolve->add_option("--out", evolve_out, "output file (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "run the verification oracles");
  std::string suite = "all";
  std::uint64_t verify_seed = 20250811;
  long budget = 100000;
  int verify_threads = 0;
  verify->add_option("--suite", suite, "reference | overlap | weights | all");
  verify->add_option("--seed", verify_seed, "RNG seed");
  verify->add_option("--budget", budget, "search budget per purity point");
  verify->add_option("--threads", verify_threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*measure) return cmd_measure(state_path, k_max);
    if (*scatter) return cmd_scatter(scatter_args);
    if (*border) return cmd_border(border_args);
    if (*evolve) return cmd_evolve(config_path, evolve_out);
    if (*verify)
      return cmd_verify(suite, verify_seed, budget, thread_count(verify_threads));
  } catch (const wdeloc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == wdeloc::ErrorKind::PositivityViolation) {
      std::cerr << "hint: reduce dt or increase stride for finer integration\n";
      return kExitNumerical;
    }
    return wdeloc::is_state_invariant(e.kind()) ? kExitInvariant : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
