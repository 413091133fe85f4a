// Command-line front end: generate ensembles, apply the Lamperti transform,
// solve/extract Langevin representations, and run the verification suites.
// Exit codes: 0 success, 2 usage/validation error, 3 I/O error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lamperti/lamperti.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_io = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path default_out_dir() {
  if (const char* env = std::getenv("LAMPERTI_OUT_DIR")) return env;
  return "out";
}

/// Grid flag syntax: "start:stop:step" (uniform) or "geo:start:stop:ratio".
lamperti::TimeGrid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto colon = text.find(':', pos);
    parts.push_back(text.substr(pos, colon == std::string::npos ? colon : colon - pos));
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  try {
    if (parts.size() == 3)
      return lamperti::TimeGrid::uniform(std::stod(parts[0]), std::stod(parts[1]),
                                         std::stod(parts[2]));
    if (parts.size() == 4 && parts[0] == "geo")
      return lamperti::TimeGrid::geometric(std::stod(parts[1]), std::stod(parts[2]),
                                           std::stod(parts[3]));
  } catch (const std::invalid_argument&) {
    throw UsageError("bad grid specification: " + text);
  }
  throw UsageError("grid must be start:stop:step or geo:start:stop:ratio, got: " + text);
}

json grid_option_json(const std::string& text) { return text; }

lamperti::LoadedEnsemble load_or_usage(const fs::path& in) {
  if (!fs::exists(in)) throw IoError("input not found: " + in.string());
  return lamperti::read_ensemble(in);
}

void write_json(const json& j, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open for writing: " + file.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + file.string());
}

struct GenerateArgs {
  std::string kind;
  std::string grid_text;
  std::size_t paths = 1;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double hurst = 0.5;
  double theta = 1.0;
  double alpha = 0.5;
  double tol = 1e-6;
  std::size_t length = 256;   // discrete kinds
  std::size_t burn_in = 500;  // arma
  double constant = 0.0;
  double noise_sd = 1.0;
  std::vector<double> ar, ma;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  using namespace lamperti;
  const fs::path dir = a.out.empty() ? default_out_dir() : fs::path(a.out);
  json spec{{"command", "generate"}, {"kind", a.kind}};

  Ensemble ens{TimeGrid::uniform_points(0.0, 1.0, 2), {}, a.seed, {}};
  bool discrete = false;

  if (a.kind == "bm" || a.kind == "fbm" || a.kind == "bm-lamperti-noise" ||
      a.kind == "inv-lamperti-fbm" || a.kind == "fou1" || a.kind == "fou2") {
    if (a.grid_text.empty()) throw UsageError(a.kind + " requires --grid");
    const TimeGrid grid = parse_grid(a.grid_text);
    spec["grid_flag"] = a.grid_text;
    if (a.kind == "bm") {
      ens = brownian_ensemble(grid, a.paths, a.seed, a.threads);
    } else if (a.kind == "fbm") {
      spec["hurst"] = a.hurst;
      ens = fbm_ensemble(FbmSpec(Hurst(a.hurst), grid), a.paths, a.seed, a.threads);
    } else if (a.kind == "bm-lamperti-noise") {
      spec["theta"] = a.theta;
      ens = generate_ensemble(
          grid, a.paths, a.seed,
          [&](const TimeGrid& g, RngStream& rng) {
            return sample_bm_lamperti_noise(a.theta, g, rng).values;
          },
          a.threads);
    } else if (a.kind == "inv-lamperti-fbm") {
      spec["hurst"] = a.hurst;
      InverseLampertiFbmSampler sampler(Hurst(a.hurst), grid);
      ens = generate_ensemble(
          grid, a.paths, a.seed,
          [&](const TimeGrid&, RngStream& rng) { return sampler.sample(rng); }, a.threads);
    } else {
      spec["hurst"] = a.hurst;
      spec["theta"] = a.theta;
      spec["tol"] = a.tol;
      ens = a.kind == "fou1"
                ? fou_first_kind(Hurst(a.hurst), a.theta, grid, a.paths, a.seed, a.threads, a.tol)
                : fou_second_kind(Hurst(a.hurst), a.theta, grid, a.paths, a.seed, a.threads, a.tol);
    }
  } else if (a.kind == "pareto") {
    discrete = true;
    spec["alpha"] = a.alpha;
    spec["n"] = a.length;
    const ParetoSpec ps(a.alpha, a.length);
    ens.grid = TimeGrid::uniform_points(-static_cast<double>(a.length), 1.0, 2 * a.length + 1);
    ens.values.resize(a.paths);
    ens.stream_ids.resize(a.paths);
    for (std::size_t i = 0; i < a.paths; ++i) {
      ens.stream_ids[i] = i;
      ens.values[i] = pareto_counterexample(ps, a.seed, i).values;
    }
  } else if (a.kind == "arma" || a.kind == "ma") {
    discrete = true;
    spec["n"] = a.length;
    ens.grid = TimeGrid::uniform_points(0.0, 1.0, a.length);
    ens.values.resize(a.paths);
    ens.stream_ids.resize(a.paths);
    for (std::size_t i = 0; i < a.paths; ++i) {
      ens.stream_ids[i] = i;
      RngStream rng(a.seed, i);
      if (a.kind == "arma") {
        spec["ar"] = a.ar;
        spec["ma"] = a.ma;
        spec["constant"] = a.constant;
        spec["noise_sd"] = a.noise_sd;
        spec["burn_in"] = a.burn_in;
        ens.values[i] =
            sample_arma(ArmaSpec{a.constant, a.ar, a.ma, a.noise_sd}, a.length, a.burn_in, rng)
                .values;
      } else {
        spec["coefficients"] = a.ma;
        if (a.ma.empty()) throw UsageError("ma requires --ma-coef");
        ens.values[i] = sample_ma_truncated(a.ma, a.length, rng).values;
      }
    }
  } else {
    throw UsageError("unknown kind: " + a.kind);
  }

  spec["paths"] = a.paths;
  const auto manifest = write_ensemble(ens, dir, spec, discrete);
  std::cout << manifest.string() << '\n';
  return exit_ok;
}

int run_transform(const std::string& in, const std::string& direction, double hurst,
                  const std::string& out) {
  using namespace lamperti;
  const auto loaded = load_or_usage(in);
  if (direction != "forward" && direction != "inverse")
    throw UsageError("--direction must be forward or inverse");
  const Hurst h(hurst);
  const Ensemble result = direction == "forward" ? to_selfsimilar(loaded.ensemble, h)
                                                 : to_stationary(loaded.ensemble, h);
  json spec{{"command", "transform"},
            {"direction", direction},
            {"hurst", hurst},
            {"source", loaded.manifest.value("spec", json::object())}};
  const fs::path dir = out.empty() ? default_out_dir() : fs::path(out);
  std::cout << write_ensemble(result, dir, spec).string() << '\n';
  return exit_ok;
}

int run_solve(const std::string& in, double rate, std::optional<double> u0, bool stationary,
              double tol, const std::string& out) {
  using namespace lamperti;
  const auto loaded = load_or_usage(in);
  if (!stationary && !u0) throw UsageError("solve needs --u0 or --stationary");

  json diag = json::array();
  Ensemble result{loaded.ensemble.grid, {}, loaded.ensemble.seed, loaded.ensemble.stream_ids};
  result.values.reserve(loaded.ensemble.n_paths());
  bool first = true;
  const auto path_names = loaded.manifest.at("paths").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < loaded.ensemble.n_paths(); ++i) {
    const SamplePath noise = loaded.ensemble.path(i);
    const LangevinSolution sol = stationary ? stationary_solution(noise, rate, tol, path_names[i])
                                            : solve_forward(noise, rate, *u0, path_names[i]);
    if (first) {
      result.grid = sol.path.grid;
      first = false;
    }
    result.values.push_back(sol.path.values);
    diag.push_back(json{{"path", i},
                        {"initial", sol.initial},
                        {"converged", sol.converged},
                        {"burn_in_used", sol.burn_in_used}});
  }
  json spec{{"command", "solve"},
            {"rate", rate},
            {"stationary", stationary},
            {"tol", tol},
            {"source", loaded.manifest.value("spec", json::object())}};
  const fs::path dir = out.empty() ? default_out_dir() : fs::path(out);
  const auto manifest = write_ensemble(result, dir, spec);
  write_json(json{{"paths", diag}}, dir / "solve_diagnostics.json");
  std::cout << manifest.string() << '\n';
  return exit_ok;
}

int run_extract(const std::string& in, double rate, const std::string& out) {
  using namespace lamperti;
  const auto loaded = load_or_usage(in);
  Ensemble result{loaded.ensemble.grid, {}, loaded.ensemble.seed, loaded.ensemble.stream_ids};
  result.values.reserve(loaded.ensemble.n_paths());
  for (std::size_t i = 0; i < loaded.ensemble.n_paths(); ++i)
    result.values.push_back(extract_noise(loaded.ensemble.path(i), rate).values);
  json spec{{"command", "extract"},
            {"rate", rate},
            {"source", loaded.manifest.value("spec", json::object())}};
  const fs::path dir = out.empty() ? default_out_dir() : fs::path(out);
  std::cout << write_ensemble(result, dir, spec).string() << '\n';
  return exit_ok;
}

int run_verify(const std::string& in, double rate, bool roundtrip, bool stationarity,
               double shift, std::vector<double> lags, bool selfsim, double hurst, double scale,
               const std::string& out) {
  using namespace lamperti;
  const auto loaded = load_or_usage(in);
  const Ensemble& ens = loaded.ensemble;
  json reports = json::array();
  bool all_pass = true;

  if (roundtrip) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ens.n_paths(); ++i) {
      const SamplePath u = ens.path(i);
      const SamplePath g = extract_noise(u, rate);
      const LangevinSolution sol = solve_forward(g, rate, u.values[u.grid.index_of(0.0)]);
      double err = 0.0, scale_abs = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        err = std::max(err, std::abs(u.values[k] - sol.path.values[k]));
        scale_abs = std::max(scale_abs, std::abs(u.values[k]));
      }
      worst = std::max(worst, scale_abs > 0.0 ? err / scale_abs : err);
    }
    TestReport r;
    r.name = "roundtrip";
    r.statistic = worst;
    r.threshold = 1e-10;
    r.pass = worst <= r.threshold;
    r.n_samples = {ens.n_paths()};
    r.details = "sup-norm relative error of solve(extract(U)) vs U";
    reports.push_back(to_json(r));
    all_pass = all_pass && r.pass;
  }
  if (stationarity) {
    const TestReport r = test_stationarity(ens, lags, shift);
    reports.push_back(to_json(r));
    all_pass = all_pass && r.pass;
  }
  if (selfsim) {
    const TestReport r = test_self_similarity(ens, hurst, scale);
    reports.push_back(to_json(r));
    all_pass = all_pass && r.pass;
  }
  if (reports.empty())
    throw UsageError("verify needs at least one of --roundtrip/--stationarity/--self-similarity");

  const fs::path dir = out.empty() ? default_out_dir() : fs::path(out);
  fs::create_directories(dir);
  write_json(json{{"reports", reports}, {"pass", all_pass}}, dir / "report.json");
  std::cout << (dir / "report.json").string() << '\n';
  return all_pass ? exit_ok : 1;
}

int run_verify_noise(const std::string& in, double rate, double tol, const std::string& out) {
  using namespace lamperti;
  const auto loaded = load_or_usage(in);
  json reports = json::array();
  bool all_pass = true;
  for (std::size_t i = 0; i < loaded.ensemble.n_paths(); ++i) {
    const TestReport r = verify_gh_noise(loaded.ensemble.path(i), rate, tol);
    json rj = to_json(r);
    rj["path"] = i;
    reports.push_back(rj);
    all_pass = all_pass && r.pass;
  }
  const fs::path dir = out.empty() ? default_out_dir() : fs::path(out);
  fs::create_directories(dir);
  write_json(json{{"reports", reports}, {"pass", all_pass}}, dir / "report.json");
  std::cout << (dir / "report.json").string() << '\n';
  // a failed membership check is a result, not an error
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stationary / self-similar process toolkit"};
  app.set_version_flag("--version", std::string("lamperti ") + std::string(lamperti::library_version));
  app.set_config("--config");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cgen = app.add_subcommand("generate", "generate an ensemble of paths");
  cgen->add_option("--kind", gen.kind,
                   "bm|fbm|bm-lamperti-noise|inv-lamperti-fbm|fou1|fou2|pareto|arma|ma")
      ->required();
  cgen->add_option("--grid", gen.grid_text, "start:stop:step or geo:start:stop:ratio");
  cgen->add_option("--paths", gen.paths, "number of paths");
  cgen->add_option("--seed", gen.seed, "master seed");
  cgen->add_option("--threads", gen.threads, "worker threads");
  cgen->add_option("--hurst,--H", gen.hurst, "Hurst parameter");
  cgen->add_option("--theta", gen.theta, "mean reversion rate");
  cgen->add_option("--alpha", gen.alpha, "Pareto tail index");
  cgen->add_option("--tol", gen.tol, "stationary-solution tolerance");
  cgen->add_option("--n", gen.length, "series length (discrete kinds)");
  cgen->add_option("--burn-in", gen.burn_in, "ARMA burn-in steps");
  cgen->add_option("--constant", gen.constant, "ARMA constant");
  cgen->add_option("--noise-sd", gen.noise_sd, "ARMA innovation std dev");
  cgen->add_option("--ar", gen.ar, "AR coefficients")->delimiter(',');
  cgen->add_option("--ma-coef", gen.ma, "MA coefficients")->delimiter(',');
  cgen->add_option("--out", gen.out, "output directory");

  std::string t_in, t_dir, t_out;
  double t_hurst = 0.5;
  auto* ctr = app.add_subcommand("transform", "Lamperti transform of an ensemble");
  ctr->add_option("--in", t_in, "input manifest or directory")->required();
  ctr->add_option("--direction", t_dir, "forward|inverse")->required();
  ctr->add_option("--hurst,--H", t_hurst, "Hurst parameter")->required();
  ctr->add_option("--out", t_out, "output directory");

  std::string s_in, s_out;
  double s_rate = 1.0, s_u0 = 0.0, s_tol = 1e-6;
  bool s_stationary = false;
  auto* cs = app.add_subcommand("solve", "solve the Langevin equation driven by the input noise");
  cs->add_option("--in", s_in)->required();
  cs->add_option("--rate,--theta", s_rate, "mean reversion rate")->required();
  auto* u0opt = cs->add_option("--u0", s_u0, "initial value at t = 0");
  cs->add_flag("--stationary", s_stationary, "use the stationary initial condition");
  cs->add_option("--tol", s_tol, "truncation tolerance (stationary)");
  cs->add_option("--out", s_out);

  std::string e_in, e_out;
  double e_rate = 1.0;
  auto* ce = app.add_subcommand("extract", "extract the unique Langevin noise of each path");
  ce->add_option("--in", e_in)->required();
  ce->add_option("--rate,--theta", e_rate)->required();
  ce->add_option("--out", e_out);

  std::string v_in, v_out;
  double v_rate = 1.0, v_shift = 1.0, v_hurst = 0.5, v_scale = 4.0;
  bool v_round = false, v_stat = false, v_ss = false;
  std::vector<double> v_lags;
  auto* cv = app.add_subcommand("verify", "run verification suites on an ensemble");
  cv->add_option("--in", v_in)->required();
  cv->add_option("--rate,--theta", v_rate);
  cv->add_flag("--roundtrip", v_round, "extract/solve round-trip identity");
  cv->add_flag("--stationarity", v_stat);
  cv->add_option("--shift", v_shift);
  cv->add_option("--lags", v_lags)->delimiter(',');
  cv->add_flag("--self-similarity", v_ss);
  cv->add_option("--hurst,--H", v_hurst);
  cv->add_option("--scale", v_scale);
  cv->add_option("--out", v_out);

  std::string n_in, n_out;
  double n_rate = 1.0, n_tol = 1e-4;
  auto* cn = app.add_subcommand("verify-noise", "admissible-noise membership check");
  cn->add_option("--in", n_in)->required();
  cn->add_option("--rate,--theta", n_rate)->required();
  cn->add_option("--tol", n_tol);
  cn->add_option("--out", n_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (cgen->parsed()) return run_generate(gen);
    if (ctr->parsed()) return run_transform(t_in, t_dir, t_hurst, t_out);
    if (cs->parsed())
      return run_solve(s_in, s_rate,
                       u0opt->count() ? std::optional<double>(s_u0) : std::nullopt, s_stationary,
                       s_tol, s_out);
    if (ce->parsed()) return run_extract(e_in, e_rate, e_out);
    if (cv->parsed())
      return run_verify(v_in, v_rate, v_round, v_stat, v_shift, v_lags, v_ss, v_hurst, v_scale,
                        v_out);
    if (cn->parsed()) return run_verify_noise(n_in, n_rate, n_tol, n_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return exit_io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return exit_io;
  }
  return exit_ok;
}
