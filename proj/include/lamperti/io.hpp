#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lamperti/sample_path.hpp"
#include "lamperti/stats.hpp"

namespace lamperti {

inline constexpr std::string_view library_version = "0.1.0";

namespace detail {

/// 17 significant digits: enough for doubles to round-trip exactly.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open for reading: " + file.string());
  return in;
}

inline std::vector<std::pair<double, double>> read_two_column_csv(
    const std::filesystem::path& file, const std::string& expected_header) {
  auto in = open_in(file);
  std::string line;
  if (!std::getline(in, line) || line != expected_header)
    throw std::invalid_argument(file.string() + ": expected header '" + expected_header + "'");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument(file.string() + ": malformed row '" + line + "'");
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  if (rows.size() < 2) throw std::invalid_argument(file.string() + ": fewer than 2 rows");
  return rows;
}

}  // namespace detail

inline void write_csv(const SamplePath& path, const std::filesystem::path& file) {
  auto out = detail::open_out(file);
  out << "t,value\n";
  for (std::size_t i = 0; i < path.size(); ++i)
    out << detail::format_double(path.grid[i]) << ',' << detail::format_double(path.values[i])
        << '\n';
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

inline SamplePath read_sample_path_csv(const std::filesystem::path& file) {
  const auto rows = detail::read_two_column_csv(file, "t,value");
  std::vector<double> t, v;
  t.reserve(rows.size());
  v.reserve(rows.size());
  for (const auto& [a, b] : rows) {
    t.push_back(a);
    v.push_back(b);
  }
  return SamplePath(TimeGrid::from_points(std::move(t)), std::move(v));
}

inline void write_csv(const DiscreteSeries& series, const std::filesystem::path& file) {
  auto out = detail::open_out(file);
  out << "n,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << (series.start_index + static_cast<long>(i)) << ','
        << detail::format_double(series.values[i]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

inline DiscreteSeries read_discrete_series_csv(const std::filesystem::path& file) {
  const auto rows = detail::read_two_column_csv(file, "n,value");
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& [n, val] : rows) v.push_back(val);
  return DiscreteSeries(static_cast<long>(std::llround(rows.front().first)), std::move(v));
}

inline nlohmann::json to_json(const TimeGrid& grid) {
  nlohmann::json j;
  j["kind"] = to_string(grid.kind());
  j["n"] = grid.size();
  j["start"] = grid.front();
  j["stop"] = grid.back();
  switch (grid.kind()) {
    case GridKind::uniform: j["step"] = grid.step(); break;
    case GridKind::geometric: j["ratio"] = grid.ratio(); break;
    case GridKind::explicit_points: j["points"] = grid.points(); break;
  }
  return j;
}

inline TimeGrid grid_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind");
  if (kind == "uniform")
    return TimeGrid::uniform_points(j.at("start"), j.at("step"), j.at("n"));
  if (kind == "geometric")
    return TimeGrid::geometric_points(j.at("start"), j.at("ratio"), j.at("n"));
  return TimeGrid::from_points(j.at("points").get<std::vector<double>>());
}

inline nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  j["pass"] = r.pass;
  j["n_samples"] = r.n_samples;
  j["details"] = r.details;
  return j;
}

/// Writes per-path CSVs plus a manifest.json carrying the seed lineage, the
/// grid and whatever provenance the caller supplies under "spec".
inline std::filesystem::path write_ensemble(const Ensemble& ens, const std::filesystem::path& dir,
                                            const nlohmann::json& spec = nlohmann::json::object(),
                                            bool discrete_index = false) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["tool"] = "lamperti";
  manifest["tool_version"] = std::string(library_version);
  manifest["seed"] = ens.seed;
  manifest["stream_ids"] = ens.stream_ids;
  manifest["grid"] = to_json(ens.grid);
  manifest["discrete_index"] = discrete_index;
  manifest["spec"] = spec;
  std::vector<std::string> files;
  files.reserve(ens.n_paths());
  for (std::size_t i = 0; i < ens.n_paths(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "path_%05zu.csv", i);
    files.emplace_back(name);
    if (discrete_index) {
      DiscreteSeries s(static_cast<long>(std::llround(ens.grid.front())), ens.values[i]);
      write_csv(s, dir / name);
    } else {
      write_csv(ens.path(i), dir / name);
    }
  }
  manifest["paths"] = files;
  const auto mfile = dir / "manifest.json";
  auto out = detail::open_out(mfile);
  out << manifest.dump(2) << '\n';
  return mfile;
}

struct LoadedEnsemble {
  Ensemble ensemble;
  nlohmann::json manifest;
  bool discrete_index = false;
};

/// Accepts either the manifest file or the directory containing it.
inline LoadedEnsemble read_ensemble(const std::filesystem::path& where) {
  const auto mfile = std::filesystem::is_directory(where) ? where / "manifest.json" : where;
  auto in = detail::open_in(mfile);
  nlohmann::json manifest = nlohmann::json::parse(in);
  const auto dir = mfile.parent_path();

  LoadedEnsemble out{Ensemble{grid_from_json(manifest.at("grid")), {}, manifest.at("seed"), {}},
                     manifest, manifest.value("discrete_index", false)};
  out.ensemble.stream_ids = manifest.at("stream_ids").get<std::vector<std::uint64_t>>();
  const auto files = manifest.at("paths").get<std::vector<std::string>>();
  if (files.empty()) throw std::invalid_argument(mfile.string() + ": manifest lists no paths");
  out.ensemble.values.reserve(files.size());
  const std::string header = out.discrete_index ? "n,value" : "t,value";
  for (const auto& f : files) {
    const auto rows = detail::read_two_column_csv(dir / f, header);
    if (rows.size() != out.ensemble.grid.size())
      throw std::invalid_argument(f + ": row count does not match the manifest grid");
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& [t, x] : rows) v.push_back(x);
    out.ensemble.values.push_back(std::move(v));
  }
  return out;
}

}  // namespace lamperti
