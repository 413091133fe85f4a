#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "lamperti/generators.hpp"
#include "lamperti/io.hpp"

using namespace lamperti;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir()
      : path(fs::temp_directory_path() /
             ("lamperti_io_" +
              std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()) + "_" +
              std::to_string(counter()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter() {
    static int c = 0;
    return c++;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("sample path CSV round trip is bit exact", "[io]") {
  TempDir tmp;
  const auto x = brownian(TimeGrid::uniform(0.0, 1.0, 0.01), 55);
  const auto file = tmp.path / "path.csv";
  write_csv(x, file);

  const auto first_line = slurp(file).substr(0, 8);
  REQUIRE(first_line == "t,value\n");

  const auto back = read_sample_path_csv(file);
  REQUIRE(back.values == x.values);
  REQUIRE(back.grid.points() == x.grid.points());
  REQUIRE(back.grid.kind() == GridKind::uniform);
}

TEST_CASE("discrete series CSV round trip", "[io]") {
  TempDir tmp;
  const auto s = pareto_counterexample(ParetoSpec(0.5, 16), 9);
  const auto file = tmp.path / "series.csv";
  write_csv(s, file);
  REQUIRE(slurp(file).substr(0, 8) == "n,value\n");
  const auto back = read_discrete_series_csv(file);
  REQUIRE(back.start_index == s.start_index);
  REQUIRE(back.values == s.values);
}

TEST_CASE("CSV readers reject malformed input", "[io]") {
  TempDir tmp;
  const auto file = tmp.path / "bad.csv";
  {
    std::ofstream out(file);
    out << "wrong,header\n0,1\n1,2\n";
  }
  REQUIRE_THROWS_AS(read_sample_path_csv(file), std::invalid_argument);
  REQUIRE_THROWS(read_sample_path_csv(tmp.path / "missing.csv"));
}

TEST_CASE("ensemble manifest round trip preserves seed lineage and values", "[io]") {
  TempDir tmp;
  const auto ens = brownian_ensemble(TimeGrid::uniform(0.0, 1.0, 0.05), 4, 123, 1);
  const auto manifest = write_ensemble(ens, tmp.path, nlohmann::json{{"kind", "bm"}});
  REQUIRE(fs::exists(manifest));
  REQUIRE(fs::exists(tmp.path / "path_00003.csv"));

  const auto loaded = read_ensemble(manifest);
  REQUIRE(loaded.ensemble.seed == 123);
  REQUIRE(loaded.ensemble.stream_ids == ens.stream_ids);
  REQUIRE(loaded.ensemble.values == ens.values);
  REQUIRE(loaded.manifest.at("spec").at("kind") == "bm");
  REQUIRE(loaded.manifest.at("tool_version") == std::string(library_version));
  // reading by directory works too
  REQUIRE(read_ensemble(tmp.path).ensemble.values == ens.values);
}

TEST_CASE("discrete ensembles carry the n,value header", "[io]") {
  TempDir tmp;
  Ensemble ens{TimeGrid::uniform_points(-2.0, 1.0, 5),
               {{1.0, 2.0, 3.0, 4.0, 5.0}, {2.0, 3.0, 4.0, 5.0, 6.0}},
               7,
               {0, 1}};
  write_ensemble(ens, tmp.path, {}, true);
  REQUIRE(slurp(tmp.path / "path_00000.csv").substr(0, 8) == "n,value\n");
  const auto loaded = read_ensemble(tmp.path);
  REQUIRE(loaded.discrete_index);
  REQUIRE(loaded.ensemble.values == ens.values);
}

TEST_CASE("grid JSON descriptors reconstruct each kind", "[io]") {
  for (const auto& g :
       {TimeGrid::uniform(0.0, 1.0, 0.1), TimeGrid::geometric(1.0, 16.0, 2.0),
        TimeGrid::from_points({0.0, 0.3, 0.35, 2.0})}) {
    const auto j = to_json(g);
    const auto back = grid_from_json(j);
    REQUIRE(back.kind() == g.kind());
    REQUIRE(back.size() == g.size());
    REQUIRE(back.points() == g.points());
  }
}

TEST_CASE("test reports serialize with all fields", "[io]") {
  TestReport r;
  r.name = "demo";
  r.statistic = 0.25;
  r.threshold = 0.5;
  r.pass = true;
  r.n_samples = {100, 200};
  r.details = "check";
  const auto j = to_json(r);
  REQUIRE(j.at("name") == "demo");
  REQUIRE(j.at("statistic") == 0.25);
  REQUIRE(j.at("threshold") == 0.5);
  REQUIRE(j.at("pass") == true);
  REQUIRE(j.at("n_samples") == std::vector<std::size_t>{100, 200});
  REQUIRE(j.at("details") == "check");
}
