#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smoothmc/estimator.hpp"
#include "smoothmc/experiments.hpp"
#include "smoothmc/io.hpp"
#include "smoothmc/manifold.hpp"
#include "smoothmc/matrix.hpp"
#include "smoothmc/packing.hpp"
#include "smoothmc/rng.hpp"
#include "smoothmc/sampling.hpp"

using namespace smoothmc;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case, removed on destruction.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("smoothmc_io_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("format_double emits shortest exact decimals and round-trips") {
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(-3.25) == "-3.25");
  CHECK(io::format_double(0.1) == "0.1");
  Rng rng(606);
  for (int i = 0; i < 5000; ++i) {
    const double v = (rng.next_uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.next_below(40)) - 20.0);
    const std::string s = io::format_double(v);
    CHECK(io::parse_double(s) == v);
  }
  CHECK_THROWS_AS(io::parse_double("1.5x"), std::runtime_error);
  CHECK_THROWS_AS(io::parse_double(""), std::runtime_error);
  CHECK_THROWS_AS(io::parse_double("abc"), std::runtime_error);
}

TEST_CASE("meta_path_for rewrites the csv suffix") {
  CHECK(io::meta_path_for("dir/obs.csv") == "dir/obs.meta.json");
  CHECK(io::meta_path_for("obs.csv") == "obs.meta.json");
}

TEST_CASE("observations round-trip bitwise through csv plus sidecar") {
  TempDir dir;
  Rng rng(2001);
  auto [m, spec] = generate_matrix(9, 6, 1, 1, 6, rng);
  (void)spec;
  const auto masks = sample_masks(9, 6, 30, SamplingMode::with_replacement, rng);
  const ObservationSet obs = observe(m, masks, 0.7, rng);

  const std::string csv = dir.file("obs.csv");
  const std::string meta = io::meta_path_for(csv);
  io::save_observations(obs, csv, meta);

  const std::string text = slurp(csv);
  CHECK(text.rfind("row,col,y\n", 0) == 0);

  const ObservationSet back = io::load_observations(csv, meta);
  CHECK(back.n == obs.n);
  CHECK(back.p == obs.p);
  CHECK(back.mode == obs.mode);
  CHECK(back.noise_sd == obs.noise_sd);
  CHECK(back.seed == obs.seed);
  REQUIRE(back.samples.size() == obs.samples.size());
  for (std::size_t t = 0; t < obs.samples.size(); ++t) {
    CHECK(back.samples[t].index == obs.samples[t].index);
    CHECK(back.samples[t].y == obs.samples[t].y);  // bitwise
  }

  // Sidecar is well-formed JSON carrying the declared fields.
  const nlohmann::json j = nlohmann::json::parse(slurp(meta));
  CHECK(j.at("n").get<std::int64_t>() == 9);
  CHECK(j.at("p").get<std::int64_t>() == 6);
  CHECK(j.at("N").get<std::int64_t>() == 30);
  CHECK(j.at("mode").get<std::string>() == "with_replacement");
  CHECK(j.at("sigma").get<double>() == 0.7);
}

TEST_CASE("loading observations validates consistency") {
  TempDir dir;
  ObservationSet obs;
  obs.n = 2;
  obs.p = 2;
  obs.mode = SamplingMode::with_replacement;
  obs.samples = {{{0, 0}, 1.0}, {{1, 1}, -2.0}};
  const std::string csv = dir.file("obs.csv");
  const std::string meta = io::meta_path_for(csv);
  io::save_observations(obs, csv, meta);

  // Truncate the csv: the declared N no longer matches.
  io::save_text("row,col,y\n0,0,1\n", csv);
  CHECK_THROWS_AS(io::load_observations(csv, meta), std::runtime_error);

  CHECK_THROWS_AS(io::load_observations(dir.file("missing.csv"), meta), std::runtime_error);
}

TEST_CASE("matrices round-trip bitwise through headerless csv") {
  TempDir dir;
  Rng rng(404);
  Matrix m(5, 3);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) m(i, j) = rng.next_gaussian() * 1e-3;
  }
  const std::string path = dir.file("m.csv");
  io::save_matrix(m, path);
  const Matrix back = io::load_matrix(path);
  REQUIRE(back.rows() == 5);
  REQUIRE(back.cols() == 3);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

  io::save_text("1,2\n3\n", path);  // ragged rows
  CHECK_THROWS_AS(io::load_matrix(path), std::runtime_error);
}

TEST_CASE("embedding metadata stores generator parameters only") {
  TempDir dir;
  Rng rng(31337);
  auto [m, spec] = generate_matrix(8, 4, 2, 1, 6, rng);
  (void)m;
  const std::string path = dir.file("embedding.json");
  io::save_embedding_meta(spec, path);
  const nlohmann::json j = nlohmann::json::parse(slurp(path));
  CHECK(j.at("L").get<int>() == 2);
  CHECK(j.at("K").get<int>() == 1);
  CHECK(j.at("num_basis").get<int>() == 6);
  CHECK(j.at("gamma").get<double>() == spec.gamma);
  CHECK(j.at("theta_mode").get<std::string>() == "uniform");
  CHECK_FALSE(j.contains("coefficients"));
  CHECK_FALSE(j.contains("theta"));
}

TEST_CASE("completion result json carries the spectrum and optional mse") {
  TempDir dir;
  Rng rng(55);
  auto [m, spec] = generate_matrix(10, 8, 1, 1, 6, rng);
  (void)spec;
  const auto masks = sample_masks(10, 8, 60, SamplingMode::with_replacement, rng);
  const ObservationSet obs = observe(m, masks, 0.1, rng);
  const CompletionResult res = complete(obs, 0.05);

  const std::string with_mse = dir.file("result.json");
  io::save_completion_result(res, 0.125, with_mse);
  nlohmann::json j = nlohmann::json::parse(slurp(with_mse));
  CHECK(j.at("lambda").get<double>() == 0.05);
  CHECK(j.at("mse").get<double>() == 0.125);
  CHECK(j.at("effective_rank").get<std::int64_t>() == res.effective_rank);
  REQUIRE(j.at("spectrum").size() == static_cast<std::size_t>(res.spectrum.size()));
  for (Eigen::Index k = 0; k < res.spectrum.size(); ++k) {
    CHECK(j.at("spectrum")[static_cast<std::size_t>(k)].get<double>() == res.spectrum(k));
  }

  const std::string without_mse = dir.file("result2.json");
  io::save_completion_result(res, std::nullopt, without_mse);
  j = nlohmann::json::parse(slurp(without_mse));
  CHECK_FALSE(j.contains("mse"));
}

TEST_CASE("rate results csv and summary json match the in-memory result") {
  TempDir dir;
  RateExperimentConfig config;
  config.sizes = {12, 24};
  config.L_values = {1, 2};
  config.replicates = 2;
  config.num_basis = 6;
  config.sigma = 0.2;
  config.seed = 777;
  const RateResult result = run_rate_experiment(config);

  const std::string csv = dir.file("rate.csv");
  io::save_rate_results_csv(result, csv);
  std::istringstream lines(slurp(csv));
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "L,n,replicate,lambda,mse");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    const RateCell& cell = result.cells[rows];
    std::ostringstream expected;
    expected << cell.L << "," << cell.n << "," << cell.replicate << ","
             << io::format_double(cell.lambda) << "," << io::format_double(cell.mse);
    CHECK(line == expected.str());
    ++rows;
  }
  CHECK(rows == result.cells.size());

  const std::string summary = dir.file("summary.json");
  io::save_rate_summary_json(result, summary);
  const nlohmann::json j = nlohmann::json::parse(slurp(summary));
  for (const auto& [L, s] : result.per_L) {
    const nlohmann::json& entry = j.at("per_L").at(std::to_string(L));
    CHECK(entry.at("theoretical_slope").get<double>() == s.theoretical_slope);
    CHECK(entry.at("slope").get<double>() == s.slope);
    CHECK(entry.at("ci_lo").get<double>() == s.ci_lo);
    CHECK(entry.at("ci_hi").get<double>() == s.ci_hi);
  }
}

TEST_CASE("delta scaling csv and summary carry the rows and fit") {
  TempDir dir;
  const DeltaScalingResult result = run_delta_scaling(12, 12, {72, 288}, 1.0, 5, Rng(9));
  const std::string csv = dir.file("delta.csv");
  io::save_delta_scaling_csv(result, csv);
  std::istringstream lines(slurp(csv));
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "N,median_delta_op");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    std::ostringstream expected;
    expected << result.rows[rows].num_samples << ","
             << io::format_double(result.rows[rows].median_delta_op);
    CHECK(line == expected.str());
    ++rows;
  }
  CHECK(rows == result.rows.size());

  const nlohmann::json j = nlohmann::json::parse(io::delta_scaling_summary_json(result));
  CHECK(j.at("slope").get<double>() == result.fit.slope);
  CHECK(j.at("intercept").get<double>() == result.fit.intercept);
  CHECK(j.at("rows").size() == result.rows.size());
}

TEST_CASE("packing certificate json lists named pass verdicts") {
  Rng rng(441);
  const PackingSet packing = build_packing(64, 8, 4, SmoothnessClass{1, 1, 1.0}, 4, rng);
  const PackingCertificate cert = certify_packing(packing, 512, 1.0);
  const nlohmann::json j = nlohmann::json::parse(io::packing_certificate_json(cert));
  CHECK(j.at("b").get<std::int64_t>() == 4);
  CHECK(j.at("count").get<int>() == 4);
  CHECK(j.at("min_separation").get<double>() == cert.min_separation);
  CHECK(j.at("bound").get<double>() == cert.bound);
  CHECK(j.at("c_L").get<double>() == cert.c_L);
  REQUIRE(j.at("kl_matrix").size() == 4);
  REQUIRE(j.at("kl_matrix")[0].size() == 4);
  for (const auto& [name, ok] : cert.checks) {
    CHECK(j.at("checks").at(name).get<std::string>() == (ok ? "pass" : "fail"));
  }
}

TEST_CASE("jstar table writes the pinned header and rows") {
  TempDir dir;
  const std::string path = dir.file("jstar.csv");
  io::save_jstar_table({{0.5, 4}, {0.25, 8}}, path);
  CHECK(slurp(path) == "epsilon,j_star\n0.5,4\n0.25,8\n");
}

TEST_CASE("rate config json parses every field and rejects omissions") {
  const std::string text = R"({
    "sizes": [50, 100],
    "L_values": [1, 3],
    "K": 1,
    "nu": 0.3,
    "sigma": 1.0,
    "replicates": 4,
    "num_basis": 100,
    "lambda_grid_spec": {"min_factor": 1e-3, "max_factor": 10.0, "count": 30},
    "seed": 11,
    "sampling_mode": "without_replacement"
  })";
  const RateExperimentConfig config = io::rate_config_from_json(text);
  CHECK(config.sizes == std::vector<std::int64_t>{50, 100});
  CHECK(config.L_values == std::vector<int>{1, 3});
  CHECK(config.K == 1);
  CHECK(config.nu == 0.3);
  CHECK(config.sigma == 1.0);
  CHECK(config.replicates == 4);
  CHECK(config.num_basis == 100);
  CHECK(config.lambda_grid_spec.count == 30);
  CHECK(config.seed == 11);
  CHECK(config.sampling_mode == SamplingMode::without_replacement);

  CHECK_THROWS_AS(io::rate_config_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(io::rate_config_from_json("{}"), std::invalid_argument);

  // Drop one required field at a time.
  const nlohmann::json full = nlohmann::json::parse(text);
  for (const auto& [key, value] : full.items()) {
    (void)value;
    nlohmann::json clipped = full;
    clipped.erase(key);
    CHECK_THROWS_AS(io::rate_config_from_json(clipped.dump()), std::invalid_argument);
  }

  // Semantic validation still applies after parsing.
  nlohmann::json bad = full;
  bad["nu"] = 1.5;
  CHECK_THROWS_AS(io::rate_config_from_json(bad.dump()), std::invalid_argument);
}

TEST_CASE("save_text writes verbatim bytes and errors on bad paths") {
  TempDir dir;
  const std::string path = dir.file("note.txt");
  io::save_text("alpha\nbeta", path);
  CHECK(slurp(path) == "alpha\nbeta");
  CHECK_THROWS_AS(io::save_text("x", dir.file("no_such_dir/file.txt")), std::runtime_error);
}

}  // TEST_SUITE
