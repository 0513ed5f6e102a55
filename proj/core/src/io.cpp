#include "smoothmc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace smoothmc::io {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("invalid integer field: '" + s + "'");
  }
  return value;
}

std::vector<std::string> non_empty_lines(const std::string& content) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::string format_double(double v) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buffer, ptr);
}

double parse_double(const std::string& s) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("invalid numeric field: '" + s + "'");
  }
  return value;
}

std::string meta_path_for(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return csv_path.substr(0, csv_path.size() - suffix.size()) + ".meta.json";
  }
  return csv_path + ".meta.json";
}

void save_observations(const ObservationSet& obs, const std::string& csv_path,
                       const std::string& meta_path) {
  obs.validate();
  std::string csv = "row,col,y\n";
  for (const Observation& s : obs.samples) {
    csv += std::to_string(s.index.row);
    csv += ',';
    csv += std::to_string(s.index.col);
    csv += ',';
    csv += format_double(s.y);
    csv += '\n';
  }
  write_file(csv_path, csv);

  json meta;
  meta["n"] = obs.n;
  meta["p"] = obs.p;
  meta["N"] = obs.size();
  meta["mode"] = to_string(obs.mode);
  meta["sigma"] = obs.noise_sd;
  meta["seed"] = obs.seed;
  write_file(meta_path, meta.dump(2) + "\n");
}

ObservationSet load_observations(const std::string& csv_path, const std::string& meta_path) {
  const json meta = json::parse(read_file(meta_path));
  ObservationSet obs;
  obs.n = meta.at("n").get<std::int64_t>();
  obs.p = meta.at("p").get<std::int64_t>();
  obs.mode = sampling_mode_from_string(meta.at("mode").get<std::string>());
  obs.noise_sd = meta.at("sigma").get<double>();
  obs.seed = meta.at("seed").get<std::uint64_t>();
  const auto declared = meta.at("N").get<std::int64_t>();

  const std::vector<std::string> lines = non_empty_lines(read_file(csv_path));
  if (lines.empty() || lines.front() != "row,col,y") {
    throw std::runtime_error("observations csv must start with header 'row,col,y': " + csv_path);
  }
  obs.samples.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> fields = split_csv_line(lines[i]);
    if (fields.size() != 3) throw std::runtime_error("malformed observation row: " + lines[i]);
    Observation s;
    s.index.row = parse_int(fields[0]);
    s.index.col = parse_int(fields[1]);
    s.y = parse_double(fields[2]);
    obs.samples.push_back(s);
  }
  if (obs.size() != declared) {
    throw std::runtime_error("observation count does not match sidecar N: " + csv_path);
  }
  obs.validate();
  return obs;
}

void save_matrix(const Matrix& m, const std::string& csv_path) {
  if (m.size() == 0) throw std::invalid_argument("save_matrix: empty matrix");
  std::string csv;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) csv += ',';
      csv += format_double(m(i, j));
    }
    csv += '\n';
  }
  write_file(csv_path, csv);
}

Matrix load_matrix(const std::string& csv_path) {
  const std::vector<std::string> lines = non_empty_lines(read_file(csv_path));
  if (lines.empty()) throw std::runtime_error("empty matrix csv: " + csv_path);
  const std::size_t cols = split_csv_line(lines.front()).size();
  Matrix m(static_cast<Eigen::Index>(lines.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::vector<std::string> fields = split_csv_line(lines[i]);
    if (fields.size() != cols) {
      throw std::runtime_error("ragged matrix csv at line " + std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(fields[j]);
    }
  }
  return m;
}

void save_embedding_meta(const EmbeddingSpec& spec, const std::string& json_path) {
  json meta;
  meta["L"] = spec.L;
  meta["K"] = spec.K;
  meta["gamma"] = spec.gamma;
  meta["num_basis"] = spec.num_basis;
  meta["seed"] = spec.seed;
  meta["theta_mode"] = to_string(spec.theta_mode);
  write_file(json_path, meta.dump(2) + "\n");
}

void save_completion_result(const CompletionResult& result, std::optional<double> mse,
                            const std::string& json_path) {
  json doc;
  doc["lambda"] = result.lambda;
  if (mse.has_value()) doc["mse"] = *mse;
  doc["effective_rank"] = result.effective_rank;
  json spectrum = json::array();
  for (Eigen::Index j = 0; j < result.spectrum.size(); ++j) spectrum.push_back(result.spectrum(j));
  doc["spectrum"] = std::move(spectrum);
  write_file(json_path, doc.dump(2) + "\n");
}

void save_rate_results_csv(const RateResult& result, const std::string& csv_path) {
  std::string csv = "L,n,replicate,lambda,mse\n";
  for (const RateCell& cell : result.cells) {
    csv += std::to_string(cell.L);
    csv += ',';
    csv += std::to_string(cell.n);
    csv += ',';
    csv += std::to_string(cell.replicate);
    csv += ',';
    csv += format_double(cell.lambda);
    csv += ',';
    csv += format_double(cell.mse);
    csv += '\n';
  }
  write_file(csv_path, csv);
}

void save_rate_summary_json(const RateResult& result, const std::string& json_path) {
  json per_l = json::object();
  for (const auto& [L, summary] : result.per_L) {
    json entry;
    if (summary.has_slope) {
      entry["slope"] = summary.slope;
      entry["ci_lo"] = summary.ci_lo;
      entry["ci_hi"] = summary.ci_hi;
    }
    entry["theoretical_slope"] = summary.theoretical_slope;
    per_l[std::to_string(L)] = std::move(entry);
  }
  json doc;
  doc["per_L"] = std::move(per_l);
  write_file(json_path, doc.dump(2) + "\n");
}

void save_delta_scaling_csv(const DeltaScalingResult& result, const std::string& csv_path) {
  std::string csv = "N,median_delta_op\n";
  for (const DeltaScalingRow& row : result.rows) {
    csv += std::to_string(row.num_samples);
    csv += ',';
    csv += format_double(row.median_delta_op);
    csv += '\n';
  }
  write_file(csv_path, csv);
}

std::string delta_scaling_summary_json(const DeltaScalingResult& result) {
  json doc;
  doc["slope"] = result.fit.slope;
  doc["intercept"] = result.fit.intercept;
  json rows = json::array();
  for (const DeltaScalingRow& row : result.rows) {
    rows.push_back({{"N", row.num_samples}, {"median_delta_op", row.median_delta_op}});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string packing_certificate_json(const PackingCertificate& cert) {
  json doc;
  doc["b"] = cert.b;
  doc["count"] = cert.count;
  doc["min_separation"] = cert.min_separation;
  doc["bound"] = cert.bound;
  doc["c_L"] = cert.c_L;
  json kl = json::array();
  for (Eigen::Index s = 0; s < cert.kl.rows(); ++s) {
    json row = json::array();
    for (Eigen::Index t = 0; t < cert.kl.cols(); ++t) row.push_back(cert.kl(s, t));
    kl.push_back(std::move(row));
  }
  doc["kl_matrix"] = std::move(kl);
  json checks = json::object();
  for (const auto& [name, ok] : cert.checks) checks[name] = ok ? "pass" : "fail";
  doc["checks"] = std::move(checks);
  return doc.dump(2) + "\n";
}

void save_jstar_table(const std::vector<std::pair<double, std::int64_t>>& rows,
                      const std::string& csv_path) {
  std::string csv = "epsilon,j_star\n";
  for (const auto& [epsilon, count] : rows) {
    csv += format_double(epsilon);
    csv += ',';
    csv += std::to_string(count);
    csv += '\n';
  }
  write_file(csv_path, csv);
}

void save_text(const std::string& content, const std::string& path) {
  write_file(path, content);
}

RateExperimentConfig rate_config_from_json(const std::string& text) {
  RateExperimentConfig config;
  try {
    const json doc = json::parse(text);
    config.sizes = doc.at("sizes").get<std::vector<std::int64_t>>();
    config.L_values = doc.at("L_values").get<std::vector<int>>();
    config.K = doc.at("K").get<int>();
    config.nu = doc.at("nu").get<double>();
    config.sigma = doc.at("sigma").get<double>();
    config.replicates = doc.at("replicates").get<int>();
    config.num_basis = doc.at("num_basis").get<int>();
    const json& grid = doc.at("lambda_grid_spec");
    config.lambda_grid_spec.min_factor = grid.at("min_factor").get<double>();
    config.lambda_grid_spec.max_factor = grid.at("max_factor").get<double>();
    config.lambda_grid_spec.count = grid.at("count").get<int>();
    config.seed = doc.at("seed").get<std::uint64_t>();
    config.sampling_mode = sampling_mode_from_string(doc.at("sampling_mode").get<std::string>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid rate experiment config: ") + e.what());
  }
  config.validate();
  return config;
}

}  // namespace smoothmc::io
