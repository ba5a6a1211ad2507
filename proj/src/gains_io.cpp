#include "secest/gains_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace secest {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& path, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw std::runtime_error(path + ": field '" + field + "' must be a matrix (array of rows)");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<size_t>(i)].size()) != cols) {
      throw std::runtime_error(path + ": field '" + field + "' has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = j[static_cast<size_t>(i)][static_cast<size_t>(c)].get<double>();
    }
  }
  return m;
}

}  // namespace

void save_gains(const GainsFile& file, const std::string& path) {
  json j;
  j["index_set"] = file.gains.set.members();
  j["P"] = matrix_to_json(file.gains.P);
  j["L"] = matrix_to_json(file.gains.L);
  j["K"] = matrix_to_json(file.gains.K);
  j["nu"] = file.gains.nu;
  j["mu"] = file.gains.mu;
  j["lambda_max"] = file.lambda_max;
  j["seed"] = file.seed;
  j["system_hash"] = file.system_hash;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_gains: cannot write " + path);
  out << j.dump(2) << "\n";
}

GainsFile load_gains(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_gains: cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": not valid JSON: " + e.what());
  }
  for (const char* field : {"index_set", "P", "L", "K", "nu", "mu", "lambda_max", "seed",
                            "system_hash"}) {
    if (!j.contains(field)) {
      throw std::runtime_error(path + ": missing field '" + std::string(field) + "'");
    }
  }
  GainsFile file;
  file.gains.set = IndexSet(j["index_set"].get<std::vector<int>>());
  file.gains.P = matrix_from_json(j["P"], path, "P");
  file.gains.L = matrix_from_json(j["L"], path, "L");
  file.gains.K = matrix_from_json(j["K"], path, "K");
  file.gains.nu = j["nu"].get<double>();
  file.gains.mu = j["mu"].get<double>();
  file.lambda_max = j["lambda_max"].get<double>();
  file.seed = j["seed"].get<std::uint64_t>();
  file.system_hash = j["system_hash"].get<std::string>();

  const Matrix& P = file.gains.P;
  if (P.rows() != P.cols()) throw std::runtime_error(path + ": P must be square");
  const double asym = (P - P.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, P.cwiseAbs().maxCoeff())) {
    throw std::runtime_error(path + ": P is not symmetric");
  }
  if (file.gains.nu < 0 || file.gains.mu < 0) {
    throw std::runtime_error(path + ": nu and mu must be >= 0");
  }
  return file;
}

}  // namespace secest
