#include "s2p/datasets.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "s2p/metrics.hpp"

namespace s2p {

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset: " + path);

  Dataset ds;
  {
    std::stringstream header(line);
    std::string col;
    while (std::getline(header, col, ',')) ds.feature_names.push_back(col);
  }
  require(ds.feature_names.size() >= 2, "dataset needs at least one feature and a label");
  if (ds.feature_names.back() != "label")
    throw std::runtime_error("dataset final column must be `label`: " + path);
  ds.feature_names.pop_back();

  std::vector<double> values;
  std::size_t rows = 0;
  const std::size_t cols = ds.feature_names.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t got = 0;
    while (std::getline(ss, cell, ',')) {
      ++got;
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("dataset parse error at row " + std::to_string(rows + 2) +
                                 ": `" + cell + "`");
      }
    }
    if (got != cols + 1)
      throw std::runtime_error("dataset row " + std::to_string(rows + 2) + " has " +
                               std::to_string(got) + " cells, expected " +
                               std::to_string(cols + 1));
    ++rows;
  }
  require(rows >= 1, "dataset has no data rows");

  ds.X = Matrix(rows, cols);
  ds.y.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) ds.X(i, j) = values[i * (cols + 1) + j];
    double label = values[i * (cols + 1) + cols];
    if (label != 0.0 && label != 1.0)
      throw std::runtime_error("dataset label not in {0,1} at row " + std::to_string(i + 2));
    ds.y[i] = label;
  }
  ds.X.require_finite("dataset features");
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  for (const std::string& name : ds.feature_names) out << name << ',';
  out << "label\n";
  out.precision(17);
  for (std::size_t i = 0; i < ds.X.rows(); ++i) {
    for (std::size_t j = 0; j < ds.X.cols(); ++j) out << ds.X(i, j) << ',';
    out << ds.y[i] << '\n';
  }
}

Dataset synth_logistic(std::size_t n, std::size_t d, uint64_t seed, double sharpness,
                       double margin) {
  require(n >= 1 && d >= 1, "synth_logistic: empty shape");
  SeededRng rng(seed);
  Vector w(d);
  for (double& x : w) x = rng.uniform(-3.0, 3.0);
  double bias = -0.5 * [&] {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
  }();

  Dataset ds;
  ds.X = Matrix(n, d);
  ds.y.resize(n);
  for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    for (int attempt = 0;; ++attempt) {
      double logit = bias;
      for (std::size_t j = 0; j < d; ++j) {
        ds.X(i, j) = rng.unit();
        logit += ds.X(i, j) * w[j];
      }
      if (std::fabs(logit) >= margin || attempt > 200) {
        ds.y[i] = rng.unit() < plain_sigmoid(sharpness * logit) ? 1.0 : 0.0;
        break;
      }
    }
  }
  return ds;
}

void min_max_scale(Matrix& X) {
  for (std::size_t j = 0; j < X.cols(); ++j) {
    double lo = X(0, j), hi = X(0, j);
    for (std::size_t i = 1; i < X.rows(); ++i) {
      lo = std::min(lo, X(i, j));
      hi = std::max(hi, X(i, j));
    }
    double span = hi - lo;
    for (std::size_t i = 0; i < X.rows(); ++i)
      X(i, j) = span > 0 ? (X(i, j) - lo) / span : 0.0;
  }
}

}  // namespace s2p
