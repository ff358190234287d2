#pragma once

#include <string>

#include "s2p/matrix.hpp"
#include "s2p/rng.hpp"

namespace s2p {

// CSV datasets: header row, decimal feature columns, final column `label`
// with values in {0, 1}.
struct Dataset {
  Matrix X;
  Vector y;
  std::vector<std::string> feature_names;
};

Dataset load_csv(const std::string& path);
void save_csv(const Dataset& ds, const std::string& path);

// Draws X ~ U(0,1)^(n x d), a hidden logistic model, and Bernoulli labels
// with the given sharpness; margin > 0 redraws rows whose hidden logit is
// within the margin (more separable data).
Dataset synth_logistic(std::size_t n, std::size_t d, uint64_t seed, double sharpness = 4.0,
                       double margin = 0.0);

// Per-column min-max scaling into [0, 1] (constant columns map to 0).
void min_max_scale(Matrix& X);

}  // namespace s2p
