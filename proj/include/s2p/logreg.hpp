#pragma once

#include "s2p/metrics.hpp"
#include "s2p/runtime.hpp"

namespace s2p {

struct TrainConfig {
  double eta = 0.05;
  std::size_t batch_size = 32;
  std::size_t iterations = 5;
  // Declared magnitude caps used for mask scaling. They are session
  // config, not measured from the data; exceeding them only degrades the
  // masking scale match, never correctness.
  double feature_hi = 16.0;  // |[1, X]| entries
  double weight_hi = 64.0;   // |w| during training
  double logit_hi = 64.0;    // |X^ . w| per sample

  void validate(std::size_t n) const {
    require(eta >= 0.0, "TrainConfig: eta >= 0");
    require(batch_size >= 1, "TrainConfig: batch size >= 1");
    require(iterations >= 1, "TrainConfig: iterations >= 1");
    require(n >= 1, "TrainConfig: empty dataset");
  }
};

struct ModelShares {
  Vector w_a, w_b;
};

// [c | X]: the intercept column each party contributes (1 for Alice,
// 0 for Bob).
Matrix with_intercept(const Matrix& X, double first_col);

// Columns [0, split_col) stay with Alice (zeros elsewhere), the rest with
// Bob; X_a + X_b == X bit-exactly.
std::pair<Matrix, Matrix> vertical_partition(const Matrix& X, std::size_t split_col);

// Secure training over additively shared design matrices. Batches are
// taken in original row order; each batch runs hybrid multiplication for
// the logits, the sigmoid protocol, and hybrid multiplication for the
// gradient. Only Alice subtracts the (public) labels.
Vector s2plort_alice(PartyCtx& ctx, const Matrix& Xa, const Vector& y, const TrainConfig& tc,
                     std::vector<Vector>* iter_shares = nullptr);
Vector s2plort_bob(PartyCtx& ctx, const Matrix& Xb, const Vector& y, const TrainConfig& tc,
                   std::vector<Vector>* iter_shares = nullptr);

Vector s2plorp_alice(PartyCtx& ctx, const Matrix& Xa, const Vector& w_a, const TrainConfig& tc);
Vector s2plorp_bob(PartyCtx& ctx, const Matrix& Xb, const Vector& w_b, const TrainConfig& tc);

// Plaintext reference with identical batching, initialization and update
// rule; the trajectory oracle for the secure path.
Vector plain_lort(const Matrix& X, const Vector& y, const TrainConfig& tc,
                  std::vector<Vector>* iters = nullptr);
Vector plain_predict(const Matrix& X, const Vector& w);
double logistic_loss(const Matrix& X, const Vector& y, const Vector& w);

struct TrainResult {
  ModelShares model;
  SessionStats stats;
  // Reconstructible per-iteration share pairs when recording is on.
  std::vector<Vector> iter_w_a, iter_w_b;
};

TrainResult run_s2plort(const Matrix& Xa, const Matrix& Xb, const Vector& y,
                        const TrainConfig& tc, const RunOptions& opts,
                        bool record_iterations = false);
VecPairResult run_s2plorp(const Matrix& Xa, const Matrix& Xb, const ModelShares& model,
                          const TrainConfig& tc, const RunOptions& opts);

}  // namespace s2p
