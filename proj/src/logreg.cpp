#include "s2p/logreg.hpp"

#include <cmath>

namespace s2p {

namespace {

struct LrBands {
  MagnitudeBand feature, weight, err;
  VectorBands sigmoid;
};

LrBands lr_bands(const TrainConfig& tc) {
  LrBands b{MagnitudeBand(tc.feature_hi * 0x1.0p-20, tc.feature_hi),
            MagnitudeBand(tc.weight_hi * 0x1.0p-20, tc.weight_hi),
            MagnitudeBand(0x1.0p-20, 2.0),
            {}};
  b.sigmoid.a = MagnitudeBand(tc.logit_hi * 0x1.0p-20, tc.logit_hi);
  b.sigmoid.b = b.sigmoid.a;
  return b;
}

struct BatchSlices {
  std::size_t count = 0;
  std::vector<std::size_t> begin, size;
};

BatchSlices make_batches(std::size_t n, std::size_t batch_size) {
  BatchSlices s;
  s.count = (n + batch_size - 1) / batch_size;
  for (std::size_t i = 0; i < s.count; ++i) {
    std::size_t b = i * batch_size;
    s.begin.push_back(b);
    s.size.push_back(std::min(batch_size, n - b));
  }
  return s;
}

Matrix row_slice(const Matrix& m, std::size_t begin, std::size_t count) {
  Matrix out(count, m.cols());
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(begin + i, j);
  return out;
}

void check_labels(const Vector& y) {
  for (double v : y) require(v == 0.0 || v == 1.0, "labels must be 0/1");
}

// One gradient-descent pass over a batch, party-symmetric except for the
// label subtraction on Alice's side.
template <bool kAlice>
void secure_batch_step(PartyCtx& ctx, const Matrix& Xi, const Vector& y_batch, Vector& w,
                       const TrainConfig& tc, const LrBands& bands) {
  const std::size_t ni = Xi.rows(), d1 = Xi.cols();
  const ProtocolConfig& cfg = ctx.cfg;

  ctx.plan_invocation(plan_s2phm(cfg, ni, d1, 1, bands.feature, bands.weight));
  Vector logits;
  if constexpr (kAlice)
    logits = s2phm_alice(ctx, Xi, Matrix::column(w), bands.feature, bands.weight).as_vector();
  else
    logits = s2phm_bob(ctx, Xi, Matrix::column(w), bands.feature, bands.weight).as_vector();

  Vector yhat;
  if constexpr (kAlice)
    yhat = s2ps_alice(ctx, logits, bands.sigmoid);
  else
    yhat = s2ps_bob(ctx, logits, bands.sigmoid);

  if constexpr (kAlice)
    for (std::size_t i = 0; i < ni; ++i) yhat[i] -= y_batch[i];

  Matrix Xt = transpose(Xi);
  ctx.plan_invocation(plan_s2phm(cfg, d1, ni, 1, bands.feature, bands.err));
  Vector grad;
  if constexpr (kAlice)
    grad = s2phm_alice(ctx, Xt, Matrix::column(yhat), bands.feature, bands.err).as_vector();
  else
    grad = s2phm_bob(ctx, Xt, Matrix::column(yhat), bands.feature, bands.err).as_vector();

  double step = tc.eta / static_cast<double>(ni);
  for (std::size_t j = 0; j < d1; ++j) w[j] -= step * grad[j];
}

template <bool kAlice>
Vector secure_train(PartyCtx& ctx, const Matrix& Xpart, const Vector& y, const TrainConfig& tc,
                    std::vector<Vector>* iter_shares) {
  tc.validate(Xpart.rows());
  require(y.size() == Xpart.rows(), "s2plort: label count mismatch");
  check_labels(y);
  LrBands bands = lr_bands(tc);
  Matrix Xhat = with_intercept(Xpart, kAlice ? 1.0 : 0.0);
  BatchSlices batches = make_batches(Xhat.rows(), tc.batch_size);

  Vector w(Xhat.cols(), 0.0);
  for (std::size_t round = 0; round < tc.iterations; ++round) {
    for (std::size_t i = 0; i < batches.count; ++i) {
      Matrix Xi = row_slice(Xhat, batches.begin[i], batches.size[i]);
      Vector yi(y.begin() + static_cast<std::ptrdiff_t>(batches.begin[i]),
                y.begin() + static_cast<std::ptrdiff_t>(batches.begin[i] + batches.size[i]));
      try {
        secure_batch_step<kAlice>(ctx, Xi, yi, w, tc, bands);
      } catch (const ProtocolError& e) {
        throw ProtocolError("s2plort: abort in iteration " + std::to_string(round) +
                            ", batch " + std::to_string(i) + ": " + e.what());
      }
    }
    if (iter_shares) iter_shares->push_back(w);
  }
  return w;
}

template <bool kAlice>
Vector secure_predict(PartyCtx& ctx, const Matrix& Xpart, const Vector& w,
                      const TrainConfig& tc) {
  require(Xpart.cols() + 1 == w.size(), "s2plorp: feature count does not match model");
  LrBands bands = lr_bands(tc);
  Matrix Xhat = with_intercept(Xpart, kAlice ? 1.0 : 0.0);
  const std::size_t n = Xhat.rows(), d1 = Xhat.cols();

  ctx.plan_invocation(plan_s2phm(ctx.cfg, n, d1, 1, bands.feature, bands.weight));
  Vector logits;
  if constexpr (kAlice)
    logits = s2phm_alice(ctx, Xhat, Matrix::column(w), bands.feature, bands.weight).as_vector();
  else
    logits = s2phm_bob(ctx, Xhat, Matrix::column(w), bands.feature, bands.weight).as_vector();

  if constexpr (kAlice)
    return s2ps_alice(ctx, logits, bands.sigmoid);
  else
    return s2ps_bob(ctx, logits, bands.sigmoid);
}

}  // namespace

Matrix with_intercept(const Matrix& X, double first_col) {
  Matrix out(X.rows(), X.cols() + 1);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    out(i, 0) = first_col;
    for (std::size_t j = 0; j < X.cols(); ++j) out(i, j + 1) = X(i, j);
  }
  return out;
}

std::pair<Matrix, Matrix> vertical_partition(const Matrix& X, std::size_t split_col) {
  require(split_col <= X.cols(), "vertical_partition: split out of range");
  Matrix a(X.rows(), X.cols()), b(X.rows(), X.cols());
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < X.cols(); ++j)
      (j < split_col ? a : b)(i, j) = X(i, j);
  return {std::move(a), std::move(b)};
}

Vector s2plort_alice(PartyCtx& ctx, const Matrix& Xa, const Vector& y, const TrainConfig& tc,
                     std::vector<Vector>* iter_shares) {
  return secure_train<true>(ctx, Xa, y, tc, iter_shares);
}

Vector s2plort_bob(PartyCtx& ctx, const Matrix& Xb, const Vector& y, const TrainConfig& tc,
                   std::vector<Vector>* iter_shares) {
  return secure_train<false>(ctx, Xb, y, tc, iter_shares);
}

Vector s2plorp_alice(PartyCtx& ctx, const Matrix& Xa, const Vector& w_a, const TrainConfig& tc) {
  return secure_predict<true>(ctx, Xa, w_a, tc);
}

Vector s2plorp_bob(PartyCtx& ctx, const Matrix& Xb, const Vector& w_b, const TrainConfig& tc) {
  return secure_predict<false>(ctx, Xb, w_b, tc);
}

Vector plain_lort(const Matrix& X, const Vector& y, const TrainConfig& tc,
                  std::vector<Vector>* iters) {
  tc.validate(X.rows());
  require(y.size() == X.rows(), "plain_lort: label count mismatch");
  check_labels(y);
  Matrix Xhat = with_intercept(X, 1.0);
  BatchSlices batches = make_batches(Xhat.rows(), tc.batch_size);

  Vector w(Xhat.cols(), 0.0);
  for (std::size_t round = 0; round < tc.iterations; ++round) {
    for (std::size_t i = 0; i < batches.count; ++i) {
      std::size_t b = batches.begin[i], ni = batches.size[i];
      Vector grad(Xhat.cols(), 0.0);
      for (std::size_t r = 0; r < ni; ++r) {
        double logit = 0.0;
        for (std::size_t j = 0; j < Xhat.cols(); ++j) logit += Xhat(b + r, j) * w[j];
        double err = plain_sigmoid(logit) - y[b + r];
        for (std::size_t j = 0; j < Xhat.cols(); ++j) grad[j] += Xhat(b + r, j) * err;
      }
      double step = tc.eta / static_cast<double>(ni);
      for (std::size_t j = 0; j < Xhat.cols(); ++j) w[j] -= step * grad[j];
    }
    if (iters) iters->push_back(w);
  }
  return w;
}

Vector plain_predict(const Matrix& X, const Vector& w) {
  require(X.cols() + 1 == w.size(), "plain_predict: feature count does not match model");
  Matrix Xhat = with_intercept(X, 1.0);
  Vector out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double logit = 0.0;
    for (std::size_t j = 0; j < Xhat.cols(); ++j) logit += Xhat(i, j) * w[j];
    out[i] = plain_sigmoid(logit);
  }
  return out;
}

double logistic_loss(const Matrix& X, const Vector& y, const Vector& w) {
  Vector p = plain_predict(X, w);
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double pi = std::min(1.0 - 1e-15, std::max(1e-15, p[i]));
    loss += y[i] == 1.0 ? -std::log(pi) : -std::log(1.0 - pi);
  }
  return loss / static_cast<double>(y.size());
}

TrainResult run_s2plort(const Matrix& Xa, const Matrix& Xb, const Vector& y,
                        const TrainConfig& tc, const RunOptions& opts, bool record_iterations) {
  require(Xa.same_shape(Xb), "run_s2plort: share shapes differ");
  TrainResult out;
  std::vector<Vector>*ia = nullptr, *ib = nullptr;
  if (record_iterations) {
    ia = &out.iter_w_a;
    ib = &out.iter_w_b;
  }
  out.stats = run_session(
      opts, [&](PartyCtx& ctx) { out.model.w_a = s2plort_alice(ctx, Xa, y, tc, ia); },
      [&](PartyCtx& ctx) { out.model.w_b = s2plort_bob(ctx, Xb, y, tc, ib); });
  return out;
}

VecPairResult run_s2plorp(const Matrix& Xa, const Matrix& Xb, const ModelShares& model,
                          const TrainConfig& tc, const RunOptions& opts) {
  require(Xa.same_shape(Xb), "run_s2plorp: share shapes differ");
  VecPairResult out;
  out.stats = run_session(
      opts, [&](PartyCtx& ctx) { out.v_a = s2plorp_alice(ctx, Xa, model.w_a, tc); },
      [&](PartyCtx& ctx) { out.v_b = s2plorp_bob(ctx, Xb, model.w_b, tc); });
  return out;
}

}  // namespace s2p
