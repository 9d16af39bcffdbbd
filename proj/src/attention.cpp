#include "icl/attention.hpp"

#include <cmath>
#include <limits>

namespace icl {

Embedding embed(const Prompt& prompt, const FeatureBasis& basis) {
  if (!prompt.has_w) {
    throw InvalidPromptError("embedding needs the prompt's task vector w");
  }
  if (prompt.w.size() != basis.d) {
    throw DimensionError("task vector dimension does not match basis");
  }
  if (prompt.query < 0 || prompt.query >= basis.K) {
    throw DimensionError("query feature index out of range");
  }
  const int N = static_cast<int>(prompt.tokens.size());
  Embedding e;
  e.d = basis.d;
  e.N = N;
  e.E.setZero(basis.d + 1, N + 1);
  for (int i = 0; i < N; ++i) {
    const int f = prompt.tokens[i];
    if (f < 0 || f >= basis.K)
      throw DimensionError("token feature index out of range");
    e.E.col(i).head(basis.d) = basis.V.col(f);
    e.E(basis.d, i) = prompt.w.dot(basis.V.col(f));
  }
  e.E.col(N).head(basis.d) = basis.V.col(prompt.query);
  e.E(basis.d, N) = 0.0;  // query label slot
  return e;
}

double forward(const Embedding& e, const MatrixXd& Q) {
  if (Q.rows() != e.d || Q.cols() != e.d) {
    throw DimensionError("Q must be d x d");
  }
  const int N = e.N;
  const auto Ex = e.E.topRows(e.d);
  const VectorXd query = Ex.col(N);
  // Masking drops the query column from keys; logits_i = x_i^T Q x_query.
  VectorXd logits = Ex.leftCols(N).transpose() * (Q * query);
  if (!logits.allFinite()) throw NumericError("non-finite attention logits");
  const double top = logits.maxCoeff();
  VectorXd weights = (logits.array() - top).exp();
  const double denom = weights.sum();
  double y = 0.0;
  for (int i = 0; i < N; ++i) y += weights[i] * e.E(e.d, i);
  return y / denom;
}

ReducedWeights reduce(const MatrixXd& Q, const FeatureBasis& basis) {
  if (Q.rows() != basis.d || Q.cols() != basis.d) {
    throw DimensionError("Q must be d x d");
  }
  return ReducedWeights{basis.V.transpose() * Q * basis.V};
}

AttentionProfile attention_profile(const PromptCounts& counts, int query_k,
                                   const ReducedWeights& weights) {
  const int K = weights.K();
  if (counts.n.size() != K) throw DimensionError("counts/weights K mismatch");
  if (query_k < 0 || query_k >= K)
    throw DimensionError("query feature index out of range");
  if (counts.N < 1) throw InvalidPromptError("prompt has no input tokens");

  // Attn_m = n_m exp(M(m,k)) / sum_j n_j exp(M(j,k)), in log space.
  double top = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < K; ++m) {
    if (counts.n[m] > 0) top = std::max(top, weights.M(m, query_k));
  }
  AttentionProfile profile;
  profile.query = query_k;
  profile.attn.setZero(K);
  double denom = 0.0;
  for (int m = 0; m < K; ++m) {
    if (counts.n[m] == 0) continue;  // a feature never seen gets score 0
    const double w = counts.n[m] * std::exp(weights.M(m, query_k) - top);
    profile.attn[m] = w;
    denom += w;
  }
  profile.attn /= denom;
  return profile;
}

double predict_from_profile(const AttentionProfile& profile, const VectorXd& w,
                            const FeatureBasis& basis) {
  if (profile.attn.size() != basis.K)
    throw DimensionError("profile/basis K mismatch");
  return profile.attn.dot(basis.V.transpose() * w);
}

}  // namespace icl
