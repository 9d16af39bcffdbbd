#pragma once

#include <Eigen/Dense>

#include "icl/features.hpp"

namespace icl {

// Prompt embedding: token/query vectors stacked over the label row.
struct Embedding {
  MatrixXd E;  // (d+1) x (N+1); last row labels, last column query (label 0)
  int d = 0;
  int N = 0;
};

Embedding embed(const Prompt& prompt, const FeatureBasis& basis);

// Masked softmax-attention forward pass of the one-layer model: the query
// column is dropped from keys/values, logits get max subtraction.
// Returns the prediction for the query token.
double forward(const Embedding& e, const MatrixXd& Q);

// K x K bilinear attention weights M(n, k) = v_n^T Q v_k. The diagonal
// carries the target-feature weights A_k, the off-diagonal column entries
// the cross weights B_{k,n}.
struct ReducedWeights {
  MatrixXd M;

  static ReducedWeights zero(int K) { return {MatrixXd::Zero(K, K)}; }
  int K() const { return static_cast<int>(M.rows()); }
  double A(int k) const { return M(k, k); }
  double B(int k, int n) const { return M(n, k); }
  double& A(int k) { return M(k, k); }
  double& B(int k, int n) { return M(n, k); }
};

ReducedWeights reduce(const MatrixXd& Q, const FeatureBasis& basis);

// Per-feature attention scores for a fixed query feature.
struct AttentionProfile {
  int query = 0;
  VectorXd attn;  // length K, nonnegative, sums to 1; exactly 0 where n_m = 0
};

AttentionProfile attention_profile(const PromptCounts& counts, int query_k,
                                   const ReducedWeights& weights);

// Prediction identity: y = sum_k Attn_k <w, v_k>.
double predict_from_profile(const AttentionProfile& profile, const VectorXd& w,
                            const FeatureBasis& basis);

}  // namespace icl
