#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "icl/errors.hpp"
#include "icl/rng.hpp"

namespace icl {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

enum class BasisMode { identity, random_orthonormal };

// K orthonormal feature vectors as the columns of a d x K matrix.
struct FeatureBasis {
  int d = 0;
  int K = 0;
  MatrixXd V;  // d x K, columns orthonormal

  double orthonormality_defect() const {
    return (V.transpose() * V - MatrixXd::Identity(K, K))
        .cwiseAbs()
        .maxCoeff();
  }
};

FeatureBasis build_basis(int d, int K, std::uint64_t seed, BasisMode mode);

enum class Regime { balanced, imbalanced, custom };

// Sampling probabilities of the K features, tagged with the regime the
// analysis layer should assume.
struct TokenDistribution {
  VectorXd p;  // length K, entries in (0,1], sums to 1
  Regime regime = Regime::custom;

  int K() const { return static_cast<int>(p.size()); }
};

// Validates invariants (throws DimensionError / RegimeMismatchError).
// balanced additionally requires max p / min p <= ratio_bound.
TokenDistribution make_distribution(const VectorXd& p, Regime regime,
                                    double ratio_bound = 4.0);

// Presets: balanced(K) -> uniform; imbalanced(K, p1) -> p1 for the dominant
// feature, remainder split uniformly.
TokenDistribution balanced_distribution(int K);
TokenDistribution imbalanced_distribution(int K, double p1);

// Occurrence counts (n_1..n_K) of the prompt's input tokens; the sufficient
// statistic of the dynamics.
struct PromptCounts {
  VectorXi n;  // length K, nonnegative
  int N = 0;   // total, == n.sum()
};

PromptCounts make_counts(const VectorXi& n);

// A concrete prompt: token feature indices (0-based), the query feature,
// and optionally the task vector w.
struct Prompt {
  std::vector<int> tokens;
  int query = 0;
  bool has_w = false;
  VectorXd w;
};

PromptCounts counts_of(const Prompt& prompt, int K);

// One multinomial(N, p) draw. Deterministic per rng state.
PromptCounts sample_counts(const TokenDistribution& dist, int N, Rng& rng);

// Number of count vectors with K parts summing to N, i.e. C(N+K-1, K-1).
// Returns a saturating value if it exceeds 2^63-1.
std::uint64_t composition_count(int K, int N);

// Visits every count vector with its multinomial log-probability, in
// lexicographic order of (n_1, ..., n_K). Throws EnumerationBudgetError when
// the composition count exceeds `budget`.
void for_each_count(const TokenDistribution& dist, int N,
                    const std::function<void(const VectorXi&, double)>& visit,
                    std::uint64_t budget = 2'000'000);

// Materialized enumeration, (counts, probability) pairs.
std::vector<std::pair<PromptCounts, double>> enumerate_counts(
    const TokenDistribution& dist, int N, std::uint64_t budget = 2'000'000);

// Smallest constant admissible in the multinomial tail lemma.
inline double default_event_constant(int K, int N) {
  return std::sqrt(20.0 * K * K * K / static_cast<double>(N));
}

// Dominant-feature half-width multiplier for the imbalanced event. The
// asymptotic construction uses 0.01, whose interval-inclusion step needs
// K >= 100; below that 1/K makes the inclusion exact.
inline double default_dominant_width(int K) {
  return std::max(0.01, 1.0 / static_cast<double>(K));
}

// Per-feature concentration interval and whether the observed count fell
// inside it.
struct EventInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool inside = false;
};

struct EventReport {
  bool member = false;
  bool c_admissible = true;  // c >= sqrt(20 K^3 / N); warning only
  std::vector<EventInterval> intervals;
};

// Concentration-event membership. Balanced/custom: n_k within
// p_k N -+ c N / K for every k. Imbalanced: the dominant feature uses the
// narrower band p_1 -+ dominant_width * c (in fractions of N), the rest use
// the balanced band.
EventReport event_membership(const PromptCounts& counts,
                             const TokenDistribution& dist, double c,
                             double dominant_width = -1.0);

// min(1, 3 exp(-c^2 N / (25 K^2))), the tail probability of leaving the event.
double multinomial_tail_bound(int N, int K, double c);

}  // namespace icl
