#include "icl/features.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace icl {

FeatureBasis build_basis(int d, int K, std::uint64_t seed, BasisMode mode) {
  if (K < 1 || d < 1 || K > d) {
    throw DimensionError("build_basis requires 1 <= K <= d, got d=" +
                         std::to_string(d) + " K=" + std::to_string(K));
  }
  FeatureBasis basis;
  basis.d = d;
  basis.K = K;
  if (mode == BasisMode::identity) {
    basis.V = MatrixXd::Identity(d, K);
    return basis;
  }
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd G(d, K);
  for (int j = 0; j < K; ++j)
    for (int i = 0; i < d; ++i) G(i, j) = gauss(rng);
  Eigen::HouseholderQR<MatrixXd> qr(G);
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(d, K);
  // Fix column signs so the factorization is unique given G.
  MatrixXd R = qr.matrixQR().topLeftCorner(K, K).triangularView<Eigen::Upper>();
  for (int j = 0; j < K; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  basis.V = Q;
  return basis;
}

TokenDistribution make_distribution(const VectorXd& p, Regime regime,
                                    double ratio_bound) {
  const int K = static_cast<int>(p.size());
  if (K < 1) throw DimensionError("distribution needs at least one feature");
  for (int k = 0; k < K; ++k) {
    if (!(p[k] > 0.0) || p[k] > 1.0) {
      throw DimensionError("p_" + std::to_string(k + 1) +
                           " must lie in (0,1], got " + std::to_string(p[k]));
    }
  }
  if (std::abs(p.sum() - 1.0) > 1e-12) {
    throw DimensionError("probabilities must sum to 1 within 1e-12");
  }
  if (regime == Regime::balanced && K > 1) {
    const double ratio = p.maxCoeff() / p.minCoeff();
    if (ratio > ratio_bound) {
      throw RegimeMismatchError("balanced regime requires max p / min p <= " +
                                std::to_string(ratio_bound));
    }
  }
  if (regime == Regime::imbalanced) {
    for (int k = 1; k < K; ++k) {
      if (!(p[0] > p[k])) {
        throw RegimeMismatchError(
            "imbalanced regime requires p_1 > p_k for every k > 1");
      }
    }
  }
  return TokenDistribution{p, regime};
}

TokenDistribution balanced_distribution(int K) {
  return make_distribution(VectorXd::Constant(K, 1.0 / K), Regime::balanced);
}

TokenDistribution imbalanced_distribution(int K, double p1) {
  if (K < 2) throw DimensionError("imbalanced preset needs K >= 2");
  VectorXd p(K);
  p[0] = p1;
  p.tail(K - 1).setConstant((1.0 - p1) / (K - 1));
  return make_distribution(p, Regime::imbalanced);
}

PromptCounts make_counts(const VectorXi& n) {
  for (int k = 0; k < n.size(); ++k) {
    if (n[k] < 0) throw DimensionError("counts must be nonnegative");
  }
  return PromptCounts{n, static_cast<int>(n.sum())};
}

PromptCounts counts_of(const Prompt& prompt, int K) {
  VectorXi n = VectorXi::Zero(K);
  for (int tok : prompt.tokens) {
    if (tok < 0 || tok >= K)
      throw DimensionError("token feature index out of range");
    ++n[tok];
  }
  return make_counts(n);
}

PromptCounts sample_counts(const TokenDistribution& dist, int N, Rng& rng) {
  if (N < 1) throw DimensionError("sample_counts requires N >= 1");
  const int K = dist.K();
  VectorXi n = VectorXi::Zero(K);
  int remaining = N;
  double mass = 1.0;
  for (int k = 0; k + 1 < K && remaining > 0; ++k) {
    const double q = std::min(1.0, dist.p[k] / mass);
    std::binomial_distribution<int> binom(remaining, q);
    n[k] = binom(rng);
    remaining -= n[k];
    mass -= dist.p[k];
  }
  n[K - 1] += remaining;
  return PromptCounts{n, N};
}

std::uint64_t composition_count(int K, int N) {
  // C(N + K - 1, K - 1) with overflow saturation.
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (int i = 1; i <= K - 1; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(N) + K - i;
    if (result > cap / num) return cap;
    result = result * num / i;  // exact: product of i consecutive integers
  }
  return result;
}

namespace {

// log(n!) table up to N.
std::vector<double> log_factorials(int N) {
  std::vector<double> lf(static_cast<std::size_t>(N) + 1, 0.0);
  for (int i = 2; i <= N; ++i) lf[i] = lf[i - 1] + std::log(i);
  return lf;
}

void enumerate_rec(int level, int remaining, double partial, VectorXi& n,
                   const VectorXd& logp, const std::vector<double>& lf,
                   const std::function<void(const VectorXi&, double)>& visit) {
  const int K = static_cast<int>(n.size());
  if (level == K - 1) {
    n[level] = remaining;
    visit(n, partial + remaining * logp[level] - lf[remaining]);
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    n[level] = c;
    enumerate_rec(level + 1, remaining - c, partial + c * logp[level] - lf[c],
                  n, logp, lf, visit);
  }
}

}  // namespace

void for_each_count(const TokenDistribution& dist, int N,
                    const std::function<void(const VectorXi&, double)>& visit,
                    std::uint64_t budget) {
  const int K = dist.K();
  const std::uint64_t total = composition_count(K, N);
  if (total > budget) {
    throw EnumerationBudgetError(
        "composition count " + std::to_string(total) + " exceeds budget " +
        std::to_string(budget) + "; use the Monte Carlo estimator");
  }
  const std::vector<double> lf = log_factorials(N);
  const VectorXd logp = dist.p.array().log();
  VectorXi n(K);
  enumerate_rec(0, N, lf[N], n, logp, lf, visit);
}

std::vector<std::pair<PromptCounts, double>> enumerate_counts(
    const TokenDistribution& dist, int N, std::uint64_t budget) {
  std::vector<std::pair<PromptCounts, double>> out;
  out.reserve(static_cast<std::size_t>(composition_count(dist.K(), N)));
  for_each_count(
      dist, N,
      [&](const VectorXi& n, double logpmf) {
        out.emplace_back(PromptCounts{n, N}, std::exp(logpmf));
      },
      budget);
  return out;
}

EventReport event_membership(const PromptCounts& counts,
                             const TokenDistribution& dist, double c,
                             double dominant_width) {
  const int K = dist.K();
  const int N = counts.N;
  EventReport report;
  report.c_admissible = c >= default_event_constant(K, N);
  report.intervals.resize(K);
  report.member = true;
  for (int k = 0; k < K; ++k) {
    double half;
    if (dist.regime == Regime::imbalanced && k == 0) {
      const double w1 =
          dominant_width >= 0.0 ? dominant_width : default_dominant_width(K);
      half = w1 * c * N;
    } else {
      half = c * N / K;
    }
    EventInterval& iv = report.intervals[k];
    iv.lo = dist.p[k] * N - half;
    iv.hi = dist.p[k] * N + half;
    iv.inside = counts.n[k] >= iv.lo && counts.n[k] <= iv.hi;
    report.member = report.member && iv.inside;
  }
  return report;
}

double multinomial_tail_bound(int N, int K, double c) {
  const double bound = 3.0 * std::exp(-c * c * N / (25.0 * K * K));
  return std::min(1.0, bound);
}

}  // namespace icl
