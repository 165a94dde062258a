#include "viewfuse/gating.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "viewfuse/clustering.hpp"

namespace viewfuse {

GatingDecision gate(const EmbeddingVector& text_emb, const EmbeddingVector& cloud_emb, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::OutOfRangeArgument, "gate threshold must lie in (0,1)");
  }
  GatingDecision d;
  d.similarity = cosine_similarity(text_emb, cloud_emb);
  d.threshold = threshold;
  d.passed = d.similarity >= threshold;
  if (!d.passed) d.flagged_reason = kBelowGateThreshold;
  return d;
}

void TruncatedGaussianPair::validate() const {
  const bool finite = std::isfinite(mu_pos) && std::isfinite(mu_neg) && std::isfinite(sigma_pos) &&
                      std::isfinite(sigma_neg);
  if (!finite || sigma_pos <= 0.0 || sigma_neg <= 0.0) {
    throw Error(ErrorCode::DegenerateParams, "means must be finite and sigmas positive");
  }
}

ThresholdQuadratic derive_optimal_threshold(const TruncatedGaussianPair& p) {
  p.validate();
  if (!(p.mu_pos > p.mu_neg)) throw Error(ErrorCode::DegenerateParams, "mu_pos must exceed mu_neg");

  const double vp = p.sigma_pos * p.sigma_pos;
  const double vn = p.sigma_neg * p.sigma_neg;
  // Equal log-densities:
  //   -ln s_p - (a - m_p)^2 / 2v_p = -ln s_n - (a - m_n)^2 / 2v_n
  // rearranged to A a^2 + B a + C = 0.
  ThresholdQuadratic q;
  q.a = 1.0 / vn - 1.0 / vp;
  q.b = 2.0 * (p.mu_pos / vp - p.mu_neg / vn);
  q.c = p.mu_neg * p.mu_neg / vn - p.mu_pos * p.mu_pos / vp + 2.0 * std::log(p.sigma_neg / p.sigma_pos);

  auto inside = [](double r) { return r > 0.0 && r < 1.0; };

  if (p.sigma_pos == p.sigma_neg) {
    q.discriminant = q.b * q.b;
    q.root = -q.c / q.b;
    if (!inside(q.root)) throw Error(ErrorCode::NoRootInUnitInterval, std::to_string(q.root));
    return q;
  }

  q.discriminant = q.b * q.b - 4.0 * q.a * q.c;
  if (q.discriminant < 0.0) throw Error(ErrorCode::NoRootInUnitInterval, "densities never cross");
  const double sq = std::sqrt(q.discriminant);
  // numerically stable pair of roots
  const double qq = -0.5 * (q.b + std::copysign(sq, q.b));
  double r1 = qq / q.a;
  double r2 = q.c / qq;

  // Prefer the crossing between the two means, then any root in (0, 1).
  auto between = [&](double r) { return r >= p.mu_neg && r <= p.mu_pos; };
  if (inside(r2) && (!inside(r1) || (between(r2) && !between(r1)))) std::swap(r1, r2);
  if (!inside(r1)) {
    throw Error(ErrorCode::NoRootInUnitInterval,
                "roots " + std::to_string(r1) + ", " + std::to_string(r2));
  }
  q.root = r1;
  q.rejected_root = r2;
  return q;
}

double solve_optimal_threshold(const TruncatedGaussianPair& params) {
  return derive_optimal_threshold(params).root;
}

double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

namespace {

double unit_mass(double mu, double sigma) {
  return normal_cdf(1.0, mu, sigma) - normal_cdf(0.0, mu, sigma);
}

}  // namespace

double truncated_pdf(double x, double mu, double sigma) {
  if (x < 0.0 || x > 1.0) return 0.0;
  return normal_pdf(x, mu, sigma) / unit_mass(mu, sigma);
}

double truncated_cdf(double x, double mu, double sigma) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return (normal_cdf(x, mu, sigma) - normal_cdf(0.0, mu, sigma)) / unit_mass(mu, sigma);
}

ErrorRates error_rates(const TruncatedGaussianPair& params, double threshold) {
  params.validate();
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::OutOfRangeArgument, "threshold must lie in [0,1]");
  }
  ErrorRates r;
  r.fnr = truncated_cdf(threshold, params.mu_pos, params.sigma_pos);
  r.fpr = 1.0 - truncated_cdf(threshold, params.mu_neg, params.sigma_neg);
  r.total = r.fnr + r.fpr;
  return r;
}

double kl_divergence(const TruncatedGaussianPair& params, std::size_t intervals) {
  params.validate();
  intervals = std::max<std::size_t>(intervals, 1000);
  if (intervals % 2 == 1) ++intervals;

  const double zp = unit_mass(params.mu_pos, params.sigma_pos);
  const double zn = unit_mass(params.mu_neg, params.sigma_neg);
  const double log_norm = std::log(params.sigma_neg / params.sigma_pos) + std::log(zn / zp);

  // Integrand p(x) * ln(p(x)/q(x)), with the log ratio taken analytically
  // so that tails never divide two underflowed densities.
  auto integrand = [&](double x) {
    const double p = truncated_pdf(x, params.mu_pos, params.sigma_pos);
    const double dp = (x - params.mu_pos) / params.sigma_pos;
    const double dn = (x - params.mu_neg) / params.sigma_neg;
    const double log_ratio = log_norm - 0.5 * dp * dp + 0.5 * dn * dn;
    return p * log_ratio;
  };

  const double h = 1.0 / static_cast<double>(intervals);
  double sum = integrand(0.0) + integrand(1.0);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(static_cast<double>(i) * h);
  }
  return std::max(0.0, sum * h / 3.0);
}

nlohmann::json flagged_record(const std::string& object_id, const GatingDecision& decision,
                              const std::string& annotation) {
  return {{"object_id", object_id},
          {"similarity", decision.similarity},
          {"threshold", decision.threshold},
          {"annotation", annotation}};
}

}  // namespace viewfuse
