#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace vf_test {

namespace {

double cos_sim(const std::vector<double>& a, const std::vector<double>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(dot / std::sqrt(na * nb));
}

double phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double pdf(double x, double mu, double s) {
  const double z = (x - mu) / s;
  return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
}

double trunc_mass(double mu, double s) { return phi((1.0 - mu) / s) - phi((0.0 - mu) / s); }

double trunc_cdf(double x, double mu, double s) {
  return (phi((x - mu) / s) - phi((0.0 - mu) / s)) / trunc_mass(mu, s);
}

}  // namespace

std::vector<int> reachability_dbscan(const std::vector<std::vector<double>>& points, double eps,
                                     std::size_t min_pts) {
  const std::size_t n = points.size();
  std::vector<std::vector<bool>> near(n, std::vector<bool>(n, false));
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      near[i][j] = i == j || 1.0 - cos_sim(points[i], points[j]) <= eps;
      count += near[i][j] ? 1 : 0;
    }
    core[i] = count >= std::max<std::size_t>(min_pts, 1);
  }
  // reach[i][j]: core i and core j are density-connected
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) reach[i][j] = core[i] && core[j] && near[i][j];
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
      }
    }
  }
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || label[i] != -1) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) label[j] = next;
    }
    ++next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    int best = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && near[j][i] && (best == -1 || label[j] < best)) best = label[j];
    }
    label[i] = best;
  }
  return label;
}

double truncated_total_error(const GaussianModel& m, double alpha) {
  const double fnr = trunc_cdf(alpha, m.mu_pos, m.sigma_pos);
  const double fpr = 1.0 - trunc_cdf(alpha, m.mu_neg, m.sigma_neg);
  return fnr + fpr;
}

double grid_minimizer(const GaussianModel& m, double lo, double hi, double step) {
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  double best_alpha = lo;
  double best = truncated_total_error(m, lo);
  for (std::size_t i = 1; i <= n; ++i) {
    const double a = lo + static_cast<double>(i) * step;
    const double e = truncated_total_error(m, a);
    if (e < best) {
      best = e;
      best_alpha = a;
    }
  }
  return best_alpha;
}

double monte_carlo_kl(const GaussianModel& m, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> draw(m.mu_pos, m.sigma_pos);
  const double zp = trunc_mass(m.mu_pos, m.sigma_pos);
  const double zn = trunc_mass(m.mu_neg, m.sigma_neg);
  double sum = 0.0;
  std::size_t taken = 0;
  while (taken < samples) {
    const double x = draw(gen);
    if (x < 0.0 || x > 1.0) continue;
    sum += std::log((pdf(x, m.mu_pos, m.sigma_pos) / zp) / (pdf(x, m.mu_neg, m.sigma_neg) / zn));
    ++taken;
  }
  return sum / static_cast<double>(samples);
}

std::vector<double> brute_force_means(const std::vector<std::size_t>& arms, const std::vector<double>& rewards,
                                      std::size_t arm_count) {
  std::vector<double> out(arm_count, 0.0);
  for (std::size_t a = 0; a < arm_count; ++a) {
    long double sum = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < arms.size(); ++i) {
      if (arms[i] == a) {
        sum += rewards[i];
        ++n;
      }
    }
    if (n > 0) out[a] = static_cast<double>(sum / n);
  }
  return out;
}

}  // namespace vf_test
