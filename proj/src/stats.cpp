#include "ictree/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>

namespace ictree {

double normal_two_sided_pvalue(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

double chi_squared_pvalue(double x, int df) {
  if (df <= 0) return 1.0;
  if (x <= 0.0) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(df));
  return boost::math::cdf(boost::math::complement(dist, x));
}

double normal_quantile(double u) {
  static const boost::math::normal dist;
  return boost::math::quantile(dist, u);
}

LinearStatisticMoments linear_statistic_moments(const Eigen::MatrixXd& g,
                                                const std::vector<double>& h,
                                                const std::vector<double>& w) {
  const auto n = static_cast<std::size_t>(g.rows());
  if (h.size() != n || w.size() != n)
    throw std::invalid_argument("linear_statistic_moments: size mismatch");
  const auto p = static_cast<Eigen::Index>(g.cols());

  double W = 0.0;
  for (double wi : w) W += wi;
  if (W < 2.0) throw std::invalid_argument("linear_statistic_moments: total weight < 2");

  double eh = 0.0;
  for (std::size_t i = 0; i < n; ++i) eh += w[i] * h[i];
  eh /= W;
  double vh = 0.0;
  for (std::size_t i = 0; i < n; ++i) vh += w[i] * (h[i] - eh) * (h[i] - eh);
  vh /= W;

  Eigen::VectorXd sg = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd gg = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(p);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd gi = g.row(static_cast<Eigen::Index>(i)).transpose();
    sg += w[i] * gi;
    gg.noalias() += w[i] * gi * gi.transpose();
    t += w[i] * h[i] * gi;
  }

  LinearStatisticMoments out;
  out.t_stat = t;
  out.mu = eh * sg;
  out.sigma = (W / (W - 1.0)) * vh * gg - (vh / (W - 1.0)) * sg * sg.transpose();

  // Constant scores carry no information: T == mu and Sigma == 0.
  const auto [hmin, hmax] = std::minmax_element(h.begin(), h.end());
  if (*hmin == *hmax || vh <= 0.0) {
    out.degenerate = true;
    return out;
  }

  if (p == 1) {
    const double var = out.sigma(0, 0);
    if (var <= 1e-280) {  // constant transformed covariate
      out.degenerate = true;
      return out;
    }
    out.statistic = std::fabs(out.t_stat(0) - out.mu(0)) / std::sqrt(var);
    out.p_value = normal_two_sided_pvalue(out.statistic);
    out.df = 1;
    return out;
  }

  // Quadratic form with the Moore-Penrose inverse; rank from the relative
  // eigenvalue cutoff.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.sigma);
  const Eigen::VectorXd evals = es.eigenvalues();
  const double emax = evals.maxCoeff();
  if (!(emax > 0.0)) {
    out.degenerate = true;
    return out;
  }
  const double cutoff = 1e-8 * emax;
  const Eigen::VectorXd d = es.eigenvectors().transpose() * (out.t_stat - out.mu);
  double q = 0.0;
  int rank = 0;
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    if (evals(k) > cutoff) {
      q += d(k) * d(k) / evals(k);
      ++rank;
    }
  }
  if (rank == 0) {
    out.degenerate = true;
    return out;
  }
  out.statistic = q;
  out.df = rank;
  out.p_value = chi_squared_pvalue(q, rank);
  return out;
}

double chisq_uniformity_pvalue(const std::vector<long>& counts) {
  if (counts.size() < 2) return 1.0;
  long total = 0;
  for (long c : counts) total += c;
  if (total == 0) return 1.0;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double x = 0.0;
  for (long c : counts) {
    const double d = static_cast<double>(c) - expected;
    x += d * d / expected;
  }
  return chi_squared_pvalue(x, static_cast<int>(counts.size()) - 1);
}

double signed_rank_pvalue(const std::vector<double>& diffs) {
  std::vector<double> d;
  d.reserve(diffs.size());
  for (double x : diffs)
    if (x != 0.0) d.push_back(x);
  const std::size_t n = d.size();
  if (n == 0) return 1.0;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });

  // midranks with tie correction
  std::vector<double> rank(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::fabs(d[order[j]]) == std::fabs(d[order[i]])) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = r;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] > 0.0) w_plus += rank[i];

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return 1.0;
  const double z = (w_plus - mean) / std::sqrt(var);
  return normal_two_sided_pvalue(z);
}

}  // namespace ictree
