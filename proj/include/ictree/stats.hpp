#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ictree {

// Linear statistic T = sum_i w_i g_i h_i with its exact conditional mean and
// covariance under permutations of h, plus the standardized test statistic
// and asymptotic p-value. One-column g uses |T - mu| / sqrt(Sigma) with a
// two-sided normal p-value; multi-column g uses the quadratic form
// (T - mu)' Sigma^+ (T - mu) against chi-square with df = rank(Sigma).
struct LinearStatisticMoments {
  Eigen::VectorXd t_stat;
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  double statistic = 0.0;  // standardized |z| or quadratic form
  double p_value = 1.0;
  int df = 0;              // rank of sigma (quadratic form only)
  bool degenerate = false; // constant scores or zero-variance statistic
};

LinearStatisticMoments linear_statistic_moments(const Eigen::MatrixXd& g,
                                                const std::vector<double>& h,
                                                const std::vector<double>& w);

// Two-sided tail of the standard normal at |z|.
double normal_two_sided_pvalue(double z);

// Upper tail of chi-square with df degrees of freedom.
double chi_squared_pvalue(double x, int df);

// Standard normal quantile (inverse CDF).
double normal_quantile(double u);

// Pearson chi-square test of equal cell probabilities.
double chisq_uniformity_pvalue(const std::vector<long>& counts);

// Two-sided Wilcoxon signed-rank test on paired differences, normal
// approximation with tie correction; zero differences are dropped.
double signed_rank_pvalue(const std::vector<double>& diffs);

}  // namespace ictree
