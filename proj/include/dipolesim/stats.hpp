#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace dipolesim {

// One-sample Kolmogorov-Smirnov statistic sup_x |F_n(x) - F(x)|.
// `sorted` must be ascending; cdf must be a proper CDF on the sample range.
double ks_statistic(const std::vector<double>& sorted,
                    const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov distribution p-value for statistic d at sample size n.
double kolmogorov_pvalue(double d, std::size_t n);

// Wilson score interval for a binomial proportion at normal quantile z
// (z = 2.576 for 99%). Returns {lo, hi}.
std::pair<double, double> wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials, double z);

// Upper-tail p-value of a chi-square statistic with dof degrees of freedom.
double chi_square_pvalue(double stat, double dof);

double median(std::vector<double> values);  // by value: sorts its copy
double mean(const std::vector<double>& values);
double variance(const std::vector<double>& values);  // unbiased, n >= 2

}  // namespace dipolesim
