#pragma once

#include <vector>

namespace motifcrf::stats {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (Wichura's AS241, double precision).
/// p must lie in (0,1).
double normal_quantile(double p);

/// Two-sided normal p-value for estimate/se. se == 0 degenerates to
/// 0 when the estimate is nonzero and 1 otherwise.
double wald_p_value(double estimate, double se);

/// Population standard deviation (divide by N). Empty or single-element
/// input yields 0.
double population_sd(const std::vector<double>& xs);

/// Median; average of the two central order statistics for even sizes.
double median(std::vector<double> xs);

}  // namespace motifcrf::stats
