#pragma once

#include <cstddef>
#include <vector>

namespace wolfcast::stats {

double mean(const std::vector<double>& x);

// Population variance / standard deviation (divide by n).
double variance_population(const std::vector<double>& x);
double stddev_population(const std::vector<double>& x);

// Sample variance / standard deviation (divide by n-1); requires n >= 2.
double variance_sample(const std::vector<double>& x);
double stddev_sample(const std::vector<double>& x);

// Linear-interpolation quantile on sorted order statistics (the numpy/R
// type-7 rule): position (n-1)*p, interpolate between neighbours.
// p must lie in [0, 1]; x must be non-empty.
double quantile(std::vector<double> x, double p);

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
// Continued-fraction evaluation (Lentz).
double incomplete_beta(double a, double b, double x);

// Two-sided p-value of a Student-t statistic with `dof` degrees of freedom:
// p = I_{dof/(dof+t^2)}(dof/2, 1/2).
double student_t_two_sided_p(double t, double dof);

}  // namespace wolfcast::stats
