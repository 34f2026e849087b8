#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mtdet {

// Smooth L1: 0.5*x^2 for |x| < 1, |x| - 0.5 otherwise. Both branches and
// both derivative branches agree at |x| = 1.
double smooth_l1(double x);
double smooth_l1_grad(double x);

// Numerically stable softmax (max subtraction). Output sums to 1.
std::vector<double> softmax(std::span<const double> logits);
double logsumexp(std::span<const double> logits);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;  // analytic gradient at worst_index
  double numeric = 0.0;   // central difference at worst_index
  bool evaluations_finite = true;

  bool passed(double tol = 1e-5) const {
    return evaluations_finite && max_rel_error < tol;
  }
};

// Central-difference check of an analytic gradient against f evaluated at
// theta +- h*e_i, h = 1e-5*max(1, |theta_i|).
// rel error = |a - n| / max(1e-8, |a| + |n|).
GradCheckReport finite_diff_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> theta,
                                  std::span<const double> analytic_grad);

}  // namespace mtdet
