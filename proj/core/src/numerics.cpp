#include "mtdet/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mtdet {

double smooth_l1(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("smooth_l1: non-finite input");
  const double ax = std::fabs(x);
  return ax < 1.0 ? 0.5 * x * x : ax - 0.5;
}

double smooth_l1_grad(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("smooth_l1_grad: non-finite input");
  if (std::fabs(x) < 1.0) return x;
  return x > 0.0 ? 1.0 : -1.0;
}

double logsumexp(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("logsumexp: empty input");
  double m = logits[0];
  for (double v : logits) {
    if (!std::isfinite(v)) throw std::invalid_argument("logsumexp: non-finite input");
    m = std::max(m, v);
  }
  double s = 0.0;
  for (double v : logits) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty input");
  double m = logits[0];
  for (double v : logits) {
    if (!std::isfinite(v)) throw std::invalid_argument("softmax: non-finite input");
    m = std::max(m, v);
  }
  std::vector<double> out(logits.size());
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    s += out[i];
  }
  for (double& v : out) v /= s;
  return out;
}

GradCheckReport finite_diff_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> theta,
                                  std::span<const double> analytic_grad) {
  if (theta.size() != analytic_grad.size())
    throw std::invalid_argument("finite_diff_check: gradient size mismatch");

  std::vector<double> point(theta.begin(), theta.end());
  GradCheckReport rep;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double orig = point[i];
    const double h = 1e-5 * std::max(1.0, std::fabs(orig));
    point[i] = orig + h;
    const double fp = f(point);
    point[i] = orig - h;
    const double fm = f(point);
    point[i] = orig;

    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      rep.evaluations_finite = false;
      rep.max_rel_error = std::numeric_limits<double>::infinity();
      rep.worst_index = i;
      rep.analytic = analytic_grad[i];
      rep.numeric = std::numeric_limits<double>::quiet_NaN();
      return rep;
    }

    const double numeric = (fp - fm) / (2.0 * h);
    const double a = analytic_grad[i];
    const double rel = std::fabs(a - numeric) / std::max(1e-8, std::fabs(a) + std::fabs(numeric));
    if (i == 0 || rel > rep.max_rel_error) {
      rep.max_rel_error = rel;
      rep.worst_index = i;
      rep.analytic = a;
      rep.numeric = numeric;
    }
  }
  return rep;
}

}  // namespace mtdet
