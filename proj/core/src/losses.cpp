#include "mtdet/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mtdet/numerics.hpp"
#include "mtdet/pose_codec.hpp"

namespace mtdet {

double UncertaintyParams::temperature() const { return std::exp(0.5 * s[0]); }

double UncertaintyParams::sigma(int k) const {
  if (k < 1 || k > 3) throw std::invalid_argument("UncertaintyParams::sigma: k in 1..3");
  return std::exp(0.5 * s[k]);
}

std::vector<double> per_anchor_ce(std::span<const double> logits,
                                  std::span<const AnchorLabel> labels) {
  const std::size_t n = labels.size();
  if (logits.size() != 2 * n) throw std::invalid_argument("per_anchor_ce: logits size mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    if (labels[a] == AnchorLabel::ignore) continue;
    const std::span<const double> z = logits.subspan(2 * a, 2);
    const int y = labels[a] == AnchorLabel::positive ? 1 : 0;
    out[a] = logsumexp(z) - z[y];
  }
  return out;
}

std::vector<std::uint8_t> ohem_select(std::span<const double> cls_losses,
                                      std::span<const AnchorLabel> labels, int neg_ratio,
                                      int neg_floor) {
  const std::size_t n = labels.size();
  if (cls_losses.size() != n) throw std::invalid_argument("ohem_select: size mismatch");
  std::vector<std::uint8_t> mask(n, 0);
  std::vector<std::size_t> negatives;
  int positives = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (labels[a] == AnchorLabel::positive) {
      mask[a] = 1;
      ++positives;
    } else if (labels[a] == AnchorLabel::negative) {
      negatives.push_back(a);
    }
  }
  const std::size_t want = positives > 0 ? static_cast<std::size_t>(neg_ratio) * positives
                                         : static_cast<std::size_t>(neg_floor);
  const std::size_t take = std::min(want, negatives.size());
  std::partial_sort(negatives.begin(), negatives.begin() + take, negatives.end(),
                    [&](std::size_t lhs, std::size_t rhs) {
                      if (cls_losses[lhs] != cls_losses[rhs])
                        return cls_losses[lhs] > cls_losses[rhs];
                      return lhs < rhs;  // ties: lowest anchor index
                    });
  for (std::size_t i = 0; i < take; ++i) mask[negatives[i]] = 1;
  return mask;
}

ClsLossResult cls_loss(std::span<const double> logits, std::span<const AnchorLabel> labels,
                       std::span<const std::uint8_t> selection) {
  const std::size_t n = labels.size();
  if (logits.size() != 2 * n || selection.size() != n)
    throw std::invalid_argument("cls_loss: size mismatch");
  ClsLossResult r;
  r.dlogits.assign(2 * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    if (selection[a]) ++r.selected;
  if (r.selected == 0) throw std::invalid_argument("cls_loss: empty selection");

  const double inv = 1.0 / r.selected;
  for (std::size_t a = 0; a < n; ++a) {
    if (!selection[a]) continue;
    if (labels[a] == AnchorLabel::ignore)
      throw std::invalid_argument("cls_loss: ignore anchor selected");
    const std::span<const double> z = logits.subspan(2 * a, 2);
    const int y = labels[a] == AnchorLabel::positive ? 1 : 0;
    r.value += (logsumexp(z) - z[y]) * inv;
    const std::vector<double> p = softmax(z);
    r.dlogits[2 * a] = (p[0] - (y == 0 ? 1.0 : 0.0)) * inv;
    r.dlogits[2 * a + 1] = (p[1] - (y == 1 ? 1.0 : 0.0)) * inv;
  }
  return r;
}

namespace {

template <std::size_t K>
RegLossResult reg_loss(std::span<const double> pred,
                       std::span<const std::array<double, K>> target,
                       std::span<const std::uint8_t> mask) {
  const std::size_t n = mask.size();
  if (pred.size() != K * n || target.size() != n)
    throw std::invalid_argument("reg_loss: size mismatch");
  RegLossResult r;
  r.dpred.assign(K * n, 0.0);
  r.per_anchor.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    if (mask[a]) ++r.active;
  if (r.active == 0) return r;  // defined as 0 with zero gradient

  const double inv = 1.0 / r.active;
  for (std::size_t a = 0; a < n; ++a) {
    if (!mask[a]) continue;
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double d = pred[K * a + k] - target[a][k];
      sum += smooth_l1(d);
      r.dpred[K * a + k] = smooth_l1_grad(d) * inv;
    }
    r.per_anchor[a] = sum;
    r.value += sum * inv;
  }
  return r;
}

}  // namespace

RegLossResult box_loss(std::span<const double> pred, std::span<const std::array<double, 4>> target,
                       std::span<const std::uint8_t> mask) {
  return reg_loss<4>(pred, target, mask);
}

RegLossResult pts_loss(std::span<const double> pred,
                       std::span<const std::array<double, 10>> target,
                       std::span<const std::uint8_t> mask) {
  return reg_loss<10>(pred, target, mask);
}

PoseLossResult pose_loss(std::span<const double> logits,
                         std::span<const std::array<double, 3>> target_angles,
                         std::span<const std::uint8_t> mask, double beta) {
  const std::size_t n = mask.size();
  const std::size_t per_anchor = 3 * kPoseBins;
  if (logits.size() != per_anchor * n || target_angles.size() != n)
    throw std::invalid_argument("pose_loss: size mismatch");
  PoseLossResult r;
  r.dlogits.assign(per_anchor * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    if (mask[a]) ++r.active;
  if (r.active == 0) return r;

  const double inv = 1.0 / r.active;
  for (std::size_t a = 0; a < n; ++a) {
    if (!mask[a]) continue;
    for (int axis = 0; axis < 3; ++axis) {
      const std::size_t base = per_anchor * a + static_cast<std::size_t>(axis) * kPoseBins;
      const std::span<const double> z = logits.subspan(base, kPoseBins);
      const double angle = target_angles[a][axis];
      const int bin = encode_bin(angle);
      const std::vector<double> p = softmax(z);
      const double ce = logsumexp(z) - z[bin];
      double mean = 0.0;
      for (int k = 0; k < kPoseBins; ++k) mean += p[k] * bin_center(k);
      const double residual = mean - angle;
      r.value += (ce + beta * residual * residual) * inv;
      const double mse_scale = 2.0 * beta * residual;
      for (int k = 0; k < kPoseBins; ++k) {
        const double dce = p[k] - (k == bin ? 1.0 : 0.0);
        const double dmse = mse_scale * p[k] * (bin_center(k) - mean);
        r.dlogits[base + k] = (dce + dmse) * inv;
      }
    }
  }
  return r;
}

CombineResult uncertainty_combine(const TaskLossValues& losses, const UncertaintyParams& params) {
  CombineResult r;
  for (int k = 0; k < 4; ++k) {
    const double base = std::exp(-params.s[k]);
    const double w = k == 0 ? base : 0.5 * base;
    r.dloss[k] = w;
    r.total += w * losses.at(k) + 0.25 * params.s[k];
    r.dparam[k] = -w * losses.at(k) + 0.25;
  }
  return r;
}

CombineResult weighted_combine(const TaskLossValues& losses, const std::array<double, 4>& weights) {
  CombineResult r;
  for (int k = 0; k < 4; ++k) {
    r.dloss[k] = weights[k];
    r.total += weights[k] * losses.at(k);
  }
  return r;
}

}  // namespace mtdet
