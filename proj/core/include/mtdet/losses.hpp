#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mtdet/anchors.hpp"

namespace mtdet {

inline constexpr double kPoseMseWeight = 0.001;  // beta in the pose loss

// Heuristic fixed weighting used by the non-learned baseline:
// cls : box : pts : pose = 2 : 1 : 1 : 0.25.
inline constexpr std::array<double, 4> kHeuristicWeights = {2.0, 1.0, 1.0, 0.25};

struct TaskLossValues {
  double cls = 0.0, box = 0.0, pts = 0.0, pose = 0.0;

  double& at(int t) { return t == 0 ? cls : t == 1 ? box : t == 2 ? pts : pose; }
  double at(int t) const { return t == 0 ? cls : t == 1 ? box : t == 2 ? pts : pose; }
  std::array<double, 4> as_array() const { return {cls, box, pts, pose}; }
};

// Learned log-variance weighting parameters:
// s_cls = ln T1^2, s_box = ln sigma1^2, s_pts = ln sigma2^2, s_pose = ln sigma3^2.
struct UncertaintyParams {
  std::array<double, 4> s{0.0, 0.0, 0.0, 0.0};

  double temperature() const;        // T1 = exp(s_cls / 2)
  double sigma(int k) const;         // sigma_k = exp(s_k / 2), k in {1,2,3}
};

// Per-anchor cross entropy of the 2-way classifier against its label.
// Ignore anchors get 0 and are never selectable.
std::vector<double> per_anchor_ce(std::span<const double> logits,
                                  std::span<const AnchorLabel> labels);

// All positives plus the min(neg_ratio * #pos, #neg) highest-loss negatives;
// ties go to the lowest anchor index. With zero positives, min(neg_floor, #neg)
// hardest negatives are selected instead.
std::vector<std::uint8_t> ohem_select(std::span<const double> cls_losses,
                                      std::span<const AnchorLabel> labels, int neg_ratio = 3,
                                      int neg_floor = 3);

struct ClsLossResult {
  double value = 0.0;
  std::vector<double> dlogits;  // [anchor*2 + class]
  int selected = 0;
};

// Mean cross entropy over the selected anchors.
ClsLossResult cls_loss(std::span<const double> logits, std::span<const AnchorLabel> labels,
                       std::span<const std::uint8_t> selection);

struct RegLossResult {
  double value = 0.0;
  std::vector<double> dpred;
  std::vector<double> per_anchor;  // unnormalized smooth-L1 sum per anchor
  int active = 0;                  // anchors in the mask
};

// Mean over masked anchors of the component-wise smooth L1 sum. Zero masked
// anchors yields value 0 with zero gradient.
RegLossResult box_loss(std::span<const double> pred, std::span<const std::array<double, 4>> target,
                       std::span<const std::uint8_t> mask);
RegLossResult pts_loss(std::span<const double> pred,
                       std::span<const std::array<double, 10>> target,
                       std::span<const std::uint8_t> mask);

struct PoseLossResult {
  double value = 0.0;
  std::vector<double> dlogits;  // [anchor*198 + axis*66 + bin]
  int active = 0;
};

// Per axis: cross entropy of 66-bin logits against the target bin plus
// beta * (decode_expected - target angle)^2; summed over the three axes and
// averaged over masked anchors.
PoseLossResult pose_loss(std::span<const double> logits,
                         std::span<const std::array<double, 3>> target_angles,
                         std::span<const std::uint8_t> mask, double beta = kPoseMseWeight);

struct CombineResult {
  double total = 0.0;
  std::array<double, 4> dloss{};   // dL*/dL_k, the effective task weights
  std::array<double, 4> dparam{};  // dL*/ds_k (zero for the fixed-weight path)
};

// L* = exp(-s_cls) L_cls + 1/2 exp(-s_box) L_box + 1/2 exp(-s_pts) L_pts
//    + 1/2 exp(-s_pose) L_pose + 1/4 sum_k s_k
CombineResult uncertainty_combine(const TaskLossValues& losses, const UncertaintyParams& params);

CombineResult weighted_combine(const TaskLossValues& losses, const std::array<double, 4>& weights);

}  // namespace mtdet
