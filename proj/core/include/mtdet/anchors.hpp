#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mtdet/geometry.hpp"

namespace mtdet {

// SSD-family target encoding variances.
inline constexpr double kCenterVariance = 0.1;
inline constexpr double kSizeVariance = 0.2;

struct PyramidLevel {
  int stride = 0;
  std::array<double, 2> anchor_sides{};  // ascending, aspect ratio 1:1
};

struct PyramidSpec {
  int input_size = 0;  // square canvas
  std::vector<PyramidLevel> levels;

  // Strides {8,16,32}; sides {16,32}/{64,128}/{256,512} at 640 input,
  // scaled proportionally for other inputs.
  static PyramidSpec standard(int input_size);

  void validate() const;  // input divisible by every stride, positive sides
  int level_cells(int level) const { return input_size / levels[level].stride; }
  int anchor_count() const;
};

// Anchors in deterministic order: level-major, row-major, size-minor.
struct AnchorSet {
  PyramidSpec spec;
  std::vector<Box> anchors;
};

AnchorSet generate_anchors(const PyramidSpec& spec);

enum class AnchorLabel : std::uint8_t { negative = 0, positive = 1, ignore = 2 };

struct MatchConfig {
  double positive_iou = 0.5;
  double negative_iou = 0.3;
};

// Per-anchor assignment and regression targets. Target slots are valid only
// where the label is positive.
struct MatchResult {
  std::vector<AnchorLabel> labels;
  std::vector<int> assigned_face;  // -1 when not positive
  std::vector<std::array<double, 4>> box_targets;
  std::vector<std::array<double, 10>> landmark_targets;
  std::vector<std::array<double, 3>> pose_targets;  // yaw, pitch, roll degrees
  std::vector<std::uint8_t> landmarks_valid;
  std::vector<std::uint8_t> pose_valid;
  int positive_count = 0;
};

// IoU >= 0.5 positive, max IoU < 0.3 negative, ignore band between. Each
// face's best anchor is forced positive (ties go to the lowest anchor index);
// positives take targets from their highest-IoU face.
MatchResult match_anchors(const AnchorSet& anchors, std::span<const Face> faces,
                          const MatchConfig& cfg = {});

std::array<double, 4> encode_box(const Box& anchor, const Box& gt);
Box decode_box(const Box& anchor, std::span<const double> t);

std::array<double, 10> encode_landmarks(const Box& anchor, const LandmarkSet& lm);
LandmarkSet decode_landmarks(const Box& anchor, std::span<const double> t);

}  // namespace mtdet
