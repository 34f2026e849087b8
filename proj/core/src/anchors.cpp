#include "mtdet/anchors.hpp"

#include <cmath>
#include <stdexcept>

#include "mtdet/pose_codec.hpp"

namespace mtdet {

PyramidSpec PyramidSpec::standard(int input_size) {
  const double s = input_size / 640.0;
  PyramidSpec spec;
  spec.input_size = input_size;
  spec.levels = {
      {8, {16.0 * s, 32.0 * s}},
      {16, {64.0 * s, 128.0 * s}},
      {32, {256.0 * s, 512.0 * s}},
  };
  return spec;
}

void PyramidSpec::validate() const {
  if (input_size <= 0) throw std::invalid_argument("PyramidSpec: input size must be positive");
  if (levels.empty()) throw std::invalid_argument("PyramidSpec: no levels");
  for (const auto& lv : levels) {
    if (lv.stride <= 0) throw std::invalid_argument("PyramidSpec: stride must be positive");
    if (input_size % lv.stride != 0)
      throw std::invalid_argument("PyramidSpec: input size not divisible by stride");
    if (!(lv.anchor_sides[0] > 0.0 && lv.anchor_sides[1] > 0.0))
      throw std::invalid_argument("PyramidSpec: anchor sides must be positive");
  }
}

int PyramidSpec::anchor_count() const {
  int n = 0;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const int cells = input_size / levels[l].stride;
    n += cells * cells * 2;
  }
  return n;
}

AnchorSet generate_anchors(const PyramidSpec& spec) {
  spec.validate();
  AnchorSet set;
  set.spec = spec;
  set.anchors.reserve(spec.anchor_count());
  for (const auto& lv : spec.levels) {
    const int cells = spec.input_size / lv.stride;
    for (int iy = 0; iy < cells; ++iy) {
      for (int ix = 0; ix < cells; ++ix) {
        const double cx = lv.stride * (ix + 0.5);
        const double cy = lv.stride * (iy + 0.5);
        for (double side : lv.anchor_sides) {
          set.anchors.emplace_back(cx - 0.5 * side, cy - 0.5 * side,
                                   cx + 0.5 * side, cy + 0.5 * side);
        }
      }
    }
  }
  return set;
}

std::array<double, 4> encode_box(const Box& anchor, const Box& gt) {
  const double aw = anchor.width(), ah = anchor.height();
  return {
      (gt.cx() - anchor.cx()) / (aw * kCenterVariance),
      (gt.cy() - anchor.cy()) / (ah * kCenterVariance),
      std::log(gt.width() / aw) / kSizeVariance,
      std::log(gt.height() / ah) / kSizeVariance,
  };
}

Box decode_box(const Box& anchor, std::span<const double> t) {
  if (t.size() != 4) throw std::invalid_argument("decode_box: expected 4 values");
  const double aw = anchor.width(), ah = anchor.height();
  const double cx = anchor.cx() + t[0] * kCenterVariance * aw;
  const double cy = anchor.cy() + t[1] * kCenterVariance * ah;
  const double w = aw * std::exp(t[2] * kSizeVariance);
  const double h = ah * std::exp(t[3] * kSizeVariance);
  return Box(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
}

std::array<double, 10> encode_landmarks(const Box& anchor, const LandmarkSet& lm) {
  std::array<double, 10> out{};
  const double aw = anchor.width(), ah = anchor.height();
  for (int k = 0; k < 5; ++k) {
    out[2 * k] = (lm.pts[k].x - anchor.cx()) / (aw * kCenterVariance);
    out[2 * k + 1] = (lm.pts[k].y - anchor.cy()) / (ah * kCenterVariance);
  }
  return out;
}

LandmarkSet decode_landmarks(const Box& anchor, std::span<const double> t) {
  if (t.size() != 10) throw std::invalid_argument("decode_landmarks: expected 10 values");
  LandmarkSet lm;
  const double aw = anchor.width(), ah = anchor.height();
  for (int k = 0; k < 5; ++k) {
    lm.pts[k].x = anchor.cx() + t[2 * k] * kCenterVariance * aw;
    lm.pts[k].y = anchor.cy() + t[2 * k + 1] * kCenterVariance * ah;
  }
  return lm;
}

MatchResult match_anchors(const AnchorSet& anchors, std::span<const Face> faces,
                          const MatchConfig& cfg) {
  const std::size_t n = anchors.anchors.size();
  if (n == 0) throw std::invalid_argument("match_anchors: empty anchor set");

  MatchResult r;
  r.labels.assign(n, AnchorLabel::negative);
  r.assigned_face.assign(n, -1);
  r.box_targets.assign(n, {});
  r.landmark_targets.assign(n, {});
  r.pose_targets.assign(n, {});
  r.landmarks_valid.assign(n, 0);
  r.pose_valid.assign(n, 0);

  if (faces.empty()) return r;  // all-negative scene is valid

  // Highest-IoU face per anchor; lowest face index wins ties.
  std::vector<double> best_iou(n, 0.0);
  std::vector<int> best_face(n, -1);
  std::vector<double> face_best_iou(faces.size(), -1.0);
  std::vector<int> face_best_anchor(faces.size(), -1);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const double v = iou(anchors.anchors[a], faces[f].box);
      if (v > best_iou[a]) {
        best_iou[a] = v;
        best_face[a] = static_cast<int>(f);
      }
      if (v > face_best_iou[f]) {
        face_best_iou[f] = v;
        face_best_anchor[f] = static_cast<int>(a);
      }
    }
  }

  for (std::size_t a = 0; a < n; ++a) {
    if (best_iou[a] >= cfg.positive_iou) {
      r.labels[a] = AnchorLabel::positive;
      r.assigned_face[a] = best_face[a];
    } else if (best_iou[a] < cfg.negative_iou) {
      r.labels[a] = AnchorLabel::negative;
    } else {
      r.labels[a] = AnchorLabel::ignore;
    }
  }

  // Forced match: every face keeps at least one positive anchor. The forced
  // anchor still takes targets from its own highest-IoU face.
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const int a = face_best_anchor[f];
    if (a >= 0 && r.labels[a] != AnchorLabel::positive) {
      r.labels[a] = AnchorLabel::positive;
      r.assigned_face[a] = best_face[a];
    }
  }

  for (std::size_t a = 0; a < n; ++a) {
    if (r.labels[a] != AnchorLabel::positive) continue;
    const Face& face = faces[static_cast<std::size_t>(r.assigned_face[a])];
    r.box_targets[a] = encode_box(anchors.anchors[a], face.box);
    r.landmark_targets[a] = encode_landmarks(anchors.anchors[a], face.landmarks);
    r.pose_targets[a] = {clamp_pose_angle(face.pose.yaw), clamp_pose_angle(face.pose.pitch),
                         clamp_pose_angle(face.pose.roll)};
    r.landmarks_valid[a] = face.landmarks_valid ? 1 : 0;
    r.pose_valid[a] = face.pose_valid ? 1 : 0;
    ++r.positive_count;
  }
  return r;
}

}  // namespace mtdet
