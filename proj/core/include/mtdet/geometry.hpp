#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace mtdet {

// Axis-aligned box in corner form. Invariant: x2 > x1 and y2 > y1.
struct Box {
  double x1, y1, x2, y2;

  Box(double x1_, double y1_, double x2_, double y2_) : x1(x1_), y1(y1_), x2(x2_), y2(y2_) {
    if (!(std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2)))
      throw std::invalid_argument("Box: non-finite coordinate");
    if (!(x2 > x1 && y2 > y1)) throw std::invalid_argument("Box: degenerate extent");
  }

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double cx() const { return 0.5 * (x1 + x2); }
  double cy() const { return 0.5 * (y1 + y2); }
  double area() const { return width() * height(); }
};

struct Point {
  double x = 0.0, y = 0.0;
};

// Five facial points, fixed order: left eye, right eye, nose,
// left mouth corner, right mouth corner.
struct LandmarkSet {
  std::array<Point, 5> pts{};

  static constexpr int kLeftEye = 0;
  static constexpr int kRightEye = 1;
  static constexpr int kNose = 2;
  static constexpr int kMouthLeft = 3;
  static constexpr int kMouthRight = 4;

  bool all_finite() const {
    for (const auto& p : pts)
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    return true;
  }
};

struct PoseAngles {
  double yaw = 0.0, pitch = 0.0, roll = 0.0;  // degrees

  double axis(int i) const { return i == 0 ? yaw : (i == 1 ? pitch : roll); }
};

// One annotated face. Validity flags gate the landmark and pose losses.
struct Face {
  Box box;
  LandmarkSet landmarks;
  PoseAngles pose;
  bool landmarks_valid = true;
  bool pose_valid = true;
};

// Intersection over union; 0 for disjoint boxes.
double iou(const Box& a, const Box& b);

// True iff both sides are <= the threshold (inclusive on the boundary).
bool is_small_face(const Box& b, double side_threshold = 25.0);

// sqrt(width * height)
double face_scale(const Box& b);

}  // namespace mtdet
