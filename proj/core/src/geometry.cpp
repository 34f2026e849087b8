#include "mtdet/geometry.hpp"

#include <algorithm>

namespace mtdet {

double iou(const Box& a, const Box& b) {
  const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

bool is_small_face(const Box& b, double side_threshold) {
  return b.width() <= side_threshold && b.height() <= side_threshold;
}

double face_scale(const Box& b) { return std::sqrt(b.width() * b.height()); }

}  // namespace mtdet
