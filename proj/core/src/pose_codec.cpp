#include "mtdet/pose_codec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mtdet/numerics.hpp"

namespace mtdet {

namespace {
std::atomic<std::uint64_t> g_clamp_count{0};
}

int encode_bin(double angle_deg) {
  if (!std::isfinite(angle_deg) || angle_deg < kPoseAngleMin || angle_deg >= -kPoseAngleMin)
    throw std::invalid_argument("encode_bin: angle outside [-99, 99)");
  const int bin = static_cast<int>(std::floor((angle_deg - kPoseAngleMin) / kPoseBinDegrees));
  return std::clamp(bin, 0, kPoseBins - 1);
}

double bin_center(int bin) {
  if (bin < 0 || bin >= kPoseBins) throw std::invalid_argument("bin_center: bin out of range");
  return kPoseAngleMin + kPoseBinDegrees * bin + 0.5 * kPoseBinDegrees;
}

double decode_expected(std::span<const double> logits) {
  if (logits.size() != static_cast<std::size_t>(kPoseBins))
    throw std::invalid_argument("decode_expected: expected 66 logits");
  const std::vector<double> p = softmax(logits);
  double m = 0.0;
  for (int k = 0; k < kPoseBins; ++k) m += p[k] * bin_center(k);
  return m;
}

double clamp_pose_angle(double angle_deg) {
  if (angle_deg >= kPoseAngleMin && angle_deg < -kPoseAngleMin) return angle_deg;
  if (g_clamp_count.fetch_add(1) == 0)
    std::fprintf(stderr, "mtdet: pose angle %.3f outside [-99, 99); clamping\n", angle_deg);
  return std::clamp(angle_deg, kPoseAngleMin, 98.999);
}

std::uint64_t pose_clamp_count() { return g_clamp_count.load(); }

}  // namespace mtdet
