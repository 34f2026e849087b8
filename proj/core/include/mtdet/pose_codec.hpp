#pragma once

#include <cstdint>
#include <span>

namespace mtdet {

// Euler angles are discretized into 66 bins of 3 degrees covering [-99, +99).
inline constexpr int kPoseBins = 66;
inline constexpr double kPoseBinDegrees = 3.0;
inline constexpr double kPoseAngleMin = -99.0;

// floor((angle + 99) / 3); rejects angles outside [-99, 99).
int encode_bin(double angle_deg);

double bin_center(int bin);  // -99 + 3*bin + 1.5

// Probability-weighted mean of bin centers under softmax(logits).
// Invariant under adding a constant to all logits.
double decode_expected(std::span<const double> logits);

// Clamps into the encodable range. Out-of-range inputs are counted and the
// first occurrence is reported on stderr.
double clamp_pose_angle(double angle_deg);
std::uint64_t pose_clamp_count();

}  // namespace mtdet
