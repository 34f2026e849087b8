#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mtdet/anchors.hpp"
#include "mtdet/geometry.hpp"
#include "mtdet/grid.hpp"

namespace mtdet {

// Feature channels emitted by render_features, in order. A face deposits a
// Gaussian bump on every level (amplitude keyed to how well the face scale
// matches the level's anchors); regression channels modulate a wider bump
// with the quantity named below, all in stride units.
//   0  presence (narrow bump)
//   1  presence (wide bump)
//   2  face-center x offset from the cell
//   3  face-center y offset from the cell
//   4  log(face width / stride)
//   5  log(face height / stride)
//   6  yaw / 90
//   7  pitch / 90
//   8  roll / 90
//   9..18  landmark offsets from the face center (x1,y1,...,x5,y5)
inline constexpr int kFeatureChannels = 19;

struct SizeBand {
  double lo = 0.0, hi = 0.0;  // face scale range in pixels
  double weight = 0.0;
};

struct WorldConfig {
  int canvas = 128;
  int faces_min = 1, faces_max = 4;
  std::vector<SizeBand> bands;
  double aspect_lo = 0.85, aspect_hi = 1.18;          // width/height
  double yaw_range = 60.0, pitch_range = 40.0, roll_range = 40.0;
  double noise_box = 0.0;   // annotation jitter, relative to face scale
  double noise_pts = 0.0;   // landmark jitter, relative to face scale
  double noise_pose = 0.0;  // pose jitter in degrees
  double annotation_floor_px = 7.0;  // below this side length pose is unannotated
  double max_mutual_iou = 0.05;
  int max_place_tries = 40;
  std::uint64_t seed = 1;

  void validate() const;
};

// Ground truth plus the latent geometry the features are rendered from.
// With zero noise the two lists are identical; with annotation noise the
// latent faces stay clean so the label noise is irreducible.
struct Scene {
  int canvas = 0;
  std::uint64_t seed = 0;
  int index = 0;
  std::vector<Face> faces;   // annotations (training targets)
  std::vector<Face> latent;  // rendering source
};

// Canonical 5-point template on the unit face (x, y, z), y down; the nose
// carries depth so yaw/pitch displace it in projection.
std::array<std::array<double, 3>, 5> landmark_template();

// Ry(yaw) then Rx(pitch) then Rz(roll), angles in degrees.
std::array<std::array<double, 3>, 5> rotate_template(
    const std::array<std::array<double, 3>, 5>& tpl, const PoseAngles& pose);

// Deterministic for (cfg.seed, index). Faces that cannot be placed within
// the retry bound are dropped.
Scene generate_scene(const WorldConfig& cfg, int index);

// Per-level feature grids. channels may truncate the layout above but not
// exceed it. Rendering is additive over faces and fully deterministic.
std::vector<Grid> render_features(const Scene& scene, const PyramidSpec& spec, int channels);

}  // namespace mtdet
