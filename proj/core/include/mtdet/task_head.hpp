#pragma once

#include <array>
#include <span>
#include <vector>

#include "mtdet/grid.hpp"
#include "mtdet/rng.hpp"

namespace mtdet {

// Task order is fixed everywhere: classification, box, landmarks, pose.
inline constexpr int kNumTasks = 4;
inline constexpr int kTaskCls = 0;
inline constexpr int kTaskBox = 1;
inline constexpr int kTaskPts = 2;
inline constexpr int kTaskPose = 3;

// 1x1 convolution over a Grid: per-pixel affine map of channel vectors.
struct Conv1x1 {
  int in_c = 0, out_c = 0;
  std::vector<double> w;   // [out*in_c + in]
  std::vector<double> b;   // [out]
  std::vector<double> gw;  // gradient accumulators, same shapes
  std::vector<double> gb;

  void init(int in_channels, int out_channels);
  void init_weights(Rng& rng);  // uniform(-a, a), a = 1/sqrt(fan_in); zero bias
  void forward(const Grid& in, Grid& out) const;
  // Accumulates gw/gb; overwrites din when non-null.
  void backward(const Grid& in, const Grid& dout, Grid* din);
  void zero_grad();
};

enum class StitchMode { full, gated };

// Cross-stitch mixing weights.
//   full:  [i*tasks*channels + j*channels + k], out_i[k] = sum_j w[i,j,k] * x_j[k]
//   gated: [i*channels + k],  out_i[k] = w[i,k]*x_i[k] + (1-w[i,k])*mean_{j!=i} x_j[k]
struct StitchWeights {
  StitchMode mode = StitchMode::gated;
  int tasks = 0;
  int channels = 0;
  std::vector<double> w;
  std::vector<double> g;

  // full: per-channel identity mix; gated: gate fully closed (w = 1).
  // Either way the unit is a no-op at initialization.
  static StitchWeights identity(StitchMode mode, int tasks, int channels);

  std::size_t param_count() const { return w.size(); }
};

void stitch_forward(std::span<const Grid> xs, const StitchWeights& sw, std::span<Grid> out);

// Exact gradients of the linear map. dxs is overwritten; dw accumulates into
// sw_grad (sized like sw.w).
void stitch_backward(std::span<const Grid> xs, const StitchWeights& sw,
                     std::span<const Grid> upstream, std::span<Grid> dxs,
                     std::span<double> sw_grad);

enum class HeadMode { hard_shared, stitch };

struct HeadCache {
  Grid trunk;
  std::array<Grid, kNumTasks> branch;  // hard_shared uses branch[0] only
  std::array<Grid, kNumTasks> mixed;   // stitch mode only
  bool valid = false;
};

struct HeadOutputs {
  Grid cls, box, pts, pose;

  Grid& task(int t) { return t == 0 ? cls : t == 1 ? box : t == 2 ? pts : pose; }
  const Grid& task(int t) const { return t == 0 ? cls : t == 1 ? box : t == 2 ? pts : pose; }
};

// Per-level detection head. Branch 1x1 projections per task, cross-stitch
// mixing, then per-task output projections sized for A anchors per cell:
// 2A cls / 4A box / 10A landmark / 3*66*A pose channels.
class TaskHead {
 public:
  TaskHead() = default;
  TaskHead(HeadMode mode, StitchMode stitch_mode, int in_channels, int branch_channels,
           int anchors_per_cell);

  void init_weights(Rng& rng);

  HeadOutputs forward(const Grid& trunk_in, HeadCache& cache) const;
  // Throws if the cache was not produced by forward. Returns d(trunk_in) and
  // accumulates weight gradients.
  Grid backward(const HeadCache& cache, const HeadOutputs& dout);
  void zero_grad();

  HeadMode mode() const { return mode_; }
  int anchors_per_cell() const { return anchors_per_cell_; }
  Conv1x1& shared_branch() { return shared_branch_; }
  std::array<Conv1x1, kNumTasks>& branches() { return branches_; }
  const std::array<Conv1x1, kNumTasks>& branches() const { return branches_; }
  StitchWeights& stitch() { return stitch_; }
  const StitchWeights& stitch() const { return stitch_; }
  std::array<Conv1x1, kNumTasks>& outputs() { return outputs_; }
  const std::array<Conv1x1, kNumTasks>& outputs() const { return outputs_; }

 private:
  HeadMode mode_ = HeadMode::stitch;
  int anchors_per_cell_ = 2;
  Conv1x1 shared_branch_;                    // hard_shared
  std::array<Conv1x1, kNumTasks> branches_;  // stitch
  StitchWeights stitch_;
  std::array<Conv1x1, kNumTasks> outputs_;
};

}  // namespace mtdet
