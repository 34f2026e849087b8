#include "mtdet/task_head.hpp"

#include <cmath>
#include <stdexcept>

#include "mtdet/pose_codec.hpp"

namespace mtdet {

void Conv1x1::init(int in_channels, int out_channels) {
  in_c = in_channels;
  out_c = out_channels;
  w.assign(static_cast<std::size_t>(out_c) * in_c, 0.0);
  b.assign(out_c, 0.0);
  gw.assign(w.size(), 0.0);
  gb.assign(b.size(), 0.0);
}

void Conv1x1::init_weights(Rng& rng) {
  const double a = 1.0 / std::sqrt(static_cast<double>(in_c));
  for (double& v : w) v = rng.uniform(-a, a);
  for (double& v : b) v = 0.0;
}

void Conv1x1::forward(const Grid& in, Grid& out) const {
  if (in.channels() != in_c) throw std::invalid_argument("Conv1x1: input channel mismatch");
  if (!out.same_shape(Grid(out_c, in.height(), in.width())))
    out = Grid(out_c, in.height(), in.width());
  const std::size_t px = in.pixels();
  for (int o = 0; o < out_c; ++o) {
    double* dst = out.channel(o);
    const double bias = b[o];
    for (std::size_t p = 0; p < px; ++p) dst[p] = bias;
    for (int i = 0; i < in_c; ++i) {
      const double wv = w[static_cast<std::size_t>(o) * in_c + i];
      if (wv == 0.0) continue;
      const double* src = in.channel(i);
      for (std::size_t p = 0; p < px; ++p) dst[p] += wv * src[p];
    }
  }
}

void Conv1x1::backward(const Grid& in, const Grid& dout, Grid* din) {
  const std::size_t px = in.pixels();
  if (din) {
    if (!din->same_shape(in)) *din = Grid(in_c, in.height(), in.width());
    din->fill(0.0);
  }
  for (int o = 0; o < out_c; ++o) {
    const double* g = dout.channel(o);
    double gbias = 0.0;
    for (std::size_t p = 0; p < px; ++p) gbias += g[p];
    gb[o] += gbias;
    for (int i = 0; i < in_c; ++i) {
      const double* src = in.channel(i);
      double acc = 0.0;
      for (std::size_t p = 0; p < px; ++p) acc += g[p] * src[p];
      gw[static_cast<std::size_t>(o) * in_c + i] += acc;
      if (din) {
        const double wv = w[static_cast<std::size_t>(o) * in_c + i];
        double* d = din->channel(i);
        for (std::size_t p = 0; p < px; ++p) d[p] += wv * g[p];
      }
    }
  }
}

void Conv1x1::zero_grad() {
  gw.assign(gw.size(), 0.0);
  gb.assign(gb.size(), 0.0);
}

StitchWeights StitchWeights::identity(StitchMode mode, int tasks, int channels) {
  StitchWeights sw;
  sw.mode = mode;
  sw.tasks = tasks;
  sw.channels = channels;
  if (mode == StitchMode::full) {
    sw.w.assign(static_cast<std::size_t>(tasks) * tasks * channels, 0.0);
    for (int i = 0; i < tasks; ++i)
      for (int k = 0; k < channels; ++k)
        sw.w[(static_cast<std::size_t>(i) * tasks + i) * channels + k] = 1.0;
  } else {
    sw.w.assign(static_cast<std::size_t>(tasks) * channels, 1.0);
  }
  sw.g.assign(sw.w.size(), 0.0);
  return sw;
}

namespace {

void require_same_shapes(std::span<const Grid> xs, const StitchWeights& sw) {
  if (xs.size() != static_cast<std::size_t>(sw.tasks))
    throw std::invalid_argument("stitch: task count mismatch");
  for (const Grid& x : xs) {
    if (!x.same_shape(xs[0])) throw std::invalid_argument("stitch: grid shape mismatch");
    if (x.channels() != sw.channels) throw std::invalid_argument("stitch: channel mismatch");
  }
}

}  // namespace

void stitch_forward(std::span<const Grid> xs, const StitchWeights& sw, std::span<Grid> out) {
  require_same_shapes(xs, sw);
  const int n = sw.tasks;
  const int C = sw.channels;
  const std::size_t px = xs[0].pixels();

  for (int i = 0; i < n; ++i)
    if (!out[i].same_shape(xs[0])) out[i] = Grid(C, xs[0].height(), xs[0].width());

  if (sw.mode == StitchMode::full) {
    for (int i = 0; i < n; ++i) {
      out[i].fill(0.0);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < C; ++k) {
          const double wv = sw.w[(static_cast<std::size_t>(i) * n + j) * C + k];
          const double* src = xs[j].channel(k);
          double* dst = out[i].channel(k);
          for (std::size_t p = 0; p < px; ++p) dst[p] += wv * src[p];
        }
      }
    }
  } else {
    const double inv = 1.0 / (n - 1);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < C; ++k) {
        const double wv = sw.w[static_cast<std::size_t>(i) * C + k];
        const double* self = xs[i].channel(k);
        double* dst = out[i].channel(k);
        for (std::size_t p = 0; p < px; ++p) {
          double others = 0.0;
          for (int j = 0; j < n; ++j)
            if (j != i) others += xs[j].channel(k)[p];
          dst[p] = wv * self[p] + (1.0 - wv) * others * inv;
        }
      }
    }
  }
}

void stitch_backward(std::span<const Grid> xs, const StitchWeights& sw,
                     std::span<const Grid> upstream, std::span<Grid> dxs,
                     std::span<double> sw_grad) {
  require_same_shapes(xs, sw);
  if (sw_grad.size() != sw.w.size())
    throw std::invalid_argument("stitch_backward: gradient buffer size mismatch");
  const int n = sw.tasks;
  const int C = sw.channels;
  const std::size_t px = xs[0].pixels();

  for (int i = 0; i < n; ++i) {
    if (!dxs[i].same_shape(xs[0])) dxs[i] = Grid(C, xs[0].height(), xs[0].width());
    dxs[i].fill(0.0);
  }

  if (sw.mode == StitchMode::full) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < C; ++k) {
          const std::size_t wi = (static_cast<std::size_t>(i) * n + j) * C + k;
          const double wv = sw.w[wi];
          const double* g = upstream[i].channel(k);
          const double* src = xs[j].channel(k);
          double* dx = dxs[j].channel(k);
          double acc = 0.0;
          for (std::size_t p = 0; p < px; ++p) {
            acc += g[p] * src[p];
            dx[p] += wv * g[p];
          }
          sw_grad[wi] += acc;
        }
      }
    }
  } else {
    const double inv = 1.0 / (n - 1);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < C; ++k) {
        const std::size_t wi = static_cast<std::size_t>(i) * C + k;
        const double wv = sw.w[wi];
        const double* g = upstream[i].channel(k);
        const double* self = xs[i].channel(k);
        double acc = 0.0;
        for (std::size_t p = 0; p < px; ++p) {
          double others = 0.0;
          for (int j = 0; j < n; ++j)
            if (j != i) others += xs[j].channel(k)[p];
          const double mean_others = others * inv;
          acc += g[p] * (self[p] - mean_others);
          dxs[i].channel(k)[p] += wv * g[p];
          const double cross = (1.0 - wv) * inv * g[p];
          for (int j = 0; j < n; ++j)
            if (j != i) dxs[j].channel(k)[p] += cross;
        }
        sw_grad[wi] += acc;
      }
    }
  }
}

TaskHead::TaskHead(HeadMode mode, StitchMode stitch_mode, int in_channels, int branch_channels,
                   int anchors_per_cell)
    : mode_(mode), anchors_per_cell_(anchors_per_cell) {
  const int A = anchors_per_cell;
  const std::array<int, kNumTasks> out_channels = {2 * A, 4 * A, 10 * A, 3 * kPoseBins * A};
  if (mode_ == HeadMode::hard_shared) {
    shared_branch_.init(in_channels, branch_channels);
  } else {
    for (auto& br : branches_) br.init(in_channels, branch_channels);
    stitch_ = StitchWeights::identity(stitch_mode, kNumTasks, branch_channels);
  }
  for (int t = 0; t < kNumTasks; ++t) outputs_[t].init(branch_channels, out_channels[t]);
}

void TaskHead::init_weights(Rng& rng) {
  if (mode_ == HeadMode::hard_shared) {
    shared_branch_.init_weights(rng);
  } else {
    for (auto& br : branches_) br.init_weights(rng);
    // Stitch stays at identity so the unit starts as a no-op.
  }
  for (auto& o : outputs_) o.init_weights(rng);
}

HeadOutputs TaskHead::forward(const Grid& trunk_in, HeadCache& cache) const {
  HeadOutputs out;
  cache.trunk = trunk_in;
  if (mode_ == HeadMode::hard_shared) {
    shared_branch_.forward(trunk_in, cache.branch[0]);
    for (int t = 0; t < kNumTasks; ++t) outputs_[t].forward(cache.branch[0], out.task(t));
  } else {
    for (int t = 0; t < kNumTasks; ++t) branches_[t].forward(trunk_in, cache.branch[t]);
    stitch_forward(std::span<const Grid>(cache.branch.data(), kNumTasks), stitch_,
                   std::span<Grid>(cache.mixed.data(), kNumTasks));
    for (int t = 0; t < kNumTasks; ++t) outputs_[t].forward(cache.mixed[t], out.task(t));
  }
  cache.valid = true;
  return out;
}

Grid TaskHead::backward(const HeadCache& cache, const HeadOutputs& dout) {
  if (!cache.valid) throw std::runtime_error("TaskHead::backward called before forward");
  Grid dtrunk(cache.trunk.channels(), cache.trunk.height(), cache.trunk.width());
  if (mode_ == HeadMode::hard_shared) {
    Grid dbranch(cache.branch[0].channels(), cache.branch[0].height(), cache.branch[0].width());
    Grid tmp;
    for (int t = 0; t < kNumTasks; ++t) {
      outputs_[t].backward(cache.branch[0], dout.task(t), &tmp);
      dbranch.add(tmp);
    }
    shared_branch_.backward(cache.trunk, dbranch, &dtrunk);
  } else {
    std::array<Grid, kNumTasks> dmixed;
    for (int t = 0; t < kNumTasks; ++t)
      outputs_[t].backward(cache.mixed[t], dout.task(t), &dmixed[t]);
    std::array<Grid, kNumTasks> dbranch;
    stitch_backward(std::span<const Grid>(cache.branch.data(), kNumTasks), stitch_,
                    std::span<const Grid>(dmixed.data(), kNumTasks),
                    std::span<Grid>(dbranch.data(), kNumTasks), stitch_.g);
    Grid tmp;
    for (int t = 0; t < kNumTasks; ++t) {
      branches_[t].backward(cache.trunk, dbranch[t], &tmp);
      dtrunk.add(tmp);
    }
  }
  return dtrunk;
}

void TaskHead::zero_grad() {
  shared_branch_.zero_grad();
  for (auto& br : branches_) br.zero_grad();
  stitch_.g.assign(stitch_.g.size(), 0.0);
  for (auto& o : outputs_) o.zero_grad();
}

}  // namespace mtdet
