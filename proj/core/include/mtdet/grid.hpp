#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mtdet {

// Dense rank-3 value container, channel-major: data[(c*height + y)*width + x].
// Channel planes are contiguous so 1x1 convolutions reduce to per-pixel
// matrix multiplies over contiguous spans.
class Grid {
 public:
  Grid() = default;

  Grid(int channels, int height, int width)
      : channels_(channels), height_(height), width_(width) {
    if (channels <= 0 || height <= 0 || width <= 0)
      throw std::invalid_argument("Grid: dimensions must be positive");
    data_.assign(static_cast<std::size_t>(channels) * height * width, 0.0);
  }

  static Grid from_data(int channels, int height, int width, std::vector<double> data) {
    Grid g(channels, height, width);
    if (data.size() != g.data_.size())
      throw std::invalid_argument("Grid::from_data: size mismatch");
    g.data_ = std::move(data);
    return g;
  }

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  std::size_t pixels() const { return static_cast<std::size_t>(height_) * width_; }

  double& at(int c, int y, int x) {
    return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }
  double at(int c, int y, int x) const {
    return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }

  double* channel(int c) { return data_.data() + static_cast<std::size_t>(c) * pixels(); }
  const double* channel(int c) const {
    return data_.data() + static_cast<std::size_t>(c) * pixels();
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Grid& o) const {
    return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
  }

  void fill(double v) { data_.assign(data_.size(), v); }

  void add(const Grid& o) {
    if (!same_shape(o)) throw std::invalid_argument("Grid::add: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  int channels_ = 0, height_ = 0, width_ = 0;
  std::vector<double> data_;
};

}  // namespace mtdet
