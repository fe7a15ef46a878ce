#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rtheta::classify {

/// Row-major read-only feature matrix.
class DataView {
 public:
  DataView() = default;
  DataView(std::span<const double> values, std::size_t n_features)
      : values_(values), n_features_(n_features) {
    if (n_features == 0 || values.size() % n_features != 0)
      throw std::invalid_argument("feature matrix size is not a multiple of the feature count");
  }

  std::size_t rows() const noexcept { return n_features_ == 0 ? 0 : values_.size() / n_features_; }
  std::size_t features() const noexcept { return n_features_; }
  double at(std::size_t row, std::size_t feature) const noexcept {
    return values_[row * n_features_ + feature];
  }
  std::span<const double> row(std::size_t r) const noexcept {
    return values_.subspan(r * n_features_, n_features_);
  }

 private:
  std::span<const double> values_;
  std::size_t n_features_ = 0;
};

/// Owning counterpart of DataView.
struct Matrix {
  std::vector<double> values;
  std::size_t n_features = 0;

  DataView view() const { return {values, n_features}; }
  std::size_t rows() const noexcept { return n_features == 0 ? 0 : values.size() / n_features; }
  void push_row(std::span<const double> row) {
    assert(row.size() == n_features);
    values.insert(values.end(), row.begin(), row.end());
  }
};

}  // namespace rtheta::classify
