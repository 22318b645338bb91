#pragma once

// Node values of a field on the characteristic grid, one row per time slice.

#include <cstddef>
#include <span>
#include <vector>

namespace hartree {

class FieldHistory {
 public:
  FieldHistory() = default;
  FieldHistory(double h, double t0, std::size_t n_r) : h_(h), t0_(t0), n_r_(n_r) {}

  double h() const { return h_; }
  double t0() const { return t0_; }
  std::size_t n_r() const { return n_r_; }
  std::size_t slices() const { return n_r_ == 0 ? 0 : data_.size() / n_r_; }
  double time(std::size_t n) const { return t0_ + static_cast<double>(n) * h_; }
  double r(std::size_t i) const { return static_cast<double>(i) * h_; }

  void reserve(std::size_t slices) { data_.reserve(slices * n_r_); }
  /// Appends a zero row and returns it.
  std::span<double> append() {
    data_.resize(data_.size() + n_r_, 0.0);
    return {data_.data() + data_.size() - n_r_, n_r_};
  }
  std::span<const double> row(std::size_t n) const { return {data_.data() + n * n_r_, n_r_}; }
  std::span<double> row(std::size_t n) { return {data_.data() + n * n_r_, n_r_}; }
  double operator()(std::size_t n, std::size_t i) const { return data_[n * n_r_ + i]; }
  double& operator()(std::size_t n, std::size_t i) { return data_[n * n_r_ + i]; }
  const std::vector<double>& data() const { return data_; }

 private:
  double h_ = 0.0;
  double t0_ = 0.0;
  std::size_t n_r_ = 0;
  std::vector<double> data_;
};

}  // namespace hartree
