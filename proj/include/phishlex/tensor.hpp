#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "phishlex/errors.hpp"

namespace phishlex::nn {

// Shape-tagged dense array of 64-bit floats, row-major.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(numel_of(shape), 0.0);
  }

  Tensor(std::vector<std::size_t> s, std::vector<double> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != numel_of(shape)) {
      throw ShapeMismatchError("tensor data size does not match shape");
    }
  }

  static std::size_t numel_of(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
  }

  std::size_t numel() const { return data.size(); }
  std::size_t dim(std::size_t i) const { return shape[i]; }
  std::size_t rank() const { return shape.size(); }

  double& at2(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  double at2(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

  double& at3(std::size_t i, std::size_t j, std::size_t k) {
    return data[(i * shape[1] + j) * shape[2] + k];
  }
  double at3(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * shape[1] + j) * shape[2] + k];
  }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

inline void require_shape(const Tensor& t, std::initializer_list<std::size_t> dims,
                          const char* what) {
  if (t.shape.size() != dims.size() ||
      !std::equal(dims.begin(), dims.end(), t.shape.begin())) {
    throw ShapeMismatchError(std::string("unexpected shape for ") + what);
  }
}

inline void require_rank(const Tensor& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw ShapeMismatchError(std::string(what) + ": expected rank " +
                             std::to_string(rank) + ", got " +
                             std::to_string(t.rank()));
  }
}

inline void require_finite(const Tensor& t, const char* where) {
  if (!t.all_finite()) {
    throw NonFiniteError(std::string("non-finite value produced by ") + where);
  }
}

}  // namespace phishlex::nn
