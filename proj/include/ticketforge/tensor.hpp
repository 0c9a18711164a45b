#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ticketforge {

int64_t shape_numel(const std::vector<int64_t>& shape);
std::string shape_str(const std::vector<int64_t>& shape);

// Row-major n-d array of doubles. grad stays empty until a backward pass (or
// zero_grad) touches the tensor; when present it has exactly data.size()
// entries.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> data;
  std::vector<double> grad;

  Tensor() = default;
  explicit Tensor(std::vector<int64_t> s, double fill = 0.0)
      : shape(std::move(s)), data(static_cast<size_t>(shape_numel(shape)), fill) {}

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int ndim() const { return static_cast<int>(shape.size()); }
  int64_t dim(int i) const { return shape[static_cast<size_t>(i)]; }

  bool has_grad() const { return !grad.empty(); }

  // Allocates a zeroed gradient if absent.
  void ensure_grad() {
    if (grad.size() != data.size()) {
      grad.assign(data.size(), 0.0);
    }
  }

  void zero_grad() { grad.assign(data.size(), 0.0); }
};

}  // namespace ticketforge
