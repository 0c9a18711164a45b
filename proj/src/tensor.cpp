#include "ticketforge/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace ticketforge {

int64_t shape_numel(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (const int64_t d : shape) {
    if (d <= 0) {
      throw std::invalid_argument("tensor dimension must be positive, got " + shape_str(shape));
    }
    n *= d;
  }
  return n;
}

std::string shape_str(const std::vector<int64_t>& shape) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

}  // namespace ticketforge
