#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "ticketforge/tensor.hpp"

namespace ticketforge {

// Tape-based reverse-mode graph. Activations live in an arena owned by the
// graph (stable addresses); parameters are referenced by pointer so their
// gradients land directly in the owning store. Nodes are recorded in forward
// order, which is a topological order by construction, and backward() runs
// the tape once in reverse.
class Graph {
 public:
  enum class Mode { train, infer };

  explicit Graph(Mode mode = Mode::train) : mode_(mode) {}

  bool training() const { return mode_ == Mode::train; }
  // Inference graphs skip tape recording entirely.
  bool recording() const { return mode_ == Mode::train; }

  Tensor* make(std::vector<int64_t> shape) {
    arena_.emplace_back(std::move(shape));
    return &arena_.back();
  }

  void record(std::function<void()> backward_rule) {
    if (recording()) {
      tape_.push_back(std::move(backward_rule));
    }
  }

  size_t node_count() const { return tape_.size(); }

  // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse, once per node.
  // Throws ShapeError if loss is not scalar.
  void backward(Tensor* loss);

 private:
  Mode mode_;
  std::deque<Tensor> arena_;
  std::vector<std::function<void()>> tape_;
};

namespace ops {

// Effective parameter view: value * mask. Masked entries contribute exactly
// zero to the forward pass and receive exactly zero gradient (the mask's 0/1
// entries multiply both directions). mask_bits may be null for dense params.
Tensor* masked_param(Graph& g, Tensor& param, const uint8_t* mask_bits);

Tensor* linear(Graph& g, const std::string& name, Tensor* x, Tensor* w, Tensor* b);
Tensor* conv2d(Graph& g, const std::string& name, Tensor* x, Tensor* w, Tensor* b,
               int kernel, int stride, int padding);
Tensor* batchnorm2d(Graph& g, const std::string& name, Tensor* x, Tensor* gamma,
                    Tensor* beta, Tensor& running_mean, Tensor& running_var,
                    double eps, double momentum);
Tensor* relu(Graph& g, Tensor* x);
Tensor* maxpool2d(Graph& g, const std::string& name, Tensor* x, int kernel,
                  int stride, int padding);
// Collapses all spatial dimensions; identity on (N, C) inputs.
Tensor* global_average_pool(Graph& g, Tensor* x);
Tensor* add(Graph& g, Tensor* a, Tensor* b);
// Mean softmax cross-entropy over the batch; returns a scalar.
Tensor* cross_entropy_loss(Graph& g, Tensor* logits,
                           const std::vector<int32_t>& labels);

}  // namespace ops

}  // namespace ticketforge
