#pragma once

#include <cstdint>

namespace ticketforge::kernels {

// Dense compute kernels behind the layer ops. Every kernel is written in
// gather form: one thread owns each output element and the inner accumulation
// order is fixed, so results are bit-identical for any thread count and equal
// to the serial reference below. Tests compare the two namespaces exactly;
// tools/bench_kernels times them against each other.

struct Conv2dShape {
  int64_t n = 0;      // batch
  int64_t c_in = 0;
  int64_t h = 0;
  int64_t w = 0;
  int64_t c_out = 0;
  int kernel = 3;
  int stride = 1;
  int padding = 1;

  int64_t out_h() const { return (h + 2 * padding - kernel) / stride + 1; }
  int64_t out_w() const { return (w + 2 * padding - kernel) / stride + 1; }
};

struct Pool2dShape {
  int64_t n = 0;
  int64_t c = 0;
  int64_t h = 0;
  int64_t w = 0;
  int kernel = 2;
  int stride = 2;
  int padding = 0;

  int64_t out_h() const { return (h + 2 * padding - kernel) / stride + 1; }
  int64_t out_w() const { return (w + 2 * padding - kernel) / stride + 1; }
};

// y[n,j] = b[j] + dot(x[n,:], w[j,:]);   x: (n, in), w: (out, in)
void linear_forward(const double* x, const double* w, const double* b,
                    double* y, int64_t n, int64_t in, int64_t out);
// dx[n,k] = sum_j dy[n,j] * w[j,k]
void linear_backward_input(const double* dy, const double* w, double* dx,
                           int64_t n, int64_t in, int64_t out);
// dw[j,k] += sum_n dy[n,j] * x[n,k];  db[j] += sum_n dy[n,j]
void linear_backward_params(const double* dy, const double* x, double* dw,
                            double* db, int64_t n, int64_t in, int64_t out);

// x: (n, c_in, h, w), wgt: (c_out, c_in, k, k), b: (c_out) or null
void conv2d_forward(const double* x, const double* wgt, const double* b,
                    double* y, const Conv2dShape& s);
void conv2d_backward_input(const double* dy, const double* wgt, double* dx,
                           const Conv2dShape& s);
void conv2d_backward_params(const double* dy, const double* x, double* dw,
                            double* db, const Conv2dShape& s);

void relu_forward(const double* x, double* y, int64_t n);
void relu_backward(const double* x, const double* dy, double* dx, int64_t n);

// argmax holds the flat input index of each output's max, for the backward.
void maxpool_forward(const double* x, double* y, int64_t* argmax,
                     const Pool2dShape& s);
// Scatter over recorded argmax indices; windows may overlap, kept serial.
void maxpool_backward(const double* dy, const int64_t* argmax, double* dx,
                      int64_t out_numel);

// (n, c, h, w) -> (n, c) spatial mean, and its adjoint.
void gap_forward(const double* x, double* y, int64_t n, int64_t c, int64_t hw);
void gap_backward(const double* dy, double* dx, int64_t n, int64_t c, int64_t hw);

// Per-channel biased batch statistics over (n, h, w).
void batchnorm_stats(const double* x, double* mean, double* var, int64_t n,
                     int64_t c, int64_t hw);
// y = gamma * xhat + beta with xhat = (x - mean) / sqrt(var + eps); xhat is
// stored for the backward pass (may be null in inference).
void batchnorm_forward(const double* x, const double* mean, const double* var,
                       const double* gamma, const double* beta, double eps,
                       double* y, double* xhat, int64_t n, int64_t c, int64_t hw);
// Training-mode backward through the batch statistics. Backward kernels
// accumulate into their d* outputs; callers pre-zero.
void batchnorm_backward(const double* dy, const double* xhat,
                        const double* gamma, const double* var, double eps,
                        double* dx, double* dgamma, double* dbeta, int64_t n,
                        int64_t c, int64_t hw);

namespace serial {

void linear_forward(const double* x, const double* w, const double* b,
                    double* y, int64_t n, int64_t in, int64_t out);
void linear_backward_input(const double* dy, const double* w, double* dx,
                           int64_t n, int64_t in, int64_t out);
void linear_backward_params(const double* dy, const double* x, double* dw,
                            double* db, int64_t n, int64_t in, int64_t out);
void conv2d_forward(const double* x, const double* wgt, const double* b,
                    double* y, const Conv2dShape& s);
void conv2d_backward_input(const double* dy, const double* wgt, double* dx,
                           const Conv2dShape& s);
void conv2d_backward_params(const double* dy, const double* x, double* dw,
                            double* db, const Conv2dShape& s);
void relu_forward(const double* x, double* y, int64_t n);
void relu_backward(const double* x, const double* dy, double* dx, int64_t n);
void maxpool_forward(const double* x, double* y, int64_t* argmax,
                     const Pool2dShape& s);
void gap_forward(const double* x, double* y, int64_t n, int64_t c, int64_t hw);
void gap_backward(const double* dy, double* dx, int64_t n, int64_t c, int64_t hw);
void batchnorm_stats(const double* x, double* mean, double* var, int64_t n,
                     int64_t c, int64_t hw);
void batchnorm_forward(const double* x, const double* mean, const double* var,
                       const double* gamma, const double* beta, double eps,
                       double* y, double* xhat, int64_t n, int64_t c, int64_t hw);
void batchnorm_backward(const double* dy, const double* xhat,
                        const double* gamma, const double* var, double eps,
                        double* dx, double* dgamma, double* dbeta, int64_t n,
                        int64_t c, int64_t hw);

}  // namespace serial

}  // namespace ticketforge::kernels
