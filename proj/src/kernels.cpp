#include "ticketforge/kernels.hpp"

#include <cmath>

namespace ticketforge::kernels {

namespace {

// Four independent accumulators, combined in a fixed order. Both the serial
// and the OpenMP kernels funnel through these helpers, which is what makes
// their outputs bit-identical.
inline double blocked_dot(const double* a, const double* b, int64_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  int64_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  double tail = 0.0;
  for (; k < n; ++k) {
    tail += a[k] * b[k];
  }
  return ((s0 + s1) + (s2 + s3)) + tail;
}

inline void axpy(double alpha, const double* x, double* y, int64_t n) {
  for (int64_t k = 0; k < n; ++k) {
    y[k] += alpha * x[k];
  }
}

inline double conv_out_elem(const double* x, const double* wgt,
                            const Conv2dShape& s, int64_t n, int64_t oc,
                            int64_t oy, int64_t ox) {
  const int64_t oy0 = oy * s.stride - s.padding;
  const int64_t ox0 = ox * s.stride - s.padding;
  double acc = 0.0;
  for (int64_t ci = 0; ci < s.c_in; ++ci) {
    const double* xc = x + ((n * s.c_in + ci) * s.h) * s.w;
    const double* wc = wgt + ((oc * s.c_in + ci) * s.kernel) * s.kernel;
    for (int ky = 0; ky < s.kernel; ++ky) {
      const int64_t iy = oy0 + ky;
      if (iy < 0 || iy >= s.h) continue;
      for (int kx = 0; kx < s.kernel; ++kx) {
        const int64_t ix = ox0 + kx;
        if (ix < 0 || ix >= s.w) continue;
        acc += xc[iy * s.w + ix] * wc[ky * s.kernel + kx];
      }
    }
  }
  return acc;
}

inline double conv_dx_elem(const double* dy, const double* wgt,
                           const Conv2dShape& s, int64_t n, int64_t ci,
                           int64_t iy, int64_t ix) {
  const int64_t oh = s.out_h();
  const int64_t ow = s.out_w();
  double acc = 0.0;
  for (int64_t oc = 0; oc < s.c_out; ++oc) {
    const double* dyc = dy + ((n * s.c_out + oc) * oh) * ow;
    const double* wc = wgt + ((oc * s.c_in + ci) * s.kernel) * s.kernel;
    for (int ky = 0; ky < s.kernel; ++ky) {
      const int64_t num_y = iy + s.padding - ky;
      if (num_y < 0 || num_y % s.stride != 0) continue;
      const int64_t oy = num_y / s.stride;
      if (oy >= oh) continue;
      for (int kx = 0; kx < s.kernel; ++kx) {
        const int64_t num_x = ix + s.padding - kx;
        if (num_x < 0 || num_x % s.stride != 0) continue;
        const int64_t ox = num_x / s.stride;
        if (ox >= ow) continue;
        acc += dyc[oy * ow + ox] * wc[ky * s.kernel + kx];
      }
    }
  }
  return acc;
}

inline double conv_dw_elem(const double* dy, const double* x,
                           const Conv2dShape& s, int64_t oc, int64_t ci,
                           int ky, int kx) {
  const int64_t oh = s.out_h();
  const int64_t ow = s.out_w();
  double acc = 0.0;
  for (int64_t n = 0; n < s.n; ++n) {
    const double* dyc = dy + ((n * s.c_out + oc) * oh) * ow;
    const double* xc = x + ((n * s.c_in + ci) * s.h) * s.w;
    for (int64_t oy = 0; oy < oh; ++oy) {
      const int64_t iy = oy * s.stride - s.padding + ky;
      if (iy < 0 || iy >= s.h) continue;
      for (int64_t ox = 0; ox < ow; ++ox) {
        const int64_t ix = ox * s.stride - s.padding + kx;
        if (ix < 0 || ix >= s.w) continue;
        acc += dyc[oy * ow + ox] * xc[iy * s.w + ix];
      }
    }
  }
  return acc;
}

inline void maxpool_out_elem(const double* x, double* y, int64_t* argmax,
                             const Pool2dShape& s, int64_t n, int64_t c,
                             int64_t oy, int64_t ox) {
  const int64_t oh = s.out_h();
  const int64_t ow = s.out_w();
  const double* xc = x + ((n * s.c + c) * s.h) * s.w;
  const int64_t base = ((n * s.c + c) * s.h) * s.w;
  double best = 0.0;
  int64_t best_idx = -1;
  for (int ky = 0; ky < s.kernel; ++ky) {
    const int64_t iy = oy * s.stride - s.padding + ky;
    if (iy < 0 || iy >= s.h) continue;
    for (int kx = 0; kx < s.kernel; ++kx) {
      const int64_t ix = ox * s.stride - s.padding + kx;
      if (ix < 0 || ix >= s.w) continue;
      const double v = xc[iy * s.w + ix];
      if (best_idx < 0 || v > best) {
        best = v;
        best_idx = base + iy * s.w + ix;
      }
    }
  }
  const int64_t out_idx = ((n * s.c + c) * oh + oy) * ow + ox;
  y[out_idx] = best;
  argmax[out_idx] = best_idx;
}

inline void bn_channel_stats(const double* x, double* mean, double* var,
                             int64_t n, int64_t c_total, int64_t hw, int64_t c) {
  const int64_t m = n * hw;
  double sum = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double* xc = x + (i * c_total + c) * hw;
    for (int64_t k = 0; k < hw; ++k) {
      sum += xc[k];
    }
  }
  const double mu = sum / static_cast<double>(m);
  double sq = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double* xc = x + (i * c_total + c) * hw;
    for (int64_t k = 0; k < hw; ++k) {
      const double d = xc[k] - mu;
      sq += d * d;
    }
  }
  mean[c] = mu;
  var[c] = sq / static_cast<double>(m);
}

inline void bn_channel_forward(const double* x, const double* mean,
                               const double* var, const double* gamma,
                               const double* beta, double eps, double* y,
                               double* xhat, int64_t n, int64_t c_total,
                               int64_t hw, int64_t c) {
  const double inv = 1.0 / std::sqrt(var[c] + eps);
  const double g = gamma[c];
  const double b = beta[c];
  for (int64_t i = 0; i < n; ++i) {
    const int64_t off = (i * c_total + c) * hw;
    for (int64_t k = 0; k < hw; ++k) {
      const double xh = (x[off + k] - mean[c]) * inv;
      if (xhat) xhat[off + k] = xh;
      y[off + k] = g * xh + b;
    }
  }
}

inline void bn_channel_backward(const double* dy, const double* xhat,
                                const double* gamma, const double* var,
                                double eps, double* dx, double* dgamma,
                                double* dbeta, int64_t n, int64_t c_total,
                                int64_t hw, int64_t c) {
  const int64_t m = n * hw;
  double sum_dy = 0.0;
  double sum_dy_xhat = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const int64_t off = (i * c_total + c) * hw;
    for (int64_t k = 0; k < hw; ++k) {
      sum_dy += dy[off + k];
      sum_dy_xhat += dy[off + k] * xhat[off + k];
    }
  }
  dgamma[c] += sum_dy_xhat;
  dbeta[c] += sum_dy;
  const double inv = 1.0 / std::sqrt(var[c] + eps);
  const double g = gamma[c];
  const double mean_dy = sum_dy / static_cast<double>(m);
  const double mean_dy_xhat = sum_dy_xhat / static_cast<double>(m);
  for (int64_t i = 0; i < n; ++i) {
    const int64_t off = (i * c_total + c) * hw;
    for (int64_t k = 0; k < hw; ++k) {
      dx[off + k] += g * inv * (dy[off + k] - mean_dy - xhat[off + k] * mean_dy_xhat);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- parallel

void linear_forward(const double* x, const double* w, const double* b,
                    double* y, int64_t n, int64_t in, int64_t out) {
#pragma omp parallel for collapse(2) schedule(static) if (n * out >= 64)
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < out; ++j) {
      y[i * out + j] = (b ? b[j] : 0.0) + blocked_dot(x + i * in, w + j * in, in);
    }
  }
}

void linear_backward_input(const double* dy, const double* w, double* dx,
                           int64_t n, int64_t in, int64_t out) {
#pragma omp parallel for schedule(static) if (n >= 4)
  for (int64_t i = 0; i < n; ++i) {
    double* dxr = dx + i * in;
    const double* dyr = dy + i * out;
    for (int64_t j = 0; j < out; ++j) {
      axpy(dyr[j], w + j * in, dxr, in);
    }
  }
}

void linear_backward_params(const double* dy, const double* x, double* dw,
                            double* db, int64_t n, int64_t in, int64_t out) {
#pragma omp parallel for schedule(static) if (out >= 8)
  for (int64_t j = 0; j < out; ++j) {
    double* dwr = dw + j * in;
    double acc_b = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      const double d = dy[i * out + j];
      acc_b += d;
      axpy(d, x + i * in, dwr, in);
    }
    if (db) db[j] += acc_b;
  }
}

void conv2d_forward(const double* x, const double* wgt, const double* b,
                    double* y, const Conv2dShape& s) {
  const int64_t oh = s.out_h();
  const int64_t ow = s.out_w();
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t oc = 0; oc < s.c_out; ++oc) {
      double* yc = y + ((n * s.c_out + oc) * oh) * ow;
      const double bias = b ? b[oc] : 0.0;
      for (int64_t oy = 0; oy < oh; ++oy) {
        for (int64_t ox = 0; ox < ow; ++ox) {
          yc[oy * ow + ox] = bias + conv_out_elem(x, wgt, s, n, oc, oy, ox);
        }
      }
    }
  }
}

void conv2d_backward_input(const double* dy, const double* wgt, double* dx,
                           const Conv2dShape& s) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t ci = 0; ci < s.c_in; ++ci) {
      double* dxc = dx + ((n * s.c_in + ci) * s.h) * s.w;
      for (int64_t iy = 0; iy < s.h; ++iy) {
        for (int64_t ix = 0; ix < s.w; ++ix) {
          dxc[iy * s.w + ix] += conv_dx_elem(dy, wgt, s, n, ci, iy, ix);
        }
      }
    }
  }
}

void conv2d_backward_params(const double* dy, const double* x, double* dw,
                            double* db, const Conv2dShape& s) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t oc = 0; oc < s.c_out; ++oc) {
    for (int64_t ci = 0; ci < s.c_in; ++ci) {
      double* dwc = dw + ((oc * s.c_in + ci) * s.kernel) * s.kernel;
      for (int ky = 0; ky < s.kernel; ++ky) {
        for (int kx = 0; kx < s.kernel; ++kx) {
          dwc[ky * s.kernel + kx] += conv_dw_elem(dy, x, s, oc, ci, ky, kx);
        }
      }
    }
  }
  if (db) {
    const int64_t oh = s.out_h();
    const int64_t ow = s.out_w();
#pragma omp parallel for schedule(static) if (s.c_out >= 8)
    for (int64_t oc = 0; oc < s.c_out; ++oc) {
      double acc = 0.0;
      for (int64_t n = 0; n < s.n; ++n) {
        const double* dyc = dy + ((n * s.c_out + oc) * oh) * ow;
        for (int64_t k = 0; k < oh * ow; ++k) {
          acc += dyc[k];
        }
      }
      db[oc] += acc;
    }
  }
}

void relu_forward(const double* x, double* y, int64_t n) {
#pragma omp parallel for schedule(static) if (n >= 8192)
  for (int64_t i = 0; i < n; ++i) {
    y[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
}

void relu_backward(const double* x, const double* dy, double* dx, int64_t n) {
#pragma omp parallel for schedule(static) if (n >= 8192)
  for (int64_t i = 0; i < n; ++i) {
    if (x[i] > 0.0) dx[i] += dy[i];
  }
}

void maxpool_forward(const double* x, double* y, int64_t* argmax,
                     const Pool2dShape& s) {
  const int64_t oh = s.out_h();
  const int64_t ow = s.out_w();
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < s.c; ++c) {
      for (int64_t oy = 0; oy < oh; ++oy) {
        for (int64_t ox = 0; ox < ow; ++ox) {
          maxpool_out_elem(x, y, argmax, s, n, c, oy, ox);
        }
      }
    }
  }
}

void maxpool_backward(const double* dy, const int64_t* argmax, double* dx,
                      int64_t out_numel) {
  for (int64_t i = 0; i < out_numel; ++i) {
    if (argmax[i] >= 0) dx[argmax[i]] += dy[i];
  }
}

void gap_forward(const double* x, double* y, int64_t n, int64_t c, int64_t hw) {
#pragma omp parallel for collapse(2) schedule(static) if (n * c >= 32)
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < c; ++j) {
      const double* xc = x + (i * c + j) * hw;
      double acc = 0.0;
      for (int64_t k = 0; k < hw; ++k) {
        acc += xc[k];
      }
      y[i * c + j] = acc / static_cast<double>(hw);
    }
  }
}

void gap_backward(const double* dy, double* dx, int64_t n, int64_t c, int64_t hw) {
#pragma omp parallel for collapse(2) schedule(static) if (n * c >= 32)
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < c; ++j) {
      const double g = dy[i * c + j] / static_cast<double>(hw);
      double* dxc = dx + (i * c + j) * hw;
      for (int64_t k = 0; k < hw; ++k) {
        dxc[k] += g;
      }
    }
  }
}

void batchnorm_stats(const double* x, double* mean, double* var, int64_t n,
                     int64_t c, int64_t hw) {
#pragma omp parallel for schedule(static) if (c >= 4)
  for (int64_t j = 0; j < c; ++j) {
    bn_channel_stats(x, mean, var, n, c, hw, j);
  }
}

void batchnorm_forward(const double* x, const double* mean, const double* var,
                       const double* gamma, const double* beta, double eps,
                       double* y, double* xhat, int64_t n, int64_t c, int64_t hw) {
#pragma omp parallel for schedule(static) if (c >= 4)
  for (int64_t j = 0; j < c; ++j) {
    bn_channel_forward(x, mean, var, gamma, beta, eps, y, xhat, n, c, hw, j);
  }
}

void batchnorm_backward(const double* dy, const double* xhat,
                        const double* gamma, const double* var, double eps,
                        double* dx, double* dgamma, double* dbeta, int64_t n,
                        int64_t c, int64_t hw) {
#pragma omp parallel for schedule(static) if (c >= 4)
  for (int64_t j = 0; j < c; ++j) {
    bn_channel_backward(dy, xhat, gamma, var, eps, dx, dgamma, dbeta, n, c, hw, j);
  }
}

// ------------------------------------------------------------------ serial

namespace serial {

void linear_forward(const double* x, const double* w, const double* b,
                    double* y, int64_t n, int64_t in, int64_t out) {
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < out; ++j) {
      y[i * out + j] = (b ? b[j] : 0.0) + blocked_dot(x + i * in, w + j * in, in);
    }
  }
}

void linear_backward_input(const double* dy, const double* w, double* dx,
                           int64_t n, int64_t in, int64_t out) {
  for (int64_t i = 0; i < n; ++i) {
    double* dxr = dx + i * in;
    const double* dyr = dy + i * out;
    for (int64_t j = 0; j < out; ++j) {
      axpy(dyr[j], w + j * in, dxr, in);
    }
  }
}

void linear_backward_params(const double* dy, const double* x, double* dw,
                            double* db, int64_t n, int64_t in, int64_t out) {
  for (int64_t j = 0; j < out; ++j) {
    double* dwr = dw + j * in;
    double acc_b = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      const double d = dy[i * out + j];
      acc_b += d;
      axpy(d, x + i * in, dwr, in);
    }
    if (db) db[j] += acc_b;
  }
}

void conv2d_forward(const double* x, const double* wgt, const double* b,
                    double* y, const Conv2dShape& s) {
  const int64_t oh = s.out_h();
  const int64_t ow = s.out_w();
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t oc = 0; oc < s.c_out; ++oc) {
      double* yc = y + ((n * s.c_out + oc) * oh) * ow;
      const double bias = b ? b[oc] : 0.0;
      for (int64_t oy = 0; oy < oh; ++oy) {
        for (int64_t ox = 0; ox < ow; ++ox) {
          yc[oy * ow + ox] = bias + conv_out_elem(x, wgt, s, n, oc, oy, ox);
        }
      }
    }
  }
}

void conv2d_backward_input(const double* dy, const double* wgt, double* dx,
                           const Conv2dShape& s) {
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t ci = 0; ci < s.c_in; ++ci) {
      double* dxc = dx + ((n * s.c_in + ci) * s.h) * s.w;
      for (int64_t iy = 0; iy < s.h; ++iy) {
        for (int64_t ix = 0; ix < s.w; ++ix) {
          dxc[iy * s.w + ix] += conv_dx_elem(dy, wgt, s, n, ci, iy, ix);
        }
      }
    }
  }
}

void conv2d_backward_params(const double* dy, const double* x, double* dw,
                            double* db, const Conv2dShape& s) {
  for (int64_t oc = 0; oc < s.c_out; ++oc) {
    for (int64_t ci = 0; ci < s.c_in; ++ci) {
      double* dwc = dw + ((oc * s.c_in + ci) * s.kernel) * s.kernel;
      for (int ky = 0; ky < s.kernel; ++ky) {
        for (int kx = 0; kx < s.kernel; ++kx) {
          dwc[ky * s.kernel + kx] += conv_dw_elem(dy, x, s, oc, ci, ky, kx);
        }
      }
    }
  }
  if (db) {
    const int64_t oh = s.out_h();
    const int64_t ow = s.out_w();
    for (int64_t oc = 0; oc < s.c_out; ++oc) {
      double acc = 0.0;
      for (int64_t n = 0; n < s.n; ++n) {
        const double* dyc = dy + ((n * s.c_out + oc) * oh) * ow;
        for (int64_t k = 0; k < oh * ow; ++k) {
          acc += dyc[k];
        }
      }
      db[oc] += acc;
    }
  }
}

void relu_forward(const double* x, double* y, int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    y[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
}

void relu_backward(const double* x, const double* dy, double* dx, int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    if (x[i] > 0.0) dx[i] += dy[i];
  }
}

void maxpool_forward(const double* x, double* y, int64_t* argmax,
                     const Pool2dShape& s) {
  const int64_t oh = s.out_h();
  const int64_t ow = s.out_w();
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t c = 0; c < s.c; ++c) {
      for (int64_t oy = 0; oy < oh; ++oy) {
        for (int64_t ox = 0; ox < ow; ++ox) {
          maxpool_out_elem(x, y, argmax, s, n, c, oy, ox);
        }
      }
    }
  }
}

void gap_forward(const double* x, double* y, int64_t n, int64_t c, int64_t hw) {
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < c; ++j) {
      const double* xc = x + (i * c + j) * hw;
      double acc = 0.0;
      for (int64_t k = 0; k < hw; ++k) {
        acc += xc[k];
      }
      y[i * c + j] = acc / static_cast<double>(hw);
    }
  }
}

void gap_backward(const double* dy, double* dx, int64_t n, int64_t c, int64_t hw) {
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < c; ++j) {
      const double g = dy[i * c + j] / static_cast<double>(hw);
      double* dxc = dx + (i * c + j) * hw;
      for (int64_t k = 0; k < hw; ++k) {
        dxc[k] += g;
      }
    }
  }
}

void batchnorm_stats(const double* x, double* mean, double* var, int64_t n,
                     int64_t c, int64_t hw) {
  for (int64_t j = 0; j < c; ++j) {
    bn_channel_stats(x, mean, var, n, c, hw, j);
  }
}

void batchnorm_forward(const double* x, const double* mean, const double* var,
                       const double* gamma, const double* beta, double eps,
                       double* y, double* xhat, int64_t n, int64_t c, int64_t hw) {
  for (int64_t j = 0; j < c; ++j) {
    bn_channel_forward(x, mean, var, gamma, beta, eps, y, xhat, n, c, hw, j);
  }
}

void batchnorm_backward(const double* dy, const double* xhat,
                        const double* gamma, const double* var, double eps,
                        double* dx, double* dgamma, double* dbeta, int64_t n,
                        int64_t c, int64_t hw) {
  for (int64_t j = 0; j < c; ++j) {
    bn_channel_backward(dy, xhat, gamma, var, eps, dx, dgamma, dbeta, n, c, hw, j);
  }
}

}  // namespace serial

}  // namespace ticketforge::kernels
