#include "dcrm/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "dcrm/errors.hpp"

namespace dcrm {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;

// Column matrix [C*k*k, H*W] of one sample for same-size correlation.
void im2col(const double* x, std::size_t c_in, std::size_t h, std::size_t w, std::size_t k,
            double* col) {
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  const std::ptrdiff_t hh = static_cast<std::ptrdiff_t>(h);
  const std::ptrdiff_t ww = static_cast<std::ptrdiff_t>(w);
  for (std::size_t c = 0; c < c_in; ++c) {
    const double* plane = x + c * h * w;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        double* row = col + ((c * k + a) * k + b) * h * w;
        const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(a) - pad;
        const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(b) - pad;
        for (std::ptrdiff_t y = 0; y < hh; ++y) {
          double* dst = row + y * ww;
          const std::ptrdiff_t sy = y + dy;
          if (sy < 0 || sy >= hh) {
            std::fill(dst, dst + ww, 0.0);
            continue;
          }
          const double* src = plane + sy * ww;
          for (std::ptrdiff_t xx = 0; xx < ww; ++xx) {
            const std::ptrdiff_t sx = xx + dx;
            dst[xx] = (sx < 0 || sx >= ww) ? 0.0 : src[sx];
          }
        }
      }
    }
  }
}

void col2im(const double* col, std::size_t c_in, std::size_t h, std::size_t w, std::size_t k,
            double* x) {
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  const std::ptrdiff_t hh = static_cast<std::ptrdiff_t>(h);
  const std::ptrdiff_t ww = static_cast<std::ptrdiff_t>(w);
  for (std::size_t c = 0; c < c_in; ++c) {
    double* plane = x + c * h * w;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        const double* row = col + ((c * k + a) * k + b) * h * w;
        const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(a) - pad;
        const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(b) - pad;
        for (std::ptrdiff_t y = 0; y < hh; ++y) {
          const std::ptrdiff_t sy = y + dy;
          if (sy < 0 || sy >= hh) continue;
          const double* src = row + y * ww;
          double* dst = plane + sy * ww;
          for (std::ptrdiff_t xx = 0; xx < ww; ++xx) {
            const std::ptrdiff_t sx = xx + dx;
            if (sx >= 0 && sx < ww) dst[sx] += src[xx];
          }
        }
      }
    }
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace

Var conv2d(Tape& tape, Var x, Var weight, Var bias) {
  const Tensor& xv = tape.value(x);
  const Tensor& wv = tape.value(weight);
  const Tensor& bv = tape.value(bias);
  const Shape xs = xv.shape();
  const Shape ws = wv.shape();
  require(ws.h == ws.w && ws.h % 2 == 1, "conv2d: kernel must be square with odd size");
  require(ws.c == xs.c, "conv2d: input " + xs.str() + " does not match weight " + ws.str());
  require(bv.size() == ws.n, "conv2d: bias size does not match output channels");
  const std::size_t k = ws.h;
  const std::size_t hw = xs.h * xs.w;
  const std::size_t rows = xs.c * k * k;
  const std::size_t c_out = ws.n;

  Tensor out({xs.n, c_out, xs.h, xs.w});
  const bool keep = tape.grad_enabled() &&
                    (tape.requires_grad(x) || tape.requires_grad(weight) || tape.requires_grad(bias));
  auto cols = std::make_shared<AlignedBuffer>(keep ? xs.n * rows * hw : rows * hw);
  ConstRowMap wm(wv.data(), static_cast<Eigen::Index>(c_out), static_cast<Eigen::Index>(rows));
  Eigen::Map<const Eigen::VectorXd> bvec(bv.data(), static_cast<Eigen::Index>(c_out));
  for (std::size_t i = 0; i < xs.n; ++i) {
    double* col = cols->data() + (keep ? i * rows * hw : 0);
    im2col(xv.data() + i * xs.c * hw, xs.c, xs.h, xs.w, k, col);
    ConstRowMap cm(col, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(hw));
    RowMap om(out.data() + i * c_out * hw, static_cast<Eigen::Index>(c_out),
              static_cast<Eigen::Index>(hw));
    om.noalias() = wm * cm;
    om.colwise() += bvec;
  }
  if (!keep) return tape.record(std::move(out), {x, weight, bias}, nullptr);

  return tape.record(std::move(out), {x, weight, bias},
                     [=](Tape& t, const Tensor& g) {
                       const Tensor& wv2 = t.value(weight);
                       ConstRowMap wm2(wv2.data(), static_cast<Eigen::Index>(c_out),
                                       static_cast<Eigen::Index>(rows));
                       const bool gx = t.requires_grad(x);
                       const bool gw = t.requires_grad(weight);
                       const bool gb = t.requires_grad(bias);
                       RowMat dcol;
                       for (std::size_t i = 0; i < xs.n; ++i) {
                         ConstRowMap gm(g.data() + i * c_out * hw, static_cast<Eigen::Index>(c_out),
                                        static_cast<Eigen::Index>(hw));
                         ConstRowMap cm(cols->data() + i * rows * hw,
                                        static_cast<Eigen::Index>(rows),
                                        static_cast<Eigen::Index>(hw));
                         if (gw) {
                           RowMap dw(t.grad_buffer(weight).data(), static_cast<Eigen::Index>(c_out),
                                     static_cast<Eigen::Index>(rows));
                           dw.noalias() += gm * cm.transpose();
                         }
                         if (gb) {
                           Eigen::Map<Eigen::VectorXd> db(t.grad_buffer(bias).data(),
                                                          static_cast<Eigen::Index>(c_out));
                           db += gm.rowwise().sum();
                         }
                         if (gx) {
                           dcol.noalias() = wm2.transpose() * gm;
                           col2im(dcol.data(), xs.c, xs.h, xs.w, k,
                                  t.grad_buffer(x).data() + i * xs.c * hw);
                         }
                       }
                     });
}

Var leaky_relu(Tape& tape, Var x, double slope) {
  const Tensor& xv = tape.value(x);
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] >= 0.0 ? xv[i] : slope * xv[i];
  return tape.record(std::move(out), {x}, [x, slope](Tape& t, const Tensor& g) {
    const Tensor& xv2 = t.value(x);
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += xv2[i] >= 0.0 ? g[i] : slope * g[i];
  });
}

Var relu(Tape& tape, Var x) { return leaky_relu(tape, x, 0.0); }

Var maxpool2(Tape& tape, Var x) {
  const Tensor& xv = tape.value(x);
  const Shape s = xv.shape();
  if (s.h % 2 != 0 || s.w % 2 != 0) throw ShapeError("maxpool2: odd spatial size " + s.str());
  const Shape os{s.n, s.c, s.h / 2, s.w / 2};
  Tensor out(os);
  auto argmax = std::make_shared<std::vector<std::uint32_t>>(os.size());
  std::size_t o = 0;
  for (std::size_t p = 0; p < s.n * s.c; ++p) {
    const std::size_t base = p * s.h * s.w;
    for (std::size_t y = 0; y < os.h; ++y) {
      for (std::size_t xx = 0; xx < os.w; ++xx, ++o) {
        std::size_t best = base + 2 * y * s.w + 2 * xx;
        const std::size_t cand[3] = {best + 1, best + s.w, best + s.w + 1};
        for (std::size_t c : cand)
          if (xv[c] > xv[best]) best = c;
        out[o] = xv[best];
        (*argmax)[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return tape.record(std::move(out), {x}, [x, argmax](Tape& t, const Tensor& g) {
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) dx[(*argmax)[i]] += g[i];
  });
}

Var upsample2(Tape& tape, Var x) {
  const Tensor& xv = tape.value(x);
  const Shape s = xv.shape();
  const Shape os{s.n, s.c, 2 * s.h, 2 * s.w};
  Tensor out(os);
  for (std::size_t p = 0; p < s.n * s.c; ++p)
    for (std::size_t y = 0; y < os.h; ++y)
      for (std::size_t xx = 0; xx < os.w; ++xx)
        out[(p * os.h + y) * os.w + xx] = xv[(p * s.h + y / 2) * s.w + xx / 2];
  return tape.record(std::move(out), {x}, [x, s, os](Tape& t, const Tensor& g) {
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t p = 0; p < s.n * s.c; ++p)
      for (std::size_t y = 0; y < os.h; ++y)
        for (std::size_t xx = 0; xx < os.w; ++xx)
          dx[(p * s.h + y / 2) * s.w + xx / 2] += g[(p * os.h + y) * os.w + xx];
  });
}

Var batchnorm2d(Tape& tape, Var x, Var gamma, Var beta, BatchNormState& state, Mode mode) {
  const Tensor& xv = tape.value(x);
  const Shape s = xv.shape();
  require(tape.value(gamma).size() == s.c && tape.value(beta).size() == s.c,
          "batchnorm2d: scale/shift size does not match channels");
  require(state.running_mean.size() == s.c && state.running_var.size() == s.c,
          "batchnorm2d: running statistics do not match channels");
  const std::size_t hw = s.plane();
  const double count = static_cast<double>(s.n * hw);
  const Tensor& gv = tape.value(gamma);
  const Tensor& bv = tape.value(beta);

  auto xhat = std::make_shared<Tensor>(s);
  auto inv_std = std::make_shared<std::vector<double>>(s.c);
  Tensor out(s);
  for (std::size_t c = 0; c < s.c; ++c) {
    double mean;
    double var;
    if (mode == Mode::kTrain) {
      double sum = 0.0;
      for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t k = 0; k < hw; ++k) sum += xv[(i * s.c + c) * hw + k];
      mean = sum / count;
      double sq = 0.0;
      for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t k = 0; k < hw; ++k) {
          const double d = xv[(i * s.c + c) * hw + k] - mean;
          sq += d * d;
        }
      var = sq / count;
      const double unbiased = count > 1.0 ? sq / (count - 1.0) : var;
      state.running_mean[c] = (1.0 - state.momentum) * state.running_mean[c] + state.momentum * mean;
      state.running_var[c] = (1.0 - state.momentum) * state.running_var[c] + state.momentum * unbiased;
    } else {
      mean = state.running_mean[c];
      var = state.running_var[c];
    }
    const double is = 1.0 / std::sqrt(var + state.eps);
    (*inv_std)[c] = is;
    for (std::size_t i = 0; i < s.n; ++i)
      for (std::size_t k = 0; k < hw; ++k) {
        const std::size_t idx = (i * s.c + c) * hw + k;
        const double xh = (xv[idx] - mean) * is;
        (*xhat)[idx] = xh;
        out[idx] = gv[c] * xh + bv[c];
      }
  }
  const bool train = mode == Mode::kTrain;
  return tape.record(std::move(out), {x, gamma, beta},
                     [=](Tape& t, const Tensor& g) {
                       const Tensor& gv2 = t.value(gamma);
                       const bool gx = t.requires_grad(x);
                       for (std::size_t c = 0; c < s.c; ++c) {
                         double sum_g = 0.0;
                         double sum_gx = 0.0;
                         for (std::size_t i = 0; i < s.n; ++i)
                           for (std::size_t k = 0; k < hw; ++k) {
                             const std::size_t idx = (i * s.c + c) * hw + k;
                             sum_g += g[idx];
                             sum_gx += g[idx] * (*xhat)[idx];
                           }
                         if (t.requires_grad(gamma)) t.grad_buffer(gamma)[c] += sum_gx;
                         if (t.requires_grad(beta)) t.grad_buffer(beta)[c] += sum_g;
                         if (!gx) continue;
                         Tensor& dx = t.grad_buffer(x);
                         const double scale = gv2[c] * (*inv_std)[c];
                         const double mg = sum_g / count;
                         const double mgx = sum_gx / count;
                         for (std::size_t i = 0; i < s.n; ++i)
                           for (std::size_t k = 0; k < hw; ++k) {
                             const std::size_t idx = (i * s.c + c) * hw + k;
                             dx[idx] += train ? scale * (g[idx] - mg - (*xhat)[idx] * mgx)
                                              : scale * g[idx];
                           }
                       }
                     });
}

Var dropout(Tape& tape, Var x, double p, Mode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("dropout probability must lie in [0, 1)");
  if (mode == Mode::kEval || p == 0.0) return x;
  const Tensor& xv = tape.value(x);
  auto mask = std::make_shared<std::vector<double>>(xv.size());
  const double keep_scale = 1.0 / (1.0 - p);
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    (*mask)[i] = rng.uniform01() < p ? 0.0 : keep_scale;
    out[i] = xv[i] * (*mask)[i];
  }
  return tape.record(std::move(out), {x}, [x, mask](Tape& t, const Tensor& g) {
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * (*mask)[i];
  });
}

Var concat_channels(Tape& tape, Var a, Var b) {
  const Shape sa = tape.value(a).shape();
  const Shape sb = tape.value(b).shape();
  require(sa.n == sb.n && sa.h == sb.h && sa.w == sb.w,
          "concat_channels: " + sa.str() + " and " + sb.str() + " do not align");
  const std::size_t hw = sa.plane();
  Tensor out({sa.n, sa.c + sb.c, sa.h, sa.w});
  const Tensor& av = tape.value(a);
  const Tensor& bv = tape.value(b);
  for (std::size_t i = 0; i < sa.n; ++i) {
    std::copy_n(av.data() + i * sa.c * hw, sa.c * hw, out.data() + i * (sa.c + sb.c) * hw);
    std::copy_n(bv.data() + i * sb.c * hw, sb.c * hw, out.data() + (i * (sa.c + sb.c) + sa.c) * hw);
  }
  return tape.record(std::move(out), {a, b}, [=](Tape& t, const Tensor& g) {
    for (std::size_t i = 0; i < sa.n; ++i) {
      const double* src = g.data() + i * (sa.c + sb.c) * hw;
      if (t.requires_grad(a)) {
        double* dst = t.grad_buffer(a).data() + i * sa.c * hw;
        for (std::size_t k = 0; k < sa.c * hw; ++k) dst[k] += src[k];
      }
      if (t.requires_grad(b)) {
        double* dst = t.grad_buffer(b).data() + i * sb.c * hw;
        for (std::size_t k = 0; k < sb.c * hw; ++k) dst[k] += src[sa.c * hw + k];
      }
    }
  });
}

Var pad_spatial(Tape& tape, Var x, std::size_t target, std::size_t offset) {
  const Shape s = tape.value(x).shape();
  require(offset + s.h <= target && offset + s.w <= target,
          "pad_spatial: " + s.str() + " does not fit in " + std::to_string(target));
  if (target == s.h && target == s.w) return x;
  const Tensor& xv = tape.value(x);
  Tensor out({s.n, s.c, target, target});
  for (std::size_t p = 0; p < s.n * s.c; ++p)
    for (std::size_t y = 0; y < s.h; ++y)
      std::copy_n(xv.data() + (p * s.h + y) * s.w, s.w,
                  out.data() + (p * target + y + offset) * target + offset);
  return tape.record(std::move(out), {x}, [=](Tape& t, const Tensor& g) {
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t p = 0; p < s.n * s.c; ++p)
      for (std::size_t y = 0; y < s.h; ++y)
        for (std::size_t xx = 0; xx < s.w; ++xx)
          dx[(p * s.h + y) * s.w + xx] += g[(p * target + y + offset) * target + offset + xx];
  });
}

Var crop_spatial(Tape& tape, Var x, std::size_t size, std::size_t offset) {
  const Shape s = tape.value(x).shape();
  require(offset + size <= s.h && offset + size <= s.w,
          "crop_spatial: window exceeds " + s.str());
  if (size == s.h && size == s.w) return x;
  const Tensor& xv = tape.value(x);
  Tensor out({s.n, s.c, size, size});
  for (std::size_t p = 0; p < s.n * s.c; ++p)
    for (std::size_t y = 0; y < size; ++y)
      std::copy_n(xv.data() + (p * s.h + y + offset) * s.w + offset, size,
                  out.data() + (p * size + y) * size);
  return tape.record(std::move(out), {x}, [=](Tape& t, const Tensor& g) {
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t p = 0; p < s.n * s.c; ++p)
      for (std::size_t y = 0; y < size; ++y)
        for (std::size_t xx = 0; xx < size; ++xx)
          dx[(p * s.h + y + offset) * s.w + offset + xx] += g[(p * size + y) * size + xx];
  });
}

Var affine(Tape& tape, Var x, double scale, double shift) {
  const Tensor& xv = tape.value(x);
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = scale * xv[i] + shift;
  return tape.record(std::move(out), {x}, [x, scale](Tape& t, const Tensor& g) {
    Tensor& dx = t.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += scale * g[i];
  });
}

}  // namespace dcrm
