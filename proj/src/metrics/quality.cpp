// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/metrics/quality.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mfavis/error.hpp"

namespace mfavis {

double psnr_from_mse(double mse, double peak) {
  if (mse < 0.0 || !std::isfinite(mse)) throw NumericError("mse must be finite and nonnegative");
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

namespace {

void check_same_size(const Image8& a, const Image8& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ParameterError("image sizes differ: " + std::to_string(a.width) + "x" +
                         std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                         std::to_string(b.height));
  }
  if (a.rgb.size() != 3 * a.pixel_count() || b.rgb.size() != 3 * b.pixel_count()) {
    throw ParameterError("image buffer does not match its size");
  }
}

std::vector<double> luma(const Image8& img) {
  std::vector<double> y(img.pixel_count());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = 0.2126 * img.rgb[3 * i] + 0.7152 * img.rgb[3 * i + 1] + 0.0722 * img.rgb[3 * i + 2];
  }
  return y;
}

constexpr int kWin = 11;

std::array<double, kWin> gaussian_window() {
  std::array<double, kWin> w{};
  double sum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - kWin / 2;
    w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    sum += w[static_cast<std::size_t>(i)];
  }
  for (double& v : w) v /= sum;
  return w;
}

double ssim_from_moments(double mx, double my, double vx, double vy, double cxy) {
  constexpr double c1 = (0.01 * 255) * (0.01 * 255);
  constexpr double c2 = (0.03 * 255) * (0.03 * 255);
  return ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

}  // namespace

double ssim_luma(const Image8& a, const Image8& b) {
  check_same_size(a, b);
  const std::vector<double> x = luma(a);
  const std::vector<double> y = luma(b);
  const int w = a.width;
  const int h = a.height;

  if (w < kWin || h < kWin) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= n;
    my /= n;
    double vx = 0, vy = 0, cxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      vx += (x[i] - mx) * (x[i] - mx);
      vy += (y[i] - my) * (y[i] - my);
      cxy += (x[i] - mx) * (y[i] - my);
    }
    return ssim_from_moments(mx, my, vx / n, vy / n, cxy / n);
  }

  // separable Gaussian filtering: horizontal pass over rows, then vertical
  const auto g = gaussian_window();
  const int ow = w - kWin + 1;
  const int oh = h - kWin + 1;
  std::array<std::vector<double>, 5> horiz;
  for (auto& v : horiz) v.assign(static_cast<std::size_t>(ow) * h, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      double s[5] = {0, 0, 0, 0, 0};
      for (int k = 0; k < kWin; ++k) {
        const std::size_t i = static_cast<std::size_t>(r) * w + c + k;
        const double wk = g[static_cast<std::size_t>(k)];
        s[0] += wk * x[i];
        s[1] += wk * y[i];
        s[2] += wk * x[i] * x[i];
        s[3] += wk * y[i] * y[i];
        s[4] += wk * x[i] * y[i];
      }
      for (int m = 0; m < 5; ++m) horiz[m][static_cast<std::size_t>(r) * ow + c] = s[m];
    }
  }
  double total = 0.0;
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double s[5] = {0, 0, 0, 0, 0};
      for (int k = 0; k < kWin; ++k) {
        const std::size_t i = static_cast<std::size_t>(r + k) * ow + c;
        for (int m = 0; m < 5; ++m) s[m] += g[static_cast<std::size_t>(k)] * horiz[m][i];
      }
      const double mx = s[0], my = s[1];
      total += ssim_from_moments(mx, my, s[2] - mx * mx, s[3] - my * my, s[4] - mx * my);
    }
  }
  return total / (static_cast<double>(ow) * oh);
}

QualityReport image_metrics(const Image8& test, const Image8& reference) {
  check_same_size(test, reference);
  double sse = 0.0;
  for (std::size_t i = 0; i < test.rgb.size(); ++i) {
    const double d = static_cast<double>(test.rgb[i]) - reference.rgb[i];
    sse += d * d;
  }
  QualityReport r;
  r.mse = sse / static_cast<double>(test.rgb.size());
  r.psnr_db = psnr_from_mse(r.mse, 255.0);
  r.ssim = ssim_luma(test, reference);
  return r;
}

double volume_psnr(const std::function<double(Vec3)>& test, const ScalarGrid3D& reference) {
  const double peak = reference.value_range();
  if (!(peak > 0.0)) throw NumericError("reference volume has zero value range");
  const Index3 d = reference.dims();
  double sse = 0.0;
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        const double e = test(reference.position(i, j, k)) - reference.at(i, j, k);
        sse += e * e;
      }
    }
  }
  return psnr_from_mse(sse / static_cast<double>(reference.size()), peak);
}

double volume_psnr(const ScalarGrid3D& test, const ScalarGrid3D& reference) {
  if (test.dims() != reference.dims()) throw ParameterError("volume dims differ");
  const double peak = reference.value_range();
  if (!(peak > 0.0)) throw NumericError("reference volume has zero value range");
  double sse = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double e = test.values()[i] - reference.values()[i];
    sse += e * e;
  }
  return psnr_from_mse(sse / static_cast<double>(reference.size()), peak);
}

std::string format_psnr(double psnr_db) {
  if (std::isinf(psnr_db)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", psnr_db);
  return buf;
}

std::string to_string(const QualityReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "mse=%.6f psnr_db=%s ssim=%.6f", r.mse, format_psnr(r.psnr_db).c_str(),
                r.ssim);
  return buf;
}

}  // namespace mfavis
