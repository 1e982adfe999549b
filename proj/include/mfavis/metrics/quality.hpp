// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mfavis/field/grid.hpp"
#include "mfavis/io/image8.hpp"

namespace mfavis {

// psnr_db is +infinity when mse == 0 and serialises as "inf".
struct QualityReport {
  double mse = 0.0;
  double psnr_db = 0.0;
  double ssim = 1.0;
};

double psnr_from_mse(double mse, double peak);

// MSE over all pixels and channels (0..255 scale), PSNR with peak 255, and
// mean SSIM on Rec.709 luma with an 11x11 Gaussian window (sigma 1.5,
// K1 = 0.01, K2 = 0.03, L = 255) over every full window position. Images
// smaller than the window use one window spanning the whole image.
QualityReport image_metrics(const Image8& test, const Image8& reference);

double ssim_luma(const Image8& a, const Image8& b);

// PSNR of `test` against `reference` at reference lattice points, peak =
// reference value range.
double volume_psnr(const ScalarGrid3D& test, const ScalarGrid3D& reference);

// Same, with the candidate given as a function evaluated at the lattice points.
double volume_psnr(const std::function<double(Vec3)>& test, const ScalarGrid3D& reference);

/// `mse=<v> psnr_db=<v|inf> ssim=<v>`
std::string to_string(const QualityReport& report);
std::string format_psnr(double psnr_db);

}  // namespace mfavis
