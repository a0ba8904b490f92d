#pragma once

#include "vvec/image.hpp"

// Data-parallel raster kernels. Each kernel has a serial reference and an
// OpenMP variant; both compute identical bytes (fixed per-output summation
// order), so the parallel path is checked against the serial one in tests.

namespace vvec::kernels {

enum class Exec { Serial, Parallel };

// Default execution policy: Parallel when built with OpenMP, Serial otherwise.
Exec default_exec();

// |a - b| per pixel.
PlaneF absdiff(const PlaneF& a, const PlaneF& b, Exec exec = default_exec());

// Separable Gaussian blur, truncated at 3 sigma, edge-clamped.
// sigma <= 0 returns the input unchanged.
PlaneF gaussian_blur(const PlaneF& img, double sigma, Exec exec = default_exec());

// Mean over a (2r+1)^2 box, edge-clamped.
PlaneF box_mean(const PlaneF& img, int radius, Exec exec = default_exec());

// Grayscale erosion / dilation with a disk structuring element.
PlaneF erode_disk(const PlaneF& img, int radius, Exec exec = default_exec());
PlaneF dilate_disk(const PlaneF& img, int radius, Exec exec = default_exec());

// White top-hat: img - opening(img, disk(radius)), clamped at 0.
PlaneF white_tophat(const PlaneF& img, int radius, Exec exec = default_exec());

// Sobel gradient magnitude, edge-clamped.
PlaneF gradient_magnitude(const PlaneF& img, Exec exec = default_exec());

}  // namespace vvec::kernels
