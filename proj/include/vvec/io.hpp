#pragma once

#include <string>
#include <vector>

#include "vvec/mask.hpp"
#include "vvec/raster.hpp"
#include "vvec/synth.hpp"
#include "vvec/vectorize.hpp"

namespace vvec::io {

// --- PNG -------------------------------------------------------------------
// Fixed encoder settings, so identical planes produce identical bytes.

void write_png_rgb(const std::string& path, const PlaneU8& r, const PlaneU8& g, const PlaneU8& b);
void read_png_rgb(const std::string& path, PlaneU8& r, PlaneU8& g, PlaneU8& b);

// --- Raster bundle ---------------------------------------------------------
// Directory layout: bands.png (RGB) + sidecar.json (sensor, timestamp,
// geotransform, scene id). Write-then-read is byte-identical on planes.

void write_bundle(const RasterBundle& bundle, const std::string& dir);
RasterBundle read_bundle(const std::string& dir);

// --- Multi-class masks -----------------------------------------------------
// Stored as an RGB PNG (plane0 -> R, plane1 -> G, B unused) plus a JSON
// sidecar documenting the plane order.

void write_mask(const ProbMask& mask, const std::string& png_path);
ProbMask read_mask(const std::string& png_path);

// --- GeoJSON ---------------------------------------------------------------
// Detections and ground truth as FeatureCollections; footprints are emitted
// in geographic coordinates via the geotransform and mapped back on read.

void write_detections(const std::vector<vectorize::Detection>& dets, const GeoTransform& gt,
                      const std::string& path);
std::vector<vectorize::Detection> read_detections(const std::string& path, const GeoTransform& gt);

void write_truth(const synth::GroundTruthSet& truth, const GeoTransform& gt,
                 const std::string& path);
synth::GroundTruthSet read_truth(const std::string& path, const GeoTransform& gt);

// Atomic text write (temp + rename).
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace vvec::io
