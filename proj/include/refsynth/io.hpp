#pragma once

#include <filesystem>
#include <string>

#include "refsynth/heightfield.hpp"
#include "refsynth/image.hpp"

namespace refsynth {

/// Writes an uncompressed scanline OpenEXR file with 32-bit float channels. Three-channel images
/// are stored as R, G, B; single-channel images as Y. The byte stream is a pure function of the
/// image, so digests are reproducible.
void write_exr(const std::filesystem::path &path, const Image &img);

/// Reads uncompressed scanline OpenEXR files with FLOAT or HALF channels. Returns R, G, B when
/// present, otherwise the single Y / Z / R channel.
Image read_exr(const std::filesystem::path &path);

/// 8-bit or 16-bit PNG, returned as raw values scaled to [0,1] (8-bit: v / 255, 16-bit: v / 65535)
/// with 1 (gray) or 3 (RGB) channels; alpha is dropped.
Image read_png(const std::filesystem::path &path);
/// Integer PNG values without normalization (0..255 or 0..65535), 1 or 3 channels.
Image read_png_raw(const std::filesystem::path &path);

/// 8-bit PNG from values in [0,1] (clamped, rounded). 1 or 3 channels.
void write_png8(const std::filesystem::path &path, const Image &img);
/// 16-bit grayscale PNG from integer values in [0, 65535].
void write_png16_gray(const std::filesystem::path &path, const Image &img);

/// 8-bit sRGB color raster decoded to linear RGB.
Image load_srgb_color(const std::filesystem::path &path);

/// Metric depth from a 16-bit PNG (meters = value * scale) or a float EXR (meters as stored).
Image load_depth(const std::filesystem::path &path, double png_scale);

/// Convenience: color + depth + field of view, validated.
DepthImage load_depth_image(const std::filesystem::path &rgb, const std::filesystem::path &depth,
                            double png_depth_scale, double hfov_deg);

/// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path &path);
std::string sha256_bytes(const std::string &bytes);

}  // namespace refsynth
