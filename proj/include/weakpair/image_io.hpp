#pragma once

#include <filesystem>

#include "weakpair/image.hpp"

namespace weakpair {

/// Reads a binary (P5) or ASCII (P2) graymap; values scaled to [0,1].
Image read_pgm(const std::filesystem::path& path);

/// Writes an 8-bit binary PGM. Pixels are clamped to [0,1] and rounded.
void write_pgm(const std::filesystem::path& path, const Image& img);

/// Reads a PNG, converting to 8-bit grayscale.
Image read_png(const std::filesystem::path& path);

/// Dispatches on extension (.pgm / .png).
Image read_image(const std::filesystem::path& path);

/// Rounds to the 8-bit grid a PGM round trip produces.
Image quantize8(const Image& img);

}  // namespace weakpair
