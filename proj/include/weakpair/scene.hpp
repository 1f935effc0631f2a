#pragma once

#include <cstdint>

#include "weakpair/image.hpp"

namespace weakpair {

/// Procedural overhead-map style texture: smooth background blobs, randomly
/// oriented road strokes and rotated rectangular blocks. Deterministic per
/// seed; values in [0,1].
Image render_scene(int width, int height, std::uint64_t seed);

}  // namespace weakpair
