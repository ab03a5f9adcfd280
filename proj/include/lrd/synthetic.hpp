#pragma once

// Deterministic synthetic test content in [0,1], so benchmarks need no
// external downloads.

#include <cstdint>
#include <string>
#include <vector>

#include "lrd/tensor.hpp"

namespace lrd {

enum class SyntheticKind { PiecewiseConstant, PiecewiseSmooth, Textured };

std::string to_string(SyntheticKind kind);

/// size x size image of the given kind.
DenseTensor synthetic_image(SyntheticKind kind, std::size_t size, std::uint64_t seed);

struct NamedImage {
  std::string id;
  DenseTensor image;
};

/// One image of each kind per seed in [seed, seed + per_kind).
std::vector<NamedImage> synthetic_suite(std::size_t size, std::uint64_t seed = 1,
                                        std::size_t per_kind = 1);

/// [frames, height, width] clip: a smooth background with drifting textured
/// and flat rectangles.
DenseTensor synthetic_video(std::size_t frames, std::size_t height, std::size_t width,
                            std::uint64_t seed);

}  // namespace lrd
