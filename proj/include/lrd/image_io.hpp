#pragma once

// NetPBM (binary P5 / P6, maxval <= 255) and frame-directory I/O.
// Intensities map to [0,1] by /255 on read; writes clamp to [0,1] and round.

#include <filesystem>
#include <vector>

#include "lrd/tensor.hpp"

namespace lrd {

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  /// One [height, width] plane per channel (1 for P5, 3 for P6).
  std::vector<DenseTensor> planes;

  std::size_t channels() const { return planes.size(); }
};

Image read_pnm(const std::filesystem::path& path);
void write_pnm(const Image& image, const std::filesystem::path& path);

/// Single-channel convenience wrappers; read_pgm rejects colour files.
DenseTensor read_pgm(const std::filesystem::path& path);
void write_pgm(const DenseTensor& plane, const std::filesystem::path& path);

Image image_from_planes(std::vector<DenseTensor> planes);

/// Frame files (.ppm / .pgm) of a directory ordered by the integer embedded
/// in their names (frame2 before frame10), ties by name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Stacks the frames of `dir` into one [T, H, W] tensor per channel.
std::vector<DenseTensor> read_frames(const std::filesystem::path& dir);

/// Writes channel tensors [T, H, W] as frame_0000.ppm (or .pgm for one
/// channel), ... into `dir`, creating it if needed.
void write_frames(const std::vector<DenseTensor>& channels, const std::filesystem::path& dir);

}  // namespace lrd
