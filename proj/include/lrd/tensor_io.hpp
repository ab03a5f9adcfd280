#pragma once

// ".nt" tensor files:
//
//   offset  size     field
//   0       4        magic "NTEN"
//   4       4        u32 version (1)
//   8       4        u32 order N
//   12      4*N      u32 extents, mode 0 first
//   12+4N   1        u8 dtype: 0 = real float64, 1 = complex (re, im) float64 pairs
//   13+4N   ...      payload, row-major, little-endian
//
// Values are stored bit-exactly.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>

#include "lrd/tensor.hpp"

namespace lrd {

enum class TensorDtype : std::uint8_t { Real64 = 0, Complex64Pairs = 1 };

using AnyTensor = std::variant<DenseTensor, ComplexTensor>;

void write_nt(std::ostream& out, const DenseTensor& t);
void write_nt(std::ostream& out, const ComplexTensor& t);
AnyTensor read_nt(std::istream& in);

void save_tensor(const DenseTensor& t, const std::filesystem::path& path);
void save_tensor(const ComplexTensor& t, const std::filesystem::path& path);
AnyTensor load_tensor(const std::filesystem::path& path);
/// Loads a file that must hold a real tensor; complex payloads are a FormatError.
DenseTensor load_real_tensor(const std::filesystem::path& path);

}  // namespace lrd
