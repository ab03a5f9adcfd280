#include "lrd/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace lrd {

namespace {

constexpr std::array<char, 4> kMagic = {'N', 'T', 'E', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int k = 0; k < 4; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b{};
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
  out.write(b.data(), b.size());
}

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError(std::string("truncated .nt file while reading ") + what);
  }
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), b.size(), what);
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
  return v;
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), b.size(), "payload");
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

void write_header(std::ostream& out, const Shape& shape, TensorDtype dtype) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(shape.size()));
  for (std::size_t e : shape) {
    if (e > std::numeric_limits<std::uint32_t>::max()) throw FormatError("extent too large for .nt");
    put_u32(out, static_cast<std::uint32_t>(e));
  }
  const char d = static_cast<char>(dtype);
  out.write(&d, 1);
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.empty()) throw IoError("empty output path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

void write_nt(std::ostream& out, const DenseTensor& t) {
  write_header(out, t.shape(), TensorDtype::Real64);
  for (double v : t.data()) put_f64(out, v);
}

void write_nt(std::ostream& out, const ComplexTensor& t) {
  write_header(out, t.shape(), TensorDtype::Complex64Pairs);
  for (const complex& v : t.data()) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
}

AnyTensor read_nt(std::istream& in) {
  std::array<char, 4> magic{};
  read_exact(in, magic.data(), magic.size(), "magic");
  if (magic != kMagic) throw FormatError("bad .nt magic (expected \"NTEN\")");
  const std::uint32_t version = get_u32(in, "version");
  if (version != kVersion) throw FormatError("unsupported .nt version " + std::to_string(version));
  const std::uint32_t order = get_u32(in, "order");
  if (order == 0) throw FormatError(".nt order must be at least 1");
  Shape shape(order);
  for (auto& e : shape) {
    e = get_u32(in, "extents");
    if (e == 0) throw FormatError(".nt extents must be positive");
  }
  char dtype = 0;
  read_exact(in, &dtype, 1, "dtype");
  const std::size_t n = shape_size(shape);
  switch (static_cast<TensorDtype>(dtype)) {
    case TensorDtype::Real64: {
      std::vector<double> data(n);
      for (auto& v : data) v = get_f64(in);
      return DenseTensor(std::move(shape), std::move(data));
    }
    case TensorDtype::Complex64Pairs: {
      std::vector<complex> data(n);
      for (auto& v : data) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        v = complex(re, im);
      }
      return ComplexTensor(std::move(shape), std::move(data));
    }
  }
  throw FormatError("unknown .nt dtype " + std::to_string(static_cast<int>(dtype)));
}

void save_tensor(const DenseTensor& t, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_nt(out, t);
  finish(out, path);
}

void save_tensor(const ComplexTensor& t, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_nt(out, t);
  finish(out, path);
}

AnyTensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return read_nt(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

DenseTensor load_real_tensor(const std::filesystem::path& path) {
  AnyTensor t = load_tensor(path);
  if (auto* real = std::get_if<DenseTensor>(&t)) return std::move(*real);
  throw FormatError(path.string() + ": expected a real-valued tensor");
}

}  // namespace lrd
