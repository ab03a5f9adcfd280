#include "lrd/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

namespace lrd {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  // The single whitespace after maxval separates header and raster; it is consumed here.
  return tok;
}

std::size_t parse_header_number(const std::string& tok, const std::filesystem::path& path) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(ch); })) {
    throw FormatError(path.string() + ": malformed NetPBM header");
  }
  return std::stoul(tok);
}

unsigned char quantize(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(clamped * 255.0));
}

}  // namespace

Image image_from_planes(std::vector<DenseTensor> planes) {
  if (planes.empty()) throw DomainError("image needs at least one plane");
  Image img;
  const Shape& s = planes.front().shape();
  if (s.size() != 2) throw DomainError("image planes must be 2-D, got " + shape_to_string(s));
  for (const auto& p : planes) {
    if (p.shape() != s) throw DomainError("image planes disagree on shape");
  }
  img.height = s[0];
  img.width = s[1];
  img.planes = std::move(planes);
  return img;
}

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image '" + path.string() + "'");
  const std::string magic = next_token(in);
  std::size_t channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError(path.string() + ": unsupported NetPBM type '" + magic + "' (need P5 or P6)");
  }
  const std::size_t width = parse_header_number(next_token(in), path);
  const std::size_t height = parse_header_number(next_token(in), path);
  const std::size_t maxval = parse_header_number(next_token(in), path);
  if (width == 0 || height == 0) throw FormatError(path.string() + ": empty image");
  if (maxval == 0 || maxval > 255) {
    throw FormatError(path.string() + ": only 8-bit NetPBM (maxval <= 255) is supported");
  }
  std::vector<unsigned char> raster(width * height * channels);
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (static_cast<std::size_t>(in.gcount()) != raster.size()) {
    throw FormatError(path.string() + ": truncated raster");
  }
  std::vector<DenseTensor> planes(channels, DenseTensor(Shape{height, width}));
  const auto top = static_cast<double>(maxval);
  for (std::size_t p = 0; p < width * height; ++p) {
    for (std::size_t c = 0; c < channels; ++c) planes[c][p] = raster[p * channels + c] / top;
  }
  return image_from_planes(std::move(planes));
}

void write_pnm(const Image& image, const std::filesystem::path& path) {
  const std::size_t channels = image.channels();
  if (channels != 1 && channels != 3) throw DomainError("NetPBM output needs 1 or 3 channels");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << (channels == 1 ? "P5" : "P6") << '\n' << image.width << ' ' << image.height << "\n255\n";
  std::vector<unsigned char> raster(image.width * image.height * channels);
  for (std::size_t p = 0; p < image.width * image.height; ++p) {
    for (std::size_t c = 0; c < channels; ++c) raster[p * channels + c] = quantize(image.planes[c][p]);
  }
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

DenseTensor read_pgm(const std::filesystem::path& path) {
  Image img = read_pnm(path);
  if (img.channels() != 1) throw FormatError(path.string() + ": expected a grayscale (P5) image");
  return std::move(img.planes.front());
}

void write_pgm(const DenseTensor& plane, const std::filesystem::path& path) {
  write_pnm(image_from_planes({plane}), path);
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  struct Entry {
    std::optional<unsigned long long> number;
    std::string name;
    fs::path path;
  };
  std::vector<Entry> entries;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = e.path().extension().string();
    if (ext != ".ppm" && ext != ".pgm") continue;
    const std::string stem = e.path().stem().string();
    std::optional<unsigned long long> number;
    // Last run of digits in the stem.
    auto end = stem.find_last_of("0123456789");
    if (end != std::string::npos) {
      auto begin = end;
      while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
      number = std::stoull(stem.substr(begin, end - begin + 1));
    }
    entries.push_back({number, e.path().filename().string(), e.path()});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.number != b.number) return a.number < b.number;
    return a.name < b.name;
  });
  std::vector<fs::path> out;
  for (auto& e : entries) out.push_back(std::move(e.path));
  return out;
}

std::vector<DenseTensor> read_frames(const std::filesystem::path& dir) {
  const auto files = list_frames(dir);
  if (files.empty()) throw IoError("no .ppm/.pgm frames in '" + dir.string() + "'");
  std::vector<Image> frames;
  for (const auto& f : files) frames.push_back(read_pnm(f));
  const Image& first = frames.front();
  for (std::size_t t = 1; t < frames.size(); ++t) {
    if (frames[t].width != first.width || frames[t].height != first.height ||
        frames[t].channels() != first.channels()) {
      throw FormatError(files[t].string() + ": frame size or channel count differs from " +
                        files.front().string());
    }
  }
  const std::size_t plane = first.width * first.height;
  std::vector<DenseTensor> channels;
  for (std::size_t c = 0; c < first.channels(); ++c) {
    DenseTensor t(Shape{frames.size(), first.height, first.width});
    for (std::size_t f = 0; f < frames.size(); ++f) {
      std::copy(frames[f].planes[c].data().begin(), frames[f].planes[c].data().end(),
                t.data().begin() + static_cast<std::ptrdiff_t>(f * plane));
    }
    channels.push_back(std::move(t));
  }
  return channels;
}

void write_frames(const std::vector<DenseTensor>& channels, const std::filesystem::path& dir) {
  if (channels.empty()) throw DomainError("no channels to write");
  const Shape& s = channels.front().shape();
  if (s.size() != 3) throw DomainError("frame tensors must be [T, H, W]");
  for (const auto& c : channels) {
    if (c.shape() != s) throw DomainError("channel tensors disagree on shape");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  const std::size_t plane = s[1] * s[2];
  const char* ext = channels.size() == 1 ? "pgm" : "ppm";
  for (std::size_t f = 0; f < s[0]; ++f) {
    std::vector<DenseTensor> planes;
    for (const auto& c : channels) {
      const auto begin = c.values().begin() + static_cast<std::ptrdiff_t>(f * plane);
      planes.emplace_back(Shape{s[1], s[2]},
                          std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(plane)));
    }
    char name[64];
    std::snprintf(name, sizeof name, "frame_%04zu.%s", f, ext);
    write_pnm(image_from_planes(std::move(planes)), dir / name);
  }
}

}  // namespace lrd
