#include "lrd/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lrd/error.hpp"

namespace lrd {

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::PiecewiseConstant: return "piecewise_constant";
    case SyntheticKind::PiecewiseSmooth: return "piecewise_smooth";
    case SyntheticKind::Textured: return "textured";
  }
  return "unknown";
}

namespace {

struct Rect {
  std::size_t y0, y1, x0, x1;
  bool contains(std::size_t y, std::size_t x) const { return y >= y0 && y < y1 && x >= x0 && x < x1; }
};

Rect random_rect(std::mt19937_64& rng, std::size_t size) {
  std::uniform_int_distribution<std::size_t> extent(size / 8, size / 2);
  const std::size_t h = extent(rng);
  const std::size_t w = extent(rng);
  std::uniform_int_distribution<std::size_t> y(0, size - h);
  std::uniform_int_distribution<std::size_t> x(0, size - w);
  const std::size_t y0 = y(rng);
  const std::size_t x0 = x(rng);
  return {y0, y0 + h, x0, x0 + w};
}

}  // namespace

DenseTensor synthetic_image(SyntheticKind kind, std::size_t size, std::uint64_t seed) {
  if (size < 8) throw DomainError("synthetic images need size >= 8");
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(kind));
  DenseTensor img(Shape{size, size});
  const auto n = static_cast<double>(size);
  auto at = [&](std::size_t y, std::size_t x) -> double& { return img[y * size + x]; };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double levels[] = {0.25, 0.5, 0.75, 1.0};
  std::uniform_int_distribution<int> level(0, 3);

  switch (kind) {
    case SyntheticKind::PiecewiseConstant: {
      for (int k = 0; k < 7; ++k) {
        const Rect r = random_rect(rng, size);
        const double v = levels[level(rng)];
        for (std::size_t y = r.y0; y < r.y1; ++y)
          for (std::size_t x = r.x0; x < r.x1; ++x) at(y, x) = v;
      }
      // Guarantee both extremes of the range are present.
      for (std::size_t y = size / 8; y < size / 4; ++y)
        for (std::size_t x = size / 8; x < size / 4; ++x) at(y, x) = 1.0;
      break;
    }
    case SyntheticKind::PiecewiseSmooth: {
      const double gy = unit(rng), gx = unit(rng);
      for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x)
          at(y, x) = 0.15 + 0.35 * (gy * static_cast<double>(y) + gx * static_cast<double>(x)) /
                                (n * (gy + gx + 1e-9));
      for (int k = 0; k < 4; ++k) {
        const Rect r = random_rect(rng, size);
        const double base = 0.4 + 0.5 * unit(rng);
        const double slope = 0.3 * (unit(rng) - 0.5);
        for (std::size_t y = r.y0; y < r.y1; ++y)
          for (std::size_t x = r.x0; x < r.x1; ++x)
            at(y, x) = base + slope * (static_cast<double>(y - r.y0) / n);
      }
      const double cy = n * (0.3 + 0.4 * unit(rng));
      const double cx = n * (0.3 + 0.4 * unit(rng));
      const double rad = n * (0.1 + 0.1 * unit(rng));
      for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
          const double d = std::hypot(static_cast<double>(y) - cy, static_cast<double>(x) - cx);
          if (d < rad) at(y, x) = 0.9 - 0.5 * d / rad;
        }
      }
      break;
    }
    case SyntheticKind::Textured: {
      for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) at(y, x) = 0.3;
      for (int k = 0; k < 5; ++k) {
        const Rect r = random_rect(rng, size);
        const double period = 6.0 + 10.0 * unit(rng);
        const double theta = std::numbers::pi * unit(rng);
        const double mean = 0.3 + 0.4 * unit(rng);
        const double amp = 0.1 + 0.15 * unit(rng);
        for (std::size_t y = r.y0; y < r.y1; ++y) {
          for (std::size_t x = r.x0; x < r.x1; ++x) {
            const double phase = (std::cos(theta) * static_cast<double>(x) +
                                  std::sin(theta) * static_cast<double>(y)) * 2.0 * std::numbers::pi / period;
            at(y, x) = mean + amp * std::sin(phase);
          }
        }
      }
      break;
    }
  }
  for (auto& v : img.data()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

std::vector<NamedImage> synthetic_suite(std::size_t size, std::uint64_t seed, std::size_t per_kind) {
  std::vector<NamedImage> out;
  for (std::size_t k = 0; k < per_kind; ++k) {
    for (auto kind : {SyntheticKind::PiecewiseConstant, SyntheticKind::PiecewiseSmooth,
                      SyntheticKind::Textured}) {
      const std::uint64_t s = seed + k;
      out.push_back({to_string(kind) + "_" + std::to_string(s), synthetic_image(kind, size, s)});
    }
  }
  return out;
}

DenseTensor synthetic_video(std::size_t frames, std::size_t height, std::size_t width,
                            std::uint64_t seed) {
  if (frames == 0 || height < 8 || width < 8) throw DomainError("synthetic video too small");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DenseTensor v(Shape{frames, height, width});
  const auto h = static_cast<double>(height);
  const auto w = static_cast<double>(width);
  const double vy = 0.8 * (unit(rng) - 0.5), vx = 1.2 * (unit(rng) - 0.5);
  const double period = 5.0 + 4.0 * unit(rng);
  for (std::size_t t = 0; t < frames; ++t) {
    const double ft = static_cast<double>(t);
    const double ty = 0.25 * h + vy * ft, tx = 0.2 * w + vx * ft;
    const double fy = 0.55 * h - vy * ft, fx = 0.6 * w - vx * ft;
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const double yy = static_cast<double>(y), xx = static_cast<double>(x);
        double val = 0.35 + 0.25 * (yy / h) + 0.1 * std::sin(2.0 * std::numbers::pi * xx / w);
        if (yy >= ty && yy < ty + 0.35 * h && xx >= tx && xx < tx + 0.4 * w) {
          val = 0.5 + 0.12 * std::sin(2.0 * std::numbers::pi * (xx + 0.5 * yy) / period);
        }
        if (yy >= fy && yy < fy + 0.25 * h && xx >= fx && xx < fx + 0.25 * w) val = 0.8;
        v[(t * height + y) * width + x] = std::clamp(val, 0.0, 1.0);
      }
    }
  }
  return v;
}

}  // namespace lrd
