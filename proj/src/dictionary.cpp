#include "lrd/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lrd/tensor_io.hpp"

namespace lrd {

BankKind parse_bank_kind(const std::string& name) {
  if (name == "dct") return BankKind::Dct;
  if (name == "gradient") return BankKind::Gradient;
  if (name == "identity") return BankKind::Identity;
  throw ConfigError("unknown filter bank kind '" + name + "' (expected dct, gradient or identity)");
}

std::string to_string(BankKind kind) {
  switch (kind) {
    case BankKind::Dct: return "dct";
    case BankKind::Gradient: return "gradient";
    case BankKind::Identity: return "identity";
  }
  return "unknown";
}

Dictionary::Dictionary(std::vector<DenseTensor> filters, std::string name, std::string source)
    : filters_(std::move(filters)), name_(std::move(name)), source_(std::move(source)) {
  if (filters_.empty()) throw DomainError("dictionary needs at least one filter");
  for (std::size_t m = 0; m < filters_.size(); ++m) {
    if (filters_[m].shape() != filters_[0].shape()) {
      throw DomainError("filter " + std::to_string(m) + " has shape " +
                        shape_to_string(filters_[m].shape()) + ", expected " +
                        shape_to_string(filters_[0].shape()));
    }
    const auto data = filters_[m].data();
    if (std::all_of(data.begin(), data.end(), [](double v) { return v == 0.0; })) {
      throw DomainError("filter " + std::to_string(m) + " is all zero");
    }
  }
}

DenseTensor Dictionary::stacked() const {
  Shape shape{filters_.size()};
  shape.insert(shape.end(), support().begin(), support().end());
  std::vector<double> data;
  data.reserve(shape_size(shape));
  for (const auto& f : filters_) data.insert(data.end(), f.data().begin(), f.data().end());
  return DenseTensor(std::move(shape), std::move(data));
}

Dictionary Dictionary::normalized() const {
  std::vector<DenseTensor> out = filters_;
  for (auto& f : out) {
    const double norm = std::sqrt(frobenius_norm_squared(f));
    for (auto& v : f.data()) v /= norm;
  }
  return Dictionary(std::move(out), name_, source_);
}

Dictionary Dictionary::first(std::size_t count) const {
  if (count == 0 || count > filters_.size()) {
    throw DomainError("cannot take " + std::to_string(count) + " filters from a bank of " +
                      std::to_string(filters_.size()));
  }
  return Dictionary({filters_.begin(), filters_.begin() + static_cast<std::ptrdiff_t>(count)},
                    name_, source_);
}

Dictionary dictionary_from_stacked(const DenseTensor& stacked, std::string name, std::string source) {
  if (stacked.order() < 2) {
    throw FormatError("filter bank tensor needs order >= 2 (M followed by the filter support)");
  }
  const std::size_t count = stacked.extent(0);
  const Shape support(stacked.shape().begin() + 1, stacked.shape().end());
  const std::size_t per = shape_size(support);
  std::vector<DenseTensor> filters;
  filters.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    const auto begin = stacked.values().begin() + static_cast<std::ptrdiff_t>(m * per);
    std::vector<double> data(begin, begin + static_cast<std::ptrdiff_t>(per));
    if (std::all_of(data.begin(), data.end(), [](double v) { return v == 0.0; })) {
      throw FormatError("filter " + std::to_string(m) + " is all zero");
    }
    filters.emplace_back(support, std::move(data));
  }
  return Dictionary(std::move(filters), std::move(name), std::move(source));
}

Dictionary load_bank(const std::filesystem::path& path) {
  const DenseTensor stacked = load_real_tensor(path);
  try {
    return dictionary_from_stacked(stacked, path.stem().string(), "file:" + path.string());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_bank(const Dictionary& d, const std::filesystem::path& path) {
  save_tensor(d.stacked(), path);
}

namespace {

std::vector<std::vector<std::size_t>> dct_frequencies(const Shape& support) {
  std::vector<std::vector<std::size_t>> all;
  std::vector<std::size_t> k(support.size(), 0);
  do {
    all.push_back(k);
  } while (next_index(k, support));
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    std::size_t sa = 0, sb = 0;
    for (auto v : a) sa += v;
    for (auto v : b) sb += v;
    return sa < sb;
  });
  return all;
}

double dct_basis(std::size_t k, std::size_t x, std::size_t len) {
  const auto l = static_cast<double>(len);
  const double scale = (k == 0) ? std::sqrt(1.0 / l) : std::sqrt(2.0 / l);
  return scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(x) + 1.0) *
                          static_cast<double>(k) / (2.0 * l));
}

DenseTensor centered_delta(const Shape& support) {
  DenseTensor d(support);
  std::vector<std::size_t> center(support.size());
  for (std::size_t k = 0; k < support.size(); ++k) center[k] = support[k] / 2;
  d.at(center) = 1.0;
  return d;
}

}  // namespace

std::size_t builtin_capacity(BankKind kind, const Shape& support) {
  switch (kind) {
    case BankKind::Dct: return shape_size(support);
    case BankKind::Gradient: {
      std::size_t n = 1;
      for (std::size_t e : support) n += (e >= 2) ? 1 : 0;
      return n;
    }
    case BankKind::Identity: return 1;
  }
  return 0;
}

Dictionary builtin_bank(BankKind kind, const Shape& support, std::size_t count) {
  if (support.empty()) throw DomainError("filter support must have at least one dimension");
  for (std::size_t e : support) {
    if (e == 0) throw DomainError("filter support extents must be positive");
  }
  const std::size_t capacity = builtin_capacity(kind, support);
  if (count == 0 || count > capacity) {
    throw DomainError(to_string(kind) + " bank with support " + shape_to_string(support) +
                      " provides 1.." + std::to_string(capacity) + " filters, requested " +
                      std::to_string(count));
  }

  std::vector<DenseTensor> filters;
  switch (kind) {
    case BankKind::Dct: {
      const auto freqs = dct_frequencies(support);
      for (std::size_t a = 0; a < count; ++a) {
        DenseTensor atom(support);
        std::vector<std::size_t> x(support.size(), 0);
        std::size_t flat = 0;
        do {
          double v = 1.0;
          for (std::size_t d = 0; d < support.size(); ++d) v *= dct_basis(freqs[a][d], x[d], support[d]);
          atom[flat++] = v;
        } while (next_index(x, support));
        filters.push_back(std::move(atom));
      }
      break;
    }
    case BankKind::Gradient: {
      filters.push_back(centered_delta(support));
      std::vector<std::size_t> center(support.size());
      for (std::size_t d = 0; d < support.size(); ++d) center[d] = support[d] / 2;
      for (std::size_t d = 0; d < support.size() && filters.size() < count; ++d) {
        if (support[d] < 2) continue;
        DenseTensor diff(support);
        // Even supports of 2 have their center on the last tap; shift back one.
        std::vector<std::size_t> base = center;
        base[d] = std::min(center[d], support[d] - 2);
        std::vector<std::size_t> ahead = base;
        ahead[d] += 1;
        diff.at(base) = -1.0;
        diff.at(ahead) = 1.0;
        filters.push_back(std::move(diff));
      }
      break;
    }
    case BankKind::Identity:
      filters.push_back(centered_delta(support));
      break;
  }
  filters.resize(count);
  return Dictionary(std::move(filters), to_string(kind) + shape_to_string(support),
                    "builtin:" + to_string(kind));
}

}  // namespace lrd
