#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lrd/tensor.hpp"

namespace lrd {

enum class BankKind { Dct, Gradient, Identity };

BankKind parse_bank_kind(const std::string& name);
std::string to_string(BankKind kind);

/// A bank of M convolution filters sharing one support.
///
/// Invariants (checked on construction): M >= 1, all filters share a shape,
/// no filter is identically zero.
class Dictionary {
 public:
  Dictionary(std::vector<DenseTensor> filters, std::string name, std::string source);

  std::size_t size() const { return filters_.size(); }
  const Shape& support() const { return filters_.front().shape(); }
  std::size_t order() const { return support().size(); }
  const std::vector<DenseTensor>& filters() const { return filters_; }
  const DenseTensor& filter(std::size_t m) const { return filters_.at(m); }
  const std::string& name() const { return name_; }
  const std::string& source() const { return source_; }

  /// Stacks the filters into one tensor of shape [M, L_1, ..., L_N].
  DenseTensor stacked() const;
  /// Copy with every filter scaled to unit Frobenius norm.
  Dictionary normalized() const;
  /// Sub-bank with the first `count` filters.
  Dictionary first(std::size_t count) const;

 private:
  std::vector<DenseTensor> filters_;
  std::string name_;
  std::string source_;
};

/// Splits a stacked [M, L...] tensor into a dictionary; names the offending
/// filter index when one is all-zero.
Dictionary dictionary_from_stacked(const DenseTensor& stacked, std::string name, std::string source);

Dictionary load_bank(const std::filesystem::path& path);
void save_bank(const Dictionary& d, const std::filesystem::path& path);

/// Number of atoms `kind` can provide for `support`.
std::size_t builtin_capacity(BankKind kind, const Shape& support);

/// Deterministic analytic banks standing in for learned filters.
///   Dct:      separable DCT-II atoms, orthonormal, ordered by total frequency
///             (ties broken lexicographically); atom 0 is constant.
///   Gradient: centered delta, then a forward difference along each axis.
///   Identity: a single centered delta.
Dictionary builtin_bank(BankKind kind, const Shape& support, std::size_t count);

}  // namespace lrd
