#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace hqmm {

using Symbol = std::uint32_t;

/// Ordered discrete observations y_1..y_l. The alphabet bound is checked
/// against the model at use time (see `check_alphabet`).
class ObservationSequence {
 public:
  ObservationSequence() = default;
  explicit ObservationSequence(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}
  ObservationSequence(std::initializer_list<Symbol> symbols) : symbols_(symbols) {}

  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  Symbol operator[](std::size_t t) const { return symbols_[t]; }
  std::span<const Symbol> symbols() const noexcept { return symbols_; }
  auto begin() const noexcept { return symbols_.begin(); }
  auto end() const noexcept { return symbols_.end(); }

  /// Throws InvalidArgument when a symbol is >= alphabet_size.
  void check_alphabet(std::size_t alphabet_size) const;

  friend bool operator==(const ObservationSequence&, const ObservationSequence&) = default;

 private:
  std::vector<Symbol> symbols_;
};

}  // namespace hqmm
