#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace slfnet {

/// Inclusive token span [start, end], 0-based.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - start + 1; }
  bool overlaps(const Span& o) const noexcept { return start <= o.end && o.start <= end; }
  bool contains(std::size_t i) const noexcept { return start <= i && i <= end; }
  auto operator<=>(const Span&) const = default;
};

// Empty optional = the EMPTY / NIL slot.
using OptSpan = std::optional<Span>;

/// One Action/Location/Object group. The action is never empty.
struct SlfGroup {
  Span action;
  OptSpan location;
  OptSpan object;
  auto operator<=>(const SlfGroup&) const = default;
};

// Tokens of a span joined by single spaces.
std::string span_text(const std::vector<std::string>& tokens, const Span& span);

}  // namespace slfnet
