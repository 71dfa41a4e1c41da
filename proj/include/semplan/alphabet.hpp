#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semplan/error.hpp"

namespace semplan {

inline constexpr std::size_t kMaxObservations = 16;

using ObservationId = std::uint32_t;

/// An element of 2^O: bit i is set iff observation i holds.
class Letter {
 public:
  constexpr Letter() = default;
  constexpr explicit Letter(std::uint32_t bits) : bits_(bits) {}

  constexpr std::uint32_t bits() const noexcept { return bits_; }
  constexpr bool contains(ObservationId o) const noexcept { return (bits_ >> o) & 1U; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr Letter with(ObservationId o) const noexcept { return Letter(bits_ | (1U << o)); }

  constexpr auto operator<=>(const Letter&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Declared observation alphabet O. Names are indexed in declaration order.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() > kMaxObservations) {
      throw ModelError("alphabet has " + std::to_string(names_.size()) +
                       " observations; at most " + std::to_string(kMaxObservations) +
                       " are supported");
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw ModelError("empty observation name");
      for (std::size_t j = 0; j < i; ++j) {
        if (names_[i] == names_[j]) throw ModelError("duplicate observation '" + names_[i] + "'");
      }
    }
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(ObservationId o) const { return names_.at(o); }

  /// Number of letters |2^O|.
  std::uint32_t letter_count() const noexcept { return 1U << names_.size(); }

  bool valid(Letter l) const noexcept { return l.bits() < letter_count(); }

  std::optional<ObservationId> find(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<ObservationId>(it - names_.begin());
  }

  ObservationId index(std::string_view name) const {
    if (auto o = find(name)) return *o;
    throw ModelError("unknown observation '" + std::string(name) + "'");
  }

  Letter letter(const std::vector<std::string>& set) const {
    Letter l;
    for (const auto& n : set) l = l.with(index(n));
    return l;
  }

  std::vector<std::string> names_of(Letter l) const {
    std::vector<std::string> out;
    for (ObservationId o = 0; o < names_.size(); ++o) {
      if (l.contains(o)) out.push_back(names_[o]);
    }
    return out;
  }

  /// "{A,B}" style rendering.
  std::string format(Letter l) const {
    std::string s = "{";
    bool first = true;
    for (const auto& n : names_of(l)) {
      if (!first) s += ',';
      s += n;
      first = false;
    }
    return s + "}";
  }

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> names_;
};

}  // namespace semplan
