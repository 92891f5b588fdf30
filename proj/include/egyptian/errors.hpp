#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace egyptian {

/// Malformed arguments: duplicate denominators, gaps in a count table, bad certificate syntax.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request that does not fit the configured memory or enumeration budget.
class capacity_error : public std::runtime_error {
 public:
  capacity_error(const std::string& what, std::uint64_t required_bytes = 0,
                 std::optional<std::uint64_t> suggested_split = std::nullopt)
      : std::runtime_error(what), required_bytes_(required_bytes), suggested_split_(suggested_split) {}

  std::uint64_t required_bytes() const noexcept { return required_bytes_; }
  std::optional<std::uint64_t> suggested_split() const noexcept { return suggested_split_; }

 private:
  std::uint64_t required_bytes_;
  std::optional<std::uint64_t> suggested_split_;
};

/// A shift that would move a set bit past the end of a bitmap.
class overflow_error : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Real-valued evaluation outside the function's domain (e.g. log of a non-positive number).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace egyptian
