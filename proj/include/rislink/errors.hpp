// SPDX-License-Identifier: Apache-2.0
//
// Error types shared across the library. Everything derives from
// std::runtime_error so callers can catch broadly or by category.

#pragma once

#include <stdexcept>
#include <string>

namespace rislink {

// Malformed or inconsistent configuration (bad codebook size, unknown
// method tag, invalid budget, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometric impossibility: non-positive propagation distance, NIU placed
// on top of the BS, and the like.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-conformable operands in a vector/matrix operation.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical input outside the callee's domain (non-finite dB value,
// log argument <= 0, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All-zero or vanishing channel where a direction is required.
class DegenerateChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config-text parse failure; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace rislink
