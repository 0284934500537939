// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace henn {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

class DegreeLimitExceeded : public Error {
 public:
  using Error::Error;
};

class CyclicPlan : public Error {
 public:
  using Error::Error;
};

// Raised by the expression parser; `offset` is the byte offset of the
// offending token within the input text.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class ContextMismatch : public Error {
 public:
  using Error::Error;
};

class LevelExhausted : public Error {
 public:
  using Error::Error;
};

// Raised by CSV loaders; `line` is 1-based.
class MalformedRow : public Error {
 public:
  MalformedRow(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class Diverged : public Error {
 public:
  using Error::Error;
};

class OddIntervals : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

}  // namespace henn
