// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_ERRORS_HPP
#define KRYLOV_CORE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace krylov
{

class KrylovError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public KrylovError
{
public:
  using KrylovError::KrylovError;
};

// Raised by triangular solves and factorizations; index() is the offending (0-based)
// diagonal position.
class SingularMatrixError : public KrylovError
{
public:
  SingularMatrixError(const std::string &what, std::size_t index)
    : KrylovError(what), index_(index)
  {
  }
  std::size_t index() const { return index_; }

private:
  std::size_t index_;
};

class ParseError : public KrylovError
{
public:
  ParseError(const std::string &what, std::size_t line)
    : KrylovError("line " + std::to_string(line) + ": " + what), line_(line)
  {
  }
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class ConvergenceError : public KrylovError
{
public:
  using KrylovError::KrylovError;
};

// Well-formed input that violates the experiment schema; what() names the field.
class ConfigError : public KrylovError
{
public:
  using KrylovError::KrylovError;
};

// Loss of orthogonality detected by a single-reduction Gram-Schmidt variant (negative
// Pythagorean radicand). Distinct from a happy breakdown, which is not an error.
class OrthogonalityBreakdown : public KrylovError
{
public:
  OrthogonalityBreakdown(const std::string &what, std::size_t step)
    : KrylovError(what), step_(step)
  {
  }
  std::size_t step() const { return step_; }

private:
  std::size_t step_;
};

class BasisCollapseError : public KrylovError
{
public:
  using KrylovError::KrylovError;
};

}  // namespace krylov

#endif  // KRYLOV_CORE_ERRORS_HPP
