#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace susing {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Tensor shapes that do not fit the operation.
class DimensionError : public Error
{
public:
  using Error::Error;
};

/// An operation was invoked in the wrong order (e.g. backward before forward).
class StateError : public Error
{
public:
  using Error::Error;
};

class ArgumentError : public Error
{
public:
  using Error::Error;
};

class IndexError : public Error
{
public:
  using Error::Error;
};

/// Text input that could not be parsed. Carries the 1-based line number.
class ParseError : public Error
{
public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + ", line " + std::to_string(line)), mLine(line)
  {}

  std::size_t line() const noexcept { return mLine; }

private:
  std::size_t mLine;
};

class IoError : public Error
{
public:
  using Error::Error;
};

/// Truncated or corrupted binary file.
class IntegrityError : public Error
{
public:
  using Error::Error;
};

class VersionError : public Error
{
public:
  using Error::Error;
};

/// NaN or Inf where finite values are required.
class NumericError : public Error
{
public:
  using Error::Error;
};

} // namespace susing
