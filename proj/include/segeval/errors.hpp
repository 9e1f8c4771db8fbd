#pragma once

#include <stdexcept>
#include <string>

namespace segeval {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file or message could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Matrix shape does not match its declared channels.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside its admissible domain (negative rate, point past f_max, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration (e.g. quadrature step not below sigma).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Recording, ground truth and segmentation refer to different recordings.
class MismatchError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Input too short or otherwise unusable for a segmenter.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace segeval
