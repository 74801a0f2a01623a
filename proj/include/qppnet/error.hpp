#pragma once

#include <stdexcept>
#include <string>

namespace qppnet {

// Base for every error raised by the library. Each subclass names the
// category a caller can react to; the message carries the detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes do not conform (affine, sub, unit input width, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// API misuse: empty inputs, non-scalar backward roots, bad configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed plan document or artifact. The message starts with a JSON path.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A schema is internally inconsistent or does not cover a kind.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A node cannot be featurized (unknown kind, too many children, ...).
class EncodingError : public Error {
 public:
  using Error::Error;
};

// Plan evaluation failed; the message names the offending node path.
class InferenceError : public Error {
 public:
  using Error::Error;
};

// Training data problems or divergence.
class TrainingError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace qppnet
