#pragma once

// Typed error hierarchy. Every failure mode callers are expected to
// distinguish gets its own type; all derive from uvre::Error so generic
// handlers can catch one base.

#include <stdexcept>
#include <string>

namespace uvre {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// embedding-core
struct ZeroVectorError : Error {
  using Error::Error;
};
struct DimensionMismatchError : Error {
  using Error::Error;
};
struct EmptyStoreError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};

// benchmark-registry
struct ManifestError : Error {
  using Error::Error;
};
struct IntegrityError : Error {
  using Error::Error;
};
struct UnknownTaskError : Error {
  using Error::Error;
};

// eval-engine
struct MissingBucketError : Error {
  using Error::Error;
};

// synth-pipeline
struct InsufficientAssetsError : Error {
  using Error::Error;
};
struct MissingCaptionerOutputError : Error {
  using Error::Error;
};

// curriculum-trainer
struct EmptyTaskError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

// analysis
struct ConstantInputError : Error {
  using Error::Error;
};
struct LengthMismatchError : Error {
  using Error::Error;
};
struct TooFewModelsError : Error {
  using Error::Error;
};
struct DegenerateXError : Error {
  using Error::Error;
};

// io / cli
struct IoError : Error {
  using Error::Error;
};

}  // namespace uvre
