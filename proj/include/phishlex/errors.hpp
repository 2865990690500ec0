#pragma once

#include <stdexcept>
#include <string>

namespace phishlex {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// url-features
struct EmptyUrlError : Error { using Error::Error; };
struct BatchEmptyError : Error { using Error::Error; };

// data-pipeline
struct FileNotFoundError : Error { using Error::Error; };
struct MissingColumnError : Error { using Error::Error; };
struct EmptyFileError : Error { using Error::Error; };
struct TooFewSamplesError : Error { using Error::Error; };
struct SchemaMismatchError : Error { using Error::Error; };

// tensor-nn
struct ShapeMismatchError : Error { using Error::Error; };
struct BatchTooSmallError : Error { using Error::Error; };
struct NonFiniteError : Error { using Error::Error; };

// phish-model / baselines
struct EmptyTestSetError : Error { using Error::Error; };
struct EmptyTrainSetError : Error { using Error::Error; };
struct KTooLargeError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct VersionMismatchError : Error { using Error::Error; };
struct CorruptChecksumError : Error { using Error::Error; };

// explain
struct SubsetTooLargeError : Error { using Error::Error; };
struct EmptySampleError : Error { using Error::Error; };

// cli / config / misc preconditions
struct ConfigError : Error { using Error::Error; };
struct InvalidArgumentError : Error { using Error::Error; };

}  // namespace phishlex
