#ifndef PAMSVM_ERROR_HPP
#define PAMSVM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pamsvm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSeed : Error { using Error::Error; };
struct OddBitCount : Error { using Error::Error; };
struct InvalidRolloff : Error { using Error::Error; };
struct EmptyFilter : Error { using Error::Error; };
struct InvalidBandwidth : Error { using Error::Error; };
struct InvalidTimingOffset : Error { using Error::Error; };
struct AlignmentError : Error { using Error::Error; };
struct TooShort : Error { using Error::Error; };
struct DegenerateTrainingSet : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct InvalidArgument : Error { using Error::Error; };

// Scenario-file problems; the CLI maps these to exit code 2.
struct ConfigError : Error { using Error::Error; };
struct ParseError : ConfigError { using ConfigError::ConfigError; };
struct ValidationError : ConfigError { using ConfigError::ConfigError; };

} // namespace pamsvm

#endif
