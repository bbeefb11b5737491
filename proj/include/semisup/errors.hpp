#pragma once

#include <stdexcept>
#include <string>

namespace semisup {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NegativeWeight : Error { using Error::Error; };
struct SumOutOfTolerance : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct SymbolOutOfRange : Error { using Error::Error; };
struct UnknownGenerator : Error { using Error::Error; };
struct AbsoluteContinuityViolation : Error { using Error::Error; };
struct EmptySampleNoPrior : Error { using Error::Error; };
struct EnumerationTooLarge : Error { using Error::Error; };
struct TableTooShort : Error { using Error::Error; };
struct ConstraintViolated : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace semisup
