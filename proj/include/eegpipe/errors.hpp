#pragma once

#include <stdexcept>
#include <string>

namespace eegpipe {

// Error categories map onto the CLI exit codes:
//   ParameterError -> 2 (usage), DataError -> 3 (data), NumericalError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid argument, configuration, or out-of-range parameter.
struct ParameterError : Error {
  using Error::Error;
};

// Malformed, inconsistent, or missing input data (includes I/O failures).
struct DataError : Error {
  using Error::Error;
};

// A solver or numeric procedure failed to produce a usable result.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace eegpipe
