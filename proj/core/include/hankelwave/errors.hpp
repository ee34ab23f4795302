#pragma once

#include <stdexcept>
#include <string>

namespace hankelwave {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration / parameter problems (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};
struct ParameterError : ConfigError {
  using ConfigError::ConfigError;
};
struct ScenarioError : ConfigError {
  using ConfigError::ConfigError;
};

// Data problems (CLI exit code 3).
struct DataError : Error {
  using Error::Error;
};
struct FormatError : DataError {
  using DataError::DataError;
};
struct TimingError : DataError {
  using DataError::DataError;
};
struct ShapeError : DataError {
  using DataError::DataError;
};
struct InsufficientDataError : DataError {
  using DataError::DataError;
};
struct DegenerateInputError : DataError {
  using DataError::DataError;
};
struct TrainingError : DataError {
  using DataError::DataError;
};
struct AmbiguityError : TrainingError {
  using TrainingError::TrainingError;
};
struct DivergenceError : DataError {
  using DataError::DataError;
};
struct StaleOperatorError : DataError {
  using DataError::DataError;
};
struct IoError : DataError {
  using DataError::DataError;
};

}  // namespace hankelwave
