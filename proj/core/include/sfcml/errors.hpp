#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sfcml {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MalformedLineError : public Error {
 public:
  MalformedLineError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class InsufficientInteractionsError : public Error {
 public:
  InsufficientInteractionsError(std::size_t user, const std::string& what)
      : Error("user " + std::to_string(user) + ": " + what), user_index(user) {}
  std::size_t user_index;
};

class IndexOutOfRangeError : public Error {
 public:
  using Error::Error;
};

class InsufficientItemsError : public Error {
 public:
  using Error::Error;
};

class DegenerateGraphError : public Error {
 public:
  using Error::Error;
};

class TooLargeForDenseError : public Error {
 public:
  using Error::Error;
};

class TooLargeForNaiveError : public Error {
 public:
  using Error::Error;
};

class InvalidTripletError : public Error {
 public:
  using Error::Error;
};

class NotEnoughNegativesError : public Error {
 public:
  using Error::Error;
};

class InvalidSampleError : public Error {
 public:
  using Error::Error;
};

class MismatchedSpaceError : public Error {
 public:
  using Error::Error;
};

class EmptyRelevantSetError : public Error {
 public:
  using Error::Error;
};

class DegenerateCandidatesError : public Error {
 public:
  using Error::Error;
};

class NoEvaluableUsersError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownKeyError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidValueError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class MissingKeyError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace sfcml
