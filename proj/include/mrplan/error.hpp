#pragma once

#include <stdexcept>
#include <string>

namespace mrplan {

// Runtime failure: bad input data, numerical breakdown, missing files.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed or schema-violating experiment configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace mrplan
