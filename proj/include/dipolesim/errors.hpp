#pragma once

#include <stdexcept>
#include <string>

namespace dipolesim {

// Error taxonomy, mapped to CLI exit codes in tools/main.cpp:
//   config_error, parameter_error, index_error, contract_error, size_error,
//   fit_error -> exit 1 (usage/config class)
//   io_error and anything else -> exit 2 (runtime class)

struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct index_error : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Instance too large for the exact solver; callers should switch to greedy.
struct size_error : std::length_error {
  using std::length_error::length_error;
};

struct fit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dipolesim
