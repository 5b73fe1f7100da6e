#pragma once

#include <stdexcept>
#include <string>

namespace binx {

// Bad call-site arguments (overlapping subsets, non-bijective permutation, ...).
struct argument_error : std::invalid_argument {
  explicit argument_error(const std::string& what) : std::invalid_argument(what) {}
};

// Vector arity does not match the model or game.
struct dimension_error : std::invalid_argument {
  explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

// Request exceeds the exact-enumeration cap or a dense-table size limit.
struct capacity_error : std::length_error {
  explicit capacity_error(const std::string& what) : std::length_error(what) {}
};

// Malformed or inconsistent input files (models, datasets, reports).
struct data_error : std::runtime_error {
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace binx
