// Copyright 2026 stdm toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace stdm {

// Malformed or inconsistent input data (bad files, mismatched counts,
// invalid labels). CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A pipeline component failed mid-run (translator crash, protocol
// violation). CLI maps this to exit code 3.
class PipelineError : public std::runtime_error {
 public:
  explicit PipelineError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stdm
