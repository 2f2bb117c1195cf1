// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lfr {

enum class ErrorCode {
  kMalformedHeader,
  kTruncatedBody,
  kUnsupportedFormat,
  kNonFiniteValue,
  kInvalidSpec,
  kDegreeMismatch,
  kInvalidConfig,
  kConfigMismatch,
  kCountMismatch,
  kSizeMismatch,
  kViewOutOfRange,
  kInvalidSize,
  kDegenerateCovariance,
  kTileIdOverflow,
  kInconsistentInputs,
  kEmptyMask,
  kIo,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception type thrown by every module; carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lfr
