// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/error.hpp"

namespace lfr {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kTruncatedBody: return "TruncatedBody";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kDegreeMismatch: return "DegreeMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kViewOutOfRange: return "ViewOutOfRange";
    case ErrorCode::kInvalidSize: return "InvalidSize";
    case ErrorCode::kDegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::kTileIdOverflow: return "TileIdOverflow";
    case ErrorCode::kInconsistentInputs: return "InconsistentInputs";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace lfr
