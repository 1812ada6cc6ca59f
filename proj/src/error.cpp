// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/error.hpp"

namespace signmask {

std::string_view error_code_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::MissingFrame: return "MissingFrame";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyBox: return "EmptyBox";
    case ErrorCode::NoBoxes: return "NoBoxes";
    case ErrorCode::MissingJoint: return "MissingJoint";
    case ErrorCode::IndivisibleDims: return "IndivisibleDims";
    case ErrorCode::EmptyRegions: return "EmptyRegions";
    case ErrorCode::EmptyClip: return "EmptyClip";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::NonPositiveProbability: return "NonPositiveProbability";
    case ErrorCode::EmptyHandSet: return "EmptyHandSet";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MissingBundle: return "MissingBundle";
    case ErrorCode::MissingFrames: return "MissingFrames";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code)
{
}

}  // namespace signmask
