// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace signmask {

enum class ErrorCode {
    MissingFrame,
    SchemaViolation,
    DimensionMismatch,
    EmptyBox,
    NoBoxes,
    MissingJoint,
    IndivisibleDims,
    EmptyRegions,
    EmptyClip,
    EmptyMask,
    NonPositiveProbability,
    EmptyHandSet,
    ShapeMismatch,
    MissingBundle,
    MissingFrames,
    Io,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI report) can branch on the kind without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace signmask
