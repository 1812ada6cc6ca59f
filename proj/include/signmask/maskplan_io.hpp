// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signmask/maskgen.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace signmask {

inline constexpr std::string_view kPlanMagic = "SMSK";

/// Version 1 freezes the sampling algorithm: mt19937_64 seeded through
/// splitmix64(seed ^ tag), rejection-sampled bounded integers, and uniform
/// k-th-candidate selection in canonical token order.
inline constexpr std::uint16_t kPlanVersion = 1;

/// Canonical little-endian SMSK encoding. The visible set is implicit; the
/// stored ratio is the achieved one in units of 1/10000. In-memory provenance
/// (branch, side, alignment steps) is not part of the format.
std::vector<std::uint8_t> encode_plan(const MaskPlan& plan);
MaskPlan decode_plan(std::span<const std::uint8_t> bytes);

/// Lossless debugging rendering: a header followed by one line per token.
std::string plan_to_text(const MaskPlan& plan);
MaskPlan plan_from_text(std::string_view text);

}  // namespace signmask
