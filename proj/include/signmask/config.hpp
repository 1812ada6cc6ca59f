// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace signmask {

enum class HeatmapChannels : std::uint8_t {
    Shared,   ///< one map, max-composited over all 55 keypoints
    Grouped,  ///< body / left hand / right hand
};

/// Upstream parser label -> engine class code. Unmapped entries keep their
/// own value, so the default table is the identity.
using LabelMap = std::array<std::uint8_t, 256>;

LabelMap identity_label_map();

struct PipelineConfig {
    double mask_ratio = 0.9;
    double overlap_threshold = 0.25;

    double arm_hang_a1_tolerance = 15.0;  // degrees around 90
    double arm_hang_a2_tolerance = 20.0;  // degrees around 180
    double arm_hang_distance_tolerance = 0.25;  // |d1-d2| / max(d1,d2,1)

    double movement_threshold = 0.2;  // fraction of the crop diagonal
    double presence_threshold = 0.3;
    double temporal_mask_fraction = 0.25;
    double region_coverage_threshold = 0.0;

    double heatmap_sigma = 4.0;
    HeatmapChannels heatmap_channels = HeatmapChannels::Shared;

    int crop_size = 224;
    bool nohands_fallback = true;
    double mixup_alpha = 0.8;
    std::uint64_t seed = 0;

    LabelMap label_map = identity_label_map();

    /// Throws Error(SchemaViolation) naming the first offending field.
    void validate() const;
};

/// Parses `key = value` lines. Blank lines and `#` comments are ignored;
/// unknown keys, malformed values and duplicate keys raise SchemaViolation.
PipelineConfig parse_config(std::string_view text);

PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const PipelineConfig& config);

}  // namespace signmask
