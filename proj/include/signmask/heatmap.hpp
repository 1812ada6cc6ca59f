// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signmask/config.hpp"
#include "signmask/ingest.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace signmask {

inline constexpr int kHeatmapSize = 224;

/// One 224x224 map, row-major, values in [0, 1].
struct Heatmap {
    std::vector<float> values = std::vector<float>(static_cast<std::size_t>(kHeatmapSize) * kHeatmapSize, 0.0f);

    float at(int y, int x) const { return values[static_cast<std::size_t>(y) * kHeatmapSize + x]; }
    float& at(int y, int x) { return values[static_cast<std::size_t>(y) * kHeatmapSize + x]; }

    friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

struct HeatmapClip {
    /// Frame-major; with grouped channels each frame contributes body,
    /// left-hand, right-hand maps in that order.
    std::vector<Heatmap> maps;
    int frame_count = 0;
    double sigma = 4.0;
    HeatmapChannels channels = HeatmapChannels::Shared;
};

/// Adds one Gaussian of peak `amplitude` at (cx, cy) by per-pixel maximum.
/// The footprint is cut at 5 sigma, where the tail is below half a u16 step.
void splat_gaussian(Heatmap& map, double cx, double cy, double amplitude, double sigma);

/// Max-composite of every keypoint with confidence > 0 in [first, last).
Heatmap render_keypoints(const KeypointFrame& frame, int first, int last, double sigma, double scale = 1.0);

/// Single shared map over all 55 keypoints. Coordinates are crop-space; a crop
/// size other than 224 is rescaled onto the 224 grid.
Heatmap render_heatmap(const KeypointFrame& frame, const PipelineConfig& config = {});

/// Raises EmptyClip for an empty frame list.
HeatmapClip render_clip(std::span<const KeypointFrame> frames, const PipelineConfig& config = {});

inline constexpr std::string_view kHeatmapMagic = "SHMP";
inline constexpr std::uint16_t kHeatmapVersion = 1;

/// u16 fixed point, round(value * 65535).
std::uint16_t quantize(float value);

/// SHMP dump: magic, version, map count, then the maps as u16 fixed point.
std::vector<std::uint8_t> encode_heatmaps(const HeatmapClip& clip);

/// Dequantized maps (values k / 65535).
std::vector<Heatmap> decode_heatmaps(std::span<const std::uint8_t> bytes);

}  // namespace signmask
