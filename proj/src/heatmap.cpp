// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/heatmap.hpp"

#include "signmask/error.hpp"
#include "signmask/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace signmask {

void splat_gaussian(Heatmap& map, double cx, double cy, double amplitude, double sigma)
{
    if (!(amplitude > 0.0)) {
        return;
    }
    const double radius = 5.0 * sigma;
    const int x0 = std::max(0, static_cast<int>(std::ceil(cx - radius)));
    const int x1 = std::min(kHeatmapSize - 1, static_cast<int>(std::floor(cx + radius)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(cy - radius)));
    const int y1 = std::min(kHeatmapSize - 1, static_cast<int>(std::floor(cy + radius)));
    if (x0 > x1 || y0 > y1) {
        return;
    }
    const double inv = 1.0 / (2.0 * sigma * sigma);
    // exp(-(dx^2 + dy^2) k) = exp(-dx^2 k) * exp(-dy^2 k)
    std::vector<double> column_weight(static_cast<std::size_t>(x1 - x0 + 1));
    for (int x = x0; x <= x1; ++x) {
        const double dx = x - cx;
        column_weight[static_cast<std::size_t>(x - x0)] = std::exp(-dx * dx * inv);
    }
    for (int y = y0; y <= y1; ++y) {
        const double dy = y - cy;
        const double row_weight = amplitude * std::exp(-dy * dy * inv);
        for (int x = x0; x <= x1; ++x) {
            const auto value = static_cast<float>(row_weight * column_weight[static_cast<std::size_t>(x - x0)]);
            float& cell = map.at(y, x);
            cell = std::max(cell, value);
        }
    }
}

Heatmap render_keypoints(const KeypointFrame& frame, int first, int last, double sigma, double scale)
{
    Heatmap map;
    for (int i = first; i < last; ++i) {
        const Keypoint& p = frame.points[static_cast<std::size_t>(i)];
        if (p.confidence > 0.0) {
            splat_gaussian(map, p.x * scale, p.y * scale, p.confidence, sigma);
        }
    }
    return map;
}

Heatmap render_heatmap(const KeypointFrame& frame, const PipelineConfig& config)
{
    const double scale = static_cast<double>(kHeatmapSize) / config.crop_size;
    return render_keypoints(frame, 0, kKeypointCount, config.heatmap_sigma, scale);
}

HeatmapClip render_clip(std::span<const KeypointFrame> frames, const PipelineConfig& config)
{
    if (frames.empty()) {
        throw Error(ErrorCode::EmptyClip, "no frames to render");
    }
    HeatmapClip clip;
    clip.frame_count = static_cast<int>(frames.size());
    clip.sigma = config.heatmap_sigma;
    clip.channels = config.heatmap_channels;
    const double scale = static_cast<double>(kHeatmapSize) / config.crop_size;
    for (const auto& frame : frames) {
        if (config.heatmap_channels == HeatmapChannels::Shared) {
            clip.maps.push_back(render_keypoints(frame, 0, kKeypointCount, config.heatmap_sigma, scale));
        } else {
            clip.maps.push_back(render_keypoints(frame, 0, kBodyKeypointCount, config.heatmap_sigma, scale));
            clip.maps.push_back(render_keypoints(frame, kp::left_hand_begin, kp::right_hand_begin,
                                                 config.heatmap_sigma, scale));
            clip.maps.push_back(render_keypoints(frame, kp::right_hand_begin, kKeypointCount,
                                                 config.heatmap_sigma, scale));
        }
    }
    return clip;
}

std::uint16_t quantize(float value)
{
    return static_cast<std::uint16_t>(std::lround(std::clamp(static_cast<double>(value), 0.0, 1.0) * 65535.0));
}

std::vector<std::uint8_t> encode_heatmaps(const HeatmapClip& clip)
{
    if (clip.maps.size() > std::numeric_limits<std::uint16_t>::max()) {
        throw Error(ErrorCode::SchemaViolation, "too many heatmaps for one SHMP dump");
    }
    ByteWriter writer;
    writer.bytes(kHeatmapMagic);
    writer.u16(kHeatmapVersion);
    writer.u16(static_cast<std::uint16_t>(clip.maps.size()));
    writer.buffer().reserve(writer.buffer().size() + clip.maps.size() * kHeatmapSize * kHeatmapSize * 2);
    for (const auto& map : clip.maps) {
        for (float value : map.values) {
            writer.u16(quantize(value));
        }
    }
    return writer.take();
}

std::vector<Heatmap> decode_heatmaps(std::span<const std::uint8_t> bytes)
{
    ByteReader reader(bytes);
    if (reader.bytes(kHeatmapMagic.size()) != kHeatmapMagic) {
        throw Error(ErrorCode::SchemaViolation, "missing SHMP magic");
    }
    if (const auto version = reader.u16(); version != kHeatmapVersion) {
        throw Error(ErrorCode::SchemaViolation, "unsupported SHMP version " + std::to_string(version));
    }
    const std::uint16_t count = reader.u16();
    const std::size_t plane = static_cast<std::size_t>(kHeatmapSize) * kHeatmapSize;
    if (reader.remaining() != count * plane * 2) {
        throw Error(ErrorCode::SchemaViolation, "SHMP payload size does not match its map count");
    }
    std::vector<Heatmap> maps(count);
    for (auto& map : maps) {
        for (auto& value : map.values) {
            value = static_cast<float>(reader.u16() / 65535.0);
        }
    }
    return maps;
}

}  // namespace signmask
