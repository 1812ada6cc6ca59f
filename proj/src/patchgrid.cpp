// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/patchgrid.hpp"

#include "signmask/error.hpp"

#include <array>
#include <numeric>

namespace signmask {

TokenSet TokenGrid::all() const
{
    std::vector<TokenIndex> items(size());
    std::iota(items.begin(), items.end(), TokenIndex{0});
    return TokenSet::from_sorted(std::move(items));
}

TokenGrid build_grid(const ClipMeta& meta)
{
    validate_tube_layout(meta);
    return {meta.kept_frames().size() / kTubeDepth, meta.height / kPatchSize, meta.width / kPatchSize};
}

RegionTokens region_tokens(const TokenGrid& grid, std::span<const SegmentFrame> segments, double coverage_threshold)
{
    if (segments.size() != static_cast<std::size_t>(grid.frames) * kTubeDepth) {
        throw Error(ErrorCode::DimensionMismatch, "segmentation covers " + std::to_string(segments.size()) +
                                                      " frames, grid expects " +
                                                      std::to_string(grid.frames * kTubeDepth));
    }
    for (const auto& frame : segments) {
        if (frame.height != grid.rows * kPatchSize || frame.width != grid.cols * kPatchSize) {
            throw Error(ErrorCode::DimensionMismatch, "segment frame dims do not match the token grid");
        }
    }

    constexpr int kFootprint = kTubeDepth * kPatchSize * kPatchSize;
    // Pixel count a region needs inside one footprint to claim the token.
    const int needed = std::max(1, static_cast<int>(coverage_threshold * kFootprint) + 1);

    // Per-token pixel counts for the four tracked parts, indexed by BodyPart code - 1.
    std::vector<std::array<int, 4>> counts(grid.size(), std::array<int, 4>{});
    for (std::size_t f = 0; f < segments.size(); ++f) {
        const SegmentFrame& frame = segments[f];
        const int t = static_cast<int>(f) / kTubeDepth;
        for (int y = 0; y < frame.height; ++y) {
            const std::uint8_t* row = frame.labels.data() + static_cast<std::size_t>(y) * frame.width;
            const int r = y / kPatchSize;
            for (int x = 0; x < frame.width; ++x) {
                const std::uint8_t code = row[x];
                if (code >= 1 && code <= 4) {
                    ++counts[grid.index(t, r, x / kPatchSize)][code - 1];
                }
            }
        }
    }

    std::array<std::vector<TokenIndex>, 4> members;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t part = 0; part < 4; ++part) {
            if (counts[i][part] >= needed) {
                members[part].push_back(static_cast<TokenIndex>(i));
            }
        }
    }
    return {TokenSet::from_sorted(std::move(members[0])), TokenSet::from_sorted(std::move(members[1])),
            TokenSet::from_sorted(std::move(members[2])), TokenSet::from_sorted(std::move(members[3]))};
}

}  // namespace signmask
