// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signmask/ingest.hpp"
#include "signmask/token_set.hpp"

#include <span>

namespace signmask {

inline constexpr int kTubeDepth = 2;
inline constexpr int kPatchSize = 16;

struct TokenCoord {
    int t = 0;
    int r = 0;
    int c = 0;

    friend bool operator==(const TokenCoord&, const TokenCoord&) = default;
};

/// Tube-token lattice: index = t * rows * cols + r * cols + c.
struct TokenGrid {
    int frames = 0;  ///< tube-frames, clip frames / 2
    int rows = 0;
    int cols = 0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(frames) * rows * cols; }
    std::size_t frame_size() const noexcept { return static_cast<std::size_t>(rows) * cols; }

    TokenIndex index(int t, int r, int c) const noexcept
    {
        return static_cast<TokenIndex>((static_cast<std::size_t>(t) * rows + r) * cols + c);
    }
    TokenIndex index(TokenCoord coord) const noexcept { return index(coord.t, coord.r, coord.c); }

    TokenCoord coord(TokenIndex index) const noexcept
    {
        const int c = static_cast<int>(index % cols);
        const int r = static_cast<int>((index / cols) % rows);
        const int t = static_cast<int>(index / frame_size());
        return {t, r, c};
    }

    /// Index of the horizontally reflected token (same t, r; column cols-1-c).
    TokenIndex mirror(TokenIndex index) const noexcept
    {
        const auto [t, r, c] = coord(index);
        return this->index(t, r, cols - 1 - c);
    }

    TokenSet all() const;

    friend bool operator==(const TokenGrid&, const TokenGrid&) = default;
};

/// Raises IndivisibleDims when the clip cannot be tiled by 2x16x16 tubes.
TokenGrid build_grid(const ClipMeta& meta);

struct RegionTokens {
    TokenSet left_hand;
    TokenSet right_hand;
    TokenSet left_arm;
    TokenSet right_arm;

    TokenSet hands() const { return left_hand | right_hand; }
    TokenSet arms() const { return left_arm | right_arm; }
    TokenSet hand_arm() const { return hands() | arms(); }
    const TokenSet& hand(Side side) const { return side == Side::Left ? left_hand : right_hand; }
    const TokenSet& arm(Side side) const { return side == Side::Left ? left_arm : right_arm; }
    TokenSet side_region(Side side) const { return hand(side) | arm(side); }

    /// Same regions with both arm sets cleared.
    RegionTokens hands_only() const { return {left_hand, right_hand, {}, {}}; }

    friend bool operator==(const RegionTokens&, const RegionTokens&) = default;
};

/// A token joins a region when its 2x16x16 footprint holds more than
/// `coverage_threshold` of that region's pixels (and at least one), counted
/// over both frames of the tube.
RegionTokens region_tokens(const TokenGrid& grid, std::span<const SegmentFrame> segments,
                           double coverage_threshold = 0.0);

}  // namespace signmask
