// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signmask/config.hpp"
#include "signmask/geometry.hpp"
#include "signmask/ingest.hpp"
#include "signmask/patchgrid.hpp"
#include "signmask/token_set.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace signmask {

enum class MaskStrategy : std::uint8_t { Random = 0, Tube = 1, STHandArm = 2, STHandOnly = 3 };
enum class Direction : std::uint8_t { Top = 0, Bottom = 1, Left = 2, Right = 3 };

/// Which path of the masking decision tree produced a plan. Kept in memory
/// for reporting; the SMSK format stores only strategy and direction.
enum class MaskBranch : std::uint8_t {
    Baseline,         ///< random or tube mask requested directly
    Directional,      ///< two-handed, overlap above threshold
    SideReserve,      ///< two-handed, overlap at or below threshold
    OneHanded,
    NoHandsFallback,  ///< ST masking impossible, tube mask used instead
};

std::string_view strategy_name(MaskStrategy value);
std::string_view direction_name(Direction value);
std::string_view branch_name(MaskBranch value);

struct TemporalWindow {
    int start = 0;
    int length = 0;

    friend bool operator==(const TemporalWindow&, const TemporalWindow&) = default;
};

struct MaskPlan {
    TokenGrid grid;
    MaskStrategy strategy = MaskStrategy::Random;
    TokenSet masked;
    TokenSet decoder_targets;
    std::uint64_t seed = 0;
    std::optional<Direction> direction;
    std::optional<TemporalWindow> temporal_window;

    MaskBranch branch = MaskBranch::Baseline;
    std::optional<Side> side;  ///< reserved side (two-handed) or moving side (one-handed)
    std::size_t alignment_steps = 0;

    TokenSet visible() const { return grid.all() - masked; }
    double achieved_ratio() const
    {
        return static_cast<double>(masked.size()) / static_cast<double>(grid.size());
    }
};

/// Overrides for the random draws. `mirrored` evaluates every draw in the
/// horizontally reflected frame: candidate orderings run right-to-left and a
/// drawn left/right direction is swapped. For a reflected clip this yields the
/// exact reflection of the plan produced for the original clip.
struct MaskOptions {
    std::optional<Direction> direction;
    std::optional<Side> side;
    bool mirrored = false;
};

/// round-half-up(fraction * count).
std::size_t count_for_fraction(double fraction, std::size_t count);

MaskPlan random_mask(const TokenGrid& grid, double ratio, std::uint64_t seed, const MaskOptions& options = {});

/// Masks round(ratio * rows * cols) spatial cells at every tube-frame, so the
/// masked count is a multiple of grid.frames.
MaskPlan tube_mask(const TokenGrid& grid, double ratio, std::uint64_t seed, const MaskOptions& options = {});

/// `strategy` selects the stream: STHandArm masks against hands and arms,
/// STHandOnly ignores the arm regions entirely.
MaskPlan st_mask_two_handed(const TokenGrid& grid, const RegionTokens& regions, MaskStrategy strategy,
                            const PipelineConfig& config, std::uint64_t seed, const MaskOptions& options = {});

MaskPlan st_mask_one_handed(const TokenGrid& grid, const RegionTokens& regions, Side moving_side,
                            MaskStrategy strategy, const PipelineConfig& config, std::uint64_t seed,
                            const MaskOptions& options = {});

/// Window of max(1, round(fraction * frames)) tube-frames starting at
/// floor((frames - k) / 2).
TemporalWindow temporal_window(const TokenGrid& grid, double fraction);

/// Masks every token of the centered temporal window and records it.
MaskPlan temporal_mask(MaskPlan plan, const PipelineConfig& config);

/// Grows or shrinks the masked set one boundary token at a time until it holds
/// round(ratio * N) tokens. Records the step count in the plan.
MaskPlan align_ratio(MaskPlan plan, double ratio, std::uint64_t seed, const MaskOptions& options = {});

/// Visible tokens with even t + r + c.
TokenSet running_cell_decoder_subset(const MaskPlan& plan);

enum class Stream : std::uint8_t { VideoTube = 0, VideoST = 1, KeypointST = 2 };

inline constexpr std::array<Stream, 3> kAllStreams = {Stream::VideoTube, Stream::VideoST, Stream::KeypointST};

std::string_view stream_name(Stream stream);
std::optional<Stream> parse_stream(std::string_view name);

/// Per-stream seed: seed XOR fnv1a64(stream name).
std::uint64_t stream_seed(std::uint64_t seed, Stream stream);

/// Tokenized clip ready for masking.
struct PreparedClip {
    ClipMeta meta;
    TokenGrid grid;
    RegionTokens regions;
    Handedness handedness = Handedness::NoHands;
};

/// Applies any trim range, tokenizes the segmentation and classifies the
/// clip's handedness using the clip diagonal as the movement scale.
PreparedClip prepare_clip(const ClipBundle& bundle, const PipelineConfig& config);

std::vector<MaskPlan> generate(const PreparedClip& clip, const PipelineConfig& config, std::uint64_t seed,
                               std::span<const Stream> streams = kAllStreams, const MaskOptions& options = {});

std::vector<MaskPlan> generate(const ClipBundle& bundle, const PipelineConfig& config, std::uint64_t seed,
                               std::span<const Stream> streams = kAllStreams);

}  // namespace signmask
