// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/maskgen.hpp"

#include "signmask/error.hpp"
#include "signmask/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <tuple>

namespace signmask {

namespace {

constexpr std::uint64_t kDrawTag = fnv1a64("signmask/draw");
constexpr std::uint64_t kAlignTag = fnv1a64("signmask/align");
constexpr std::uint64_t kRandomTag = fnv1a64("signmask/random");
constexpr std::uint64_t kTubeTag = fnv1a64("signmask/tube");

/// Membership over [0, n) with O(log n) insert/erase and k-th smallest lookup.
class OrderedPool {
public:
    explicit OrderedPool(std::size_t n) : tree_(n + 1, 0), member_(n, 0), top_(n == 0 ? 0 : std::bit_floor(n)) {}

    bool contains(std::size_t pos) const { return member_[pos] != 0; }
    std::size_t size() const noexcept { return count_; }

    void insert(std::size_t pos)
    {
        if (!member_[pos]) {
            member_[pos] = 1;
            ++count_;
            add(pos, 1);
        }
    }

    void erase(std::size_t pos)
    {
        if (member_[pos]) {
            member_[pos] = 0;
            --count_;
            add(pos, -1);
        }
    }

    /// k is 0-based and must be < size().
    std::size_t select(std::size_t k) const
    {
        std::size_t pos = 0;
        std::int64_t remaining = static_cast<std::int64_t>(k) + 1;
        for (std::size_t step = top_; step != 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next < tree_.size() && tree_[next] < remaining) {
                pos = next;
                remaining -= tree_[next];
            }
        }
        return pos;  // 1-based position pos + 1, i.e. 0-based pos
    }

private:
    void add(std::size_t pos, std::int64_t delta)
    {
        for (std::size_t i = pos + 1; i < tree_.size(); i += i & (~i + 1)) {
            tree_[i] += delta;
        }
    }

    std::vector<std::int64_t> tree_;
    std::vector<std::uint8_t> member_;
    std::size_t top_;
    std::size_t count_ = 0;
};

/// Canonical sampling order: token index order, or its column reflection.
struct Canon {
    const TokenGrid& grid;
    bool mirrored;

    TokenIndex operator()(TokenIndex index) const { return mirrored ? grid.mirror(index) : index; }
};

template <typename Fn>
void for_each_neighbor(const TokenGrid& grid, TokenIndex index, Fn&& fn)
{
    const auto [t, r, c] = grid.coord(index);
    if (r > 0) fn(grid.index(t, r - 1, c));
    if (r + 1 < grid.rows) fn(grid.index(t, r + 1, c));
    if (c > 0) fn(grid.index(t, r, c - 1));
    if (c + 1 < grid.cols) fn(grid.index(t, r, c + 1));
}

Direction swap_horizontal(Direction d)
{
    if (d == Direction::Left) return Direction::Right;
    if (d == Direction::Right) return Direction::Left;
    return d;
}

struct Draws {
    Direction direction;
    Side side;
};

// Both draws are always consumed, in this order, so the stream position never
// depends on which branch is taken.
Draws draw(std::uint64_t seed, const MaskOptions& options)
{
    Rng rng(seed, kDrawTag);
    Draws out{static_cast<Direction>(rng.below(4)), rng.below(2) == 0 ? Side::Left : Side::Right};
    if (options.mirrored) {
        out.direction = swap_horizontal(out.direction);
    }
    if (options.direction) {
        out.direction = *options.direction;
    }
    if (options.side) {
        out.side = *options.side;
    }
    return out;
}

/// Splits `tokens` per tube-frame, orders each frame's tokens by distance to
/// the `toward` side (ties by row, then canonical column) and keeps the
/// floor(n/2) farthest; the ceil(n/2) nearest are left out.
TokenSet keep_far_half(const TokenGrid& grid, const TokenSet& tokens, Direction toward, bool mirrored)
{
    std::vector<TokenIndex> kept;
    using Key = std::tuple<int, int, int, TokenIndex>;
    std::vector<Key> frame;
    auto flush = [&] {
        std::sort(frame.begin(), frame.end());
        const std::size_t masked = (frame.size() + 1) / 2;
        for (std::size_t i = masked; i < frame.size(); ++i) {
            kept.push_back(std::get<3>(frame[i]));
        }
        frame.clear();
    };

    int current_t = -1;
    for (TokenIndex index : tokens) {
        const auto [t, r, c] = grid.coord(index);
        if (t != current_t) {
            flush();
            current_t = t;
        }
        int distance = 0;
        switch (toward) {
        case Direction::Top: distance = r; break;
        case Direction::Bottom: distance = grid.rows - 1 - r; break;
        case Direction::Left: distance = c; break;
        case Direction::Right: distance = grid.cols - 1 - c; break;
        }
        frame.emplace_back(distance, r, mirrored ? grid.cols - 1 - c : c, index);
    }
    flush();
    return TokenSet(std::move(kept));
}

/// Arm tokens whose row lies at or above the arm's row midpoint in their
/// tube-frame.
TokenSet upper_arm(const TokenGrid& grid, const TokenSet& arm)
{
    std::vector<TokenIndex> kept;
    auto it = arm.begin();
    while (it != arm.end()) {
        const int t = grid.coord(*it).t;
        auto end = it;
        int lo = grid.rows;
        int hi = -1;
        while (end != arm.end() && grid.coord(*end).t == t) {
            const int r = grid.coord(*end).r;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            ++end;
        }
        for (; it != end; ++it) {
            if (2 * grid.coord(*it).r <= lo + hi) {
                kept.push_back(*it);
            }
        }
    }
    return TokenSet::from_sorted(std::move(kept));
}

void require_st(MaskStrategy strategy)
{
    if (strategy != MaskStrategy::STHandArm && strategy != MaskStrategy::STHandOnly) {
        throw Error(ErrorCode::SchemaViolation, "spatio-temporal masking needs an ST strategy");
    }
}

/// Temporal window, provisional decoder targets, ratio alignment, final
/// decoder targets.
MaskPlan finish_st(MaskPlan plan, const TokenSet& decoder_region, const PipelineConfig& config,
                   const MaskOptions& options)
{
    plan = temporal_mask(std::move(plan), config);
    plan.decoder_targets = decoder_region & plan.masked;
    plan = align_ratio(std::move(plan), config.mask_ratio, plan.seed, options);
    plan.decoder_targets = decoder_region & plan.masked;
    return plan;
}

}  // namespace

std::string_view strategy_name(MaskStrategy value)
{
    switch (value) {
    case MaskStrategy::Random: return "Random";
    case MaskStrategy::Tube: return "Tube";
    case MaskStrategy::STHandArm: return "STHandArm";
    case MaskStrategy::STHandOnly: return "STHandOnly";
    }
    return "Unknown";
}

std::string_view direction_name(Direction value)
{
    switch (value) {
    case Direction::Top: return "top";
    case Direction::Bottom: return "bottom";
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    }
    return "unknown";
}

std::string_view branch_name(MaskBranch value)
{
    switch (value) {
    case MaskBranch::Baseline: return "baseline";
    case MaskBranch::Directional: return "directional";
    case MaskBranch::SideReserve: return "side-reserve";
    case MaskBranch::OneHanded: return "one-handed";
    case MaskBranch::NoHandsFallback: return "no-hands-fallback";
    }
    return "unknown";
}

std::size_t count_for_fraction(double fraction, std::size_t count)
{
    // The epsilon absorbs representation error so that e.g. 0.35 * 10 rounds up.
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(count) + 0.5 + 1e-9));
}

MaskPlan random_mask(const TokenGrid& grid, double ratio, std::uint64_t seed, const MaskOptions& options)
{
    const std::size_t n = grid.size();
    const std::size_t target = count_for_fraction(ratio, n);
    const Canon canon{grid, options.mirrored};
    Rng rng(seed, kRandomTag);

    std::vector<TokenIndex> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = static_cast<TokenIndex>(i);
    }
    std::vector<TokenIndex> chosen;
    chosen.reserve(target);
    for (std::size_t i = 0; i < target; ++i) {
        std::swap(order[i], order[i + rng.below(n - i)]);
        chosen.push_back(canon(order[i]));
    }

    MaskPlan plan;
    plan.grid = grid;
    plan.strategy = MaskStrategy::Random;
    plan.seed = seed;
    plan.masked = TokenSet(std::move(chosen));
    plan.decoder_targets = plan.masked;
    return plan;
}

MaskPlan tube_mask(const TokenGrid& grid, double ratio, std::uint64_t seed, const MaskOptions& options)
{
    const std::size_t cells = grid.frame_size();
    const std::size_t target = count_for_fraction(ratio, cells);
    Rng rng(seed, kTubeTag);

    std::vector<std::size_t> order(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        order[i] = i;
    }
    std::vector<TokenIndex> masked;
    masked.reserve(target * static_cast<std::size_t>(grid.frames));
    for (std::size_t i = 0; i < target; ++i) {
        std::swap(order[i], order[i + rng.below(cells - i)]);
        int r = static_cast<int>(order[i]) / grid.cols;
        int c = static_cast<int>(order[i]) % grid.cols;
        if (options.mirrored) {
            c = grid.cols - 1 - c;
        }
        for (int t = 0; t < grid.frames; ++t) {
            masked.push_back(grid.index(t, r, c));
        }
    }

    MaskPlan plan;
    plan.grid = grid;
    plan.strategy = MaskStrategy::Tube;
    plan.seed = seed;
    plan.masked = TokenSet(std::move(masked));
    plan.decoder_targets = plan.masked;
    return plan;
}

MaskPlan st_mask_two_handed(const TokenGrid& grid, const RegionTokens& input_regions, MaskStrategy strategy,
                            const PipelineConfig& config, std::uint64_t seed, const MaskOptions& options)
{
    require_st(strategy);
    const RegionTokens regions =
        strategy == MaskStrategy::STHandOnly ? input_regions.hands_only() : input_regions;
    const TokenSet hands = regions.hands();
    if (hands.empty()) {
        throw Error(ErrorCode::EmptyRegions, "no hand tokens in the clip");
    }

    const Draws draws = draw(seed, options);
    const TokenSet left = regions.side_region(Side::Left);
    const TokenSet right = regions.side_region(Side::Right);

    MaskPlan plan;
    plan.grid = grid;
    plan.strategy = strategy;
    plan.seed = seed;

    TokenSet reserved;
    if (overlap_ratio(left, right) > config.overlap_threshold) {
        plan.branch = MaskBranch::Directional;
        plan.direction = draws.direction;
        reserved = keep_far_half(grid, hands, draws.direction, options.mirrored);
    } else {
        plan.branch = MaskBranch::SideReserve;
        plan.side = draws.side;
        reserved = regions.side_region(draws.side) - (left & right);
    }
    plan.masked = grid.all() - reserved;

    const TokenSet decoder_region = strategy == MaskStrategy::STHandOnly ? hands : regions.hand_arm();
    return finish_st(std::move(plan), decoder_region, config, options);
}

MaskPlan st_mask_one_handed(const TokenGrid& grid, const RegionTokens& input_regions, Side moving_side,
                            MaskStrategy strategy, const PipelineConfig& config, std::uint64_t seed,
                            const MaskOptions& options)
{
    require_st(strategy);
    const RegionTokens regions =
        strategy == MaskStrategy::STHandOnly ? input_regions.hands_only() : input_regions;
    const TokenSet& hand = regions.hand(moving_side);
    if (hand.empty()) {
        throw Error(ErrorCode::EmptyRegions, "no tokens for the moving hand");
    }

    const Draws draws = draw(seed, options);
    MaskPlan plan;
    plan.grid = grid;
    plan.strategy = strategy;
    plan.seed = seed;
    plan.branch = MaskBranch::OneHanded;
    plan.side = moving_side;
    plan.direction = draws.direction;

    const TokenSet reserved =
        keep_far_half(grid, hand, draws.direction, options.mirrored) | upper_arm(grid, regions.arm(moving_side));
    plan.masked = grid.all() - reserved;

    const TokenSet decoder_region = strategy == MaskStrategy::STHandOnly ? regions.hands() : regions.hand_arm();
    return finish_st(std::move(plan), decoder_region, config, options);
}

TemporalWindow temporal_window(const TokenGrid& grid, double fraction)
{
    const int length = std::clamp(static_cast<int>(count_for_fraction(fraction, static_cast<std::size_t>(grid.frames))),
                                  1, grid.frames);
    return {(grid.frames - length) / 2, length};
}

MaskPlan temporal_mask(MaskPlan plan, const PipelineConfig& config)
{
    const TemporalWindow window = temporal_window(plan.grid, config.temporal_mask_fraction);
    const auto first = static_cast<TokenIndex>(window.start * plan.grid.frame_size());
    const auto last = static_cast<TokenIndex>((window.start + window.length) * plan.grid.frame_size());
    std::vector<TokenIndex> block(last - first);
    for (TokenIndex i = first; i < last; ++i) {
        block[i - first] = i;
    }
    plan.masked = plan.masked | TokenSet::from_sorted(std::move(block));
    plan.temporal_window = window;
    return plan;
}

MaskPlan align_ratio(MaskPlan plan, double ratio, std::uint64_t seed, const MaskOptions& options)
{
    const TokenGrid& grid = plan.grid;
    const std::size_t n = grid.size();
    const std::size_t target = count_for_fraction(ratio, n);
    const Canon canon{grid, options.mirrored};
    Rng rng(seed, kAlignTag);

    std::vector<std::uint8_t> masked(n, 0);
    for (TokenIndex index : plan.masked) {
        masked[index] = 1;
    }
    std::size_t count = plan.masked.size();
    std::size_t steps = 0;

    // Candidates are tokens in state `from` with a 4-neighbor in the other state.
    auto build_pool = [&](std::uint8_t from) {
        OrderedPool pool(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (masked[i] != from) {
                continue;
            }
            bool boundary = false;
            for_each_neighbor(grid, static_cast<TokenIndex>(i),
                              [&](TokenIndex nb) { boundary = boundary || masked[nb] != from; });
            if (boundary) {
                pool.insert(canon(static_cast<TokenIndex>(i)));
            }
        }
        return pool;
    };
    // Uniform pick, in canonical order, among tokens satisfying `accept`.
    auto pick_any = [&](auto accept) -> std::optional<TokenIndex> {
        std::vector<TokenIndex> eligible;
        for (std::size_t pos = 0; pos < n; ++pos) {
            const TokenIndex index = canon(static_cast<TokenIndex>(pos));
            if (accept(index)) {
                eligible.push_back(index);
            }
        }
        if (eligible.empty()) {
            return std::nullopt;
        }
        return eligible[rng.below(eligible.size())];
    };
    auto flip = [&](TokenIndex index, std::uint8_t state, OrderedPool& pool) {
        masked[index] = state;
        pool.erase(canon(index));
        const std::uint8_t from = state ? 0 : 1;
        for_each_neighbor(grid, index, [&](TokenIndex nb) {
            if (masked[nb] == from) {
                pool.insert(canon(nb));
            }
        });
        ++steps;
    };

    if (count < target) {
        OrderedPool pool = build_pool(0);
        while (count < target) {
            TokenIndex pick;
            if (pool.size() > 0) {
                pick = canon(static_cast<TokenIndex>(pool.select(rng.below(pool.size()))));
            } else {
                pick = *pick_any([&](TokenIndex i) { return masked[i] == 0; });
            }
            flip(pick, 1, pool);
            ++count;
        }
    } else if (count > target) {
        const TokenSet& decoder = plan.decoder_targets;
        auto in_window = [&](TokenIndex i) {
            if (!plan.temporal_window) {
                return false;
            }
            const int t = grid.coord(i).t;
            return t >= plan.temporal_window->start && t < plan.temporal_window->start + plan.temporal_window->length;
        };
        OrderedPool pool = build_pool(1);
        while (count > target) {
            std::optional<TokenIndex> pick;
            if (pool.size() > 0) {
                pick = canon(static_cast<TokenIndex>(pool.select(rng.below(pool.size()))));
            }
            if (!pick) {
                pick = pick_any([&](TokenIndex i) { return masked[i] && !decoder.contains(i) && !in_window(i); });
            }
            if (!pick) {
                pick = pick_any([&](TokenIndex i) { return masked[i] && !in_window(i); });
            }
            if (!pick) {
                pick = pick_any([&](TokenIndex i) { return masked[i] != 0; });
            }
            flip(*pick, 0, pool);
            --count;
        }
    }

    std::vector<TokenIndex> result;
    result.reserve(count);
    for (std::size_t i = 0; i < n; ++i) {
        if (masked[i]) {
            result.push_back(static_cast<TokenIndex>(i));
        }
    }
    plan.masked = TokenSet::from_sorted(std::move(result));
    plan.decoder_targets = plan.decoder_targets & plan.masked;
    plan.alignment_steps = steps;
    return plan;
}

TokenSet running_cell_decoder_subset(const MaskPlan& plan)
{
    std::vector<TokenIndex> out;
    for (TokenIndex index : plan.visible()) {
        const auto [t, r, c] = plan.grid.coord(index);
        if ((t + r + c) % 2 == 0) {
            out.push_back(index);
        }
    }
    return TokenSet::from_sorted(std::move(out));
}

std::string_view stream_name(Stream stream)
{
    switch (stream) {
    case Stream::VideoTube: return "video-tube";
    case Stream::VideoST: return "video-st";
    case Stream::KeypointST: return "keypoint-st";
    }
    return "unknown";
}

std::optional<Stream> parse_stream(std::string_view name)
{
    for (Stream stream : kAllStreams) {
        if (stream_name(stream) == name) {
            return stream;
        }
    }
    return std::nullopt;
}

std::uint64_t stream_seed(std::uint64_t seed, Stream stream)
{
    return seed ^ fnv1a64(stream_name(stream));
}

PreparedClip prepare_clip(const ClipBundle& bundle, const PipelineConfig& config)
{
    const ClipBundle trimmed = bundle.meta.trim_range ? apply_trim(bundle) : bundle;
    PreparedClip clip;
    clip.meta = trimmed.meta;
    clip.grid = build_grid(trimmed.meta);
    clip.regions = region_tokens(clip.grid, trimmed.segments, config.region_coverage_threshold);
    const double diagonal = std::hypot(static_cast<double>(trimmed.meta.width), static_cast<double>(trimmed.meta.height));
    clip.handedness = classify_handedness(trimmed.keypoints, diagonal, config);
    return clip;
}

std::vector<MaskPlan> generate(const PreparedClip& clip, const PipelineConfig& config, std::uint64_t seed,
                               std::span<const Stream> streams, const MaskOptions& options)
{
    std::vector<MaskPlan> plans;
    plans.reserve(streams.size());
    for (Stream stream : streams) {
        const std::uint64_t s = stream_seed(seed, stream);
        if (stream == Stream::VideoTube) {
            plans.push_back(tube_mask(clip.grid, config.mask_ratio, s, options));
            continue;
        }

        const MaskStrategy strategy = stream == Stream::VideoST ? MaskStrategy::STHandArm : MaskStrategy::STHandOnly;
        auto fallback = [&](const std::string& why) {
            if (!config.nohands_fallback) {
                throw Error(ErrorCode::EmptyRegions, "clip '" + clip.meta.clip_id + "': " + why);
            }
            MaskPlan plan = tube_mask(clip.grid, config.mask_ratio, s, options);
            plan.branch = MaskBranch::NoHandsFallback;
            return plan;
        };
        try {
            switch (clip.handedness) {
            case Handedness::TwoHanded:
                plans.push_back(st_mask_two_handed(clip.grid, clip.regions, strategy, config, s, options));
                break;
            case Handedness::OneHandedLeft:
            case Handedness::OneHandedRight: {
                const Side side = clip.handedness == Handedness::OneHandedLeft ? Side::Left : Side::Right;
                plans.push_back(st_mask_one_handed(clip.grid, clip.regions, side, strategy, config, s, options));
                break;
            }
            case Handedness::NoHands:
                plans.push_back(fallback("no moving hands"));
                break;
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyRegions) {
                throw;
            }
            plans.push_back(fallback(e.what()));
        }
    }
    return plans;
}

std::vector<MaskPlan> generate(const ClipBundle& bundle, const PipelineConfig& config, std::uint64_t seed,
                               std::span<const Stream> streams)
{
    return generate(prepare_clip(bundle, config), config, seed, streams);
}

}  // namespace signmask
