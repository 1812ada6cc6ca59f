// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

// Randomized invariants across modules.

#include "check_error.hpp"
#include "synthetic.hpp"

#include "signmask/maskgen.hpp"
#include "signmask/maskplan_io.hpp"

using namespace signmask;

namespace {

TokenGrid random_grid(Rng& rng)
{
    return {1 + static_cast<int>(rng.below(8)), 2 + static_cast<int>(rng.below(10)),
            2 + static_cast<int>(rng.below(10))};
}

}  // namespace

TEST_CASE("every strategy hits the count and keeps containment")
{
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const TokenGrid g = random_grid(rng);
        const RegionTokens regions = synth::random_regions(g, rng);
        PipelineConfig cfg;
        cfg.mask_ratio = 0.05 + 0.9 * rng.uniform();
        cfg.temporal_mask_fraction = 0.05 + 0.9 * rng.uniform();
        const std::uint64_t seed = rng.below(1u << 30);
        const std::size_t target = count_for_fraction(cfg.mask_ratio, g.size());

        const MaskPlan r = random_mask(g, cfg.mask_ratio, seed);
        CHECK(r.masked.size() == target);
        const MaskPlan t = tube_mask(g, cfg.mask_ratio, seed);
        CHECK(t.masked.size() == count_for_fraction(cfg.mask_ratio, g.frame_size()) * g.frames);

        for (auto strategy : {MaskStrategy::STHandArm, MaskStrategy::STHandOnly}) {
            const TokenSet allowed = strategy == MaskStrategy::STHandArm ? regions.hand_arm() : regions.hands();
            std::vector<MaskPlan> plans;
            plans.push_back(st_mask_two_handed(g, regions, strategy, cfg, seed));
            for (Side side : {Side::Left, Side::Right}) {
                if (!regions.hand(side).empty()) {
                    plans.push_back(st_mask_one_handed(g, regions, side, strategy, cfg, seed));
                }
            }
            for (const auto& p : plans) {
                CHECK(p.masked.size() == target);
                CHECK(p.alignment_steps <= g.size());
                CHECK(p.decoder_targets.is_subset_of(p.masked));
                CHECK(p.decoder_targets.is_subset_of(allowed));
                CHECK(p.temporal_window.has_value());
                CHECK(p.temporal_window->start + p.temporal_window->length <= g.frames);
                CHECK(encode_plan(decode_plan(encode_plan(p))) == encode_plan(p));
            }
        }
    }
}

TEST_CASE("window stays masked whenever the target allows it")
{
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const TokenGrid g = random_grid(rng);
        const RegionTokens regions = synth::random_regions(g, rng);
        PipelineConfig cfg;
        cfg.mask_ratio = 0.5 + 0.45 * rng.uniform();
        const MaskPlan p = st_mask_two_handed(g, regions, MaskStrategy::STHandArm, cfg, rng.below(1000));
        const auto w = *p.temporal_window;
        const std::size_t window_tokens = static_cast<std::size_t>(w.length) * g.frame_size();
        if (window_tokens <= p.masked.size()) {
            for (int t = w.start; t < w.start + w.length; ++t)
                for (int r = 0; r < g.rows; ++r)
                    for (int c = 0; c < g.cols; ++c) CHECK(p.masked.contains(g.index(t, r, c)));
        }
    }
}

TEST_CASE("distinct seeds differ on nontrivial grids")
{
    const PipelineConfig cfg;
    synth::ClipSpec spec;
    spec.motion = synth::Motion::TwoHandedOverlap;
    const PreparedClip clip = prepare_clip(synth::make_clip(spec), cfg);
    int differing = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto a = generate(clip, cfg, s);
        const auto b = generate(clip, cfg, s + 1000);
        differing += encode_plan(a[1]) != encode_plan(b[1]);
    }
    CHECK(differing == 20);
}

TEST_CASE("flip equivariance on random regions")
{
    Rng rng(5150);
    for (int trial = 0; trial < 200; ++trial) {
        const TokenGrid g = random_grid(rng);
        const RegionTokens regions = synth::random_regions(g, rng);
        auto mirror = [&](const TokenSet& s) {
            std::vector<TokenIndex> out;
            for (TokenIndex i : s) out.push_back(g.mirror(i));
            return TokenSet(out);
        };
        const RegionTokens flipped{mirror(regions.left_hand), mirror(regions.right_hand), mirror(regions.left_arm),
                                   mirror(regions.right_arm)};
        PipelineConfig cfg;
        cfg.mask_ratio = 0.1 + 0.85 * rng.uniform();
        const std::uint64_t seed = rng.below(100000);
        MaskOptions m;
        m.mirrored = true;

        const MaskPlan a = st_mask_two_handed(g, regions, MaskStrategy::STHandArm, cfg, seed);
        const MaskPlan b = st_mask_two_handed(g, flipped, MaskStrategy::STHandArm, cfg, seed, m);
        CHECK(b.masked == mirror(a.masked));
        CHECK(b.decoder_targets == mirror(a.decoder_targets));
        if (a.direction) {
            const Direction d = *a.direction;
            const Direction want = d == Direction::Left ? Direction::Right : d == Direction::Right ? Direction::Left : d;
            CHECK(b.direction == want);
        }
        CHECK(b.side == a.side);

        if (!regions.left_hand.empty()) {
            const MaskPlan c = st_mask_one_handed(g, regions, Side::Left, MaskStrategy::STHandOnly, cfg, seed);
            const MaskPlan d = st_mask_one_handed(g, flipped, Side::Left, MaskStrategy::STHandOnly, cfg, seed, m);
            CHECK(d.masked == mirror(c.masked));
        }
        CHECK(random_mask(g, cfg.mask_ratio, seed, m).masked == mirror(random_mask(g, cfg.mask_ratio, seed).masked));
        CHECK(tube_mask(g, cfg.mask_ratio, seed, m).masked == mirror(tube_mask(g, cfg.mask_ratio, seed).masked));
    }
}
