// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "check_error.hpp"
#include "synthetic.hpp"

#include "signmask/io.hpp"
#include "signmask/maskgen.hpp"
#include "signmask/maskplan_io.hpp"

using namespace signmask;

namespace {

MaskPlan sample_plan()
{
    MaskPlan p;
    p.grid = TokenGrid{2, 2, 3};
    p.strategy = MaskStrategy::STHandOnly;
    p.masked = TokenSet{1, 2, 5, 7, 8, 9, 10, 11};
    p.decoder_targets = TokenSet{2, 7};
    p.seed = 0x0102030405060708ULL;
    p.direction = Direction::Bottom;
    p.temporal_window = TemporalWindow{1, 1};
    return p;
}

}  // namespace

TEST_CASE("byte layout")
{
    const auto bytes = encode_plan(sample_plan());
    ByteReader r(bytes);
    CHECK(r.bytes(4) == "SMSK");
    CHECK(r.u16() == 1);
    CHECK(r.u8() == 3);
    CHECK(r.u16() == 2);
    CHECK(r.u16() == 2);
    CHECK(r.u16() == 3);
    CHECK(r.u16() == 6667);  // 8 / 12
    CHECK(r.u64() == 0x0102030405060708ULL);
    CHECK(r.u8() == 1);
    CHECK(r.u16() == 1);
    CHECK(r.u16() == 1);
    CHECK(r.u32() == 8);
    for (std::uint32_t v : {1u, 2u, 5u, 7u, 8u, 9u, 10u, 11u}) CHECK(r.u32() == v);
    CHECK(r.u32() == 2);
    CHECK(r.u32() == 2);
    CHECK(r.u32() == 7);
    CHECK(r.remaining() == 0);
    // Little-endian spot check on the raw bytes: version 1 follows the magic.
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[15] == 0x08);
}

TEST_CASE("absent direction and window")
{
    MaskPlan p = random_mask(TokenGrid{1, 1, 4}, 0.5, 1);
    const auto bytes = encode_plan(p);
    CHECK(bytes[4 + 2 + 1 + 6 + 2 + 8] == 255);
    ByteReader r(std::span<const std::uint8_t>(bytes).subspan(4 + 2 + 1 + 6 + 2 + 8 + 1));
    CHECK(r.u16() == 65535);
    const MaskPlan back = decode_plan(bytes);
    CHECK_FALSE(back.direction.has_value());
    CHECK_FALSE(back.temporal_window.has_value());
}

TEST_CASE("round trips")
{
    const MaskPlan p = sample_plan();
    const MaskPlan b = decode_plan(encode_plan(p));
    CHECK(b.grid == p.grid);
    CHECK(b.strategy == p.strategy);
    CHECK(b.masked == p.masked);
    CHECK(b.decoder_targets == p.decoder_targets);
    CHECK(b.seed == p.seed);
    CHECK(b.direction == p.direction);
    CHECK(b.temporal_window == p.temporal_window);
    CHECK(encode_plan(b) == encode_plan(p));

    const std::string text = plan_to_text(p);
    CHECK(text.find("SMSK-text 1") == 0);
    const MaskPlan t = plan_from_text(text);
    CHECK(encode_plan(t) == encode_plan(p));

    const PipelineConfig cfg;
    synth::ClipSpec spec;
    for (auto motion : {synth::Motion::TwoHanded, synth::Motion::OneHandedLeft, synth::Motion::NoHands}) {
        spec.motion = motion;
        for (const auto& plan : generate(synth::make_clip(spec), cfg, 17)) {
            const auto bytes = encode_plan(plan);
            CHECK(encode_plan(decode_plan(bytes)) == bytes);
            CHECK(encode_plan(plan_from_text(plan_to_text(plan))) == bytes);
        }
    }
}

TEST_CASE("corrupt documents")
{
    const auto good = encode_plan(sample_plan());
    auto bad = good;
    bad[0] = 'X';
    CHECK_ERROR_CODE(decode_plan(bad), ErrorCode::SchemaViolation);
    bad = good;
    bad[4] = 2;
    CHECK_ERROR_CODE(decode_plan(bad), ErrorCode::SchemaViolation);
    bad = good;
    bad[6] = 9;  // strategy
    CHECK_ERROR_CODE(decode_plan(bad), ErrorCode::SchemaViolation);
    bad = good;
    bad.pop_back();
    CHECK_ERROR_CODE(decode_plan(bad), ErrorCode::SchemaViolation);
    bad = good;
    bad.push_back(0);
    CHECK_ERROR_CODE(decode_plan(bad), ErrorCode::SchemaViolation);
    bad = good;
    bad[13] ^= 1;  // ratio no longer matches the lists
    CHECK_ERROR_CODE(decode_plan(bad), ErrorCode::SchemaViolation);

    MaskPlan p = sample_plan();
    p.decoder_targets = TokenSet{3};
    CHECK_ERROR_CODE(decode_plan(encode_plan(p)), ErrorCode::SchemaViolation);
    p = sample_plan();
    p.temporal_window = TemporalWindow{1, 5};
    CHECK_ERROR_CODE(decode_plan(encode_plan(p)), ErrorCode::SchemaViolation);

    std::string text = plan_to_text(sample_plan());
    CHECK_ERROR_CODE(plan_from_text(text.substr(0, text.size() / 2)), ErrorCode::SchemaViolation);
    const auto pos = text.find("window 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 8, "window z");
    CHECK_ERROR_CODE(plan_from_text(text), ErrorCode::SchemaViolation);
}
