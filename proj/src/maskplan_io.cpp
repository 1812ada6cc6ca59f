// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/maskplan_io.hpp"

#include "signmask/error.hpp"
#include "signmask/io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace signmask {

namespace {

constexpr std::uint8_t kNoDirection = 255;
constexpr std::uint16_t kNoWindow = 65535;

std::uint16_t ratio_fixed_point(const MaskPlan& plan)
{
    return static_cast<std::uint16_t>(std::lround(plan.achieved_ratio() * 10000.0));
}

void put_list(ByteWriter& writer, const TokenSet& set)
{
    writer.u32(static_cast<std::uint32_t>(set.size()));
    for (TokenIndex index : set) {
        writer.u32(index);
    }
}

TokenSet get_list(ByteReader& reader, std::size_t limit)
{
    const std::uint32_t count = reader.u32();
    if (count > limit) {
        throw Error(ErrorCode::SchemaViolation, "SMSK index list longer than the grid");
    }
    std::vector<TokenIndex> items;
    items.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const TokenIndex index = reader.u32();
        if (index >= limit || (!items.empty() && index <= items.back())) {
            throw Error(ErrorCode::SchemaViolation, "SMSK index list is not ascending within the grid");
        }
        items.push_back(index);
    }
    return TokenSet::from_sorted(std::move(items));
}

void check_dims(const TokenGrid& grid)
{
    constexpr int kMax = std::numeric_limits<std::uint16_t>::max();
    if (grid.frames <= 0 || grid.rows <= 0 || grid.cols <= 0 || grid.frames > kMax || grid.rows > kMax ||
        grid.cols > kMax) {
        throw Error(ErrorCode::SchemaViolation, "plan grid dims outside the u16 range");
    }
}

}  // namespace

std::vector<std::uint8_t> encode_plan(const MaskPlan& plan)
{
    check_dims(plan.grid);
    ByteWriter writer;
    writer.bytes(kPlanMagic);
    writer.u16(kPlanVersion);
    writer.u8(static_cast<std::uint8_t>(plan.strategy));
    writer.u16(static_cast<std::uint16_t>(plan.grid.frames));
    writer.u16(static_cast<std::uint16_t>(plan.grid.rows));
    writer.u16(static_cast<std::uint16_t>(plan.grid.cols));
    writer.u16(ratio_fixed_point(plan));
    writer.u64(plan.seed);
    writer.u8(plan.direction ? static_cast<std::uint8_t>(*plan.direction) : kNoDirection);
    if (plan.temporal_window) {
        writer.u16(static_cast<std::uint16_t>(plan.temporal_window->start));
        writer.u16(static_cast<std::uint16_t>(plan.temporal_window->length));
    } else {
        writer.u16(kNoWindow);
        writer.u16(kNoWindow);
    }
    put_list(writer, plan.masked);
    put_list(writer, plan.decoder_targets);
    return writer.take();
}

MaskPlan decode_plan(std::span<const std::uint8_t> bytes)
{
    ByteReader reader(bytes);
    if (reader.bytes(kPlanMagic.size()) != kPlanMagic) {
        throw Error(ErrorCode::SchemaViolation, "missing SMSK magic");
    }
    if (const auto version = reader.u16(); version != kPlanVersion) {
        throw Error(ErrorCode::SchemaViolation, "unsupported SMSK version " + std::to_string(version));
    }
    MaskPlan plan;
    const std::uint8_t strategy = reader.u8();
    if (strategy > static_cast<std::uint8_t>(MaskStrategy::STHandOnly)) {
        throw Error(ErrorCode::SchemaViolation, "unknown SMSK strategy " + std::to_string(strategy));
    }
    plan.strategy = static_cast<MaskStrategy>(strategy);
    plan.grid.frames = reader.u16();
    plan.grid.rows = reader.u16();
    plan.grid.cols = reader.u16();
    check_dims(plan.grid);
    const std::uint16_t stored_ratio = reader.u16();
    plan.seed = reader.u64();
    const std::uint8_t direction = reader.u8();
    if (direction != kNoDirection) {
        if (direction > static_cast<std::uint8_t>(Direction::Right)) {
            throw Error(ErrorCode::SchemaViolation, "unknown SMSK direction " + std::to_string(direction));
        }
        plan.direction = static_cast<Direction>(direction);
    }
    const std::uint16_t start = reader.u16();
    const std::uint16_t length = reader.u16();
    if (start != kNoWindow || length != kNoWindow) {
        if (length == 0 || start + length > plan.grid.frames) {
            throw Error(ErrorCode::SchemaViolation, "SMSK temporal window outside the grid");
        }
        plan.temporal_window = TemporalWindow{start, length};
    }
    plan.masked = get_list(reader, plan.grid.size());
    plan.decoder_targets = get_list(reader, plan.grid.size());
    if (reader.remaining() != 0) {
        throw Error(ErrorCode::SchemaViolation, "trailing bytes after SMSK plan");
    }
    if (!plan.decoder_targets.is_subset_of(plan.masked)) {
        throw Error(ErrorCode::SchemaViolation, "SMSK decoder targets are not masked");
    }
    if (stored_ratio != ratio_fixed_point(plan)) {
        throw Error(ErrorCode::SchemaViolation, "SMSK ratio disagrees with the masked list");
    }
    return plan;
}

std::string plan_to_text(const MaskPlan& plan)
{
    std::ostringstream out;
    out << "SMSK-text " << kPlanVersion << '\n'
        << "strategy " << strategy_name(plan.strategy) << '\n'
        << "dims " << plan.grid.frames << ' ' << plan.grid.rows << ' ' << plan.grid.cols << '\n'
        << "ratio " << ratio_fixed_point(plan) << '\n'
        << "seed " << plan.seed << '\n'
        << "direction " << (plan.direction ? direction_name(*plan.direction) : "none") << '\n';
    if (plan.temporal_window) {
        out << "window " << plan.temporal_window->start << ' ' << plan.temporal_window->length << '\n';
    } else {
        out << "window none\n";
    }
    // index t r c state, state: V visible, M masked, D masked decoder target
    for (std::size_t i = 0; i < plan.grid.size(); ++i) {
        const auto index = static_cast<TokenIndex>(i);
        const auto [t, r, c] = plan.grid.coord(index);
        const char state = plan.decoder_targets.contains(index) ? 'D' : plan.masked.contains(index) ? 'M' : 'V';
        out << index << ' ' << t << ' ' << r << ' ' << c << ' ' << state << '\n';
    }
    return out.str();
}

MaskPlan plan_from_text(std::string_view text)
{
    std::istringstream in{std::string(text)};
    auto fail = [](const std::string& what) -> MaskPlan {
        throw Error(ErrorCode::SchemaViolation, "SMSK text: " + what);
    };
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "SMSK-text" || version != kPlanVersion) {
        return fail("bad header");
    }

    MaskPlan plan;
    std::string strategy;
    std::string direction;
    std::string window;
    unsigned ratio = 0;
    if (!(in >> word >> strategy) || word != "strategy") return fail("strategy");
    bool known = false;
    for (auto s : {MaskStrategy::Random, MaskStrategy::Tube, MaskStrategy::STHandArm, MaskStrategy::STHandOnly}) {
        if (strategy_name(s) == strategy) {
            plan.strategy = s;
            known = true;
        }
    }
    if (!known) return fail("unknown strategy");
    if (!(in >> word >> plan.grid.frames >> plan.grid.rows >> plan.grid.cols) || word != "dims") return fail("dims");
    check_dims(plan.grid);
    if (!(in >> word >> ratio) || word != "ratio") return fail("ratio");
    if (!(in >> word >> plan.seed) || word != "seed") return fail("seed");
    if (!(in >> word >> direction) || word != "direction") return fail("direction");
    if (direction != "none") {
        known = false;
        for (auto d : {Direction::Top, Direction::Bottom, Direction::Left, Direction::Right}) {
            if (direction_name(d) == direction) {
                plan.direction = d;
                known = true;
            }
        }
        if (!known) return fail("unknown direction");
    }
    if (!(in >> word >> window) || word != "window") return fail("window");
    if (window != "none") {
        TemporalWindow w;
        const auto [end, ec] = std::from_chars(window.data(), window.data() + window.size(), w.start);
        if (ec != std::errc{} || end != window.data() + window.size()) return fail("window start");
        if (!(in >> w.length)) return fail("window length");
        plan.temporal_window = w;
    }

    std::vector<TokenIndex> masked;
    std::vector<TokenIndex> decoder;
    for (std::size_t i = 0; i < plan.grid.size(); ++i) {
        std::size_t index = 0;
        TokenCoord coord;
        char state = 0;
        if (!(in >> index >> coord.t >> coord.r >> coord.c >> state) || index != i ||
            plan.grid.coord(static_cast<TokenIndex>(i)) != coord) {
            return fail("token line " + std::to_string(i));
        }
        if (state == 'M' || state == 'D') masked.push_back(static_cast<TokenIndex>(i));
        if (state == 'D') decoder.push_back(static_cast<TokenIndex>(i));
        if (state != 'M' && state != 'D' && state != 'V') return fail("token state");
    }
    plan.masked = TokenSet::from_sorted(std::move(masked));
    plan.decoder_targets = TokenSet::from_sorted(std::move(decoder));
    if (ratio != ratio_fixed_point(plan)) return fail("ratio disagrees with tokens");
    return plan;
}

}  // namespace signmask
