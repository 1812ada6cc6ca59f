// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/config.hpp"

#include "signmask/error.hpp"
#include "signmask/io.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace signmask {

namespace {

constexpr std::uint8_t kMaxClassCode = 5;

std::string_view trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value)
{
    throw Error(ErrorCode::SchemaViolation,
                "config key '" + std::string(key) + "' has invalid value '" + std::string(value) + "'");
}

double parse_double(std::string_view key, std::string_view value)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        bad_value(key, value);
    }
    return out;
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view value)
{
    Int out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        bad_value(key, value);
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1") {
        return true;
    }
    if (value == "false" || value == "0") {
        return false;
    }
    bad_value(key, value);
}

// "src:dst,src:dst"
LabelMap parse_label_map(std::string_view key, std::string_view value)
{
    LabelMap map = identity_label_map();
    std::size_t pos = 0;
    while (pos < value.size()) {
        auto comma = value.find(',', pos);
        if (comma == std::string_view::npos) {
            comma = value.size();
        }
        const auto entry = trim(value.substr(pos, comma - pos));
        const auto colon = entry.find(':');
        if (colon == std::string_view::npos) {
            bad_value(key, value);
        }
        const auto src = parse_integer<unsigned>(key, trim(entry.substr(0, colon)));
        const auto dst = parse_integer<unsigned>(key, trim(entry.substr(colon + 1)));
        if (src > 255 || dst > kMaxClassCode) {
            bad_value(key, value);
        }
        map[src] = static_cast<std::uint8_t>(dst);
        pos = comma + 1;
    }
    return map;
}

std::string format_double(double value)
{
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

using Setter = std::function<void(PipelineConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"mask_ratio", [](auto& c, auto k, auto v) { c.mask_ratio = parse_double(k, v); }},
        {"overlap_threshold", [](auto& c, auto k, auto v) { c.overlap_threshold = parse_double(k, v); }},
        {"arm_hang_a1_tolerance", [](auto& c, auto k, auto v) { c.arm_hang_a1_tolerance = parse_double(k, v); }},
        {"arm_hang_a2_tolerance", [](auto& c, auto k, auto v) { c.arm_hang_a2_tolerance = parse_double(k, v); }},
        {"arm_hang_distance_tolerance",
         [](auto& c, auto k, auto v) { c.arm_hang_distance_tolerance = parse_double(k, v); }},
        {"movement_threshold", [](auto& c, auto k, auto v) { c.movement_threshold = parse_double(k, v); }},
        {"presence_threshold", [](auto& c, auto k, auto v) { c.presence_threshold = parse_double(k, v); }},
        {"temporal_mask_fraction", [](auto& c, auto k, auto v) { c.temporal_mask_fraction = parse_double(k, v); }},
        {"region_coverage_threshold",
         [](auto& c, auto k, auto v) { c.region_coverage_threshold = parse_double(k, v); }},
        {"heatmap_sigma", [](auto& c, auto k, auto v) { c.heatmap_sigma = parse_double(k, v); }},
        {"heatmap_channels",
         [](auto& c, auto k, auto v) {
             if (v == "shared") {
                 c.heatmap_channels = HeatmapChannels::Shared;
             } else if (v == "grouped") {
                 c.heatmap_channels = HeatmapChannels::Grouped;
             } else {
                 bad_value(k, v);
             }
         }},
        {"crop_size", [](auto& c, auto k, auto v) { c.crop_size = parse_integer<int>(k, v); }},
        {"nohands_fallback", [](auto& c, auto k, auto v) { c.nohands_fallback = parse_bool(k, v); }},
        {"mixup_alpha", [](auto& c, auto k, auto v) { c.mixup_alpha = parse_double(k, v); }},
        {"seed", [](auto& c, auto k, auto v) { c.seed = parse_integer<std::uint64_t>(k, v); }},
        {"label_map", [](auto& c, auto k, auto v) { c.label_map = parse_label_map(k, v); }},
    };
    return table;
}

void require(bool condition, const char* message)
{
    if (!condition) {
        throw Error(ErrorCode::SchemaViolation, message);
    }
}

bool open_fraction(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

LabelMap identity_label_map()
{
    LabelMap map{};
    for (std::size_t i = 0; i < map.size(); ++i) {
        map[i] = static_cast<std::uint8_t>(i);
    }
    return map;
}

void PipelineConfig::validate() const
{
    require(open_fraction(mask_ratio), "mask_ratio must lie in (0,1)");
    require(open_fraction(overlap_threshold), "overlap_threshold must lie in (0,1)");
    require(open_fraction(movement_threshold), "movement_threshold must lie in (0,1)");
    require(open_fraction(presence_threshold), "presence_threshold must lie in (0,1)");
    require(open_fraction(temporal_mask_fraction), "temporal_mask_fraction must lie in (0,1)");
    require(region_coverage_threshold >= 0.0 && region_coverage_threshold < 1.0,
            "region_coverage_threshold must lie in [0,1)");
    require(arm_hang_a1_tolerance >= 0.0, "arm_hang_a1_tolerance must be nonnegative");
    require(arm_hang_a2_tolerance >= 0.0, "arm_hang_a2_tolerance must be nonnegative");
    require(arm_hang_distance_tolerance >= 0.0, "arm_hang_distance_tolerance must be nonnegative");
    require(heatmap_sigma > 0.0, "heatmap_sigma must be positive");
    require(crop_size > 0 && crop_size % 16 == 0, "crop_size must be a positive multiple of 16");
    require(mixup_alpha > 0.0, "mixup_alpha must be positive");
}

PipelineConfig parse_config(std::string_view text)
{
    PipelineConfig config;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto newline = text.find('\n', pos);
        if (newline == std::string_view::npos) {
            newline = text.size();
        }
        auto line = text.substr(pos, newline - pos);
        pos = newline + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::SchemaViolation,
                        "config line " + std::to_string(line_no) + " is not key=value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw Error(ErrorCode::SchemaViolation, "unknown config key '" + std::string(key) + "'");
        }
        if (!seen.emplace(key).second) {
            throw Error(ErrorCode::SchemaViolation, "duplicate config key '" + std::string(key) + "'");
        }
        it->second(config, key, value);
    }
    config.validate();
    return config;
}

PipelineConfig load_config(const std::filesystem::path& path)
{
    return parse_config(read_text_file(path));
}

std::string to_config_text(const PipelineConfig& c)
{
    std::ostringstream out;
    out << "mask_ratio = " << format_double(c.mask_ratio) << '\n'
        << "overlap_threshold = " << format_double(c.overlap_threshold) << '\n'
        << "arm_hang_a1_tolerance = " << format_double(c.arm_hang_a1_tolerance) << '\n'
        << "arm_hang_a2_tolerance = " << format_double(c.arm_hang_a2_tolerance) << '\n'
        << "arm_hang_distance_tolerance = " << format_double(c.arm_hang_distance_tolerance) << '\n'
        << "movement_threshold = " << format_double(c.movement_threshold) << '\n'
        << "presence_threshold = " << format_double(c.presence_threshold) << '\n'
        << "temporal_mask_fraction = " << format_double(c.temporal_mask_fraction) << '\n'
        << "region_coverage_threshold = " << format_double(c.region_coverage_threshold) << '\n'
        << "heatmap_sigma = " << format_double(c.heatmap_sigma) << '\n'
        << "heatmap_channels = " << (c.heatmap_channels == HeatmapChannels::Shared ? "shared" : "grouped")
        << '\n'
        << "crop_size = " << c.crop_size << '\n'
        << "nohands_fallback = " << (c.nohands_fallback ? "true" : "false") << '\n'
        << "mixup_alpha = " << format_double(c.mixup_alpha) << '\n'
        << "seed = " << c.seed << '\n';

    std::string mapping;
    for (std::size_t i = 0; i < c.label_map.size(); ++i) {
        if (c.label_map[i] != i) {
            if (!mapping.empty()) {
                mapping += ',';
            }
            mapping += std::to_string(i) + ':' + std::to_string(c.label_map[i]);
        }
    }
    if (!mapping.empty()) {
        out << "label_map = " << mapping << '\n';
    }
    return out.str();
}

}  // namespace signmask
