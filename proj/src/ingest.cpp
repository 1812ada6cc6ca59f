// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/ingest.hpp"

#include "signmask/error.hpp"
#include "signmask/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace signmask {

using nlohmann::json;

namespace {

std::string frame_label(int index) { return "frame " + std::to_string(index); }

Keypoint parse_point(const json& entry, int frame)
{
    if (!entry.is_array() || entry.size() != 3 || !entry[0].is_number() || !entry[1].is_number() ||
        !entry[2].is_number()) {
        throw Error(ErrorCode::SchemaViolation, frame_label(frame) + ": keypoint must be [x, y, confidence]");
    }
    Keypoint point{entry[0].get<double>(), entry[1].get<double>(), entry[2].get<double>()};
    if (!std::isfinite(point.x) || !std::isfinite(point.y) || !(point.confidence >= 0.0 && point.confidence <= 1.0)) {
        throw Error(ErrorCode::SchemaViolation, frame_label(frame) + ": keypoint outside the valid range");
    }
    return point;
}

}  // namespace

void validate_meta(const ClipMeta& meta)
{
    if (meta.frame_count < 1) {
        throw Error(ErrorCode::SchemaViolation, "clip '" + meta.clip_id + "' has no frames");
    }
    if (meta.height < 1 || meta.width < 1) {
        throw Error(ErrorCode::SchemaViolation, "clip '" + meta.clip_id + "' has non-positive dimensions");
    }
    if (meta.trim_range) {
        const auto [begin, end] = *meta.trim_range;
        if (begin < 0 || end > meta.frame_count || begin >= end) {
            throw Error(ErrorCode::SchemaViolation, "clip '" + meta.clip_id + "' trim_range outside [0, frame_count)");
        }
    }
}

void validate_tube_layout(const ClipMeta& meta)
{
    validate_meta(meta);
    const int frames = meta.kept_frames().size();
    if (frames < 2 || frames % 2 != 0) {
        throw Error(ErrorCode::IndivisibleDims,
                    "clip '" + meta.clip_id + "' keeps " + std::to_string(frames) + " frames; need an even count >= 2");
    }
    if (meta.height % 16 != 0 || meta.width % 16 != 0) {
        throw Error(ErrorCode::IndivisibleDims, "clip '" + meta.clip_id + "' dims " + std::to_string(meta.height) +
                                                    "x" + std::to_string(meta.width) + " are not multiples of 16");
    }
}

MetaDocument parse_meta_document(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("meta document: ") + e.what());
    }
    MetaDocument out;
    try {
        out.meta.clip_id = doc.at("clip_id").get<std::string>();
        out.meta.frame_count = doc.at("frame_count").get<int>();
        out.meta.height = doc.at("height").get<int>();
        out.meta.width = doc.at("width").get<int>();
        if (doc.contains("trim_range") && !doc["trim_range"].is_null()) {
            const auto& range = doc["trim_range"];
            if (!range.is_array() || range.size() != 2) {
                throw Error(ErrorCode::SchemaViolation, "trim_range must be [begin, end]");
            }
            out.meta.trim_range = FrameRange{range[0].get<int>(), range[1].get<int>()};
        }
        if (doc.contains("boxes") && !doc["boxes"].is_null()) {
            for (const auto& entry : doc["boxes"]) {
                if (entry.is_null()) {
                    out.boxes.emplace_back();
                    continue;
                }
                if (!entry.is_array() || entry.size() != 4) {
                    throw Error(ErrorCode::SchemaViolation, "box must be [x0, y0, x1, y1] or null");
                }
                out.boxes.emplace_back(BoundingBox{entry[0].get<double>(), entry[1].get<double>(),
                                                   entry[2].get<double>(), entry[3].get<double>()});
            }
            if (out.boxes.size() != static_cast<std::size_t>(out.meta.frame_count)) {
                throw Error(ErrorCode::SchemaViolation, "boxes must list one entry per frame");
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("meta document: ") + e.what());
    }
    validate_meta(out.meta);
    return out;
}

std::string serialize_meta_document(const MetaDocument& doc)
{
    json out = {
        {"clip_id", doc.meta.clip_id},
        {"frame_count", doc.meta.frame_count},
        {"height", doc.meta.height},
        {"width", doc.meta.width},
    };
    if (doc.meta.trim_range) {
        out["trim_range"] = {doc.meta.trim_range->begin, doc.meta.trim_range->end};
    }
    if (!doc.boxes.empty()) {
        json boxes = json::array();
        for (const auto& box : doc.boxes) {
            if (box) {
                boxes.push_back({box->x0, box->y0, box->x1, box->y1});
            } else {
                boxes.push_back(nullptr);
            }
        }
        out["boxes"] = std::move(boxes);
    }
    return out.dump() + "\n";
}

std::vector<KeypointFrame> parse_keypoint_document(std::string_view text, int expected_frames)
{
    std::vector<std::optional<KeypointFrame>> slots(static_cast<std::size_t>(std::max(expected_frames, 0)));
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto newline = text.find('\n', pos);
        if (newline == std::string_view::npos) {
            newline = text.size();
        }
        const auto line = text.substr(pos, newline - pos);
        pos = newline + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }

        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::SchemaViolation, std::string("keypoint document: ") + e.what());
        }
        if (!record.is_object() || !record.contains("frame") || !record["frame"].is_number_integer() ||
            !record.contains("points") || !record["points"].is_array()) {
            throw Error(ErrorCode::SchemaViolation, "keypoint record must be {\"frame\": i, \"points\": [...]}");
        }
        const int index = record["frame"].get<int>();
        if (index < 0 || index >= expected_frames) {
            throw Error(ErrorCode::SchemaViolation, frame_label(index) + " outside the clip");
        }
        const auto& points = record["points"];
        if (points.size() != kKeypointCount) {
            throw Error(ErrorCode::SchemaViolation, frame_label(index) + ": expected 55 keypoints, got " +
                                                        std::to_string(points.size()));
        }
        auto& slot = slots[static_cast<std::size_t>(index)];
        if (slot) {
            throw Error(ErrorCode::SchemaViolation, frame_label(index) + " appears twice");
        }
        KeypointFrame frame;
        frame.frame_index = index;
        for (int i = 0; i < kKeypointCount; ++i) {
            frame.points[static_cast<std::size_t>(i)] = parse_point(points[static_cast<std::size_t>(i)], index);
        }
        slot = frame;
    }

    std::vector<KeypointFrame> frames;
    frames.reserve(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i]) {
            throw Error(ErrorCode::MissingFrame, "keypoint document has no " + frame_label(static_cast<int>(i)));
        }
        frames.push_back(*slots[i]);
    }
    return frames;
}

std::string serialize_keypoint_document(std::span<const KeypointFrame> frames)
{
    std::string out;
    for (const auto& frame : frames) {
        json points = json::array();
        for (const auto& p : frame.points) {
            points.push_back({p.x, p.y, p.confidence});
        }
        out += json{{"frame", frame.frame_index}, {"points", std::move(points)}}.dump();
        out += '\n';
    }
    return out;
}

std::vector<SegmentFrame> parse_segment_document(std::span<const std::uint8_t> bytes, const ClipMeta& meta,
                                                 const LabelMap& label_map)
{
    ByteReader reader(bytes);
    if (reader.bytes(kSegmentMagic.size()) != kSegmentMagic) {
        throw Error(ErrorCode::SchemaViolation, "segment document lacks SGMT magic");
    }
    if (const auto version = reader.u16(); version != kSegmentVersion) {
        throw Error(ErrorCode::SchemaViolation, "unsupported segment document version " + std::to_string(version));
    }
    const std::size_t plane = static_cast<std::size_t>(meta.height) * meta.width;
    const std::size_t expected = plane * static_cast<std::size_t>(meta.frame_count);
    if (reader.remaining() != expected) {
        throw Error(ErrorCode::DimensionMismatch,
                    "segment payload holds " + std::to_string(reader.remaining()) + " bytes; clip '" + meta.clip_id +
                        "' needs " + std::to_string(meta.frame_count) + " x " + std::to_string(meta.height) + "x" +
                        std::to_string(meta.width));
    }

    std::vector<SegmentFrame> frames;
    frames.reserve(static_cast<std::size_t>(meta.frame_count));
    auto payload = reader.rest();
    for (int f = 0; f < meta.frame_count; ++f) {
        SegmentFrame frame(f, meta.height, meta.width);
        const auto source = payload.subspan(static_cast<std::size_t>(f) * plane, plane);
        for (std::size_t i = 0; i < plane; ++i) {
            const std::uint8_t code = label_map[source[i]];
            if (code >= kBodyPartCount) {
                throw Error(ErrorCode::SchemaViolation,
                            frame_label(f) + ": unknown segment label " + std::to_string(source[i]));
            }
            frame.labels[i] = code;
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

std::vector<std::uint8_t> serialize_segment_document(std::span<const SegmentFrame> frames)
{
    ByteWriter writer;
    writer.bytes(kSegmentMagic);
    writer.u16(kSegmentVersion);
    for (const auto& frame : frames) {
        writer.buffer().insert(writer.buffer().end(), frame.labels.begin(), frame.labels.end());
    }
    return writer.take();
}

ClipBundle parse_clip(std::string_view keypoint_text, std::span<const std::uint8_t> segment_bytes,
                      const ClipMeta& meta, const PipelineConfig& config)
{
    validate_meta(meta);
    ClipBundle bundle;
    bundle.meta = meta;
    bundle.keypoints = parse_keypoint_document(keypoint_text, meta.frame_count);
    bundle.segments = parse_segment_document(segment_bytes, meta, config.label_map);
    return bundle;
}

ClipBundle apply_trim(const ClipBundle& bundle)
{
    const FrameRange kept = bundle.meta.kept_frames();
    ClipBundle out;
    out.meta = bundle.meta;
    out.meta.frame_count = kept.size();
    out.meta.trim_range.reset();
    for (int f = kept.begin; f < kept.end; ++f) {
        auto keypoints = bundle.keypoints[static_cast<std::size_t>(f)];
        keypoints.frame_index = f - kept.begin;
        out.keypoints.push_back(keypoints);
        auto segments = bundle.segments[static_cast<std::size_t>(f)];
        segments.frame_index = f - kept.begin;
        out.segments.push_back(std::move(segments));
    }
    return out;
}

CropTransform crop_to_signer(std::span<const std::optional<BoundingBox>> boxes, const ClipMeta& meta, int size)
{
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = x0;
    double x1 = -x0;
    double y1 = -x0;
    bool any = false;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (!boxes[i]) {
            continue;
        }
        BoundingBox box = *boxes[i];
        box.x0 = std::clamp(box.x0, 0.0, static_cast<double>(meta.width));
        box.x1 = std::clamp(box.x1, 0.0, static_cast<double>(meta.width));
        box.y0 = std::clamp(box.y0, 0.0, static_cast<double>(meta.height));
        box.y1 = std::clamp(box.y1, 0.0, static_cast<double>(meta.height));
        if (!(box.width() > 0.0 && box.height() > 0.0)) {
            throw Error(ErrorCode::EmptyBox, frame_label(static_cast<int>(i)) + " has a zero-area signer box");
        }
        x0 = std::min(x0, box.x0);
        y0 = std::min(y0, box.y0);
        x1 = std::max(x1, box.x1);
        y1 = std::max(y1, box.y1);
        any = true;
    }
    if (!any) {
        throw Error(ErrorCode::NoBoxes, "clip '" + meta.clip_id + "' has no signer detection in any frame");
    }

    const double side = std::max(x1 - x0, y1 - y0);
    CropTransform transform;
    transform.size = size;
    transform.scale = size / side;
    transform.offset_x = side / 2.0 - (x0 + x1) / 2.0;
    transform.offset_y = side / 2.0 - (y0 + y1) / 2.0;
    return transform;
}

ClipBundle apply_crop(const ClipBundle& bundle, const CropTransform& transform)
{
    const int size = transform.size;
    ClipBundle out;
    out.meta = bundle.meta;
    out.meta.height = size;
    out.meta.width = size;

    out.keypoints.reserve(bundle.keypoints.size());
    for (const auto& frame : bundle.keypoints) {
        KeypointFrame mapped = frame;
        for (auto& p : mapped.points) {
            p.x = transform.map_x(p.x);
            p.y = transform.map_y(p.y);
        }
        out.keypoints.push_back(mapped);
    }

    // Source pixel index for each crop row/column, sampled at pixel centers.
    auto source_index = [&](int out_index, double offset, int limit) {
        const double source = (out_index + 0.5) / transform.scale - offset;
        const double index = std::floor(source);
        return (index >= 0.0 && index < limit) ? static_cast<int>(index) : -1;
    };
    std::vector<int> columns(static_cast<std::size_t>(size));
    std::vector<int> rows(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) {
        columns[static_cast<std::size_t>(i)] = source_index(i, transform.offset_x, bundle.meta.width);
        rows[static_cast<std::size_t>(i)] = source_index(i, transform.offset_y, bundle.meta.height);
    }

    out.segments.reserve(bundle.segments.size());
    for (const auto& frame : bundle.segments) {
        SegmentFrame mapped(frame.frame_index, size, size);
        for (int y = 0; y < size; ++y) {
            const int sy = rows[static_cast<std::size_t>(y)];
            if (sy < 0) {
                continue;
            }
            for (int x = 0; x < size; ++x) {
                const int sx = columns[static_cast<std::size_t>(x)];
                if (sx >= 0) {
                    mapped.set(y, x, frame.at(sy, sx));
                }
            }
        }
        out.segments.push_back(std::move(mapped));
    }
    return out;
}

}  // namespace signmask
