// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signmask/config.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace signmask {

enum class Side : std::uint8_t { Left, Right };

constexpr Side opposite(Side side) noexcept { return side == Side::Left ? Side::Right : Side::Left; }

inline constexpr int kKeypointCount = 55;
inline constexpr int kBodyKeypointCount = 13;
inline constexpr int kHandKeypointCount = 21;

/// Keypoint layout: 13 upper-body joints (COCO order, truncated after the
/// hips) followed by 21 left-hand and 21 right-hand joints. Index 0 of each
/// hand block is the hand-model wrist.
namespace kp {
inline constexpr int nose = 0;
inline constexpr int left_shoulder = 5;
inline constexpr int right_shoulder = 6;
inline constexpr int left_elbow = 7;
inline constexpr int right_elbow = 8;
inline constexpr int left_wrist = 9;
inline constexpr int right_wrist = 10;
inline constexpr int left_hip = 11;
inline constexpr int right_hip = 12;
inline constexpr int left_hand_begin = 13;
inline constexpr int right_hand_begin = left_hand_begin + kHandKeypointCount;

constexpr int shoulder(Side s) noexcept { return s == Side::Left ? left_shoulder : right_shoulder; }
constexpr int elbow(Side s) noexcept { return s == Side::Left ? left_elbow : right_elbow; }
constexpr int wrist(Side s) noexcept { return s == Side::Left ? left_wrist : right_wrist; }
constexpr int hand_begin(Side s) noexcept { return s == Side::Left ? left_hand_begin : right_hand_begin; }
}  // namespace kp

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double confidence = 0.0;

    friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct KeypointFrame {
    int frame_index = 0;
    std::array<Keypoint, kKeypointCount> points{};

    friend bool operator==(const KeypointFrame&, const KeypointFrame&) = default;
};

enum class BodyPart : std::uint8_t {
    Background = 0,
    LeftHand = 1,
    RightHand = 2,
    LeftArm = 3,
    RightArm = 4,
    OtherBody = 5,
};

inline constexpr std::uint8_t kBodyPartCount = 6;

constexpr BodyPart hand_part(Side s) noexcept { return s == Side::Left ? BodyPart::LeftHand : BodyPart::RightHand; }
constexpr BodyPart arm_part(Side s) noexcept { return s == Side::Left ? BodyPart::LeftArm : BodyPart::RightArm; }

struct SegmentFrame {
    int frame_index = 0;
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> labels;  // row-major class codes

    SegmentFrame() = default;
    SegmentFrame(int index, int h, int w)
        : frame_index(index), height(h), width(w), labels(static_cast<std::size_t>(h) * w, 0)
    {
    }

    BodyPart at(int y, int x) const { return static_cast<BodyPart>(labels[static_cast<std::size_t>(y) * width + x]); }
    void set(int y, int x, BodyPart part) { labels[static_cast<std::size_t>(y) * width + x] = static_cast<std::uint8_t>(part); }

    friend bool operator==(const SegmentFrame&, const SegmentFrame&) = default;
};

/// Half-open frame interval.
struct FrameRange {
    int begin = 0;
    int end = 0;

    int size() const noexcept { return end - begin; }
    friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

struct ClipMeta {
    std::string clip_id;
    int frame_count = 32;
    int height = 224;
    int width = 224;
    std::optional<FrameRange> trim_range;

    /// Frames that survive trimming.
    FrameRange kept_frames() const { return trim_range.value_or(FrameRange{0, frame_count}); }

    friend bool operator==(const ClipMeta&, const ClipMeta&) = default;
};

/// Structural checks that hold for any detector output: positive dims, a
/// nonempty clip, and a trim range inside the clip.
void validate_meta(const ClipMeta& meta);

/// Checks required before tokenization: H and W divisible by 16, and an even
/// number (at least 2) of frames after trimming. Raises IndivisibleDims.
void validate_tube_layout(const ClipMeta& meta);

struct BoundingBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const noexcept { return x1 - x0; }
    double height() const noexcept { return y1 - y0; }
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// The meta document pairs clip dimensions with the per-frame signer boxes
/// emitted by the person detector (null where nothing was detected).
struct MetaDocument {
    ClipMeta meta;
    std::vector<std::optional<BoundingBox>> boxes;
};

MetaDocument parse_meta_document(std::string_view json_text);
std::string serialize_meta_document(const MetaDocument& doc);

struct ClipBundle {
    ClipMeta meta;
    std::vector<KeypointFrame> keypoints;
    std::vector<SegmentFrame> segments;

    friend bool operator==(const ClipBundle&, const ClipBundle&) = default;
};

std::vector<KeypointFrame> parse_keypoint_document(std::string_view text, int expected_frames);
std::string serialize_keypoint_document(std::span<const KeypointFrame> frames);

inline constexpr std::string_view kSegmentMagic = "SGMT";
inline constexpr std::uint16_t kSegmentVersion = 1;

/// Decodes an SGMT document. Raw codes pass through `label_map` before being
/// checked against the six-class vocabulary.
std::vector<SegmentFrame> parse_segment_document(std::span<const std::uint8_t> bytes, const ClipMeta& meta,
                                                 const LabelMap& label_map = identity_label_map());
std::vector<std::uint8_t> serialize_segment_document(std::span<const SegmentFrame> frames);

ClipBundle parse_clip(std::string_view keypoint_text, std::span<const std::uint8_t> segment_bytes,
                      const ClipMeta& meta, const PipelineConfig& config = {});

/// Drops frames outside meta.trim_range and renumbers the rest from 0.
ClipBundle apply_trim(const ClipBundle& bundle);

/// Maps original-frame pixels into an S x S crop: p' = (p + offset) * scale.
struct CropTransform {
    double offset_x = 0.0;
    double offset_y = 0.0;
    double scale = 1.0;
    int size = 224;

    double map_x(double x) const noexcept { return (x + offset_x) * scale; }
    double map_y(double y) const noexcept { return (y + offset_y) * scale; }
};

/// Builds one transform for the whole clip from the union of the clamped
/// per-frame boxes: a square of side max(union w, union h), centered on the
/// union, scaled uniformly to `size`.
CropTransform crop_to_signer(std::span<const std::optional<BoundingBox>> boxes, const ClipMeta& meta,
                             int size = 224);

/// Remaps keypoints and resamples segment grids (nearest pixel center,
/// background outside the source frame) into crop space.
ClipBundle apply_crop(const ClipBundle& bundle, const CropTransform& transform);

}  // namespace signmask
