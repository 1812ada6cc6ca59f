// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/geometry.hpp"

#include "signmask/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace signmask {

std::string_view handedness_name(Handedness value)
{
    switch (value) {
    case Handedness::TwoHanded: return "two-handed";
    case Handedness::OneHandedLeft: return "one-handed-left";
    case Handedness::OneHandedRight: return "one-handed-right";
    case Handedness::NoHands: return "no-hands";
    }
    return "unknown";
}

double angle_at(const Keypoint& vertex, const Keypoint& a, const Keypoint& b)
{
    const double ax = a.x - vertex.x;
    const double ay = a.y - vertex.y;
    const double bx = b.x - vertex.x;
    const double by = b.y - vertex.y;
    const double norms = std::hypot(ax, ay) * std::hypot(bx, by);
    if (norms == 0.0) {
        return 0.0;
    }
    const double cosine = std::clamp((ax * bx + ay * by) / norms, -1.0, 1.0);
    return std::acos(cosine) * 180.0 / std::numbers::pi;
}

ArmPoseFeatures arm_pose_features(const KeypointFrame& frame, Side side, const PipelineConfig& config)
{
    auto joint = [&](int index, const char* name) -> const Keypoint& {
        const Keypoint& point = frame.points[static_cast<std::size_t>(index)];
        if (point.confidence < config.presence_threshold) {
            throw Error(ErrorCode::MissingJoint, std::string(name) + " absent in frame " +
                                                     std::to_string(frame.frame_index));
        }
        return point;
    };
    const Keypoint& shoulder = joint(kp::shoulder(side), "shoulder");
    const Keypoint& other_shoulder = joint(kp::shoulder(opposite(side)), "opposite shoulder");
    const Keypoint& elbow = joint(kp::elbow(side), "elbow");
    const Keypoint& wrist = joint(kp::wrist(side), "wrist");

    ArmPoseFeatures features;
    features.side = side;
    features.a1 = angle_at(shoulder, other_shoulder, elbow);
    features.a2 = angle_at(elbow, shoulder, wrist);
    features.d1 = std::hypot(elbow.x - shoulder.x, elbow.y - shoulder.y);
    features.d2 = std::hypot(wrist.x - elbow.x, wrist.y - elbow.y);
    return features;
}

bool is_arm_hanging(const ArmPoseFeatures& f, const PipelineConfig& config)
{
    const double spread = std::abs(f.d1 - f.d2) / std::max({f.d1, f.d2, 1.0});
    return std::abs(f.a1 - 90.0) <= config.arm_hang_a1_tolerance &&
           std::abs(f.a2 - 180.0) <= config.arm_hang_a2_tolerance &&
           spread <= config.arm_hang_distance_tolerance;
}

bool hand_present(const KeypointFrame& frame, Side side, const PipelineConfig& config)
{
    const auto first = frame.points.begin() + kp::hand_begin(side);
    return std::any_of(first, first + kHandKeypointCount,
                       [&](const Keypoint& p) { return p.confidence >= config.presence_threshold; });
}

bool frame_is_removable(const KeypointFrame& frame, const PipelineConfig& config)
{
    if (!hand_present(frame, Side::Left, config) && !hand_present(frame, Side::Right, config)) {
        return true;
    }
    auto hanging = [&](Side side) {
        try {
            return is_arm_hanging(arm_pose_features(frame, side, config), config);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::MissingJoint) {
                return false;
            }
            throw;
        }
    };
    return hanging(Side::Left) && hanging(Side::Right);
}

TrimResult find_trim(std::span<const KeypointFrame> frames, const PipelineConfig& config)
{
    const int count = static_cast<int>(frames.size());
    TrimResult result;
    while (result.front < count && frame_is_removable(frames[static_cast<std::size_t>(result.front)], config)) {
        ++result.front;
    }
    while (result.front + result.back < count &&
           frame_is_removable(frames[static_cast<std::size_t>(count - 1 - result.back)], config)) {
        ++result.back;
    }
    return result;
}

double wrist_path_length(std::span<const KeypointFrame> frames, Side side, const PipelineConfig& config)
{
    const auto index = static_cast<std::size_t>(kp::hand_begin(side));
    double length = 0.0;
    const Keypoint* previous = nullptr;
    for (const auto& frame : frames) {
        const Keypoint& wrist = frame.points[index];
        if (wrist.confidence < config.presence_threshold) {
            previous = nullptr;
            continue;
        }
        if (previous != nullptr) {
            length += std::hypot(wrist.x - previous->x, wrist.y - previous->y);
        }
        previous = &wrist;
    }
    return length;
}

Handedness classify_handedness(std::span<const KeypointFrame> frames, double crop_diagonal,
                               const PipelineConfig& config)
{
    auto moving = [&](Side side) {
        const auto present = std::count_if(frames.begin(), frames.end(),
                                           [&](const KeypointFrame& f) { return hand_present(f, side, config); });
        if (2 * static_cast<std::size_t>(present) <= frames.size()) {
            return false;
        }
        return wrist_path_length(frames, side, config) > config.movement_threshold * crop_diagonal;
    };
    const bool left = moving(Side::Left);
    const bool right = moving(Side::Right);
    if (left && right) {
        return Handedness::TwoHanded;
    }
    if (left) {
        return Handedness::OneHandedLeft;
    }
    if (right) {
        return Handedness::OneHandedRight;
    }
    return Handedness::NoHands;
}

double overlap_ratio(const TokenSet& left_region, const TokenSet& right_region)
{
    const auto shared = (left_region & right_region).size();
    const auto smaller = std::max<std::size_t>(1, std::min(left_region.size(), right_region.size()));
    return static_cast<double>(shared) / static_cast<double>(smaller);
}

}  // namespace signmask
