// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signmask/config.hpp"
#include "signmask/ingest.hpp"
#include "signmask/token_set.hpp"

#include <span>

namespace signmask {

struct ArmPoseFeatures {
    double a1 = 0.0;  ///< degrees at the same-side shoulder, rays to the other shoulder and the elbow
    double a2 = 0.0;  ///< degrees at the elbow, rays to the shoulder and the wrist
    double d1 = 0.0;  ///< shoulder -> elbow, pixels
    double d2 = 0.0;  ///< elbow -> wrist, pixels
    Side side = Side::Left;
};

enum class Handedness : std::uint8_t { TwoHanded, OneHandedLeft, OneHandedRight, NoHands };

std::string_view handedness_name(Handedness value);

/// Angle in degrees at `vertex` between the rays to `a` and `b`; 0 when
/// either ray has zero length.
double angle_at(const Keypoint& vertex, const Keypoint& a, const Keypoint& b);

/// Raises MissingJoint when a shoulder, or the queried elbow or wrist, falls
/// below the presence threshold.
ArmPoseFeatures arm_pose_features(const KeypointFrame& frame, Side side, const PipelineConfig& config = {});

bool is_arm_hanging(const ArmPoseFeatures& features, const PipelineConfig& config = {});

/// A hand is present when any of its 21 keypoints reaches the threshold.
bool hand_present(const KeypointFrame& frame, Side side, const PipelineConfig& config = {});

bool frame_is_removable(const KeypointFrame& frame, const PipelineConfig& config = {});

/// Maximal removable prefix and suffix; interior frames are never dropped.
/// When every frame is removable the whole clip is the prefix.
struct TrimResult {
    int front = 0;
    int back = 0;
};

TrimResult find_trim(std::span<const KeypointFrame> frames, const PipelineConfig& config = {});

/// Total path length of the hand-model wrist over consecutive frames where it
/// is confidently detected.
double wrist_path_length(std::span<const KeypointFrame> frames, Side side, const PipelineConfig& config = {});

Handedness classify_handedness(std::span<const KeypointFrame> frames, double crop_diagonal,
                               const PipelineConfig& config = {});

/// |left & right| / max(1, min(|left|, |right|)).
double overlap_ratio(const TokenSet& left_region, const TokenSet& right_region);

}  // namespace signmask
