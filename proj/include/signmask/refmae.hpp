// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signmask/rng.hpp"
#include "signmask/token_set.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

/// Reference numerics for the pretraining and finetuning objectives and the
/// cross-attention fusion routing. Forward-only, double precision, small sizes.
namespace signmask::ref {

/// Ground truth and reconstruction, `width` values per position, with the set
/// of masked positions the loss is taken over.
struct MaskedPair {
    std::vector<double> truth;
    std::vector<double> reconstruction;
    std::size_t width = 1;
    std::vector<std::size_t> masked;

    std::size_t positions() const noexcept { return width == 0 ? 0 : truth.size() / width; }
};

/// Mean over masked positions of the squared L2 error. Raises EmptyMask when
/// no position is masked and ShapeMismatch for inconsistent shapes.
double masked_mse(const MaskedPair& pair);

/// d loss / d reconstruction.
std::vector<double> masked_mse_gradient(const MaskedPair& pair);

class SoftLabel {
public:
    /// Entries must be nonnegative and sum to 1 within 1e-9.
    explicit SoftLabel(std::vector<double> probabilities);

    static SoftLabel one_hot(std::size_t classes, std::size_t index);

    std::size_t classes() const noexcept { return probabilities_.size(); }
    const std::vector<double>& probabilities() const noexcept { return probabilities_; }
    double operator[](std::size_t i) const { return probabilities_[i]; }

private:
    std::vector<double> probabilities_;
};

struct MixupSample {
    std::vector<double> input;
    SoftLabel label;
    double lambda;
};

/// lambda * (x_i, y_i) + (1 - lambda) * (x_j, y_j).
MixupSample mixup(std::span<const double> x_i, std::span<const double> x_j, const SoftLabel& y_i,
                  const SoftLabel& y_j, double lambda);

/// Same blend with lambda ~ Beta(alpha, alpha).
MixupSample mixup(std::span<const double> x_i, std::span<const double> x_j, const SoftLabel& y_i,
                  const SoftLabel& y_j, double alpha, Rng& rng);

double sample_beta(double a, double b, Rng& rng);

/// -sum_c y_c log p_c. Raises NonPositiveProbability when some p_c <= 0.
double soft_cross_entropy(const SoftLabel& label, std::span<const double> probabilities);

double entropy(const SoftLabel& label);

std::vector<double> softmax(std::span<const double> logits);

/// Soft cross-entropy of softmax(logits), computed through log-sum-exp.
double soft_cross_entropy_from_logits(const SoftLabel& label, std::span<const double> logits);

/// softmax(logits) - y.
std::vector<double> soft_cross_entropy_logit_gradient(const SoftLabel& label, std::span<const double> logits);

/// Keypoint stream: mean per-token loss over hand tokens only (EmptyHandSet
/// when there are none).
double hand_restricted_loss(std::span<const double> token_losses, const TokenSet& hands);

/// Video stream: every token contributes.
double full_frame_loss(std::span<const double> token_losses);

/// Single-head projections, each dim x dim, applied to row-vector tokens.
struct AttentionWeights {
    Eigen::MatrixXd query;
    Eigen::MatrixXd key;
    Eigen::MatrixXd value;
    Eigen::MatrixXd output;
};

struct FusionSpec {
    int dim = 0;
    int layers = 4;
};

/// `video` holds the tube-queries-ST cascade, `keypoint` the
/// fused-video-queries-keypoint cascade; each has spec.layers entries.
struct FusionWeights {
    std::vector<AttentionWeights> video;
    std::vector<AttentionWeights> keypoint;
};

FusionWeights identity_fusion_weights(const FusionSpec& spec);
FusionWeights random_fusion_weights(const FusionSpec& spec, std::uint64_t seed);

/// softmax(Q K^T / sqrt(d)) V W_o with Q = queries W_q, K = context W_k,
/// V = context W_v. Rows are tokens.
Eigen::MatrixXd cross_attention(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& context,
                                const AttentionWeights& weights);

/// Runs the video cascade (tube tokens attend to ST tokens), then the keypoint
/// cascade (fused video attends to keypoint tokens), mean-pools both outputs
/// and returns [pooled keypoint-cascade output, pooled fused video] (length 2d).
Eigen::VectorXd fuse(const FusionSpec& spec, const Eigen::MatrixXd& tube_tokens, const Eigen::MatrixXd& st_tokens,
                     const Eigen::MatrixXd& keypoint_tokens, const FusionWeights& weights);

}  // namespace signmask::ref
