// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/refmae.hpp"

#include "signmask/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace signmask::ref {

namespace {

void check_pair(const MaskedPair& pair)
{
    if (pair.width == 0 || pair.truth.size() != pair.reconstruction.size() || pair.truth.size() % pair.width != 0) {
        throw Error(ErrorCode::ShapeMismatch, "truth and reconstruction shapes differ");
    }
    if (pair.masked.empty()) {
        throw Error(ErrorCode::EmptyMask, "no masked positions");
    }
    std::vector<std::size_t> sorted = pair.masked;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.back() >= pair.positions()) {
        throw Error(ErrorCode::ShapeMismatch, "masked positions must be distinct and in range");
    }
}

double log_sum_exp(std::span<const double> logits)
{
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) {
        sum += std::exp(z - peak);
    }
    return peak + std::log(sum);
}

void check_label_size(const SoftLabel& label, std::size_t size)
{
    if (label.classes() != size || size == 0) {
        throw Error(ErrorCode::ShapeMismatch, "label and prediction class counts differ");
    }
}

void check_attention(const AttentionWeights& w, int dim)
{
    for (const auto* m : {&w.query, &w.key, &w.value, &w.output}) {
        if (m->rows() != dim || m->cols() != dim) {
            throw Error(ErrorCode::ShapeMismatch, "attention projection must be dim x dim");
        }
    }
}

Eigen::MatrixXd row_softmax(Eigen::MatrixXd scores)
{
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const double peak = scores.row(i).maxCoeff();
        scores.row(i) = (scores.row(i).array() - peak).exp().matrix();
        scores.row(i) /= scores.row(i).sum();
    }
    return scores;
}

}  // namespace

double masked_mse(const MaskedPair& pair)
{
    check_pair(pair);
    double total = 0.0;
    for (std::size_t p : pair.masked) {
        for (std::size_t k = 0; k < pair.width; ++k) {
            const double diff = pair.truth[p * pair.width + k] - pair.reconstruction[p * pair.width + k];
            total += diff * diff;
        }
    }
    return total / static_cast<double>(pair.masked.size());
}

std::vector<double> masked_mse_gradient(const MaskedPair& pair)
{
    check_pair(pair);
    std::vector<double> grad(pair.reconstruction.size(), 0.0);
    const double scale = 2.0 / static_cast<double>(pair.masked.size());
    for (std::size_t p : pair.masked) {
        for (std::size_t k = 0; k < pair.width; ++k) {
            const std::size_t i = p * pair.width + k;
            grad[i] = scale * (pair.reconstruction[i] - pair.truth[i]);
        }
    }
    return grad;
}

SoftLabel::SoftLabel(std::vector<double> probabilities) : probabilities_(std::move(probabilities))
{
    if (probabilities_.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "soft label needs at least one class");
    }
    double sum = 0.0;
    for (double p : probabilities_) {
        if (!(p >= 0.0)) {
            throw Error(ErrorCode::SchemaViolation, "soft label entries must be nonnegative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::SchemaViolation, "soft label must sum to 1");
    }
}

SoftLabel SoftLabel::one_hot(std::size_t classes, std::size_t index)
{
    std::vector<double> p(classes, 0.0);
    p.at(index) = 1.0;
    return SoftLabel(std::move(p));
}

MixupSample mixup(std::span<const double> x_i, std::span<const double> x_j, const SoftLabel& y_i,
                  const SoftLabel& y_j, double lambda)
{
    if (x_i.size() != x_j.size() || y_i.classes() != y_j.classes()) {
        throw Error(ErrorCode::ShapeMismatch, "mixup operands differ in shape");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw Error(ErrorCode::SchemaViolation, "mixup lambda must lie in [0,1]");
    }
    std::vector<double> input(x_i.size());
    for (std::size_t k = 0; k < input.size(); ++k) {
        input[k] = lambda * x_i[k] + (1.0 - lambda) * x_j[k];
    }
    std::vector<double> label(y_i.classes());
    for (std::size_t c = 0; c < label.size(); ++c) {
        label[c] = lambda * y_i[c] + (1.0 - lambda) * y_j[c];
    }
    return {std::move(input), SoftLabel(std::move(label)), lambda};
}

MixupSample mixup(std::span<const double> x_i, std::span<const double> x_j, const SoftLabel& y_i,
                  const SoftLabel& y_j, double alpha, Rng& rng)
{
    return mixup(x_i, x_j, y_i, y_j, sample_beta(alpha, alpha, rng));
}

double sample_beta(double a, double b, Rng& rng)
{
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng.engine());
    const double y = gb(rng.engine());
    return x + y > 0.0 ? x / (x + y) : 0.5;
}

double soft_cross_entropy(const SoftLabel& label, std::span<const double> probabilities)
{
    check_label_size(label, probabilities.size());
    double loss = 0.0;
    for (std::size_t c = 0; c < probabilities.size(); ++c) {
        if (!(probabilities[c] > 0.0)) {
            throw Error(ErrorCode::NonPositiveProbability, "class " + std::to_string(c) + " has p <= 0");
        }
        if (label[c] != 0.0) {
            loss -= label[c] * std::log(probabilities[c]);
        }
    }
    return loss;
}

double entropy(const SoftLabel& label)
{
    double h = 0.0;
    for (double p : label.probabilities()) {
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    return h;
}

std::vector<double> softmax(std::span<const double> logits)
{
    const double lse = log_sum_exp(logits);
    std::vector<double> out(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c) {
        out[c] = std::exp(logits[c] - lse);
    }
    return out;
}

double soft_cross_entropy_from_logits(const SoftLabel& label, std::span<const double> logits)
{
    check_label_size(label, logits.size());
    const double lse = log_sum_exp(logits);
    double loss = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) {
        loss -= label[c] * (logits[c] - lse);
    }
    return loss;
}

std::vector<double> soft_cross_entropy_logit_gradient(const SoftLabel& label, std::span<const double> logits)
{
    check_label_size(label, logits.size());
    std::vector<double> grad = softmax(logits);
    for (std::size_t c = 0; c < grad.size(); ++c) {
        grad[c] -= label[c];
    }
    return grad;
}

double hand_restricted_loss(std::span<const double> token_losses, const TokenSet& hands)
{
    if (hands.empty()) {
        throw Error(ErrorCode::EmptyHandSet, "no hand tokens to average over");
    }
    double total = 0.0;
    for (TokenIndex index : hands) {
        if (index >= token_losses.size()) {
            throw Error(ErrorCode::ShapeMismatch, "hand token outside the loss vector");
        }
        total += token_losses[index];
    }
    return total / static_cast<double>(hands.size());
}

double full_frame_loss(std::span<const double> token_losses)
{
    if (token_losses.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "empty loss vector");
    }
    return std::accumulate(token_losses.begin(), token_losses.end(), 0.0) / static_cast<double>(token_losses.size());
}

FusionWeights identity_fusion_weights(const FusionSpec& spec)
{
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(spec.dim, spec.dim);
    FusionWeights weights;
    weights.video.assign(static_cast<std::size_t>(spec.layers), AttentionWeights{eye, eye, eye, eye});
    weights.keypoint = weights.video;
    return weights;
}

FusionWeights random_fusion_weights(const FusionSpec& spec, std::uint64_t seed)
{
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.dim));
    auto matrix = [&] {
        Eigen::MatrixXd m(spec.dim, spec.dim);
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                m(i, j) = (2.0 * rng.uniform() - 1.0) * scale;
            }
        }
        return m;
    };
    FusionWeights weights;
    for (auto* cascade : {&weights.video, &weights.keypoint}) {
        for (int l = 0; l < spec.layers; ++l) {
            AttentionWeights w;
            w.query = matrix();
            w.key = matrix();
            w.value = matrix();
            w.output = matrix();
            cascade->push_back(std::move(w));
        }
    }
    return weights;
}

Eigen::MatrixXd cross_attention(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& context,
                                const AttentionWeights& weights)
{
    const Eigen::MatrixXd q = queries * weights.query;
    const Eigen::MatrixXd k = context * weights.key;
    const Eigen::MatrixXd v = context * weights.value;
    const double scale = 1.0 / std::sqrt(static_cast<double>(queries.cols()));
    const Eigen::MatrixXd attention = row_softmax((q * k.transpose()) * scale);
    return attention * v * weights.output;
}

Eigen::VectorXd fuse(const FusionSpec& spec, const Eigen::MatrixXd& tube_tokens, const Eigen::MatrixXd& st_tokens,
                     const Eigen::MatrixXd& keypoint_tokens, const FusionWeights& weights)
{
    if (spec.dim < 1 || spec.layers < 1) {
        throw Error(ErrorCode::ShapeMismatch, "fusion needs dim >= 1 and layers >= 1");
    }
    for (const auto* tokens : {&tube_tokens, &st_tokens, &keypoint_tokens}) {
        if (tokens->cols() != spec.dim || tokens->rows() < 1) {
            throw Error(ErrorCode::ShapeMismatch, "stream tokens must be n x dim with n >= 1");
        }
    }
    if (weights.video.size() != static_cast<std::size_t>(spec.layers) ||
        weights.keypoint.size() != static_cast<std::size_t>(spec.layers)) {
        throw Error(ErrorCode::ShapeMismatch, "fusion weights must hold one entry per layer");
    }

    Eigen::MatrixXd video = tube_tokens;
    for (const auto& layer : weights.video) {
        check_attention(layer, spec.dim);
        video = cross_attention(video, st_tokens, layer);
    }
    Eigen::MatrixXd cross = video;
    for (const auto& layer : weights.keypoint) {
        check_attention(layer, spec.dim);
        cross = cross_attention(cross, keypoint_tokens, layer);
    }

    Eigen::VectorXd feature(2 * spec.dim);
    feature.head(spec.dim) = cross.colwise().mean().transpose();
    feature.tail(spec.dim) = video.colwise().mean().transpose();
    return feature;
}

}  // namespace signmask::ref
