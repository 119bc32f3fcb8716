#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cuefuse/annotations.hpp"
#include "cuefuse/distributions.hpp"

namespace cuefuse {

enum class KldDirection {
    TruthPred,  // D(truth || pred), the default
    PredTruth,  // D(pred || truth)
};

[[nodiscard]] std::string_view kld_direction_key(KldDirection d) noexcept;
[[nodiscard]] std::optional<KldDirection> parse_kld_direction(std::string_view text) noexcept;

inline constexpr double kKldEps = 1e-10;

/// D(truth || pred) in nats after adding `eps` to both arguments and
/// renormalizing.
[[nodiscard]] double kld(const EmotionDistribution& truth, const EmotionDistribution& pred,
                         double eps = kKldEps);
[[nodiscard]] double kld(const EmotionDistribution& truth, const EmotionDistribution& pred,
                         KldDirection direction);

/// sqrt(mean over the 7 components of squared differences).
[[nodiscard]] double rmse(const EmotionDistribution& truth, const EmotionDistribution& pred) noexcept;

/// Support-weighted mean of per-class F1. Throws LengthMismatch, EmptyInput.
[[nodiscard]] double weighted_f1(std::span<const EmotionLabel> pred_labels,
                                 std::span<const EmotionLabel> truth_labels);

struct VideoMetrics {
    std::string video_id;
    double kld = 0.0;
    double rmse = 0.0;
    EmotionLabel pred_label = EmotionLabel::Joy;
    EmotionLabel truth_label = EmotionLabel::Joy;
};

struct AggregateMetrics {
    double kld = 0.0;
    double rmse = 0.0;
    double f1_weighted = 0.0;
};

struct EvalRow {
    std::string method_name;
    std::vector<VideoMetrics> per_video;  // sorted by video_id
    AggregateMetrics aggregate;
};

using DistributionsByVideo = std::map<std::string, EmotionDistribution>;

/// Per-video KLD/RMSE plus argmax labels; aggregates are unweighted means in
/// video_id order. Throws KeyMismatch when the key sets differ.
[[nodiscard]] EvalRow evaluate_method(std::string method_name, const DistributionsByVideo& preds,
                                      const DistributionsByVideo& truth,
                                      KldDirection direction = KldDirection::TruthPred);

struct ImprovementRow {
    GameOutcome outcome = GameOutcome::CC;
    std::size_t n_videos = 0;
    double delta_kld = 0.0;  // mean KLD(context-free) - mean KLD(fused); > 0 means fusion helped
};

/// Per-outcome change in mean KLD, one row per outcome present, in canonical
/// order. Throws KeyMismatch.
[[nodiscard]] std::vector<ImprovementRow> outcome_improvement(
    const DistributionsByVideo& context_free_preds, const DistributionsByVideo& fused_preds,
    const DistributionsByVideo& truth, const std::map<std::string, GameOutcome>& grouping,
    KldDirection direction = KldDirection::TruthPred);

}  // namespace cuefuse
