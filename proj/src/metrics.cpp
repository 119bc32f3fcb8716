#include "cuefuse/metrics.hpp"

#include <cmath>

#include "cuefuse/error.hpp"

namespace cuefuse {

namespace {

template <typename A, typename B>
void require_same_keys(const std::map<std::string, A>& a, const std::map<std::string, B>& b,
                       std::string_view what_a, std::string_view what_b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            throw Error(ErrorKind::KeyMismatch, "key '" + ia->first + "' in " + std::string(what_a) +
                                                    " is missing from " + std::string(what_b));
        }
        if (ia == a.end() || ib->first < ia->first) {
            throw Error(ErrorKind::KeyMismatch, "key '" + ib->first + "' in " + std::string(what_b) +
                                                    " is missing from " + std::string(what_a));
        }
        ++ia;
        ++ib;
    }
}

}  // namespace

std::string_view kld_direction_key(KldDirection d) noexcept {
    return d == KldDirection::TruthPred ? "truth_pred" : "pred_truth";
}

std::optional<KldDirection> parse_kld_direction(std::string_view text) noexcept {
    if (text == "truth_pred") return KldDirection::TruthPred;
    if (text == "pred_truth") return KldDirection::PredTruth;
    return std::nullopt;
}

double kld(const EmotionDistribution& truth, const EmotionDistribution& pred, double eps) {
    const EmotionDistribution t = smooth(truth, eps);
    const EmotionDistribution p = smooth(pred, eps);
    double d = 0.0;
    for (std::size_t i = 0; i < kNumLabels; ++i) d += t[i] * std::log(t[i] / p[i]);
    // Rounding can leave a tiny negative value for identical arguments.
    return std::max(d, 0.0);
}

double kld(const EmotionDistribution& truth, const EmotionDistribution& pred, KldDirection direction) {
    return direction == KldDirection::TruthPred ? kld(truth, pred) : kld(pred, truth);
}

double rmse(const EmotionDistribution& truth, const EmotionDistribution& pred) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < kNumLabels; ++i) {
        const double diff = truth[i] - pred[i];
        s += diff * diff;
    }
    return std::sqrt(s / static_cast<double>(kNumLabels));
}

double weighted_f1(std::span<const EmotionLabel> pred_labels, std::span<const EmotionLabel> truth_labels) {
    if (pred_labels.size() != truth_labels.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "weighted_f1: " + std::to_string(pred_labels.size()) + " predictions vs " +
                        std::to_string(truth_labels.size()) + " truth labels");
    }
    if (pred_labels.empty()) throw Error(ErrorKind::EmptyInput, "weighted_f1: no labels");

    std::array<std::size_t, kNumLabels> tp{}, pred_count{}, support{};
    for (std::size_t k = 0; k < pred_labels.size(); ++k) {
        const auto p = index_of(pred_labels[k]);
        const auto t = index_of(truth_labels[k]);
        ++pred_count[p];
        ++support[t];
        if (p == t) ++tp[p];
    }
    double total = 0.0;
    for (std::size_t c = 0; c < kNumLabels; ++c) {
        if (support[c] == 0) continue;
        // F1 = 2 tp / (2 tp + fp + fn) = 2 tp / (predicted + actual)
        const double f1 = 2.0 * static_cast<double>(tp[c]) /
                          static_cast<double>(pred_count[c] + support[c]);
        total += static_cast<double>(support[c]) * f1;
    }
    return total / static_cast<double>(truth_labels.size());
}

EvalRow evaluate_method(std::string method_name, const DistributionsByVideo& preds,
                        const DistributionsByVideo& truth, KldDirection direction) {
    require_same_keys(preds, truth, "predictions", "truth");
    if (preds.empty()) throw Error(ErrorKind::EmptyInput, "no videos to evaluate");

    EvalRow row;
    row.method_name = std::move(method_name);
    std::vector<EmotionLabel> pred_labels, truth_labels;
    double kld_sum = 0.0, rmse_sum = 0.0;
    for (const auto& [video, p] : preds) {
        const auto& t = truth.at(video);
        VideoMetrics m{video, kld(t, p, direction), rmse(t, p), argmax(p), argmax(t)};
        kld_sum += m.kld;
        rmse_sum += m.rmse;
        pred_labels.push_back(m.pred_label);
        truth_labels.push_back(m.truth_label);
        row.per_video.push_back(std::move(m));
    }
    const auto n = static_cast<double>(row.per_video.size());
    row.aggregate.kld = kld_sum / n;
    row.aggregate.rmse = rmse_sum / n;
    row.aggregate.f1_weighted = weighted_f1(pred_labels, truth_labels);
    return row;
}

std::vector<ImprovementRow> outcome_improvement(const DistributionsByVideo& context_free_preds,
                                                const DistributionsByVideo& fused_preds,
                                                const DistributionsByVideo& truth,
                                                const std::map<std::string, GameOutcome>& grouping,
                                                KldDirection direction) {
    require_same_keys(context_free_preds, truth, "context-free predictions", "truth");
    require_same_keys(fused_preds, truth, "fused predictions", "truth");
    for (const auto& [video, d] : truth) {
        if (!grouping.contains(video)) {
            throw Error(ErrorKind::KeyMismatch, "video '" + video + "' has no game outcome");
        }
    }

    std::array<double, 4> cf_sum{}, fused_sum{};
    std::array<std::size_t, 4> count{};
    for (const auto& [video, t] : truth) {
        const auto o = static_cast<std::size_t>(grouping.at(video));
        cf_sum[o] += kld(t, context_free_preds.at(video), direction);
        fused_sum[o] += kld(t, fused_preds.at(video), direction);
        ++count[o];
    }
    std::vector<ImprovementRow> rows;
    for (GameOutcome outcome : kAllOutcomes) {
        const auto o = static_cast<std::size_t>(outcome);
        if (count[o] == 0) continue;
        const auto n = static_cast<double>(count[o]);
        rows.push_back({outcome, count[o], cf_sum[o] / n - fused_sum[o] / n});
    }
    return rows;
}

}  // namespace cuefuse
