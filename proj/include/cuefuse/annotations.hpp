#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cuefuse/distributions.hpp"

namespace cuefuse {

/// Joint prisoner's-dilemma outcome from Player A's perspective: DC means
/// Player A exploited the partner, CD means Player A was exploited.
enum class GameOutcome : std::uint8_t { CC, DC, CD, DD };

inline constexpr std::array<GameOutcome, 4> kAllOutcomes = {GameOutcome::CC, GameOutcome::DC,
                                                            GameOutcome::CD, GameOutcome::DD};

enum class Condition : std::uint8_t { ContextFree, ContextBased, ContextOnly };

inline constexpr std::array<Condition, 3> kAllConditions = {
    Condition::ContextFree, Condition::ContextBased, Condition::ContextOnly};

[[nodiscard]] std::string_view outcome_name(GameOutcome o) noexcept;
[[nodiscard]] std::optional<GameOutcome> parse_outcome(std::string_view text) noexcept;
/// "context_free", "context_based", "context_only".
[[nodiscard]] std::string_view condition_key(Condition c) noexcept;
[[nodiscard]] std::optional<Condition> parse_condition(std::string_view text) noexcept;

struct AnnotationRecord {
    std::string video_id;  // empty for ContextOnly
    GameOutcome outcome = GameOutcome::CC;
    std::string annotator_id;
    Condition condition = Condition::ContextFree;
    EmotionLabel label = EmotionLabel::Joy;
    bool passed_attention = true;

    friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

struct VideoRatings {
    std::string video_id;
    GameOutcome outcome = GameOutcome::CC;
    Condition condition = Condition::ContextFree;
    CountVector counts{};
    std::uint64_t n = 0;
    EmotionDistribution dist;

    [[nodiscard]] std::uint64_t modal_count() const noexcept;
};

inline constexpr std::string_view kAnnotationHeader =
    "video_id,outcome,annotator_id,condition,label,passed_attention";

/// Reads the annotation CSV. `source` names the input in error messages,
/// which also carry the 1-based line number. Throws SchemaError, BadLabel,
/// BadOutcome.
[[nodiscard]] std::vector<AnnotationRecord> parse_annotations(std::istream& in,
                                                              std::string_view source = "<input>");
[[nodiscard]] std::vector<AnnotationRecord> load_annotations(const std::string& path);

void write_annotations(std::ostream& out, std::span<const AnnotationRecord> records);

/// Drops records that failed the attention check.
[[nodiscard]] std::vector<AnnotationRecord> filter_attention(std::span<const AnnotationRecord> records);

/// Synthetic id used to group context-only ratings of one outcome.
[[nodiscard]] std::string context_only_id(GameOutcome o);

/// Tallies one (video_id, condition) group. Throws EmptyGroup, MixedGroup.
[[nodiscard]] VideoRatings aggregate_video(std::span<const AnnotationRecord> records);

/// Groups records by (condition, video_id) and aggregates each group. Context-only
/// records are keyed by context_only_id(outcome). Output is sorted by
/// (condition, outcome, video_id).
[[nodiscard]] std::vector<VideoRatings> aggregate_all(std::span<const AnnotationRecord> records);

struct ConsensusRow {
    GameOutcome outcome = GameOutcome::CC;
    std::uint64_t n_videos = 0;
    std::uint64_t n_majority = 0;       // modal / n > 1/2
    std::uint64_t n_supermajority = 0;  // modal / n >= 2/3
    double pct_majority = 0.0;
    double pct_supermajority = 0.0;
};

/// True when modal / n > 1/2, compared exactly.
[[nodiscard]] bool has_majority(std::uint64_t modal, std::uint64_t n) noexcept;
/// True when modal / n >= 2/3, compared exactly.
[[nodiscard]] bool has_supermajority(std::uint64_t modal, std::uint64_t n) noexcept;

/// Per-outcome majority / supermajority fractions, one row per outcome present,
/// in canonical outcome order. Throws EmptyGroup.
[[nodiscard]] std::vector<ConsensusRow> consensus_stats(std::span<const VideoRatings> videos);

/// Unweighted mean of per-video distributions for one outcome and condition.
/// Throws EmptyGroup, MixedGroup.
[[nodiscard]] EmotionDistribution aggregate_outcome(std::span<const VideoRatings> videos);

}  // namespace cuefuse
