#include "cuefuse/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

#include "cuefuse/error.hpp"
#include "text_util.hpp"

namespace cuefuse {

namespace {

constexpr std::array<std::string_view, 4> kOutcomeNames = {"CC", "DC", "CD", "DD"};
constexpr std::array<std::string_view, 3> kConditionKeys = {"context_free", "context_based",
                                                            "context_only"};

[[noreturn]] void fail(ErrorKind kind, std::string_view source, std::size_t line,
                       const std::string& what) {
    throw Error(kind, std::string(source) + ":" + std::to_string(line) + ": " + what);
}

void check_group(std::span<const VideoRatings> videos) {
    if (videos.empty()) throw Error(ErrorKind::EmptyGroup, "no videos to aggregate");
    for (const auto& v : videos) {
        if (v.outcome != videos.front().outcome || v.condition != videos.front().condition) {
            throw Error(ErrorKind::MixedGroup, "videos '" + videos.front().video_id + "' and '" +
                                                   v.video_id +
                                                   "' differ in outcome or condition");
        }
    }
}

}  // namespace

std::string_view outcome_name(GameOutcome o) noexcept {
    return kOutcomeNames[static_cast<std::size_t>(o)];
}

std::optional<GameOutcome> parse_outcome(std::string_view text) noexcept {
    for (GameOutcome o : kAllOutcomes) {
        if (text == outcome_name(o)) return o;
    }
    return std::nullopt;
}

std::string_view condition_key(Condition c) noexcept {
    return kConditionKeys[static_cast<std::size_t>(c)];
}

std::optional<Condition> parse_condition(std::string_view text) noexcept {
    for (Condition c : kAllConditions) {
        if (text == condition_key(c)) return c;
    }
    return std::nullopt;
}

std::uint64_t VideoRatings::modal_count() const noexcept {
    return *std::max_element(counts.begin(), counts.end());
}

std::vector<AnnotationRecord> parse_annotations(std::istream& in, std::string_view source) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) fail(ErrorKind::SchemaError, source, 1, "missing header row");
    ++lineno;
    std::string_view header = detail::trim(line);
    if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
    if (header != kAnnotationHeader) {
        fail(ErrorKind::SchemaError, source, lineno,
             "header must be '" + std::string(kAnnotationHeader) + "'");
    }

    std::vector<AnnotationRecord> records;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv(line);
        if (fields.size() != 6) {
            fail(ErrorKind::SchemaError, source, lineno,
                 "expected 6 fields, got " + std::to_string(fields.size()));
        }
        AnnotationRecord r;
        r.video_id = std::string(fields[0]);

        const auto outcome = parse_outcome(fields[1]);
        if (!outcome) fail(ErrorKind::BadOutcome, source, lineno, "unknown outcome '" + std::string(fields[1]) + "'");
        r.outcome = *outcome;

        r.annotator_id = std::string(fields[2]);
        if (r.annotator_id.empty()) fail(ErrorKind::SchemaError, source, lineno, "empty annotator_id");

        const auto condition = parse_condition(fields[3]);
        if (!condition) {
            fail(ErrorKind::SchemaError, source, lineno, "unknown condition '" + std::string(fields[3]) + "'");
        }
        r.condition = *condition;

        const auto label = parse_label(fields[4]);
        if (!label || fields[4] != label_key(*label)) {
            fail(ErrorKind::BadLabel, source, lineno, "unknown label '" + std::string(fields[4]) + "'");
        }
        r.label = *label;

        if (fields[5] == "true") {
            r.passed_attention = true;
        } else if (fields[5] == "false") {
            r.passed_attention = false;
        } else {
            fail(ErrorKind::SchemaError, source, lineno,
                 "passed_attention must be true or false, got '" + std::string(fields[5]) + "'");
        }

        if (r.condition == Condition::ContextOnly && !r.video_id.empty()) {
            fail(ErrorKind::SchemaError, source, lineno, "context_only rows must leave video_id empty");
        }
        if (r.condition != Condition::ContextOnly && r.video_id.empty()) {
            fail(ErrorKind::SchemaError, source, lineno, "video_id is required for this condition");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<AnnotationRecord> load_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open annotations file '" + path + "'");
    return parse_annotations(in, path);
}

void write_annotations(std::ostream& out, std::span<const AnnotationRecord> records) {
    out << kAnnotationHeader << '\n';
    for (const auto& r : records) {
        out << r.video_id << ',' << outcome_name(r.outcome) << ',' << r.annotator_id << ','
            << condition_key(r.condition) << ',' << label_key(r.label) << ','
            << (r.passed_attention ? "true" : "false") << '\n';
    }
}

std::vector<AnnotationRecord> filter_attention(std::span<const AnnotationRecord> records) {
    std::vector<AnnotationRecord> kept;
    kept.reserve(records.size());
    std::copy_if(records.begin(), records.end(), std::back_inserter(kept),
                 [](const AnnotationRecord& r) { return r.passed_attention; });
    return kept;
}

std::string context_only_id(GameOutcome o) {
    return "context_only:" + std::string(outcome_name(o));
}

VideoRatings aggregate_video(std::span<const AnnotationRecord> records) {
    if (records.empty()) throw Error(ErrorKind::EmptyGroup, "no ratings in group");
    const auto& first = records.front();
    VideoRatings v;
    v.video_id = first.condition == Condition::ContextOnly && first.video_id.empty()
                     ? context_only_id(first.outcome)
                     : first.video_id;
    v.outcome = first.outcome;
    v.condition = first.condition;
    for (const auto& r : records) {
        if (r.video_id != first.video_id || r.outcome != first.outcome ||
            r.condition != first.condition) {
            throw Error(ErrorKind::MixedGroup,
                        "group for '" + v.video_id + "' mixes video, outcome or condition");
        }
        ++v.counts[index_of(r.label)];
        ++v.n;
    }
    v.dist = from_counts(v.counts);
    return v;
}

std::vector<VideoRatings> aggregate_all(std::span<const AnnotationRecord> records) {
    // Key: (condition, video_id). Context-only groups are keyed by outcome.
    std::map<std::pair<Condition, std::string>, std::vector<AnnotationRecord>> groups;
    for (const auto& r : records) {
        const std::string key =
            r.condition == Condition::ContextOnly ? context_only_id(r.outcome) : r.video_id;
        groups[{r.condition, key}].push_back(r);
    }
    std::vector<VideoRatings> out;
    out.reserve(groups.size());
    for (const auto& [key, group] : groups) {
        try {
            out.push_back(aggregate_video(group));
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(condition_key(key.first)) + " '" + key.second +
                                      "': " + e.what());
        }
    }
    std::sort(out.begin(), out.end(), [](const VideoRatings& a, const VideoRatings& b) {
        return std::tie(a.condition, a.outcome, a.video_id) <
               std::tie(b.condition, b.outcome, b.video_id);
    });
    return out;
}

bool has_majority(std::uint64_t modal, std::uint64_t n) noexcept {
    return n > 0 && 2 * modal > n;
}

bool has_supermajority(std::uint64_t modal, std::uint64_t n) noexcept {
    return n > 0 && 3 * modal >= 2 * n;
}

std::vector<ConsensusRow> consensus_stats(std::span<const VideoRatings> videos) {
    if (videos.empty()) throw Error(ErrorKind::EmptyGroup, "no videos for consensus statistics");
    std::array<ConsensusRow, 4> rows{};
    for (GameOutcome o : kAllOutcomes) rows[static_cast<std::size_t>(o)].outcome = o;
    for (const auto& v : videos) {
        auto& row = rows[static_cast<std::size_t>(v.outcome)];
        const auto modal = v.modal_count();
        ++row.n_videos;
        if (has_majority(modal, v.n)) ++row.n_majority;
        if (has_supermajority(modal, v.n)) ++row.n_supermajority;
    }
    std::vector<ConsensusRow> out;
    for (auto& row : rows) {
        if (row.n_videos == 0) continue;
        const auto total = static_cast<double>(row.n_videos);
        row.pct_majority = static_cast<double>(row.n_majority) / total;
        row.pct_supermajority = static_cast<double>(row.n_supermajority) / total;
        out.push_back(row);
    }
    return out;
}

EmotionDistribution aggregate_outcome(std::span<const VideoRatings> videos) {
    check_group(videos);
    ProbVector mean{};
    for (const auto& v : videos) {
        for (std::size_t i = 0; i < kNumLabels; ++i) mean[i] += v.dist[i];
    }
    for (double& x : mean) x /= static_cast<double>(videos.size());
    return normalize(mean);
}

}  // namespace cuefuse
