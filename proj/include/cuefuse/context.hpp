#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuefuse/annotations.hpp"
#include "cuefuse/chat_client.hpp"
#include "cuefuse/distributions.hpp"
#include "cuefuse/fusion.hpp"

namespace cuefuse {

/// The pieces of a situational-emotion prompt, rendered in this order with the
/// optional face description between outcome and request.
struct PromptSpec {
    std::string game_description;
    std::string outcome_clause;
    std::optional<std::string> face_description;
    std::string request_clause;

    [[nodiscard]] std::string render() const;
};

/// Split-or-Steal rules paragraph.
[[nodiscard]] std::string_view game_description() noexcept;
/// e.g. `In this round, Player A chooses "steal" and Player B chooses "split."`
[[nodiscard]] std::string outcome_clause(GameOutcome outcome);
/// Distribution request including the mandated answer-format line.
[[nodiscard]] std::string_view request_clause() noexcept;
/// `"Joy: {prob 1}, Neutral: {prob 2}, ..., Sad: {prob 7}."`
[[nodiscard]] std::string_view answer_format_line() noexcept;

[[nodiscard]] PromptSpec context_prompt_spec(GameOutcome outcome);
[[nodiscard]] std::string build_prompt(GameOutcome outcome);
/// Context prompt plus a prose description of the face distribution.
[[nodiscard]] std::string build_integration_prompt(GameOutcome outcome,
                                                   const EmotionDistribution& face,
                                                   const BandTable& bands = BandTable::defaults());

/// Renders a distribution in the answer format with fixed decimals:
/// "Joy: 0.600000, Neutral: 0.100000, ..., Sad: 0.010000". For 1..9 decimals
/// the values are rounded by largest remainder so the printed numbers sum to 1.
[[nodiscard]] std::string format_answer(const EmotionDistribution& d, int decimals = 6);

/// Extracts "Label: number" pairs from free text. Labels match
/// case-insensitively in any order; every label must appear exactly once.
/// Sums within 0.02 of 1 are renormalized. Throws MissingLabel, DuplicateLabel,
/// MalformedNumber, SumOutOfTolerance.
[[nodiscard]] EmotionDistribution parse_llm_distribution(std::string_view raw);

struct LlmQueryConfig {
    std::string model_name;
    int n_samples = 20;
    std::optional<double> temperature;
    double timeout_s = 60.0;
    int max_retries = 3;
    int max_in_flight = 4;
    std::filesystem::path cache_dir = "cache";

    /// Throws ConfigError.
    void validate() const;
};

struct LlmSample {
    std::string raw_text;
    EmotionDistribution parsed;
    std::string model_name;
    std::string prompt_hash;
    std::string timestamp;
    std::size_t sample_index = 0;
    std::size_t draw_index = 0;
};

/// Short prompt digest used in cache paths (first 16 hex digits of SHA-256).
[[nodiscard]] std::string prompt_hash(std::string_view prompt);

/// On-disk sample store laid out as <root>/<model>/<prompt_hash>/<index>.json.
/// Unparseable draws go to <root>/<model>/<prompt_hash>/rejected/<draw>.json.
class SampleCache {
  public:
    explicit SampleCache(std::filesystem::path root) : root_(std::move(root)) {}

    [[nodiscard]] std::filesystem::path sample_path(std::string_view model,
                                                    std::string_view hash,
                                                    std::size_t index) const;
    /// Throws CacheCorrupt if the file exists but is unreadable or inconsistent.
    [[nodiscard]] std::optional<LlmSample> load(std::string_view model, std::string_view hash,
                                                std::size_t index) const;
    void store(const LlmSample& sample);
    void store_rejected(std::string_view model, std::string_view hash, std::size_t draw_index,
                        const std::string& raw_text, const std::string& reason);

  private:
    std::filesystem::path root_;
    std::mutex write_mutex_;
};

struct QueryResult {
    EmotionDistribution dist;
    std::vector<LlmSample> samples;  // ordered by sample_index
    std::size_t client_calls = 0;
    std::size_t cache_hits = 0;
    std::size_t parse_failures = 0;
};

/// Samples `prompt` cfg.n_samples times (cache first), averages the parsed
/// distributions and stores every new draw. Unparseable draws are re-sampled
/// while failures stay within 20% of n_samples. Throws TransportError (after
/// retries), TooManyParseFailures, CacheCorrupt.
[[nodiscard]] QueryResult query_distribution(const std::string& prompt, const LlmQueryConfig& cfg,
                                             ChatClient& client, SampleCache& cache);

[[nodiscard]] QueryResult query_context_distribution(GameOutcome outcome, const LlmQueryConfig& cfg,
                                                     ChatClient& client, SampleCache& cache);

}  // namespace cuefuse
