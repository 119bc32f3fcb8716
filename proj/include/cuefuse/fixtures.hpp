#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cuefuse/annotations.hpp"

namespace cuefuse {

/// Synthetic Split-or-Steal corpus: outcome groups, raters, frames. Ratings are
/// drawn from a cue-integration generative model: context-free ratings follow
/// a per-video face distribution, context-only ratings follow a per-outcome
/// situational distribution, and context-based ratings follow their normalized
/// product. Faces smile across all outcomes, so knowing the outcome corrects
/// the most on CD and DD.
struct FixtureOptions {
    std::uint64_t seed = 7;
    int videos_per_outcome = 25;
    int raters = 20;
    int context_only_raters = 20;
    int frames_per_video = 30;
    int llm_samples = 20;
    /// Fraction of videos that receive one extra rating failing the attention check.
    double attention_failure_rate = 0.1;
};

struct FixtureFiles {
    std::filesystem::path annotations;
    std::filesystem::path frames;
    std::filesystem::path replay;
    std::filesystem::path config;              // BCI mode, offline
    std::filesystem::path integration_config;  // LLM-integration mode, offline
};

/// Writes annotations.csv, frames.csv (evidence), replay.json and two configs
/// into `dir`. Output depends only on the options.
FixtureFiles generate_fixture(const std::filesystem::path& dir, const FixtureOptions& options = {});

/// Context-free CC ratings for 25 videos x 20 raters whose consensus fractions
/// are 23/25 majority and 16/25 supermajority, and whose mean Joy mass is 0.71.
[[nodiscard]] std::vector<AnnotationRecord> engineered_cc_records();

}  // namespace cuefuse
