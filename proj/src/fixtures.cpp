#include "cuefuse/fixtures.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "cuefuse/context.hpp"
#include "cuefuse/facesources.hpp"
#include "cuefuse/error.hpp"
#include "text_util.hpp"

namespace cuefuse {

namespace fs = std::filesystem;

namespace {

// Latent face-channel profiles: players smile whatever happened.
constexpr std::array<ProbVector, 4> kFaceBase = {{
    {0.70, 0.15, 0.08, 0.02, 0.02, 0.01, 0.02},  // CC
    {0.60, 0.18, 0.10, 0.04, 0.03, 0.02, 0.03},  // DC
    {0.50, 0.12, 0.22, 0.05, 0.04, 0.02, 0.05},  // CD
    {0.48, 0.18, 0.14, 0.08, 0.04, 0.03, 0.05},  // DD
}};

// Situational profiles: what an observer expects from the outcome alone.
constexpr std::array<ProbVector, 4> kContextBase = {{
    {0.82, 0.08, 0.05, 0.01, 0.01, 0.01, 0.02},  // CC
    {0.50, 0.12, 0.12, 0.04, 0.06, 0.10, 0.06},  // DC
    {0.03, 0.05, 0.20, 0.29, 0.09, 0.02, 0.32},  // CD
    {0.04, 0.14, 0.12, 0.30, 0.12, 0.04, 0.24},  // DD
}};

// Bit-exact across standard libraries: only the mt19937_64 stream is used.
class FixtureRng {
  public:
    explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    EmotionLabel sample(const EmotionDistribution& d) {
        const double u = uniform();
        double acc = 0.0;
        for (EmotionLabel label : kAllLabels) {
            acc += d[label];
            if (u < acc) return label;
        }
        return argmax(d);
    }

    EmotionDistribution jitter(const ProbVector& base, double sigma) {
        ProbVector v{};
        for (std::size_t i = 0; i < kNumLabels; ++i) v[i] = base[i] * std::exp(sigma * normal());
        return normalize(v);
    }

  private:
    std::mt19937_64 engine_;
};

ProbVector product(const ProbVector& a, const ProbVector& b) {
    ProbVector out{};
    for (std::size_t i = 0; i < kNumLabels; ++i) out[i] = a[i] * b[i];
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    out << text;
}

std::string video_name(std::size_t index) {
    std::string digits = std::to_string(index + 1);
    return "v" + std::string(3 - std::min<std::size_t>(3, digits.size()), '0') + digits;
}

}  // namespace

FixtureFiles generate_fixture(const fs::path& dir, const FixtureOptions& options) {
    fs::create_directories(dir);
    FixtureRng rng(options.seed);

    std::vector<AnnotationRecord> records;
    std::string frames = std::string(kFrameHeader) + "\n";
    std::size_t video_index = 0;
    std::size_t bad_raters = 0;

    for (GameOutcome outcome : kAllOutcomes) {
        const auto o = static_cast<std::size_t>(outcome);
        for (int v = 0; v < options.videos_per_outcome; ++v, ++video_index) {
            const std::string video = video_name(video_index);
            const EmotionDistribution face = rng.jitter(kFaceBase[o], 0.35);
            const EmotionDistribution based = normalize(product(face.probs(), kContextBase[o]));

            for (int r = 0; r < options.raters; ++r) {
                const auto rater = static_cast<std::size_t>(video_index) * options.raters + r;
                records.push_back({video, outcome, "cf" + std::to_string(rater / 10), Condition::ContextFree,
                                   rng.sample(face), true});
                records.push_back({video, outcome, "cb" + std::to_string(rater / 10), Condition::ContextBased,
                                   rng.sample(based), true});
            }
            if (rng.uniform() < options.attention_failure_rate) {
                records.push_back({video, outcome, "bad" + std::to_string(bad_raters++), Condition::ContextBased,
                                   kAllLabels[static_cast<std::size_t>(rng.uniform() * kNumLabels)], false});
            }

            for (int f = 0; f < options.frames_per_video; ++f) {
                frames += video + "," + std::to_string(f);
                for (std::size_t i = 0; i < kNumLabels; ++i) {
                    const double e = std::clamp(6.0 * face[i] - 0.5 + 0.6 * rng.normal(), -4.0, 4.0);
                    frames += "," + detail::format_fixed(e, 4);
                }
                frames += "\n";
            }
        }
        const EmotionDistribution situational = normalize(kContextBase[o]);
        for (int r = 0; r < options.context_only_raters; ++r) {
            records.push_back({"", outcome, "co" + std::to_string(o * options.context_only_raters + r),
                               Condition::ContextOnly, rng.sample(situational), true});
        }
    }

    nlohmann::ordered_json integration_entries = nlohmann::ordered_json::array();
    nlohmann::ordered_json context_entries = nlohmann::ordered_json::array();
    for (GameOutcome outcome : kAllOutcomes) {
        const auto o = static_cast<std::size_t>(outcome);
        std::vector<std::string> context_texts, integration_texts;
        // One spare draw per outcome so a rejected sample can be re-drawn.
        for (int s = 0; s <= options.llm_samples; ++s) {
            context_texts.push_back(format_answer(rng.jitter(kContextBase[o], 0.2), 3));
            integration_texts.push_back(
                format_answer(rng.jitter(product(kFaceBase[o], kContextBase[o]), 0.2), 3));
        }
        if (outcome == GameOutcome::CD && context_texts.size() > 3) {
            context_texts[3] = "Player A most likely feels a mix of anger and sadness after being exploited.";
        }
        integration_entries.push_back({{"contains", {outcome_clause(outcome), "facial reaction shows"}},
                                       {"texts", integration_texts}});
        context_entries.push_back({{"contains", {outcome_clause(outcome)}}, {"texts", context_texts}});
    }
    nlohmann::ordered_json replay;
    replay["responses"] = integration_entries;
    for (auto& e : context_entries) replay["responses"].push_back(e);

    FixtureFiles files{dir / "annotations.csv", dir / "frames.csv", dir / "replay.json",
                       dir / "config.json", dir / "config_integration.json"};
    {
        std::ofstream out(files.annotations, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::IoError, "cannot write '" + files.annotations.string() + "'");
        write_annotations(out, records);
    }
    write_text(files.frames, frames);
    write_text(files.replay, replay.dump(2) + "\n");

    const auto config = [&](std::string_view output_dir, std::string_view mode) {
        nlohmann::ordered_json c;
        c["paths"] = {{"annotations", "annotations.csv"},
                      {"face_frames", "frames.csv"},
                      {"replay_fixture", "replay.json"},
                      {"cache_dir", "cache"},
                      {"output_dir", output_dir}};
        c["face_source_kind"] = "evidence";
        c["llm_profiles"] = nlohmann::ordered_json::array(
            {{{"name", "gpt-4"}, {"model", "gpt-4"}, {"n_samples", options.llm_samples}}});
        c["fusion"] = {{"eps_floor", 1e-6}, {"use_prior", false}};
        c["integration_mode"] = mode;
        c["kld_direction"] = "truth_pred";
        c["offline"] = true;
        c["seed"] = options.seed;
        return c.dump(2) + "\n";
    };
    write_text(files.config, config("out", "bci"));
    write_text(files.integration_config, config("out_integration", "llm_integration"));
    return files;
}

std::vector<AnnotationRecord> engineered_cc_records() {
    // (videos, joy, neutral, surprise) per block; 20 ratings per video.
    struct Block {
        int videos, joy, neutral, surprise;
    };
    constexpr std::array<Block, 4> blocks = {{
        {14, 16, 3, 1},  // supermajority
        {2, 17, 3, 0},   // supermajority
        {7, 11, 6, 3},   // majority only
        {2, 10, 5, 5},   // neither: 10/20 is not above one half
    }};
    std::vector<AnnotationRecord> out;
    int video = 0;
    int rater = 0;
    for (const auto& b : blocks) {
        for (int v = 0; v < b.videos; ++v, ++video) {
            const std::string id = "cc" + std::to_string(video + 1);
            const auto add = [&](EmotionLabel label, int n) {
                for (int k = 0; k < n; ++k) {
                    out.push_back({id, GameOutcome::CC, "r" + std::to_string(rater++), Condition::ContextFree,
                                   label, true});
                }
            };
            add(EmotionLabel::Joy, b.joy);
            add(EmotionLabel::Neutral, b.neutral);
            add(EmotionLabel::Surprise, b.surprise);
        }
    }
    return out;
}

}  // namespace cuefuse
