#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace cuefuse {

/// The seven emotion categories in canonical order. The order is used for
/// vector indexing, serialization and argmax tie-breaking.
enum class EmotionLabel : std::uint8_t { Joy, Neutral, Surprise, Anger, Disgust, Fear, Sad };

inline constexpr std::size_t kNumLabels = 7;

inline constexpr std::array<EmotionLabel, kNumLabels> kAllLabels = {
    EmotionLabel::Joy,     EmotionLabel::Neutral, EmotionLabel::Surprise, EmotionLabel::Anger,
    EmotionLabel::Disgust, EmotionLabel::Fear,    EmotionLabel::Sad,
};

/// Absolute tolerance on |sum - 1| for a valid distribution.
inline constexpr double kSumTolerance = 1e-9;
/// Inputs within this distance of sum 1 are renormalized instead of rejected.
inline constexpr double kRenormalizeTolerance = 0.02;

using ProbVector = std::array<double, kNumLabels>;
using CountVector = std::array<std::uint64_t, kNumLabels>;

[[nodiscard]] constexpr std::size_t index_of(EmotionLabel label) noexcept {
    return static_cast<std::size_t>(label);
}

/// Lowercase key used in files ("joy", "neutral", ...).
[[nodiscard]] std::string_view label_key(EmotionLabel label) noexcept;
/// Capitalized name used in prompts ("Joy", "Neutral", ...).
[[nodiscard]] std::string_view label_name(EmotionLabel label) noexcept;
/// Case-insensitive lookup of a canonical label name.
[[nodiscard]] std::optional<EmotionLabel> parse_label(std::string_view text) noexcept;

/// Probability vector over the canonical labels. Immutable once built; every
/// instance satisfies: components in [0, 1], |sum - 1| <= kSumTolerance.
class EmotionDistribution {
  public:
    /// Uniform distribution.
    EmotionDistribution() noexcept;

    /// Validates and accepts `probs`. Vectors whose sum is off by at most
    /// kRenormalizeTolerance are renormalized; anything else throws
    /// InvalidDistribution.
    static EmotionDistribution from_probabilities(const ProbVector& probs);

    [[nodiscard]] static EmotionDistribution uniform() noexcept { return {}; }
    [[nodiscard]] static EmotionDistribution point_mass(EmotionLabel label) noexcept;

    [[nodiscard]] const ProbVector& probs() const noexcept { return probs_; }
    [[nodiscard]] double operator[](EmotionLabel label) const noexcept {
        return probs_[index_of(label)];
    }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return probs_[i]; }

    friend bool operator==(const EmotionDistribution&, const EmotionDistribution&) = default;

  private:
    explicit EmotionDistribution(const ProbVector& probs) noexcept : probs_(probs) {}
    friend EmotionDistribution normalize(const ProbVector& raw);

    ProbVector probs_;
};

/// Soft label from per-label rating counts. Throws AllZeroCounts.
[[nodiscard]] EmotionDistribution from_counts(const CountVector& counts);
[[nodiscard]] EmotionDistribution from_counts(const std::map<EmotionLabel, std::uint64_t>& counts);

/// Divides by the sum. Components must be finite and >= 0; throws
/// DegenerateVector when the sum is below 1e-12.
[[nodiscard]] EmotionDistribution normalize(const ProbVector& raw);

/// Most probable label; ties go to the earliest canonical label.
[[nodiscard]] EmotionLabel argmax(const EmotionDistribution& d) noexcept;

/// Adds `eps` to every component and renormalizes. Requires eps > 0.
[[nodiscard]] EmotionDistribution smooth(const EmotionDistribution& d, double eps);

[[nodiscard]] double max_abs_diff(const EmotionDistribution& a, const EmotionDistribution& b) noexcept;

// JSON object form: {"joy": p, "neutral": p, ..., "sad": p}, all seven keys
// required, no others.
void to_json(nlohmann::json& j, const EmotionDistribution& d);
void from_json(const nlohmann::json& j, EmotionDistribution& d);

}  // namespace cuefuse
