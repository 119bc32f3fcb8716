#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cuefuse/distributions.hpp"

namespace cuefuse {

struct FusionConfig {
    /// Added to both cues before the product so that hard zeros cannot
    /// annihilate a label.
    double eps_floor = 1e-6;
    /// P(e). Only consulted when use_prior is set.
    std::optional<EmotionDistribution> prior;
    bool use_prior = false;

    /// Throws InvalidFusionConfig.
    void validate() const;
};

/// Bayesian cue integration: P(e|c,f) proportional to P(e|f) P(e|c) / P(e).
/// Without a prior the normalized product of the two smoothed cues is returned.
[[nodiscard]] EmotionDistribution bci_fuse(const EmotionDistribution& face,
                                           const EmotionDistribution& context,
                                           const FusionConfig& cfg = {});

/// Half-open probability interval [lower, upper) with the phrase used to
/// describe it. The last band of a table is closed at 1.
struct ProbabilityBand {
    double lower = 0.0;
    double upper = 0.0;
    std::string phrase;
};

struct BandTable {
    std::vector<ProbabilityBand> bands;
    /// Labels with probability below this are left out of the description.
    double report_floor = 0.1;

    /// very low [0, 0.1), low [0.1, 0.3), moderate [0.3, 0.5), high [0.5, 1].
    [[nodiscard]] static BandTable defaults();

    /// Throws InvalidBandTable on gaps, overlaps, or bounds outside [0, 1].
    void validate() const;
    [[nodiscard]] const ProbabilityBand& band_for(double p) const;
};

/// Noun used for a label in prose ("happiness" for Joy).
[[nodiscard]] std::string_view emotion_noun(EmotionLabel label) noexcept;

/// Prose rendering of a face distribution, e.g.
/// "a high level of happiness, a low level of neutrality and a moderate level of surprise".
/// Labels are listed in canonical order.
[[nodiscard]] std::string describe_distribution_nl(const EmotionDistribution& face,
                                                   const BandTable& bands = BandTable::defaults());

}  // namespace cuefuse
