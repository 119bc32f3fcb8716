#include "cuefuse/fusion.hpp"

#include <cmath>

#include "cuefuse/error.hpp"

namespace cuefuse {

namespace {

constexpr std::array<std::string_view, kNumLabels> kNouns = {
    "happiness", "neutrality", "surprise", "anger", "disgust", "fear", "sadness"};

}  // namespace

void FusionConfig::validate() const {
    if (!(eps_floor > 0.0) || !std::isfinite(eps_floor)) {
        throw Error(ErrorKind::InvalidFusionConfig, "eps_floor must be positive");
    }
    if (use_prior) {
        if (!prior) throw Error(ErrorKind::InvalidFusionConfig, "use_prior set but no prior given");
        for (double p : prior->probs()) {
            if (!(p > 0.0)) {
                throw Error(ErrorKind::InvalidFusionConfig,
                            "prior components must all be strictly positive");
            }
        }
    }
}

EmotionDistribution bci_fuse(const EmotionDistribution& face, const EmotionDistribution& context,
                             const FusionConfig& cfg) {
    cfg.validate();
    const EmotionDistribution f = smooth(face, cfg.eps_floor);
    const EmotionDistribution c = smooth(context, cfg.eps_floor);

    ProbVector posterior{};
    double total = 0.0;
    for (std::size_t i = 0; i < kNumLabels; ++i) {
        posterior[i] = f[i] * c[i];
        if (cfg.use_prior) posterior[i] /= (*cfg.prior)[i];
        total += posterior[i];
    }
    if (!(total >= 1e-12)) {
        throw Error(ErrorKind::DegenerateFusion, "fused product sums below 1e-12");
    }
    return normalize(posterior);
}

BandTable BandTable::defaults() {
    return BandTable{{{0.0, 0.1, "very low"}, {0.1, 0.3, "low"}, {0.3, 0.5, "moderate"},
                      {0.5, 1.0, "high"}},
                     0.1};
}

void BandTable::validate() const {
    if (bands.empty()) throw Error(ErrorKind::InvalidBandTable, "band table is empty");
    if (bands.front().lower != 0.0) {
        throw Error(ErrorKind::InvalidBandTable, "first band must start at 0");
    }
    if (bands.back().upper != 1.0) {
        throw Error(ErrorKind::InvalidBandTable, "last band must end at 1");
    }
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const auto& b = bands[i];
        if (!(b.lower < b.upper)) {
            throw Error(ErrorKind::InvalidBandTable,
                        "band '" + b.phrase + "' has lower >= upper");
        }
        if (b.phrase.empty()) throw Error(ErrorKind::InvalidBandTable, "band phrase is empty");
        if (i > 0 && bands[i - 1].upper != b.lower) {
            throw Error(ErrorKind::InvalidBandTable,
                        "bands '" + bands[i - 1].phrase + "' and '" + b.phrase +
                            "' leave a gap or overlap");
        }
    }
    if (!(report_floor >= 0.0 && report_floor <= 1.0)) {
        throw Error(ErrorKind::InvalidBandTable, "report_floor must lie in [0, 1]");
    }
}

const ProbabilityBand& BandTable::band_for(double p) const {
    for (const auto& b : bands) {
        if (p >= b.lower && p < b.upper) return b;
    }
    return bands.back();
}

std::string_view emotion_noun(EmotionLabel label) noexcept { return kNouns[index_of(label)]; }

std::string describe_distribution_nl(const EmotionDistribution& face, const BandTable& bands) {
    bands.validate();
    std::vector<std::string> clauses;
    for (EmotionLabel label : kAllLabels) {
        const double p = face[label];
        if (p < bands.report_floor) continue;
        const std::string& phrase = bands.band_for(p).phrase;
        const bool vowel = std::string_view("aeiouAEIOU").find(phrase.front()) != std::string_view::npos;
        clauses.push_back((vowel ? "an " : "a ") + phrase + " level of " +
                          std::string(emotion_noun(label)));
    }
    if (clauses.empty()) return "no clearly identifiable emotion";

    std::string out = clauses.front();
    for (std::size_t i = 1; i < clauses.size(); ++i) {
        out += (i + 1 == clauses.size()) ? " and " : ", ";
        out += clauses[i];
    }
    return out;
}

}  // namespace cuefuse
