#include "cuefuse/distributions.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "cuefuse/error.hpp"

namespace cuefuse {

namespace {

constexpr std::array<std::string_view, kNumLabels> kKeys = {
    "joy", "neutral", "surprise", "anger", "disgust", "fear", "sad"};
constexpr std::array<std::string_view, kNumLabels> kNames = {
    "Joy", "Neutral", "Surprise", "Anger", "Disgust", "Fear", "Sad"};

constexpr double kDegenerateSum = 1e-12;

bool iequals(std::string_view a, std::string_view b) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

double vector_sum(const ProbVector& v) noexcept {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

std::string_view label_key(EmotionLabel label) noexcept { return kKeys[index_of(label)]; }

std::string_view label_name(EmotionLabel label) noexcept { return kNames[index_of(label)]; }

std::optional<EmotionLabel> parse_label(std::string_view text) noexcept {
    for (EmotionLabel label : kAllLabels) {
        if (iequals(text, kKeys[index_of(label)])) return label;
    }
    return std::nullopt;
}

EmotionDistribution::EmotionDistribution() noexcept {
    probs_.fill(1.0 / static_cast<double>(kNumLabels));
}

EmotionDistribution EmotionDistribution::point_mass(EmotionLabel label) noexcept {
    ProbVector p{};
    p[index_of(label)] = 1.0;
    return EmotionDistribution(p);
}

EmotionDistribution EmotionDistribution::from_probabilities(const ProbVector& probs) {
    for (std::size_t i = 0; i < kNumLabels; ++i) {
        const double x = probs[i];
        if (!std::isfinite(x) || x < 0.0 || x > 1.0 + kRenormalizeTolerance) {
            throw Error(ErrorKind::InvalidDistribution,
                        "probability for '" + std::string(kKeys[i]) + "' out of range: " +
                            std::to_string(x));
        }
    }
    const double s = vector_sum(probs);
    if (std::abs(s - 1.0) <= kSumTolerance) {
        ProbVector clamped = probs;
        for (double& x : clamped) x = std::min(x, 1.0);
        return EmotionDistribution(clamped);
    }
    if (std::abs(s - 1.0) <= kRenormalizeTolerance) return normalize(probs);
    throw Error(ErrorKind::InvalidDistribution,
                "probabilities sum to " + std::to_string(s) + ", outside 1 +/- " +
                    std::to_string(kRenormalizeTolerance));
}

EmotionDistribution from_counts(const CountVector& counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw Error(ErrorKind::AllZeroCounts, "all label counts are zero");
    ProbVector p{};
    for (std::size_t i = 0; i < kNumLabels; ++i) {
        p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return normalize(p);
}

EmotionDistribution from_counts(const std::map<EmotionLabel, std::uint64_t>& counts) {
    CountVector v{};
    for (const auto& [label, n] : counts) v[index_of(label)] += n;
    return from_counts(v);
}

EmotionDistribution normalize(const ProbVector& raw) {
    for (double x : raw) {
        if (!std::isfinite(x) || x < 0.0) {
            throw Error(ErrorKind::DegenerateVector,
                        "cannot normalize vector with negative or non-finite component");
        }
    }
    const double s = vector_sum(raw);
    if (s < kDegenerateSum) {
        throw Error(ErrorKind::DegenerateVector, "cannot normalize vector with sum " +
                                                     std::to_string(s));
    }
    ProbVector p{};
    for (std::size_t i = 0; i < kNumLabels; ++i) p[i] = std::min(raw[i] / s, 1.0);
    return EmotionDistribution(p);
}

EmotionLabel argmax(const EmotionDistribution& d) noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kNumLabels; ++i) {
        if (d[i] > d[best]) best = i;
    }
    return kAllLabels[best];
}

EmotionDistribution smooth(const EmotionDistribution& d, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw Error(ErrorKind::InvalidDistribution, "smoothing eps must be positive");
    }
    ProbVector raw = d.probs();
    for (double& x : raw) x += eps;
    return normalize(raw);
}

double max_abs_diff(const EmotionDistribution& a, const EmotionDistribution& b) noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < kNumLabels; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void to_json(nlohmann::json& j, const EmotionDistribution& d) {
    j = nlohmann::json::object();
    for (EmotionLabel label : kAllLabels) j[std::string(label_key(label))] = d[label];
}

void from_json(const nlohmann::json& j, EmotionDistribution& d) {
    if (!j.is_object()) {
        throw Error(ErrorKind::ParseError, "distribution must be a JSON object");
    }
    ProbVector p{};
    for (EmotionLabel label : kAllLabels) {
        const std::string key(label_key(label));
        auto it = j.find(key);
        if (it == j.end()) throw Error(ErrorKind::ParseError, "distribution missing key '" + key + "'");
        if (!it->is_number()) {
            throw Error(ErrorKind::ParseError, "distribution key '" + key + "' is not a number");
        }
        p[index_of(label)] = it->get<double>();
    }
    if (j.size() != kNumLabels) {
        for (const auto& [key, value] : j.items()) {
            if (!parse_label(key) || key != label_key(*parse_label(key))) {
                throw Error(ErrorKind::ParseError, "distribution has unknown key '" + key + "'");
            }
        }
    }
    try {
        d = EmotionDistribution::from_probabilities(p);
    } catch (const Error& e) {
        throw Error(ErrorKind::InvariantViolation, e.what());
    }
}

}  // namespace cuefuse
