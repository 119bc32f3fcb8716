#include "cuefuse/context.hpp"

#include <cctype>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "cuefuse/error.hpp"
#include "text_util.hpp"

namespace cuefuse {

namespace {

constexpr std::string_view kGameDescription =
    "Imagine a scenario where two people, Player A and Player B, play a competitive game "
    "called \"Split or Steal.\" Players play multiple rounds with each other. In each round of "
    "the game, players each decide whether to split or steal from a pot of $10. If both choose "
    "\"split\", they each get $5. If both choose \"steal\", they each get $1. If one chooses "
    "\"split\" but the other chooses \"steal\", the stealer gets all $10. They make their "
    "choices secretly and their choices are revealed at the end of the round. Scenarios "
    "describe one round of the game. Imagine the feelings of Player A.";

constexpr std::string_view kAnswerFormat =
    "\"Joy: {prob 1}, Neutral: {prob 2}, Surprise: {prob 3}, Anger: {prob 4}, "
    "Disgust: {prob 5}, Fear: {prob 6}, Sad: {prob 7}.\"";

constexpr std::string_view kRequestPrefix =
    "How does Player A experience emotions? Provide a probability distribution based on the "
    "following emotion list: Joy, Neutral, Surprise, Anger, Disgust, Fear, Sad. Ensure that the "
    "sum of probabilities is 1.\n"
    "Provide answer in the following format:\n";

// Characters allowed between a label and its colon or value ("**Joy**: 0.6").
bool is_decoration(char c) noexcept {
    return c == ' ' || c == '\t' || c == '*' || c == '"' || c == '\'' || c == '_';
}

bool is_number_char(char c) noexcept {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' ||
           c == 'e' || c == 'E' || c == '%';
}

}  // namespace

std::string PromptSpec::render() const {
    std::string out;
    out += game_description;
    out += '\n';
    out += outcome_clause;
    out += '\n';
    if (face_description) {
        out += *face_description;
        out += '\n';
    }
    out += request_clause;
    return out;
}

std::string_view game_description() noexcept { return kGameDescription; }

std::string_view request_clause() noexcept {
    static const std::string clause = std::string(kRequestPrefix) + std::string(kAnswerFormat);
    return clause;
}

std::string_view answer_format_line() noexcept { return kAnswerFormat; }

std::string outcome_clause(GameOutcome outcome) {
    const auto choice = [](bool cooperates) { return cooperates ? "split" : "steal"; };
    const bool a_splits = outcome == GameOutcome::CC || outcome == GameOutcome::CD;
    const bool b_splits = outcome == GameOutcome::CC || outcome == GameOutcome::DC;
    return std::string("In this round, Player A chooses \"") + choice(a_splits) +
           "\" and Player B chooses \"" + choice(b_splits) + ".\"";
}

PromptSpec context_prompt_spec(GameOutcome outcome) {
    return PromptSpec{std::string(kGameDescription), outcome_clause(outcome), std::nullopt,
                      std::string(request_clause())};
}

std::string build_prompt(GameOutcome outcome) { return context_prompt_spec(outcome).render(); }

std::string build_integration_prompt(GameOutcome outcome, const EmotionDistribution& face,
                                     const BandTable& bands) {
    PromptSpec spec = context_prompt_spec(outcome);
    spec.face_description =
        "Player A's facial reaction shows " + describe_distribution_nl(face, bands) + ".";
    return spec.render();
}

std::string format_answer(const EmotionDistribution& d, int decimals) {
    std::array<std::string, kNumLabels> text;
    if (decimals >= 1 && decimals <= 9) {
        // Largest-remainder rounding in units of 10^-decimals, so the printed
        // values sum to exactly 1.
        std::int64_t scale = 1;
        for (int i = 0; i < decimals; ++i) scale *= 10;
        std::array<std::int64_t, kNumLabels> units{};
        std::array<double, kNumLabels> remainder{};
        std::int64_t total = 0;
        for (std::size_t i = 0; i < kNumLabels; ++i) {
            const double scaled = d[i] * static_cast<double>(scale);
            units[i] = static_cast<std::int64_t>(std::floor(scaled));
            remainder[i] = scaled - static_cast<double>(units[i]);
            total += units[i];
        }
        std::array<std::size_t, kNumLabels> order{};
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
        for (std::size_t k = 0; total < scale; k = (k + 1) % kNumLabels, ++total) ++units[order[k]];
        for (std::size_t k = kNumLabels; total > scale; --total) {
            k = k == 0 ? kNumLabels - 1 : k - 1;
            while (units[order[k]] == 0) k = k == 0 ? kNumLabels - 1 : k - 1;
            --units[order[k]];
        }
        for (std::size_t i = 0; i < kNumLabels; ++i) {
            std::string frac = std::to_string(units[i] % scale);
            frac.insert(0, static_cast<std::size_t>(decimals) - frac.size(), '0');
            text[i] = std::to_string(units[i] / scale) + "." + frac;
        }
    } else {
        for (std::size_t i = 0; i < kNumLabels; ++i) text[i] = detail::format_fixed(d[i], decimals);
    }

    std::string out;
    for (std::size_t i = 0; i < kNumLabels; ++i) {
        if (!out.empty()) out += ", ";
        out += label_name(kAllLabels[i]);
        out += ": ";
        out += text[i];
    }
    return out;
}

EmotionDistribution parse_llm_distribution(std::string_view raw) {
    ProbVector values{};
    std::array<bool, kNumLabels> seen{};

    std::size_t pos = 0;
    while (pos < raw.size()) {
        const bool word_start = std::isalpha(static_cast<unsigned char>(raw[pos])) &&
                                (pos == 0 || !std::isalnum(static_cast<unsigned char>(raw[pos - 1])));
        if (!word_start) {
            ++pos;
            continue;
        }
        std::size_t end = pos;
        while (end < raw.size() && std::isalpha(static_cast<unsigned char>(raw[end]))) ++end;
        const auto label = parse_label(raw.substr(pos, end - pos));
        std::size_t q = end;
        while (q < raw.size() && is_decoration(raw[q])) ++q;
        if (!label || q >= raw.size() || raw[q] != ':') {
            pos = end;
            continue;
        }
        ++q;
        while (q < raw.size() && is_decoration(raw[q])) ++q;
        std::size_t num_end = q;
        while (num_end < raw.size() && is_number_char(raw[num_end])) ++num_end;

        std::string_view token = raw.substr(q, num_end - q);
        while (!token.empty() && token.back() == '.') token.remove_suffix(1);
        bool percent = false;
        if (!token.empty() && token.back() == '%') {
            percent = true;
            token.remove_suffix(1);
        }
        auto value = detail::parse_double(token);
        const std::string name(label_name(*label));
        if (!value || !std::isfinite(*value) || *value < 0.0) {
            throw Error(ErrorKind::MalformedNumber,
                        "value for " + name + " is not a probability: '" + std::string(token) + "'");
        }
        if (percent) *value /= 100.0;

        const auto i = index_of(*label);
        if (seen[i]) throw Error(ErrorKind::DuplicateLabel, name + " appears more than once");
        seen[i] = true;
        values[i] = *value;
        pos = num_end;
    }

    for (EmotionLabel label : kAllLabels) {
        if (!seen[index_of(label)]) {
            throw Error(ErrorKind::MissingLabel, "response has no value for " + std::string(label_name(label)));
        }
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    if (std::abs(sum - 1.0) > kRenormalizeTolerance) {
        throw Error(ErrorKind::SumOutOfTolerance,
                    "probabilities sum to " + detail::format_double(sum) + ", outside 1 +/- 0.02");
    }
    return normalize(values);
}

}  // namespace cuefuse
