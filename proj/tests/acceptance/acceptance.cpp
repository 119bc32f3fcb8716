// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cuefuse/annotations.hpp"
#include "cuefuse/context.hpp"
#include "cuefuse/error.hpp"
#include "cuefuse/facesources.hpp"
#include "cuefuse/fixtures.hpp"
#include "cuefuse/fusion.hpp"
#include "cuefuse/metrics.hpp"

using namespace cuefuse;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

/// Collects failed sub-checks for one criterion.
struct Report {
    std::vector<std::string> failures;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

template <typename F>
bool throws_kind(ErrorKind kind, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(10);
    out << x;
    return out.str();
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

class Sampler {
  public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    EmotionDistribution next() {
        ProbVector v{};
        const bool sparse = coin_(rng_) < 0.3;
        double total = 0.0;
        for (double& x : v) {
            x = sparse && coin_(rng_) < 0.5 ? 0.0 : gamma_(rng_);
            total += x;
        }
        if (total == 0.0) v[label_(rng_)] = 1.0;
        return normalize(v);
    }
    ProbVector positive() {
        ProbVector v{};
        for (double& x : v) x = gamma_(rng_) + 1e-3;
        return v;
    }
    double uniform() { return coin_(rng_); }
    std::size_t label() { return label_(rng_); }
    std::mt19937_64& engine() { return rng_; }

  private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> coin_{0.0, 1.0};
    std::gamma_distribution<double> gamma_{0.8, 1.0};
    std::uniform_int_distribution<std::size_t> label_{0, kNumLabels - 1};
};

// Brute-force posterior: explicit smoothing, product and renormalization.
std::array<double, 7> brute_force_fuse(const EmotionDistribution& a, const EmotionDistribution& b) {
    constexpr double eps = 1e-6;
    std::array<double, 7> out{};
    double sa = 0, sb = 0;
    for (int i = 0; i < 7; ++i) {
        sa += a[i] + eps;
        sb += b[i] + eps;
    }
    double total = 0;
    for (int i = 0; i < 7; ++i) {
        out[i] = ((a[i] + eps) / sa) * ((b[i] + eps) / sb);
        total += out[i];
    }
    for (double& x : out) x /= total;
    return out;
}

double sum_of(const EmotionDistribution& d) {
    double s = 0;
    for (double p : d.probs()) s += p;
    return s;
}

Report fusion_properties() {
    Report r;
    Sampler gen(1001);
    const auto start = Clock::now();
    constexpr int kPairs = 10000;
    int bad_valid = 0, bad_comm = 0, bad_identity = 0, bad_scale = 0, bad_mono = 0;
    for (int i = 0; i < kPairs; ++i) {
        const auto a = gen.next();
        const auto b = gen.next();
        const auto ab = bci_fuse(a, b);
        bool valid = std::abs(sum_of(ab) - 1.0) <= 1e-9;
        for (double p : ab.probs()) valid = valid && p >= 0.0 && p <= 1.0;
        bad_valid += !valid;
        bad_comm += !(bci_fuse(b, a) == ab);
        bad_identity += max_abs_diff(bci_fuse(a, EmotionDistribution::uniform()), a) > 1e-4;

        const auto raw = gen.positive();
        ProbVector scaled = raw;
        const double k = 0.01 + 100.0 * gen.uniform();
        for (double& x : scaled) x *= k;
        bad_scale += max_abs_diff(bci_fuse(normalize(scaled), b), bci_fuse(normalize(raw), b)) > 1e-12;

        const auto j = gen.label();
        const double raised = b[j] + (1.0 - b[j]) * gen.uniform();
        const double rest = 1.0 - b[j];
        ProbVector v = b.probs();
        for (std::size_t m = 0; m < kNumLabels; ++m) {
            v[m] = m == j ? raised : (rest > 0 ? v[m] * (1.0 - raised) / rest : 0.0);
        }
        bad_mono += bci_fuse(a, normalize(v))[j] < ab[j] - 1e-12;
    }
    const double elapsed = seconds_since(start);
    r.check(bad_valid == 0, std::to_string(bad_valid) + " invalid outputs");
    r.check(bad_comm == 0, std::to_string(bad_comm) + " non-commutative pairs");
    r.check(bad_identity == 0, std::to_string(bad_identity) + " uniform-identity violations > 1e-4");
    r.check(bad_scale == 0, std::to_string(bad_scale) + " scale-invariance violations");
    r.check(bad_mono == 0, std::to_string(bad_mono) + " monotonicity violations");
    r.check(elapsed < 5.0, "runtime " + fmt(elapsed) + " s >= 5 s");
    r.detail = std::to_string(kPairs) + " pairs, " + fmt(elapsed) + " s";
    return r;
}

Report fusion_oracle() {
    Report r;
    const auto fused = bci_fuse(normalize({0.6, 0, 0.4, 0, 0, 0, 0}), normalize({0.3, 0, 0.7, 0, 0, 0, 0}));
    const std::array<double, 7> expected{0.3913, 0, 0.6087, 0, 0, 0, 0};
    for (std::size_t k = 0; k < kNumLabels; ++k) {
        r.check(std::abs(fused[k] - expected[k]) <= 1e-4, "hand example component " + std::to_string(k) + " = " + fmt(fused[k]));
    }
    Sampler gen(1002);
    double worst = 0.0;
    constexpr int kCases = 1000;
    for (int i = 0; i < kCases; ++i) {
        const auto a = gen.next();
        const auto b = gen.next();
        const auto ref = brute_force_fuse(a, b);
        const auto got = bci_fuse(a, b);
        for (std::size_t k = 0; k < kNumLabels; ++k) worst = std::max(worst, std::abs(got[k] - ref[k]));
    }
    r.check(worst <= 1e-9, "oracle deviation " + fmt(worst));
    r.detail = "joy " + fmt(fused[EmotionLabel::Joy]) + ", surprise " + fmt(fused[EmotionLabel::Surprise]) + "; " +
               std::to_string(kCases) + " oracle cases, max dev " + fmt(worst);
    return r;
}

Report metric_axioms() {
    Report r;
    Sampler gen(1003);
    int bad_self = 0, bad_neg = 0, bad_sym = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto a = gen.next();
        const auto b = gen.next();
        bad_self += std::abs(kld(a, a)) > 1e-9;
        bad_neg += !(kld(a, b) >= 0.0);
        bad_sym += rmse(a, b) != rmse(b, a);
    }
    r.check(bad_self == 0, std::to_string(bad_self) + " kld(d,d) != 0");
    r.check(bad_neg == 0, std::to_string(bad_neg) + " negative kld");
    r.check(bad_sym == 0, std::to_string(bad_sym) + " asymmetric rmse");

    const auto joy = EmotionDistribution::point_mass(EmotionLabel::Joy);
    const double ln2 = kld(joy, normalize({0.5, 0.5, 0, 0, 0, 0, 0}));
    r.check(std::abs(ln2 - std::log(2.0)) <= 1e-5, "kld point vs half = " + fmt(ln2));
    const double disjoint = rmse(joy, EmotionDistribution::point_mass(EmotionLabel::Neutral));
    r.check(std::abs(disjoint - 0.534522) <= 1e-6 && std::abs(disjoint - std::sqrt(2.0 / 7.0)) <= 1e-9,
            "rmse disjoint = " + fmt(disjoint));

    const std::vector<EmotionLabel> truth{EmotionLabel::Joy, EmotionLabel::Joy, EmotionLabel::Surprise};
    const std::vector<EmotionLabel> pred{EmotionLabel::Joy, EmotionLabel::Surprise, EmotionLabel::Surprise};
    const double f1 = weighted_f1(pred, truth);
    r.check(std::abs(f1 - 0.7556) <= 1e-4, "weighted_f1 worked example = " + fmt(f1) + ", expected 0.7556 +/- 1e-4");
    r.detail = "ln2 " + fmt(ln2) + ", rmse " + fmt(disjoint) + ", f1 " + fmt(f1);
    return r;
}

struct FacetCase {
    std::vector<ProbVector> frames;
    ProbVector expected;
    bool degenerate;
};

// Generated by tests/oracles/compute_oracles.py (exact rationals).
const std::vector<FacetCase> kFacetCases = {
    {{{2.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {1.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0}}, {0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0}, false},
    {{{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}}, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, false},
    {{{-1.0, -2.0, -3.0, -4.0, -0.5, -0.25, -1.0}}, {0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285}, true},
    {{{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}}, {0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285}, true},
    {{{4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0}}, {0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285}, false},
    {{{3.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0}, {-2.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0}, {1.0, 2.0, -4.0, 0.0, 0.0, 0.0, 0.0}}, {0.4444444444444444, 0.3333333333333333, 0.2222222222222222, 0.0, 0.0, 0.0, 0.0}, false},
    {{{0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.25}}, {0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.25}, false},
    {{{-4.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {4.0, -4.0, 0.0, 0.0, 0.0, 0.0, 0.0}}, {0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0}, false},
    {{{1.0, 2.0, 3.0, 4.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0}}, {0.0625, 0.125, 0.1875, 0.25, 0.0625, 0.125, 0.1875}, false},
    {{{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -2.0}}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0}, false},
    {{{1.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {0.0, 1.5, 0.0, 0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 1.5, 0.0, 0.0, 0.0, 0.0}}, {0.3333333333333333, 0.3333333333333333, 0.3333333333333333, 0.0, 0.0, 0.0, 0.0}, false},
    {{{-1.0, 0.5, -1.0, 0.5, -1.0, 0.5, -1.0}}, {0.0, 0.3333333333333333, 0.0, 0.3333333333333333, 0.0, 0.3333333333333333, 0.0}, false},
    {{{2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0}}, {0.6666666666666666, 0.3333333333333333, 0.0, 0.0, 0.0, 0.0, 0.0}, false},
    {{{0.1, 0.2, 0.3, 0.4, -0.1, -0.2, -0.3}, {0.4, 0.3, 0.2, 0.1, 0.0, 0.0, 0.0}}, {0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0}, false},
    {{{3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0}}, {0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5}, false},
    {{{-0.5, -0.5, 2.0, -0.5, -0.5, -0.5, -0.5}}, {0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0}, false},
    {{{0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 0.0, -1.0, 3.0, 0.0, 0.0}}, {0.0, 0.0, 0.0, 0.2, 0.8, 0.0, 0.0}, false},
    {{{4.0, -4.0, 4.0, -4.0, 4.0, -4.0, 4.0}, {-4.0, 4.0, -4.0, 4.0, -4.0, 4.0, -4.0}}, {0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285}, false},
    {{{0.75, 0.0, 0.0, 0.0, 0.0, 0.25, 0.0}, {0.25, 0.0, 0.0, 0.0, 0.0, 0.75, 0.0}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}}, {0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0}, false},
    {{{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0}, {1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0}, {1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0}}, {0.16666666666666666, 0.16666666666666666, 0.16666666666666666, 0.16666666666666666, 0.1111111111111111, 0.1111111111111111, 0.1111111111111111}, false},
    {{{-3.0, -3.0, -3.0, -3.0, -3.0, -3.0, -3.0}, {-1.0, 0.0, -1.0, 0.0, -1.0, 0.0, -1.0}}, {0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285, 0.14285714285714285}, true},
    {{{2.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0}, {0.5, 2.5, 0.0, 0.0, 0.0, 0.0, 0.0}, {-1.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0}}, {0.42857142857142855, 0.42857142857142855, 0.14285714285714285, 0.0, 0.0, 0.0, 0.0}, false},
};

Report facet_conversion() {
    Report r;
    int index = 0;
    for (const auto& c : kFacetCases) {
        const auto est = facet_to_distribution({"case", FrameKind::Evidence, c.frames});
        double dev = 0.0;
        for (std::size_t k = 0; k < kNumLabels; ++k) dev = std::max(dev, std::abs(est.dist[k] - c.expected[k]));
        r.check(dev <= 1e-12 && est.degenerate == c.degenerate, "case " + std::to_string(index) + " dev " + fmt(dev));
        ++index;
    }

    Sampler gen(1004);
    std::uniform_real_distribution<double> value(-4.0, 4.0);
    int bad_perm = 0, bad_scale = 0;
    for (int t = 0; t < 500; ++t) {
        std::vector<ProbVector> frames(1 + t % 30);
        for (auto& f : frames) {
            for (double& x : f) x = value(gen.engine());
        }
        frames[0][t % 7] = 0.5;
        const auto base = facet_to_distribution({"p", FrameKind::Evidence, frames}).dist;
        std::shuffle(frames.begin(), frames.end(), gen.engine());
        bad_perm += !(facet_to_distribution({"p", FrameKind::Evidence, frames}).dist == base);
        const double k = 0.05 + 0.95 * gen.uniform();  // stays inside the evidence range
        for (auto& f : frames) {
            for (double& x : f) x *= k;
        }
        bad_scale += max_abs_diff(facet_to_distribution({"p", FrameKind::Evidence, frames}).dist, base) > 1e-12;
    }
    r.check(bad_perm == 0, std::to_string(bad_perm) + " permutation violations");
    r.check(bad_scale == 0, std::to_string(bad_scale) + " scaling violations");
    r.detail = std::to_string(kFacetCases.size()) + " crafted series, 500 property trials";
    return r;
}

Report consensus() {
    Report r;
    r.check(has_majority(11, 20) && !has_supermajority(11, 20), "11/20 should be majority only");
    r.check(has_majority(14, 20) && has_supermajority(14, 20), "14/20 should be both");
    r.check(!has_majority(10, 20) && !has_supermajority(10, 20), "10/20 should be neither");
    const auto rows = consensus_stats(aggregate_all(engineered_cc_records()));
    const bool row_ok = rows.size() == 1 && rows[0].outcome == GameOutcome::CC && rows[0].pct_majority == 0.92 &&
                        rows[0].pct_supermajority == 0.64;
    r.check(row_ok, "engineered CC fixture row mismatch");
    if (!rows.empty()) r.detail = "CC " + fmt(rows[0].pct_majority) + " " + fmt(rows[0].pct_supermajority);
    return r;
}

Report prompt_roundtrip() {
    Report r;
    Sampler gen(1005);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto d = gen.next();
        worst = std::max(worst, max_abs_diff(parse_llm_distribution(format_answer(d)), d));
    }
    r.check(worst <= 1e-6, "round-trip deviation " + fmt(worst));
    r.check(build_prompt(GameOutcome::DC).find(R"(Player A chooses "steal" and Player B chooses "split.")") !=
                std::string::npos,
            "DC prompt lacks the outcome clause");
    const std::string good = "Joy: 0.6, Neutral: 0.1, Surprise: 0.2, Anger: 0.05, Disgust: 0.02, Fear: 0.02, Sad: 0.01";
    r.check(throws_kind(ErrorKind::MissingLabel,
                        [] { (void)parse_llm_distribution("Joy: 0.6, Neutral: 0.1, Surprise: 0.2, Anger: 0.05, Disgust: 0.04, Sad: 0.01"); }),
            "missing label accepted");
    r.check(throws_kind(ErrorKind::DuplicateLabel, [&] { (void)parse_llm_distribution(good + ", Sad: 0.0"); }),
            "duplicate label accepted");
    r.check(throws_kind(ErrorKind::SumOutOfTolerance,
                        [] { (void)parse_llm_distribution("Joy: 0.63, Neutral: 0.1, Surprise: 0.2, Anger: 0.05, Disgust: 0.02, Fear: 0.02, Sad: 0.01"); }),
            "sum 1.03 accepted");
    r.check(throws_kind(ErrorKind::SumOutOfTolerance,
                        [] { (void)parse_llm_distribution("Joy: 0.57, Neutral: 0.1, Surprise: 0.2, Anger: 0.05, Disgust: 0.02, Fear: 0.02, Sad: 0.01"); }),
            "sum 0.97 accepted");
    r.detail = "1000 round trips, max dev " + fmt(worst);
    return r;
}

/// Replay client that counts the requests it serves.
class CountingReplay : public ChatClient {
  public:
    explicit CountingReplay(std::vector<std::string> texts)
        : inner_({ReplayChatClient::Entry{std::nullopt, {"Split or Steal"}, std::move(texts)}}) {}
    std::string complete(const ChatRequest& req) override {
        ++calls;
        return inner_.complete(req);
    }
    std::atomic<int> calls{0};

  private:
    ReplayChatClient inner_;
};

Report context_sampling(const fs::path& scratch) {
    Report r;
    Sampler gen(1006);
    std::vector<std::string> texts;
    ProbVector mean{};
    for (int i = 0; i < 20; ++i) {
        texts.push_back(format_answer(gen.next()));
        const auto d = parse_llm_distribution(texts.back());
        for (std::size_t k = 0; k < kNumLabels; ++k) mean[k] += d[k];
    }
    for (double& x : mean) x /= 20.0;

    LlmQueryConfig cfg;
    cfg.model_name = "replay";
    cfg.cache_dir = scratch / "cache";
    SampleCache cache(cfg.cache_dir);
    CountingReplay cold(texts);
    const auto first = query_context_distribution(GameOutcome::CD, cfg, cold, cache);
    double dev = 0.0;
    for (std::size_t k = 0; k < kNumLabels; ++k) dev = std::max(dev, std::abs(first.dist[k] - mean[k]));
    r.check(dev <= 1e-12, "mean deviation " + fmt(dev));
    r.check(cold.calls == 20, "cold run made " + std::to_string(cold.calls) + " calls");

    CountingReplay warm(texts);
    const auto second = query_context_distribution(GameOutcome::CD, cfg, warm, cache);
    r.check(warm.calls == 0, "warm run made " + std::to_string(warm.calls) + " calls");
    r.check(second.dist == first.dist, "warm run changed the result");

    auto failing = texts;
    for (int i : {1, 4, 9, 12, 17}) failing[i] = "I would rather not say.";
    cfg.cache_dir = scratch / "cache_failing";
    SampleCache cache2(cfg.cache_dir);
    CountingReplay bad(failing);
    r.check(throws_kind(ErrorKind::TooManyParseFailures,
                        [&] { (void)query_context_distribution(GameOutcome::CD, cfg, bad, cache2); }),
            "25% unparseable samples did not raise TooManyParseFailures");
    r.detail = "mean dev " + fmt(dev) + ", warm calls " + std::to_string(warm.calls);
    return r;
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        out[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
    }
    return out;
}

Report end_to_end(const fs::path& scratch) {
    Report r;
    std::vector<std::map<std::string, std::string>> trees;
    double slowest = 0.0;
    for (const char* name : {"run_a", "run_b"}) {
        const auto dir = scratch / name;
        const std::string cli = CUEFUSE_CLI;
        if (run(cli + " generate-fixture --out " + dir.string() + " >/dev/null") != 0) {
            r.check(false, "fixture generation failed");
            return r;
        }
        const auto start = Clock::now();
        const int code = run(cli + " all --offline --config " + (dir / "config.json").string() + " 2>/dev/null");
        const double elapsed = seconds_since(start);
        slowest = std::max(slowest, elapsed);
        r.check(code == 0, std::string(name) + " exited with " + std::to_string(code));
        r.check(elapsed < 60.0, std::string(name) + " took " + fmt(elapsed) + " s");
        if (code != 0) return r;
        trees.push_back(read_tree(dir / "out"));
    }
    r.check(trees[0] == trees[1], "outputs differ between runs");

    std::ifstream in(scratch / "run_a" / "out" / "eval" / "improvement.csv");
    std::string line;
    std::getline(in, line);
    int disadvantaged_rows = 0;
    std::string deltas;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string method, outcome, n, delta;
        std::getline(fields, method, ',');
        std::getline(fields, outcome, ',');
        std::getline(fields, n, ',');
        std::getline(fields, delta, ',');
        if (outcome != "CD" && outcome != "DD") continue;
        ++disadvantaged_rows;
        const double d = std::stod(delta);
        deltas += " " + method + "/" + outcome + "=" + fmt(d);
        r.check(d > 0.0, method + " " + outcome + " delta_kld " + fmt(d) + " <= 0");
    }
    r.check(disadvantaged_rows > 0, "no CD/DD rows in improvement.csv");
    r.detail = std::to_string(trees[0].size()) + " files identical, slowest run " + fmt(slowest) + " s;" + deltas;
    return r;
}

}  // namespace

int main() {
    const fs::path scratch = fs::temp_directory_path() / ("cuefuse_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    const std::vector<std::pair<std::string, std::function<Report()>>> criteria = {
        {"1 fusion properties", fusion_properties},
        {"2 fusion oracle", fusion_oracle},
        {"3 metric axioms", metric_axioms},
        {"4 FACET conversion", facet_conversion},
        {"5 consensus statistics", consensus},
        {"6 prompt/parse round trip", prompt_roundtrip},
        {"7 context sampling", [&] { return context_sampling(scratch); }},
        {"8 end-to-end determinism", [&] { return end_to_end(scratch); }},
    };

    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Report r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.failures.push_back(std::string("exception: ") + e.what());
        }
        const bool ok = r.failures.empty();
        failed += !ok;
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << r.detail;
        for (const auto& f : r.failures) std::cout << " | " << f;
        std::cout << std::endl;
    }
    fs::remove_all(scratch);
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
