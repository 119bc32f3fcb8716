#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cuefuse/context.hpp"
#include "cuefuse/digest.hpp"
#include "cuefuse/error.hpp"

namespace cuefuse {

namespace {

std::string sanitize_component(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
        out.push_back(ok ? c : '_');
    }
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::IoError, "cannot write '" + tmp + "'");
        out << contents;
    }
    std::filesystem::rename(tmp, path);
}

struct DrawOutcome {
    std::size_t slot = 0;
    std::size_t draw = 0;
    std::string raw;
};

}  // namespace

void LlmQueryConfig::validate() const {
    if (model_name.empty()) throw Error(ErrorKind::ConfigError, "model_name must not be empty");
    if (n_samples < 1) throw Error(ErrorKind::ConfigError, "n_samples must be >= 1");
    if (max_retries < 0) throw Error(ErrorKind::ConfigError, "max_retries must be >= 0");
    if (max_in_flight < 1) throw Error(ErrorKind::ConfigError, "max_in_flight must be >= 1");
    if (!(timeout_s > 0.0)) throw Error(ErrorKind::ConfigError, "timeout must be positive");
}

std::string prompt_hash(std::string_view prompt) { return sha256_hex(prompt).substr(0, 16); }

std::filesystem::path SampleCache::sample_path(std::string_view model, std::string_view hash,
                                               std::size_t index) const {
    return root_ / sanitize_component(model) / std::string(hash) / (std::to_string(index) + ".json");
}

std::optional<LlmSample> SampleCache::load(std::string_view model, std::string_view hash,
                                           std::size_t index) const {
    const auto path = sample_path(model, hash, index);
    if (!std::filesystem::exists(path)) return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        const auto j = nlohmann::json::parse(ss.str());
        LlmSample s;
        s.raw_text = j.at("raw_text").get<std::string>();
        s.parsed = j.at("parsed").get<EmotionDistribution>();
        s.model_name = j.at("model_name").get<std::string>();
        s.prompt_hash = j.at("prompt_hash").get<std::string>();
        s.timestamp = j.at("timestamp").get<std::string>();
        s.sample_index = j.at("sample_index").get<std::size_t>();
        s.draw_index = j.at("draw_index").get<std::size_t>();
        if (s.model_name != model || s.prompt_hash != hash || s.sample_index != index) {
            throw Error(ErrorKind::CacheCorrupt, "fields do not match the cache key");
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::CacheCorrupt, path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw Error(ErrorKind::CacheCorrupt, path.string() + ": " + e.what());
    }
}

void SampleCache::store(const LlmSample& s) {
    nlohmann::ordered_json j;
    j["raw_text"] = s.raw_text;
    j["parsed"] = nlohmann::json(s.parsed);
    j["model_name"] = s.model_name;
    j["prompt_hash"] = s.prompt_hash;
    j["timestamp"] = s.timestamp;
    j["sample_index"] = s.sample_index;
    j["draw_index"] = s.draw_index;
    std::lock_guard lock(write_mutex_);
    write_file(sample_path(s.model_name, s.prompt_hash, s.sample_index), j.dump(2) + "\n");
}

void SampleCache::store_rejected(std::string_view model, std::string_view hash,
                                 std::size_t draw_index, const std::string& raw_text,
                                 const std::string& reason) {
    nlohmann::ordered_json j;
    j["raw_text"] = raw_text;
    j["error"] = reason;
    j["model_name"] = std::string(model);
    j["prompt_hash"] = std::string(hash);
    j["timestamp"] = utc_timestamp();
    j["draw_index"] = draw_index;
    const auto path = root_ / sanitize_component(model) / std::string(hash) / "rejected" /
                      (std::to_string(draw_index) + ".json");
    std::lock_guard lock(write_mutex_);
    write_file(path, j.dump(2) + "\n");
}

QueryResult query_distribution(const std::string& prompt, const LlmQueryConfig& cfg,
                               ChatClient& client, SampleCache& cache) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.n_samples);
    const std::string hash = prompt_hash(prompt);

    QueryResult result;
    std::vector<std::optional<LlmSample>> slots(n);
    std::vector<std::pair<std::size_t, std::size_t>> pending;  // (slot, draw)
    for (std::size_t i = 0; i < n; ++i) {
        slots[i] = cache.load(cfg.model_name, hash, i);
        if (slots[i]) {
            ++result.cache_hits;
        } else {
            pending.emplace_back(i, i);
        }
    }

    std::atomic<std::size_t> calls{0};
    const auto draw = [&](std::size_t slot, std::size_t draw_index) {
        ChatRequest req{cfg.model_name, prompt, cfg.temperature, cfg.timeout_s, draw_index};
        for (int attempt = 0;; ++attempt) {
            ++calls;
            try {
                return DrawOutcome{slot, draw_index, client.complete(req)};
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::TransportError || attempt >= cfg.max_retries) throw;
            }
        }
    };

    std::size_t next_draw = n;
    const auto max_in_flight = static_cast<std::size_t>(cfg.max_in_flight);
    while (!pending.empty()) {
        std::vector<DrawOutcome> outcomes;
        outcomes.reserve(pending.size());
        for (std::size_t start = 0; start < pending.size(); start += max_in_flight) {
            const auto stop = std::min(pending.size(), start + max_in_flight);
            std::vector<std::future<DrawOutcome>> wave;
            for (std::size_t k = start; k < stop; ++k) {
                wave.push_back(std::async(std::launch::async, draw, pending[k].first, pending[k].second));
            }
            for (auto& f : wave) outcomes.push_back(f.get());
        }

        // Resolve in (slot, draw) order so resample numbering is deterministic.
        std::vector<std::pair<std::size_t, std::size_t>> retry;
        for (const auto& o : outcomes) {
            try {
                LlmSample s;
                s.parsed = parse_llm_distribution(o.raw);
                s.raw_text = o.raw;
                s.model_name = cfg.model_name;
                s.prompt_hash = hash;
                s.timestamp = utc_timestamp();
                s.sample_index = o.slot;
                s.draw_index = o.draw;
                cache.store(s);
                slots[o.slot] = std::move(s);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::IoError) throw;
                ++result.parse_failures;
                cache.store_rejected(cfg.model_name, hash, o.draw, o.raw, e.what());
                if (result.parse_failures * 5 > n) {
                    throw Error(ErrorKind::TooManyParseFailures,
                                std::to_string(result.parse_failures) + " of " + std::to_string(n) +
                                    " samples from '" + cfg.model_name +
                                    "' were unparseable (budget 20%); last error: " + e.what());
                }
                retry.emplace_back(o.slot, next_draw++);
            }
        }
        pending = std::move(retry);
    }
    result.client_calls = calls.load();

    ProbVector mean{};
    for (const auto& s : slots) {
        for (std::size_t i = 0; i < kNumLabels; ++i) mean[i] += s->parsed[i];
    }
    for (double& x : mean) x /= static_cast<double>(n);
    result.dist = normalize(mean);
    result.samples.reserve(n);
    for (auto& s : slots) result.samples.push_back(std::move(*s));
    return result;
}

QueryResult query_context_distribution(GameOutcome outcome, const LlmQueryConfig& cfg,
                                       ChatClient& client, SampleCache& cache) {
    return query_distribution(build_prompt(outcome), cfg, client, cache);
}

}  // namespace cuefuse
