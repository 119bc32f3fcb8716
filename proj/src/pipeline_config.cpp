#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "cuefuse/digest.hpp"
#include "cuefuse/error.hpp"
#include "cuefuse/pipeline.hpp"

namespace cuefuse {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) {
    throw Error(ErrorKind::ConfigError, "config: " + what);
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!j.is_object()) config_error(where + " must be an object");
    const std::set<std::string_view> ok(allowed);
    for (const auto& [key, value] : j.items()) {
        if (!ok.contains(key)) config_error("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        config_error("'" + std::string(key) + "' in " + where + " has the wrong type");
    }
}

LlmProfile parse_profile(const json& j, std::size_t i) {
    const std::string where = "llm_profiles[" + std::to_string(i) + "]";
    check_keys(j,
               {"name", "model", "n_samples", "temperature", "timeout_s", "max_retries",
                "max_in_flight", "endpoint_url", "auth_header", "auth_prefix"},
               where);
    LlmProfile p;
    p.query.model_name = get_or<std::string>(j, "model", "", where);
    if (p.query.model_name.empty()) config_error(where + ".model is required");
    p.name = get_or<std::string>(j, "name", p.query.model_name, where);
    p.query.n_samples = get_or<int>(j, "n_samples", 20, where);
    if (j.contains("temperature") && !j.at("temperature").is_null()) {
        p.query.temperature = get_or<double>(j, "temperature", 0.0, where);
    }
    p.query.timeout_s = get_or<double>(j, "timeout_s", 60.0, where);
    p.query.max_retries = get_or<int>(j, "max_retries", 3, where);
    p.query.max_in_flight = get_or<int>(j, "max_in_flight", 4, where);
    p.provider.endpoint_url = get_or<std::string>(j, "endpoint_url", p.provider.endpoint_url, where);
    p.provider.auth_header = get_or<std::string>(j, "auth_header", p.provider.auth_header, where);
    p.provider.auth_prefix = get_or<std::string>(j, "auth_prefix", p.provider.auth_prefix, where);
    try {
        p.query.validate();
    } catch (const Error& e) {
        config_error(where + ": " + e.what());
    }
    return p;
}

FusionConfig parse_fusion(const json& j) {
    check_keys(j, {"eps_floor", "use_prior", "prior"}, "fusion");
    FusionConfig f;
    f.eps_floor = get_or<double>(j, "eps_floor", 1e-6, "fusion");
    f.use_prior = get_or<bool>(j, "use_prior", false, "fusion");
    if (j.contains("prior") && !j.at("prior").is_null()) {
        try {
            f.prior = j.at("prior").get<EmotionDistribution>();
        } catch (const Error& e) {
            config_error(std::string("fusion.prior: ") + e.what());
        }
    }
    try {
        f.validate();
    } catch (const Error& e) {
        config_error(std::string("fusion: ") + e.what());
    }
    return f;
}

BandTable parse_bands(const json& j) {
    check_keys(j, {"report_floor", "bands"}, "bands");
    BandTable t = BandTable::defaults();
    t.report_floor = get_or<double>(j, "report_floor", t.report_floor, "bands");
    if (j.contains("bands")) {
        t.bands.clear();
        const auto& arr = j.at("bands");
        if (!arr.is_array()) config_error("bands.bands must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string where = "bands.bands[" + std::to_string(i) + "]";
            check_keys(arr[i], {"lower", "upper", "phrase"}, where);
            t.bands.push_back({get_or<double>(arr[i], "lower", -1.0, where),
                               get_or<double>(arr[i], "upper", -1.0, where),
                               get_or<std::string>(arr[i], "phrase", "", where)});
        }
    }
    try {
        t.validate();
    } catch (const Error& e) {
        config_error(std::string("bands: ") + e.what());
    }
    return t;
}

}  // namespace

std::filesystem::path RunConfig::resolve(const std::string& configured) const {
    if (configured.empty()) return {};
    const std::filesystem::path p(configured);
    return p.is_absolute() ? p : base_dir / p;
}

RunConfig parse_run_config(const json& j, std::filesystem::path base_dir) {
    check_keys(j,
               {"paths", "face_source_kind", "llm_profiles", "fusion", "bands", "integration_mode",
                "kld_direction", "offline", "seed"},
               "config");
    RunConfig cfg;
    cfg.base_dir = std::move(base_dir);

    if (!j.contains("paths")) config_error("'paths' is required");
    const auto& paths = j.at("paths");
    check_keys(paths,
               {"annotations", "face_frames", "face_distributions", "replay_fixture", "cache_dir",
                "output_dir"},
               "paths");
    cfg.paths.annotations = get_or<std::string>(paths, "annotations", "", "paths");
    cfg.paths.face_frames = get_or<std::string>(paths, "face_frames", "", "paths");
    cfg.paths.face_distributions = get_or<std::string>(paths, "face_distributions", "", "paths");
    cfg.paths.replay_fixture = get_or<std::string>(paths, "replay_fixture", "", "paths");
    cfg.paths.cache_dir = get_or<std::string>(paths, "cache_dir", "cache", "paths");
    cfg.paths.output_dir = get_or<std::string>(paths, "output_dir", "out", "paths");
    if (cfg.paths.annotations.empty()) config_error("paths.annotations is required");
    if (cfg.paths.output_dir.empty()) config_error("paths.output_dir must not be empty");

    const auto kind = get_or<std::string>(j, "face_source_kind", "evidence", "config");
    if (kind == "evidence") {
        cfg.face_source_kind = FaceSourceKind::Evidence;
    } else if (kind == "probabilities") {
        cfg.face_source_kind = FaceSourceKind::Probabilities;
    } else if (kind == "distributions") {
        cfg.face_source_kind = FaceSourceKind::Distributions;
    } else {
        config_error("face_source_kind must be evidence, probabilities or distributions");
    }
    if (cfg.face_source_kind == FaceSourceKind::Distributions) {
        if (cfg.paths.face_distributions.empty()) config_error("paths.face_distributions is required");
    } else if (cfg.paths.face_frames.empty()) {
        config_error("paths.face_frames is required for face_source_kind '" + kind + "'");
    }

    if (j.contains("llm_profiles")) {
        const auto& arr = j.at("llm_profiles");
        if (!arr.is_array()) config_error("llm_profiles must be an array");
        std::set<std::string> names;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            auto p = parse_profile(arr[i], i);
            p.query.cache_dir = cfg.resolve(cfg.paths.cache_dir);
            if (p.name == "human" || !names.insert(file_safe(p.name)).second) {
                config_error("llm profile name '" + p.name + "' is reserved or duplicated");
            }
            cfg.llm_profiles.push_back(std::move(p));
        }
    }
    if (j.contains("fusion")) cfg.fusion = parse_fusion(j.at("fusion"));
    if (j.contains("bands")) cfg.bands = parse_bands(j.at("bands"));

    const auto mode = get_or<std::string>(j, "integration_mode", "bci", "config");
    if (mode == "bci") {
        cfg.integration_mode = IntegrationMode::Bci;
    } else if (mode == "llm_integration") {
        cfg.integration_mode = IntegrationMode::LlmIntegration;
        if (cfg.llm_profiles.empty()) config_error("llm_integration needs at least one llm profile");
    } else {
        config_error("integration_mode must be bci or llm_integration");
    }

    const auto direction = parse_kld_direction(get_or<std::string>(j, "kld_direction", "truth_pred", "config"));
    if (!direction) config_error("kld_direction must be truth_pred or pred_truth");
    cfg.kld_direction = *direction;
    cfg.offline = get_or<bool>(j, "offline", false, "config");
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0, "config");
    cfg.config_sha256 = sha256_hex(j.dump());
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        config_error(path.string() + ": " + e.what());
    }
    return parse_run_config(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

ClientFactory default_client_factory(const RunConfig& cfg) {
    return [&cfg](const LlmProfile& profile) -> std::unique_ptr<ChatClient> {
        if (cfg.offline) {
            if (cfg.paths.replay_fixture.empty()) return std::make_unique<OfflineChatClient>();
            return std::make_unique<ReplayChatClient>(
                ReplayChatClient::from_file(cfg.resolve(cfg.paths.replay_fixture).string()));
        }
        const char* key = std::getenv("LLM_API_KEY");
        if (key == nullptr || *key == '\0') {
            config_error("LLM_API_KEY is not set (required for live profile '" + profile.name +
                         "'; use --offline for replay)");
        }
        return std::make_unique<HttpChatClient>(profile.provider, key);
    };
}

OutputLock::OutputLock(const std::filesystem::path& output_dir) : path_(output_dir / ".cuefuse.lock") {
    std::filesystem::create_directories(output_dir);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        config_error("output directory is in use (remove " + path_.string() + " if stale)");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

OutputLock::~OutputLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
}

}  // namespace cuefuse
