#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cuefuse/chat_client.hpp"
#include "cuefuse/context.hpp"
#include "cuefuse/fusion.hpp"
#include "cuefuse/metrics.hpp"

namespace cuefuse {

inline constexpr std::string_view kToolVersion = "cuefuse 1.0.0";

enum class FaceSourceKind { Evidence, Probabilities, Distributions };
enum class IntegrationMode { Bci, LlmIntegration };

/// One LLM used as a context (or integration) source. `name` labels output
/// files and report rows.
struct LlmProfile {
    std::string name;
    LlmQueryConfig query;
    ProviderProfile provider;
};

/// Paths exactly as written in the config file (relative to its directory).
struct RunPaths {
    std::string annotations;
    std::string face_frames;
    std::string face_distributions;
    std::string replay_fixture;
    std::string cache_dir = "cache";
    std::string output_dir = "out";
};

struct RunConfig {
    std::filesystem::path base_dir;
    RunPaths paths;
    FaceSourceKind face_source_kind = FaceSourceKind::Evidence;
    std::vector<LlmProfile> llm_profiles;
    FusionConfig fusion;
    BandTable bands = BandTable::defaults();
    IntegrationMode integration_mode = IntegrationMode::Bci;
    KldDirection kld_direction = KldDirection::TruthPred;
    bool offline = false;
    std::uint64_t seed = 0;
    /// SHA-256 of the canonical (re-serialized) config JSON.
    std::string config_sha256;

    /// Resolves a configured path against base_dir. Empty stays empty.
    [[nodiscard]] std::filesystem::path resolve(const std::string& configured) const;
    [[nodiscard]] std::filesystem::path output_dir() const { return resolve(paths.output_dir); }
};

/// Parses and validates a config document; unknown keys are rejected.
/// Throws ConfigError.
[[nodiscard]] RunConfig parse_run_config(const nlohmann::json& j, std::filesystem::path base_dir);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

/// Builds the chat client for one profile. The default factory returns the
/// replay client in offline mode (or a cache-only client when no fixture is
/// configured) and otherwise an HTTP client keyed by LLM_API_KEY.
using ClientFactory = std::function<std::unique_ptr<ChatClient>(const LlmProfile&)>;
[[nodiscard]] ClientFactory default_client_factory(const RunConfig& cfg);

/// Exclusive claim on an output directory, held for the life of the object.
class OutputLock {
  public:
    explicit OutputLock(const std::filesystem::path& output_dir);
    ~OutputLock();
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

  private:
    std::filesystem::path path_;
};

// Stage commands. Each reads its inputs, validates them, writes its outputs
// under the output directory and records digests in manifest.json.

/// aggregate/{context_free,context_based}.json (per video),
/// aggregate/<condition>_outcomes.json (per outcome), aggregate/context_only.json,
/// aggregate/video_outcomes.json and aggregate/consensus.csv.
void cmd_aggregate(const RunConfig& cfg);
/// face/face.json; degenerate sources listed in the manifest.
void cmd_face(const RunConfig& cfg);
/// context/<profile>.json with one distribution per outcome.
void cmd_context(const RunConfig& cfg, const ClientFactory& factory);
/// fuse/bci_<source>.json or fuse/integration_<profile>.json.
void cmd_fuse(const RunConfig& cfg, const ClientFactory& factory);
/// eval/metrics.csv, eval/per_video.csv, eval/improvement.csv, eval/summary.md.
void cmd_eval(const RunConfig& cfg);
void cmd_all(const RunConfig& cfg, const ClientFactory& factory);

/// Name of the file-safe form of a profile or source name.
[[nodiscard]] std::string file_safe(std::string_view name);

}  // namespace cuefuse
