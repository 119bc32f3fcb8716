#include "cuefuse/pipeline.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cuefuse/annotations.hpp"
#include "cuefuse/digest.hpp"
#include "cuefuse/error.hpp"
#include "cuefuse/facesources.hpp"
#include "text_util.hpp"

namespace cuefuse {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

constexpr std::string_view kManifestName = "manifest.json";

// Collects a stage's output digests and merges them into manifest.json.
class StageRecorder {
  public:
    StageRecorder(const RunConfig& cfg, std::string stage) : cfg_(cfg), stage_(std::move(stage)) {}

    void write(const std::string& relpath, const std::string& contents) {
        const fs::path path = cfg_.output_dir() / relpath;
        fs::create_directories(path.parent_path());
        const auto tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw Error(ErrorKind::IoError, "cannot write '" + tmp + "'");
            out << contents;
            if (!out) throw Error(ErrorKind::IoError, "failed writing '" + tmp + "'");
        }
        fs::rename(tmp, path);
        outputs_[relpath] = sha256_hex(contents);
    }

    void input(const std::string& configured) {
        inputs_[configured] = file_sha256_hex(cfg_.resolve(configured).string());
    }

    json& extra() { return extra_; }

    void commit() {
        const fs::path path = cfg_.output_dir() / kManifestName;
        json manifest = json::object();
        if (fs::exists(path)) {
            std::ifstream in(path, std::ios::binary);
            try {
                manifest = json::parse(in);
            } catch (const json::exception&) {
                manifest = json::object();
            }
        }
        manifest["tool_version"] = kToolVersion;
        manifest["config_sha256"] = cfg_.config_sha256;
        for (const auto& [k, v] : inputs_) manifest["inputs"][k] = v;
        json stage = extra_.is_null() ? json::object() : extra_;
        stage["outputs"] = outputs_;
        manifest["stages"][stage_] = std::move(stage);

        const std::string text = manifest.dump(2) + "\n";
        const auto tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << text;
        }
        fs::rename(tmp, path);
    }

  private:
    const RunConfig& cfg_;
    std::string stage_;
    std::map<std::string, std::string> outputs_;
    std::map<std::string, std::string> inputs_;
    json extra_;
};

void require_input(const RunConfig& cfg, const std::string& configured, std::string_view what) {
    if (configured.empty()) throw Error(ErrorKind::ConfigError, std::string(what) + " path not configured");
    if (!fs::exists(cfg.resolve(configured))) {
        throw Error(ErrorKind::ConfigError, std::string(what) + " '" +
                                                cfg.resolve(configured).string() + "' does not exist");
    }
}

DistributionMap load_stage_file(const RunConfig& cfg, const std::string& relpath, std::string_view producer) {
    const fs::path path = cfg.output_dir() / relpath;
    if (!fs::exists(path)) {
        throw Error(ErrorKind::IoError, "missing '" + path.string() + "'; run the '" +
                                            std::string(producer) + "' stage first");
    }
    return load_distribution_file(path.string());
}

std::map<std::string, GameOutcome> load_video_outcomes(const RunConfig& cfg) {
    const fs::path path = cfg.output_dir() / "aggregate/video_outcomes.json";
    if (!fs::exists(path)) {
        throw Error(ErrorKind::IoError, "missing '" + path.string() + "'; run the 'aggregate' stage first");
    }
    std::ifstream in(path, std::ios::binary);
    std::map<std::string, GameOutcome> out;
    try {
        const auto j = json::parse(in);
        for (const auto& [video, value] : j.items()) {
            const auto o = parse_outcome(value.get<std::string>());
            if (!o) throw Error(ErrorKind::BadOutcome, path.string() + ": video '" + video + "' has bad outcome");
            out.emplace(video, *o);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
    }
    return out;
}

std::string outcome_map_json(const std::map<GameOutcome, EmotionDistribution>& by_outcome) {
    DistributionMap m;
    for (const auto& [o, d] : by_outcome) m.emplace(outcome_name(o), d);
    return dump_distribution_json(m);
}

std::map<GameOutcome, EmotionDistribution> parse_outcome_map(const DistributionMap& m, const std::string& where) {
    std::map<GameOutcome, EmotionDistribution> out;
    for (const auto& [key, d] : m) {
        const auto o = parse_outcome(key);
        if (!o) throw Error(ErrorKind::BadOutcome, where + ": key '" + key + "' is not a game outcome");
        out.emplace(*o, d);
    }
    return out;
}

std::vector<std::string> fused_sources(const RunConfig& cfg) {
    std::vector<std::string> names;
    if (cfg.integration_mode == IntegrationMode::LlmIntegration) {
        for (const auto& p : cfg.llm_profiles) names.push_back("integration_" + file_safe(p.name));
        return names;
    }
    for (const auto& p : cfg.llm_profiles) names.push_back("bci_" + file_safe(p.name));
    if (fs::exists(cfg.output_dir() / "aggregate/context_only.json")) names.push_back("bci_human");
    return names;
}

}  // namespace

std::string file_safe(std::string_view name) {
    std::string out;
    for (char c : name) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out;
}

void cmd_aggregate(const RunConfig& cfg) {
    require_input(cfg, cfg.paths.annotations, "annotations");
    StageRecorder rec(cfg, "aggregate");
    rec.input(cfg.paths.annotations);

    const auto records = load_annotations(cfg.resolve(cfg.paths.annotations).string());
    const auto kept = filter_attention(records);
    if (kept.empty()) throw Error(ErrorKind::EmptyGroup, "no annotation records passed the attention check");
    const auto videos = aggregate_all(kept);

    std::map<std::string, GameOutcome> video_outcomes;
    for (const auto& r : records) {
        if (r.condition == Condition::ContextOnly) continue;
        const auto [it, inserted] = video_outcomes.emplace(r.video_id, r.outcome);
        if (!inserted && it->second != r.outcome) {
            throw Error(ErrorKind::MixedGroup, "video '" + r.video_id + "' is listed under two outcomes");
        }
    }
    json vo = json::object();
    for (const auto& [video, o] : video_outcomes) vo[video] = outcome_name(o);
    rec.write("aggregate/video_outcomes.json", vo.dump(2) + "\n");

    std::string consensus = "condition,outcome,pct_majority,pct_supermajority\n";
    json counts = json::object();
    for (Condition c : kAllConditions) {
        std::vector<VideoRatings> group;
        for (const auto& v : videos) {
            if (v.condition == c) group.push_back(v);
        }
        if (group.empty()) continue;
        const std::string key(condition_key(c));

        if (c == Condition::ContextOnly) {
            std::map<GameOutcome, EmotionDistribution> by_outcome;
            for (const auto& v : group) by_outcome.emplace(v.outcome, v.dist);
            rec.write("aggregate/context_only.json", outcome_map_json(by_outcome));
            continue;
        }

        DistributionMap per_video;
        for (const auto& v : group) per_video.emplace(v.video_id, v.dist);
        rec.write("aggregate/" + key + ".json", dump_distribution_json(per_video));

        std::map<GameOutcome, EmotionDistribution> by_outcome;
        for (GameOutcome o : kAllOutcomes) {
            std::vector<VideoRatings> same;
            for (const auto& v : group) {
                if (v.outcome == o) same.push_back(v);
            }
            if (!same.empty()) by_outcome.emplace(o, aggregate_outcome(same));
        }
        rec.write("aggregate/" + key + "_outcomes.json", outcome_map_json(by_outcome));

        for (const auto& row : consensus_stats(group)) {
            consensus += key + "," + std::string(outcome_name(row.outcome)) + "," +
                         detail::format_double(row.pct_majority) + "," +
                         detail::format_double(row.pct_supermajority) + "\n";
        }
        counts[key] = group.size();
    }
    rec.write("aggregate/consensus.csv", consensus);
    rec.extra()["records_total"] = records.size();
    rec.extra()["records_failed_attention"] = records.size() - kept.size();
    rec.extra()["videos_per_condition"] = counts;
    rec.commit();
}

void cmd_face(const RunConfig& cfg) {
    StageRecorder rec(cfg, "face");
    DistributionMap out;
    std::vector<std::string> degenerate;

    if (cfg.face_source_kind == FaceSourceKind::Distributions) {
        require_input(cfg, cfg.paths.face_distributions, "face distributions");
        rec.input(cfg.paths.face_distributions);
        out = load_distribution_file(cfg.resolve(cfg.paths.face_distributions).string());
    } else {
        require_input(cfg, cfg.paths.face_frames, "face frames");
        rec.input(cfg.paths.face_frames);
        const auto kind = cfg.face_source_kind == FaceSourceKind::Evidence ? FrameKind::Evidence
                                                                            : FrameKind::Probabilities;
        const auto path = cfg.resolve(cfg.paths.face_frames).string();
        for (const auto& series : load_frames(path, kind)) {
            FaceEstimate est;
            try {
                est = convert_frames(series);
            } catch (const Error& e) {
                throw Error(e.kind(), path + ": " + e.what());
            }
            if (est.degenerate) degenerate.push_back(series.video_id);
            out.emplace(series.video_id, est.dist);
        }
    }
    if (out.empty()) throw Error(ErrorKind::EmptyInput, "face source produced no videos");
    rec.write("face/face.json", dump_distribution_json(out));
    rec.extra()["degenerate_sources"] = degenerate;
    rec.extra()["videos"] = out.size();
    rec.commit();
}

void cmd_context(const RunConfig& cfg, const ClientFactory& factory) {
    StageRecorder rec(cfg, "context");
    if (cfg.offline && !cfg.paths.replay_fixture.empty()) {
        require_input(cfg, cfg.paths.replay_fixture, "replay fixture");
        rec.input(cfg.paths.replay_fixture);
    }
    // Build every client first so configuration problems surface before any request.
    std::vector<std::unique_ptr<ChatClient>> clients;
    for (const auto& profile : cfg.llm_profiles) clients.push_back(factory(profile));

    SampleCache cache(cfg.resolve(cfg.paths.cache_dir));
    json prompts = json::object();
    for (std::size_t i = 0; i < cfg.llm_profiles.size(); ++i) {
        const auto& profile = cfg.llm_profiles[i];
        std::map<GameOutcome, EmotionDistribution> by_outcome;
        for (GameOutcome o : kAllOutcomes) {
            const std::string prompt = build_prompt(o);
            prompts[std::string(outcome_name(o))] = prompt_hash(prompt);
            const auto result = query_distribution(prompt, profile.query, *clients[i], cache);
            std::clog << "context " << profile.name << " " << outcome_name(o) << ": "
                      << result.cache_hits << " cached, " << result.client_calls << " calls, "
                      << result.parse_failures << " unparseable\n";
            by_outcome.emplace(o, result.dist);
        }
        rec.write("context/" + file_safe(profile.name) + ".json", outcome_map_json(by_outcome));
    }
    rec.extra()["prompt_hashes"] = prompts;
    rec.commit();
}

void cmd_fuse(const RunConfig& cfg, const ClientFactory& factory) {
    StageRecorder rec(cfg, "fuse");
    const auto face = load_stage_file(cfg, "face/face.json", "face");
    const auto outcomes = load_video_outcomes(cfg);
    for (const auto& [video, d] : face) {
        if (!outcomes.contains(video)) {
            throw Error(ErrorKind::KeyMismatch, "face video '" + video + "' has no game outcome in the annotations");
        }
    }

    if (cfg.integration_mode == IntegrationMode::Bci) {
        cfg.fusion.validate();
        std::vector<std::pair<std::string, std::map<GameOutcome, EmotionDistribution>>> sources;
        for (const auto& p : cfg.llm_profiles) {
            const std::string rel = "context/" + file_safe(p.name) + ".json";
            sources.emplace_back(file_safe(p.name), parse_outcome_map(load_stage_file(cfg, rel, "context"), rel));
        }
        if (fs::exists(cfg.output_dir() / "aggregate/context_only.json")) {
            sources.emplace_back("human", parse_outcome_map(load_stage_file(cfg, "aggregate/context_only.json", "aggregate"),
                                                            "aggregate/context_only.json"));
        }
        for (const auto& [name, context] : sources) {
            DistributionMap fused;
            for (const auto& [video, f] : face) {
                const auto o = outcomes.at(video);
                const auto it = context.find(o);
                if (it == context.end()) {
                    throw Error(ErrorKind::KeyMismatch, "context source '" + name + "' has no distribution for outcome " +
                                                            std::string(outcome_name(o)));
                }
                fused.emplace(video, bci_fuse(f, it->second, cfg.fusion));
            }
            rec.write("fuse/bci_" + name + ".json", dump_distribution_json(fused));
        }
    } else {
        std::vector<std::unique_ptr<ChatClient>> clients;
        for (const auto& profile : cfg.llm_profiles) clients.push_back(factory(profile));
        SampleCache cache(cfg.resolve(cfg.paths.cache_dir));
        for (std::size_t i = 0; i < cfg.llm_profiles.size(); ++i) {
            const auto& profile = cfg.llm_profiles[i];
            DistributionMap fused;
            std::size_t calls = 0;
            for (const auto& [video, f] : face) {
                const auto prompt = build_integration_prompt(outcomes.at(video), f, cfg.bands);
                const auto result = query_distribution(prompt, profile.query, *clients[i], cache);
                calls += result.client_calls;
                fused.emplace(video, result.dist);
            }
            std::clog << "integration " << profile.name << ": " << calls << " calls\n";
            rec.write("fuse/integration_" + file_safe(profile.name) + ".json", dump_distribution_json(fused));
        }
    }
    rec.extra()["integration_mode"] = cfg.integration_mode == IntegrationMode::Bci ? "bci" : "llm_integration";
    rec.commit();
}

void cmd_eval(const RunConfig& cfg) {
    StageRecorder rec(cfg, "eval");
    const auto truth = load_stage_file(cfg, "aggregate/context_based.json", "aggregate");
    const auto outcomes = load_video_outcomes(cfg);
    const auto face = load_stage_file(cfg, "face/face.json", "face");

    std::vector<EvalRow> rows;
    rows.push_back(evaluate_method("face", face, truth, cfg.kld_direction));
    std::vector<std::pair<std::string, std::vector<ImprovementRow>>> improvements;
    for (const auto& name : fused_sources(cfg)) {
        const auto fused = load_stage_file(cfg, "fuse/" + name + ".json", "fuse");
        rows.push_back(evaluate_method(name, fused, truth, cfg.kld_direction));
        improvements.emplace_back(name, outcome_improvement(face, fused, truth, outcomes, cfg.kld_direction));
    }

    std::string metrics = "method,kld,rmse,f1_weighted\n";
    std::string per_video = "method,video_id,outcome,kld,rmse,pred_label,truth_label\n";
    for (const auto& row : rows) {
        metrics += row.method_name + "," + detail::format_double(row.aggregate.kld) + "," +
                   detail::format_double(row.aggregate.rmse) + "," +
                   detail::format_double(row.aggregate.f1_weighted) + "\n";
        for (const auto& v : row.per_video) {
            const auto it = outcomes.find(v.video_id);
            per_video += row.method_name + "," + v.video_id + "," +
                         (it == outcomes.end() ? std::string() : std::string(outcome_name(it->second))) + "," +
                         detail::format_double(v.kld) + "," + detail::format_double(v.rmse) + "," +
                         std::string(label_key(v.pred_label)) + "," + std::string(label_key(v.truth_label)) + "\n";
        }
    }
    std::string improvement = "method,outcome,n_videos,delta_kld\n";
    for (const auto& [name, imp] : improvements) {
        for (const auto& r : imp) {
            improvement += name + "," + std::string(outcome_name(r.outcome)) + "," + std::to_string(r.n_videos) +
                           "," + detail::format_double(r.delta_kld) + "\n";
        }
    }

    std::ostringstream md;
    md << "# Evaluation summary\n\n"
       << "Truth: context-based human annotations (" << truth.size() << " videos). KLD direction: "
       << kld_direction_key(cfg.kld_direction) << ".\n\n"
       << "| Method | KLD | RMSE | F1 (weighted) |\n|---|---|---|---|\n";
    for (const auto& row : rows) {
        md << "| " << row.method_name << " | " << detail::format_fixed(row.aggregate.kld, 3) << " | "
           << detail::format_fixed(row.aggregate.rmse, 3) << " | "
           << detail::format_fixed(row.aggregate.f1_weighted, 3) << " |\n";
    }
    if (!improvements.empty()) {
        md << "\n## KLD improvement over face-only by outcome\n\nPositive values mean fusion helped.\n\n"
           << "| Method |";
        for (GameOutcome o : kAllOutcomes) md << ' ' << outcome_name(o) << " |";
        md << "\n|---|---|---|---|---|\n";
        for (const auto& [name, imp] : improvements) {
            md << "| " << name << " |";
            for (GameOutcome o : kAllOutcomes) {
                const auto it = std::find_if(imp.begin(), imp.end(), [o](const ImprovementRow& r) { return r.outcome == o; });
                md << ' ' << (it == imp.end() ? std::string("-") : detail::format_fixed(it->delta_kld, 3)) << " |";
            }
            md << '\n';
        }
    }

    rec.write("eval/metrics.csv", metrics);
    rec.write("eval/per_video.csv", per_video);
    rec.write("eval/improvement.csv", improvement);
    rec.write("eval/summary.md", md.str());
    rec.commit();
}

void cmd_all(const RunConfig& cfg, const ClientFactory& factory) {
    cmd_aggregate(cfg);
    cmd_face(cfg);
    cmd_context(cfg, factory);
    cmd_fuse(cfg, factory);
    cmd_eval(cfg);
}

}  // namespace cuefuse
