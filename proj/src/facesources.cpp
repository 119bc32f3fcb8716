#include "cuefuse/facesources.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cuefuse/error.hpp"
#include "text_util.hpp"

namespace cuefuse {

namespace {

// Per-label mean over frames. Each column is summed in sorted order so the
// result does not depend on frame order.
ProbVector column_means(const std::vector<ProbVector>& frames) {
    ProbVector mean{};
    std::vector<double> column(frames.size());
    for (std::size_t i = 0; i < kNumLabels; ++i) {
        for (std::size_t f = 0; f < frames.size(); ++f) column[f] = frames[f][i];
        std::sort(column.begin(), column.end());
        double s = 0.0;
        for (double x : column) s += x;
        mean[i] = s / static_cast<double>(frames.size());
    }
    return mean;
}

void require_kind(const FrameSeries& fs, FrameKind expected) {
    if (fs.kind != expected) {
        throw Error(ErrorKind::WrongKind, "video '" + fs.video_id + "': expected " +
                                              std::string(frame_kind_key(expected)) +
                                              " frames, got " +
                                              std::string(frame_kind_key(fs.kind)));
    }
}

}  // namespace

std::string_view frame_kind_key(FrameKind kind) noexcept {
    return kind == FrameKind::Evidence ? "evidence" : "probabilities";
}

void FrameSeries::validate() const {
    if (frames.empty()) throw Error(ErrorKind::InvalidFrame, "video '" + video_id + "' has no frames");
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const auto where = "video '" + video_id + "' frame " + std::to_string(f);
        double s = 0.0;
        for (double x : frames[f]) {
            if (!std::isfinite(x)) throw Error(ErrorKind::InvalidFrame, where + ": non-finite value");
            if (kind == FrameKind::Evidence && std::abs(x) > kEvidenceLimit) {
                throw Error(ErrorKind::InvalidFrame, where + ": evidence outside [-4, 4]");
            }
            if (kind == FrameKind::Probabilities && (x < 0.0 || x > 1.0)) {
                throw Error(ErrorKind::InvalidFrame, where + ": probability outside [0, 1]");
            }
            s += x;
        }
        if (kind == FrameKind::Probabilities && std::abs(s - 1.0) > kFrameSumTolerance) {
            throw Error(ErrorKind::InvalidFrame, where + ": probabilities sum to " + std::to_string(s));
        }
    }
}

FaceEstimate facet_to_distribution(const FrameSeries& fs) {
    require_kind(fs, FrameKind::Evidence);
    fs.validate();
    std::vector<ProbVector> clamped = fs.frames;
    for (auto& frame : clamped) {
        for (double& x : frame) x = std::max(x, 0.0);
    }
    const ProbVector mean = column_means(clamped);
    double total = 0.0;
    for (double x : mean) total += x;
    if (total <= 0.0) return {EmotionDistribution::uniform(), true};
    return {normalize(mean), false};
}

EmotionDistribution softmax_frames_to_distribution(const FrameSeries& fs) {
    require_kind(fs, FrameKind::Probabilities);
    fs.validate();
    return normalize(column_means(fs.frames));
}

FaceEstimate convert_frames(const FrameSeries& fs) {
    if (fs.kind == FrameKind::Evidence) return facet_to_distribution(fs);
    return {softmax_frames_to_distribution(fs), false};
}

std::vector<FrameSeries> parse_frames(std::istream& in, FrameKind kind, std::string_view source) {
    const auto fail = [&](std::size_t line, const std::string& what) -> void {
        throw Error(ErrorKind::ParseError,
                    std::string(source) + ":" + std::to_string(line) + ": " + what);
    };

    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) fail(1, "empty frame file");
    std::string_view header = detail::trim(line);
    if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
    if (header != kFrameHeader) fail(1, "header must be '" + std::string(kFrameHeader) + "'");

    std::map<std::string, std::map<long long, ProbVector>> by_video;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv(line);
        if (fields.size() != 2 + kNumLabels) {
            fail(lineno, "expected " + std::to_string(2 + kNumLabels) + " fields, got " +
                             std::to_string(fields.size()));
        }
        if (fields[0].empty()) fail(lineno, "empty video_id");
        const auto idx = detail::parse_double(fields[1]);
        if (!idx || *idx != std::floor(*idx)) fail(lineno, "bad frame_index '" + std::string(fields[1]) + "'");
        ProbVector frame{};
        for (std::size_t i = 0; i < kNumLabels; ++i) {
            const auto v = detail::parse_double(fields[2 + i]);
            if (!v) fail(lineno, "bad number '" + std::string(fields[2 + i]) + "'");
            frame[i] = *v;
        }
        auto& frames = by_video[std::string(fields[0])];
        if (!frames.emplace(static_cast<long long>(*idx), frame).second) {
            fail(lineno, "duplicate frame_index for video '" + std::string(fields[0]) + "'");
        }
    }
    if (by_video.empty()) fail(lineno, "frame file has no data rows");

    std::vector<FrameSeries> out;
    out.reserve(by_video.size());
    for (auto& [video, frames] : by_video) {
        FrameSeries fs{video, kind, {}};
        fs.frames.reserve(frames.size());
        for (auto& [index, frame] : frames) fs.frames.push_back(frame);
        fs.validate();
        out.push_back(std::move(fs));
    }
    return out;
}

std::vector<FrameSeries> load_frames(const std::string& path, FrameKind kind) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open frame file '" + path + "'");
    return parse_frames(in, kind, path);
}

DistributionMap parse_distribution_json(std::string_view text, std::string_view source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, std::string(source) + ": " + e.what());
    }
    if (!j.is_object()) {
        throw Error(ErrorKind::ParseError, std::string(source) + ": top level must be an object");
    }
    DistributionMap out;
    for (const auto& [key, value] : j.items()) {
        try {
            out.emplace(key, value.get<EmotionDistribution>());
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(source) + ": entry '" + key + "': " + e.what());
        }
    }
    return out;
}

DistributionMap load_distribution_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open distribution file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_distribution_json(ss.str(), path);
}

std::string dump_distribution_json(const DistributionMap& dists) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [key, d] : dists) {
        nlohmann::ordered_json entry = nlohmann::ordered_json::object();
        for (EmotionLabel label : kAllLabels) entry[std::string(label_key(label))] = d[label];
        j[key] = std::move(entry);
    }
    return j.dump(2) + "\n";
}

}  // namespace cuefuse
