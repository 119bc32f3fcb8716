#pragma once

#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cuefuse/distributions.hpp"

namespace cuefuse {

enum class FrameKind { Evidence, Probabilities };

[[nodiscard]] std::string_view frame_kind_key(FrameKind kind) noexcept;

/// Evidence components are clamped detector scores in [-4, 4]; probability
/// frames each sum to 1 within 1e-6.
inline constexpr double kEvidenceLimit = 4.0;
inline constexpr double kFrameSumTolerance = 1e-6;

struct FrameSeries {
    std::string video_id;
    FrameKind kind = FrameKind::Evidence;
    std::vector<ProbVector> frames;

    /// Throws InvalidFrame.
    void validate() const;
};

/// Face-channel estimate P(e|f) for one video. `degenerate` marks a FACET
/// source whose clamped evidence was all zero and which fell back to uniform.
struct FaceEstimate {
    EmotionDistribution dist;
    bool degenerate = false;
};

/// Clamp negative evidence to zero per frame, average across frames, rescale.
/// Throws WrongKind, InvalidFrame.
[[nodiscard]] FaceEstimate facet_to_distribution(const FrameSeries& fs);

/// Mean of per-frame softmax outputs, renormalized. Throws WrongKind, InvalidFrame.
[[nodiscard]] EmotionDistribution softmax_frames_to_distribution(const FrameSeries& fs);

/// Dispatches on fs.kind.
[[nodiscard]] FaceEstimate convert_frames(const FrameSeries& fs);

inline constexpr std::string_view kFrameHeader =
    "video_id,frame_index,joy,neutral,surprise,anger,disgust,fear,sad";

/// Reads a frame CSV into one series per video, sorted by video_id with frames
/// ordered by frame_index. Throws ParseError, InvalidFrame.
[[nodiscard]] std::vector<FrameSeries> parse_frames(std::istream& in, FrameKind kind,
                                                    std::string_view source = "<input>");
[[nodiscard]] std::vector<FrameSeries> load_frames(const std::string& path, FrameKind kind);

using DistributionMap = std::map<std::string, EmotionDistribution>;

/// JSON object mapping keys to distribution objects. Throws ParseError,
/// InvariantViolation (naming the offending key).
[[nodiscard]] DistributionMap parse_distribution_json(std::string_view text,
                                                      std::string_view source = "<input>");
[[nodiscard]] DistributionMap load_distribution_file(const std::string& path);
[[nodiscard]] std::string dump_distribution_json(const DistributionMap& dists);

}  // namespace cuefuse
