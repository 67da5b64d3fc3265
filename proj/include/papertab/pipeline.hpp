#pragma once

// Per-frame rectification and the ordered stream driver.
//
//   frame -> [flip if left-handed] -> paper mask -> largest region
//         -> contour -> quad -> [unflip corners] -> smoothing
//         -> homography + bird's-eye warp -> ink cleanup -> output
//
// Segmentation failures after the first good frame hold the last smoothed
// quad and mark the frame low-confidence instead of dropping it.

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "papertab/cleanup.hpp"
#include "papertab/geometry.hpp"
#include "papertab/maskquad.hpp"
#include "papertab/pnm.hpp"

namespace papertab {

enum class OutputKind { Ink, WarpedGray };
enum class SegmentationKind { Classical, External };

struct PipelineConfig {
  bool left_handed = false;
  SegmentationKind segmentation = SegmentationKind::Classical;
  RectMode paper = RectMode::fixed(210.0 / 297.0);
  int output_height = 1188;
  /// Unset fields fall back to CleanupParams::defaults_for(output size).
  std::optional<int> window;
  std::optional<int> offset_c;
  std::optional<std::size_t> min_area;
  std::optional<double> max_area_frac;
  int morph_radius = 1;
  double alpha = 0.6;
  double jump_threshold = 0.05;
  bool emit_corners = false;
  OutputKind output = OutputKind::Ink;

  /// Throws InvalidConfig.
  void validate() const;
  CleanupParams cleanup_for(int width, int height) const;
  SmootherState make_smoother() const;
};

struct StageTimings {
  double segment_ms = 0.0;
  double quad_ms = 0.0;
  double warp_ms = 0.0;
  double cleanup_ms = 0.0;

  double total_ms() const {
    return segment_ms + quad_ms + warp_ms + cleanup_ms;
  }
};

struct FrameResult {
  GrayFrame output;  // ink (black on white) or warped luma
  Quadd quad = rect_quad<double>({2, 2});
  bool low_confidence = false;
  StageTimings timings;
};

/// Runs one frame through every stage. `external_mask` is required when
/// the config selects external segmentation and ignored otherwise.
/// Throws NoPaperFound / QuadFitFailed only while the smoother has no
/// prior quad, and DimensionMismatch for a mask of the wrong size.
FrameResult process_frame(const GrayFrame& luma, const PipelineConfig& config,
                          SmootherState& smoother,
                          const GrayFrame* external_mask = nullptr);
FrameResult process_frame(const ColorFrame& frame,
                          const PipelineConfig& config, SmootherState& smoother,
                          const GrayFrame* external_mask = nullptr);

// Stream endpoints --------------------------------------------------------

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  /// Next frame in order, or nullopt at the end.
  virtual std::optional<pnm::AnyFrame> next() = 0;
};

class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual void write(const GrayFrame& frame) = 0;
};

/// Concatenated P5/P6 frames on a stream.
class PnmStreamSource : public FrameSource {
 public:
  explicit PnmStreamSource(std::istream& in) : in_(in) {}
  std::optional<pnm::AnyFrame> next() override;

 private:
  std::istream& in_;
};

/// `<prefix>_NNNNNN.ppm|pgm` files of a directory, in index order.
class DirectorySource : public FrameSource {
 public:
  DirectorySource(const std::filesystem::path& dir, const std::string& prefix);
  std::optional<pnm::AnyFrame> next() override;

 private:
  std::vector<std::filesystem::path> files_;
  std::size_t pos_ = 0;
};

class PnmStreamSink : public FrameSink {
 public:
  explicit PnmStreamSink(std::ostream& out) : out_(out) {}
  void write(const GrayFrame& frame) override;

 private:
  std::ostream& out_;
};

/// Writes frame_000000.pgm, frame_000001.pgm, ... into a directory.
class DirectorySink : public FrameSink {
 public:
  explicit DirectorySink(const std::filesystem::path& dir);
  void write(const GrayFrame& frame) override;

 private:
  std::filesystem::path dir_;
  int index_ = 0;
};

struct StreamSummary {
  std::size_t frames = 0;
  std::size_t failures = 0;        // frames with no usable quad
  std::size_t low_confidence = 0;  // frames that held a previous quad
  StageTimings mean;               // mean per-stage time over all frames
  std::vector<std::string> errors;

  bool any_quad() const { return frames > failures; }
  double frames_per_second() const {
    return mean.total_ms() > 0.0 ? 1000.0 / mean.total_ms() : 0.0;
  }
};

/// Processes frames strictly in order through one smoother, writing one
/// output per input. A frame that fails before any quad exists is written
/// as a blank sheet and counted in `failures`. I/O problems throw IoError;
/// a missing external mask is a DimensionMismatch recorded per frame.
StreamSummary run_stream(FrameSource& frames, FrameSink& sink,
                         const PipelineConfig& config,
                         FrameSource* masks = nullptr,
                         std::ostream* corners = nullptr);

}  // namespace papertab
