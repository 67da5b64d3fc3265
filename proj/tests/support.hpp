#pragma once

// In-memory frame endpoints and scene sequences shared by the tests.

#include <vector>

#include "papertab/bench.hpp"
#include "papertab/pipeline.hpp"

namespace papertab::testing {

class VectorSource : public FrameSource {
 public:
  explicit VectorSource(std::vector<GrayFrame> frames) : frames_(std::move(frames)) {}
  std::optional<pnm::AnyFrame> next() override {
    if (pos_ >= frames_.size()) return std::nullopt;
    return frames_[pos_++];
  }

 private:
  std::vector<GrayFrame> frames_;
  std::size_t pos_ = 0;
};

class VectorSink : public FrameSink {
 public:
  void write(const GrayFrame& frame) override { frames.push_back(frame); }
  std::vector<GrayFrame> frames;
};

// A still sheet filmed for `count` frames; only the sensor noise changes.
inline std::vector<GrayFrame> still_sequence(const bench::SceneSpec& spec,
                                             int count, int width = 1280,
                                             int height = 720) {
  std::vector<GrayFrame> frames;
  for (int i = 0; i < count; ++i) {
    bench::SceneSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(i);
    frames.push_back(bench::render_scene(s, width, height).frame);
  }
  return frames;
}

inline double mean_abs_diff(const GrayFrame& a, const GrayFrame& b,
                            int border = 0) {
  double sum = 0.0;
  long n = 0;
  for (int y = border; y < a.height() - border; ++y) {
    for (int x = border; x < a.width() - border; ++x) {
      sum += std::abs(int(a(x, y)) - int(b(x, y)));
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

// Output size and paper aspect matching the content raster exactly.
inline PipelineConfig content_sized(PipelineConfig cfg, const GrayFrame& content) {
  cfg.output_height = content.height();
  cfg.paper = RectMode::fixed(double(content.width()) / content.height());
  return cfg;
}

}  // namespace papertab::testing
