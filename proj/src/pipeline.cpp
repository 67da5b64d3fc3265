#include "papertab/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <regex>

#include "papertab/segmentation.hpp"

namespace papertab {

namespace {

class StageClock {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ =
      std::chrono::steady_clock::now();
};

bool is_segmentation_failure(ErrorCode code) {
  return code == ErrorCode::NoPaperFound || code == ErrorCode::QuadFitFailed ||
         code == ErrorCode::EmptyMask || code == ErrorCode::DegenerateQuad;
}

RectSize blank_size(const PipelineConfig& config) {
  const double aspect = config.paper.kind == RectMode::Kind::FixedAspect
                            ? config.paper.aspect
                            : 210.0 / 297.0;
  return {static_cast<int>(std::lround(config.output_height * aspect)),
          config.output_height};
}

}  // namespace

void PipelineConfig::validate() const {
  if (output_height < 16) {
    throw Error(ErrorCode::InvalidConfig, "output height must be >= 16");
  }
  if (paper.kind == RectMode::Kind::FixedAspect &&
      !(paper.aspect > 0.1 && paper.aspect < 10.0)) {
    throw Error(ErrorCode::InvalidConfig, "paper aspect must lie in (0.1, 10)");
  }
  if (window && (*window < 3 || *window % 2 == 0)) {
    throw Error(ErrorCode::InvalidConfig, "window must be odd and >= 3");
  }
  if (offset_c && (*offset_c < 0 || *offset_c > 255)) {
    throw Error(ErrorCode::InvalidConfig, "offset_c must lie in [0, 255]");
  }
  if (min_area && *min_area < 1) {
    throw Error(ErrorCode::InvalidConfig, "min_area must be >= 1");
  }
  if (max_area_frac && !(*max_area_frac > 0.0 && *max_area_frac <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "max_area_frac must lie in (0, 1]");
  }
  if (morph_radius < 0) {
    throw Error(ErrorCode::InvalidConfig, "morph radius must be >= 0");
  }
  make_smoother().validate();
}

CleanupParams PipelineConfig::cleanup_for(int width, int height) const {
  CleanupParams p = CleanupParams::defaults_for(width, height);
  if (window) p.window = *window;
  if (offset_c) p.offset_c = *offset_c;
  if (min_area) p.min_area = *min_area;
  if (max_area_frac) p.max_area_frac = *max_area_frac;
  p.morph_radius = morph_radius;
  return p;
}

SmootherState PipelineConfig::make_smoother() const {
  SmootherState s;
  s.alpha = alpha;
  s.jump_threshold = jump_threshold;
  return s;
}

FrameResult process_frame(const GrayFrame& luma, const PipelineConfig& config,
                          SmootherState& smoother,
                          const GrayFrame* external_mask) {
  const int w = luma.width();
  const int h = luma.height();
  FrameResult result;
  StageClock clock;

  std::optional<Quadd> fitted;
  bool covers = true;
  try {
    BinaryMask mask;
    if (config.segmentation == SegmentationKind::External) {
      if (!external_mask) {
        throw Error(ErrorCode::DimensionMismatch, "no external mask supplied");
      }
      // The external mask is aligned with the unflipped frame.
      mask = binarize_external_mask(*external_mask, w, h);
      if (config.left_handed) mask = flip_horizontal(mask);
    } else {
      mask = classical_segment(config.left_handed ? flip_horizontal(luma)
                                                  : luma);
    }
    result.timings.segment_ms = clock.lap_ms();

    const BinaryMask region = largest_region(mask);
    Quadd quad = fit_quad(trace_contour(region));
    covers = quad_covers_region(quad, count_foreground(region));
    if (config.left_handed) quad = mirror_quad(quad, w);
    fitted = quad;
  } catch (const Error& e) {
    if (!is_segmentation_failure(e.code())) throw;
    if (!smoother.previous) {
      throw Error(e.code() == ErrorCode::QuadFitFailed
                      ? ErrorCode::QuadFitFailed
                      : ErrorCode::NoPaperFound,
                  e.what());
    }
  }

  if (!fitted || (!covers && smoother.previous)) {
    result.quad = *smoother.previous;
    result.low_confidence = true;
  } else {
    result.quad = smooth_corners(smoother, *fitted, std::hypot(w, h));
    result.low_confidence = !covers;
  }
  result.timings.quad_ms = clock.lap_ms();

  const RectSize size =
      target_rect(result.quad, config.paper, config.output_height);
  const Homographyd out_to_src =
      solve_homography(rect_quad(size), result.quad);
  GrayFrame warped = warp_bird_eye(luma, out_to_src, size.width, size.height);
  result.timings.warp_ms = clock.lap_ms();

  if (config.output == OutputKind::Ink) {
    const BinaryMask ink =
        extract_ink(warped, config.cleanup_for(size.width, size.height));
    result.output = mask_to_gray(ink, 0, 255);
  } else {
    result.output = std::move(warped);
  }
  result.timings.cleanup_ms = clock.lap_ms();
  return result;
}

FrameResult process_frame(const ColorFrame& frame,
                          const PipelineConfig& config, SmootherState& smoother,
                          const GrayFrame* external_mask) {
  return process_frame(to_luma(frame), config, smoother, external_mask);
}

std::optional<pnm::AnyFrame> PnmStreamSource::next() {
  return pnm::read_frame(in_);
}

DirectorySource::DirectorySource(const std::filesystem::path& dir,
                                 const std::string& prefix) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  }
  const std::regex pattern(prefix + R"(_(\d{6})\.(ppm|pgm))");
  std::vector<std::pair<long, std::filesystem::path>> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, pattern)) {
      found.emplace_back(std::stol(m[1].str()), entry.path());
    }
  }
  std::sort(found.begin(), found.end());
  for (auto& [index, path] : found) files_.push_back(std::move(path));
}

std::optional<pnm::AnyFrame> DirectorySource::next() {
  if (pos_ >= files_.size()) return std::nullopt;
  return pnm::read_file(files_[pos_++]);
}

void PnmStreamSink::write(const GrayFrame& frame) {
  pnm::write(out_, frame);
  out_.flush();
}

DirectorySink::DirectorySink(const std::filesystem::path& dir) : dir_(dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir_.string());
}

void DirectorySink::write(const GrayFrame& frame) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%06d.pgm", index_++);
  pnm::write_file(dir_ / name, frame);
}

StreamSummary run_stream(FrameSource& frames, FrameSink& sink,
                         const PipelineConfig& config, FrameSource* masks,
                         std::ostream* corners) {
  config.validate();
  if (config.segmentation == SegmentationKind::External && !masks) {
    throw Error(ErrorCode::InvalidConfig,
                "external segmentation needs a mask source");
  }
  SmootherState smoother = config.make_smoother();
  StreamSummary summary;
  std::size_t timed = 0;

  for (long index = 0;; ++index) {
    auto frame = frames.next();
    if (!frame) break;
    ++summary.frames;
    const GrayFrame luma = pnm::as_gray(*std::move(frame));

    std::optional<GrayFrame> mask;
    if (config.segmentation == SegmentationKind::External) {
      if (auto m = masks->next()) mask = pnm::as_gray(*std::move(m));
    }

    try {
      const FrameResult r =
          process_frame(luma, config, smoother, mask ? &*mask : nullptr);
      sink.write(r.output);
      if (corners) *corners << format_corner_line(index, r.quad) << '\n';
      summary.low_confidence += r.low_confidence;
      summary.mean.segment_ms += r.timings.segment_ms;
      summary.mean.quad_ms += r.timings.quad_ms;
      summary.mean.warp_ms += r.timings.warp_ms;
      summary.mean.cleanup_ms += r.timings.cleanup_ms;
      ++timed;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoError) throw;
      ++summary.failures;
      summary.errors.push_back("frame " + std::to_string(index) + ": " +
                               e.what());
      const RectSize size = blank_size(config);
      sink.write(GrayFrame(size.width, size.height, 255));
    }
  }
  if (timed > 0) {
    const double n = static_cast<double>(timed);
    summary.mean.segment_ms /= n;
    summary.mean.quad_ms /= n;
    summary.mean.warp_ms /= n;
    summary.mean.cleanup_ms /= n;
  }
  if (corners) corners->flush();
  return summary;
}

}  // namespace papertab
