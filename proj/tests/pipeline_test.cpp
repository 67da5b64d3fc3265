#include "papertab/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "papertab/bench.hpp"
#include "support.hpp"

namespace papertab {
namespace {

namespace fs = std::filesystem;
using testing::content_sized;
using testing::mean_abs_diff;
using testing::still_sequence;
using testing::VectorSink;
using testing::VectorSource;

TEST(ProcessFrame, GroundTruthMaskRecoversContent) {
  for (int s = 0; s < 3; ++s) {
    bench::SceneSpec spec = bench::random_scene(600 + s, {});
    spec.paper_luma = 255;
    const auto r = bench::render_scene(spec, 1280, 720);
    PipelineConfig cfg;
    cfg.segmentation = SegmentationKind::External;
    cfg.output = OutputKind::WarpedGray;
    cfg = content_sized(cfg, spec.content);
    SmootherState st = cfg.make_smoother();
    const GrayFrame mask = mask_to_gray(r.gt_mask);
    const FrameResult out = process_frame(r.frame, cfg, st, &mask);
    EXPECT_LE(out.quad.max_corner_distance(r.gt_quad), 1.0);
    ASSERT_TRUE(out.output.same_size(spec.content));
    EXPECT_LT(mean_abs_diff(out.output, spec.content, 2), 5.0);
    EXPECT_FALSE(out.low_confidence);
  }
}

TEST(ProcessFrame, MirrorEquivariance) {
  const bench::SceneSpec spec = bench::random_scene(610, {});
  const bench::SceneSpec mirrored = bench::mirror_scene(spec, 1280);
  PipelineConfig right;
  PipelineConfig left;
  left.left_handed = true;
  SmootherState a = right.make_smoother(), b = left.make_smoother();
  const FrameResult ra = process_frame(bench::render_scene(spec, 1280, 720).frame, right, a);
  const FrameResult rb =
      process_frame(bench::render_scene(mirrored, 1280, 720).frame, left, b);
  EXPECT_LT(mean_abs_diff(ra.output, rb.output), 2.0);
  EXPECT_LE(rb.quad.max_corner_distance(mirror_quad(ra.quad, 1280)), 1.5);
}

TEST(ProcessFrame, LeftHandedExternalMaskIsInFrameCoordinates) {
  const bench::SceneSpec spec = bench::random_scene(611, {});
  const auto r = bench::render_scene(spec, 1280, 720);
  const GrayFrame mask = mask_to_gray(r.gt_mask);
  PipelineConfig cfg;
  cfg.segmentation = SegmentationKind::External;
  cfg.left_handed = true;
  SmootherState st = cfg.make_smoother();
  EXPECT_LE(process_frame(r.frame, cfg, st, &mask).quad.max_corner_distance(r.gt_quad),
            1.0);
}

TEST(ProcessFrame, DarkFrameWithoutHistoryFails) {
  PipelineConfig cfg;
  SmootherState st = cfg.make_smoother();
  try {
    process_frame(GrayFrame(320, 240, 5), cfg, st);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoPaperFound);
  }
}

TEST(ProcessFrame, ExternalMaskErrors) {
  PipelineConfig cfg;
  cfg.segmentation = SegmentationKind::External;
  SmootherState st = cfg.make_smoother();
  const GrayFrame mask(10, 10, 255);
  EXPECT_THROW(process_frame(GrayFrame(20, 20, 0), cfg, st, &mask), Error);
  EXPECT_THROW(process_frame(GrayFrame(20, 20, 0), cfg, st), Error);
}

TEST(ProcessFrame, ColorMatchesLuma) {
  const auto r = bench::render_scene(bench::random_scene(612, {}), 1280, 720);
  ColorFrame color(1280, 720);
  for (int y = 0; y < 720; ++y)
    for (int x = 0; x < 1280; ++x)
      for (int c = 0; c < 3; ++c) color(x, y, c) = r.frame(x, y);
  PipelineConfig cfg;
  SmootherState a = cfg.make_smoother(), b = cfg.make_smoother();
  EXPECT_EQ(process_frame(color, cfg, a).output, process_frame(r.frame, cfg, b).output);
}

TEST(ProcessFrame, InkOutputSize) {
  const auto r = bench::render_scene(bench::random_scene(613, {}), 1280, 720);
  PipelineConfig cfg;
  SmootherState st = cfg.make_smoother();
  const FrameResult out = process_frame(r.frame, cfg, st);
  EXPECT_EQ(out.output.width(), 840);
  EXPECT_EQ(out.output.height(), 1188);
  for (auto v : out.output.data()) ASSERT_TRUE(v == 0 || v == 255);
}

TEST(RunStream, TenFrames) {
  VectorSource src(still_sequence(bench::random_scene(620, {}), 10));
  VectorSink sink;
  std::ostringstream corners;
  const StreamSummary s = run_stream(src, sink, PipelineConfig{}, nullptr, &corners);
  EXPECT_EQ(s.frames, 10u);
  EXPECT_EQ(s.failures, 0u);
  EXPECT_EQ(sink.frames.size(), 10u);
  EXPECT_TRUE(s.any_quad());
  EXPECT_GT(s.mean.total_ms(), 0.0);
  std::istringstream lines(corners.str());
  std::string line;
  long expected = 0;
  while (std::getline(lines, line)) {
    const auto parsed = parse_corner_line(line);
    ASSERT_TRUE(parsed);
    EXPECT_EQ(parsed->first, expected++);
  }
  EXPECT_EQ(expected, 10);
  for (const auto& f : sink.frames) EXPECT_TRUE(f.same_size(sink.frames[0]));
}

TEST(RunStream, DarkFrameHoldsPreviousQuad) {
  auto frames = still_sequence(bench::random_scene(621, {}), 6);
  frames[4] = GrayFrame(1280, 720, 3);
  VectorSource src(frames);
  VectorSink sink;
  std::ostringstream corners;
  const StreamSummary s = run_stream(src, sink, PipelineConfig{}, nullptr, &corners);
  EXPECT_EQ(s.frames, 6u);
  EXPECT_EQ(s.failures, 0u);
  EXPECT_EQ(s.low_confidence, 1u);
  std::istringstream lines(corners.str());
  std::vector<Quadd> quads;
  for (std::string line; std::getline(lines, line);) quads.push_back(parse_corner_line(line)->second);
  ASSERT_EQ(quads.size(), 6u);
  EXPECT_EQ(quads[4], quads[3]);
}

TEST(RunStream, EmptyInput) {
  VectorSource src({});
  VectorSink sink;
  const StreamSummary s = run_stream(src, sink, PipelineConfig{});
  EXPECT_EQ(s.frames, 0u);
  EXPECT_TRUE(sink.frames.empty());
  EXPECT_FALSE(s.any_quad());
}

TEST(RunStream, LeadingFailuresWriteBlankFrames) {
  auto frames = still_sequence(bench::random_scene(622, {}), 3);
  frames[0] = GrayFrame(1280, 720, 0);
  VectorSource src(frames);
  VectorSink sink;
  const StreamSummary s = run_stream(src, sink, PipelineConfig{});
  EXPECT_EQ(s.failures, 1u);
  ASSERT_EQ(s.errors.size(), 1u);
  EXPECT_EQ(sink.frames[0], GrayFrame(840, 1188, 255));
  EXPECT_TRUE(sink.frames[1].same_size(sink.frames[0]));
}

TEST(RunStream, ExternalMasksNeedSource) {
  VectorSource src({});
  VectorSink sink;
  PipelineConfig cfg;
  cfg.segmentation = SegmentationKind::External;
  EXPECT_THROW(run_stream(src, sink, cfg), Error);
}

TEST(RunStream, Deterministic) {
  const auto frames = still_sequence(bench::random_scene(623, {}), 4);
  std::ostringstream c1, c2;
  VectorSource s1(frames), s2(frames);
  VectorSink k1, k2;
  run_stream(s1, k1, PipelineConfig{}, nullptr, &c1);
  run_stream(s2, k2, PipelineConfig{}, nullptr, &c2);
  EXPECT_EQ(k1.frames, k2.frames);
  EXPECT_EQ(c1.str(), c2.str());
}

TEST(Directories, SourceOrderAndSink) {
  const fs::path dir = fs::temp_directory_path() / "papertab_dirs";
  fs::remove_all(dir);
  fs::create_directories(dir);
  pnm::write_file(dir / "frame_000002.pgm", GrayFrame(2, 2, 2));
  pnm::write_file(dir / "frame_000000.pgm", GrayFrame(2, 2, 0));
  pnm::write_file(dir / "frame_000001.ppm", ColorFrame(2, 2, 1));
  pnm::write_file(dir / "mask_000000.pgm", GrayFrame(2, 2, 9));
  pnm::write_file(dir / "frame_12.pgm", GrayFrame(2, 2, 9));
  DirectorySource src(dir, "frame");
  for (int i = 0; i < 3; ++i) {
    auto f = src.next();
    ASSERT_TRUE(f);
    EXPECT_EQ(pnm::as_gray(*f)(0, 0), i);
  }
  EXPECT_FALSE(src.next());
  EXPECT_THROW(DirectorySource(dir / "missing", "frame"), Error);

  DirectorySink sink(dir / "out");
  sink.write(GrayFrame(3, 3, 7));
  sink.write(GrayFrame(3, 3, 8));
  EXPECT_TRUE(fs::exists(dir / "out" / "frame_000000.pgm"));
  EXPECT_EQ(pnm::as_gray(pnm::read_file(dir / "out" / "frame_000001.pgm"))(0, 0), 8);
  fs::remove_all(dir);
}

TEST(PipelineConfig, Validation) {
  PipelineConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.output_height = 15;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.window = 8;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.alpha = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.paper = RectMode::fixed(20.0);
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.min_area = 9;
  EXPECT_EQ(cfg.cleanup_for(840, 1188).min_area, 9u);
  EXPECT_EQ(cfg.cleanup_for(840, 1188).window, 27);
}

}  // namespace
}  // namespace papertab
