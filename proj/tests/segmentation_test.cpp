#include "papertab/segmentation.hpp"

#include <gtest/gtest.h>

#include "papertab/bench.hpp"
#include "papertab/maskquad.hpp"

namespace papertab {
namespace {

bench::SceneSpec plain_scene(std::uint64_t seed) {
  bench::SceneSpec spec = bench::random_scene(seed, {});
  spec.background_luma = 60;
  spec.paper_luma = 230;
  return spec;
}

TEST(Otsu, TwoLevels) {
  GrayFrame g(10, 1, std::vector<std::uint8_t>{10, 10, 10, 10, 10, 200, 200, 200, 200, 200});
  const auto t = otsu_threshold(histogram(g));
  ASSERT_TRUE(t);
  EXPECT_GE(*t, 10);
  EXPECT_LT(*t, 200);
  const auto means = otsu_class_means(histogram(g), *t);
  EXPECT_DOUBLE_EQ(means[0], 10.0);
  EXPECT_DOUBLE_EQ(means[1], 200.0);
  EXPECT_FALSE(otsu_threshold(histogram(GrayFrame(4, 4, 77))));
}

TEST(ConvexHull, DropsInteriorAndCollinear) {
  std::vector<PixelPos> pts = {PixelPos(0, 0), PixelPos(5, 0), PixelPos(10, 0),
                               PixelPos(10, 10), PixelPos(0, 10), PixelPos(4, 6)};
  const auto hull = convex_hull(pts);
  EXPECT_EQ(hull.size(), 4u);
}

TEST(ClassicalSegment, SyntheticQuadIoU) {
  for (int s = 0; s < 5; ++s) {
    const bench::SceneSpec spec = plain_scene(40 + s);
    const auto r = bench::render_scene(spec, 1280, 720);
    EXPECT_GE(mask_iou(classical_segment(r.frame), r.gt_mask), 0.99);
  }
}

TEST(ClassicalSegment, UniformFrameFails) {
  try {
    classical_segment(GrayFrame(64, 48, 128));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoPaperFound);
  }
}

TEST(ClassicalSegment, FaintModesFail) {
  GrayFrame g(64, 48, 100);
  for (int y = 10; y < 40; ++y)
    for (int x = 10; x < 50; ++x) g(x, y) = 110;
  EXPECT_THROW(classical_segment(g), Error);
}

TEST(ClassicalSegment, HullRestoresOcclusion) {
  bench::RandomSceneOptions opts;
  opts.occluders = true;
  for (int s = 0; s < 5; ++s) {
    const bench::SceneSpec spec = bench::random_scene(60 + s, opts);
    const auto [frac, corner] = bench::occlusion_stats(spec, 1280, 720);
    ASSERT_GT(frac, 0.0);
    ASSERT_LE(frac, 0.2);
    ASSERT_FALSE(corner);
    const auto r = bench::render_scene(spec, 1280, 720);
    const BinaryMask m = classical_segment(r.frame);
    EXPECT_GE(mask_iou(m, r.gt_mask), 0.95);
  }
}

TEST(ClassicalSegment, OutputIsConvexHullFill) {
  const auto r = bench::render_scene(plain_scene(70), 1280, 720);
  const BinaryMask m = classical_segment(r.frame);
  // Every row of a convex region is a single run.
  for (int y = 0; y < m.height(); ++y) {
    int runs = 0;
    for (int x = 0; x < m.width(); ++x) runs += m(x, y) && (x == 0 || !m(x - 1, y));
    EXPECT_LE(runs, 1);
  }
}

TEST(ClassicalSegment, ConstantShiftInvariance) {
  bench::SceneSpec spec = plain_scene(71);
  spec.noise_sigma = 0.0;
  const auto r = bench::render_scene(spec, 1280, 720);
  GrayFrame shifted = r.frame;
  for (auto& v : shifted.data()) v = static_cast<std::uint8_t>(std::min(255, v + 20));
  EXPECT_EQ(classical_segment(shifted), classical_segment(r.frame));
}

TEST(ExternalMask, ThresholdAt128) {
  GrayFrame g(3, 1, std::vector<std::uint8_t>{127, 128, 255});
  const BinaryMask m = binarize_external_mask(g, 3, 1);
  EXPECT_FALSE(m(0, 0));
  EXPECT_TRUE(m(1, 0));
  EXPECT_TRUE(m(2, 0));
  EXPECT_EQ(count_foreground(binarize_external_mask(GrayFrame(4, 4, 255), 4, 4)), 16u);
  EXPECT_EQ(count_foreground(binarize_external_mask(GrayFrame(4, 4, 127), 4, 4)), 0u);
}

TEST(ExternalMask, DimensionMismatch) {
  try {
    binarize_external_mask(GrayFrame(4, 4, 0), 5, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

}  // namespace
}  // namespace papertab
