#pragma once

// Synthetic desk scenes with known geometry, and the binarized RMSE used to
// score rectified output against overhead ground truth.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "papertab/geometry.hpp"
#include "papertab/raster.hpp"

namespace papertab::bench {

struct EllipseOccluder {
  Point2d center;
  double rx = 0.0;
  double ry = 0.0;
  std::uint8_t luma = 80;
};

struct PolygonOccluder {
  std::vector<Point2d> vertices;  // convex, any orientation
  std::uint8_t luma = 80;
};

using Occluder = std::variant<EllipseOccluder, PolygonOccluder>;

struct SceneSpec {
  GrayFrame content;  // overhead view of the written sheet
  Quadd paper = Quadd::from_ordered(
      {Point2d(0, 0), Point2d(1, 0), Point2d(1, 1), Point2d(0, 1)});
  int background_luma = 60;
  int paper_luma = 230;
  std::vector<Occluder> occluders;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct RenderedScene {
  GrayFrame frame;
  BinaryMask gt_mask;  // the full paper quad, occluders ignored
  Quadd gt_quad;
  Homographyd scene_to_content;
  bool corner_occluded = false;
};

/// Renders the scene: desk, paper quad carrying the content through the
/// exact content-rect -> quad homography, occluders, then seeded Gaussian
/// noise. Throws InvalidSpec when the quad leaves the frame or the paper is
/// less than 40 levels brighter than the desk.
RenderedScene render_scene(const SceneSpec& spec, int width, int height);

/// True when the pixel center lies inside or on the quad.
bool inside_quad(const Quadd& quad, double x, double y);

/// Ground-truth mask of a quad by per-pixel half-plane tests.
BinaryMask quad_mask(const Quadd& quad, int width, int height);

/// Procedural handwriting: anti-aliased pen strokes in lines on white.
GrayFrame render_writing(int width, int height, std::uint64_t seed,
                         double stroke_width = 0.0);

struct RandomSceneOptions {
  int frame_width = 1280;
  int frame_height = 720;
  int content_width = 420;
  int content_height = 594;
  double noise_sigma = 2.0;
  /// Occluders removing at most max_occluded_fraction of the paper and
  /// staying clear of every corner.
  bool occluders = false;
  double max_occluded_fraction = 0.2;
};

/// A tilted-sheet scene as seen by a laptop webcam, fully determined by
/// the seed.
SceneSpec random_scene(std::uint64_t seed, const RandomSceneOptions& opts);

/// The same desk mirrored left-right with the writing kept readable: the
/// quad and occluders are mirrored, the content is not.
SceneSpec mirror_scene(const SceneSpec& spec, int frame_width);

/// Fraction of the paper quad covered by occluders, and whether any corner
/// is covered.
std::pair<double, bool> occlusion_stats(const SceneSpec& spec, int width,
                                        int height);

/// Otsu binarization to {0, 1} (bright = 1); single-level frames split at
/// 128.
BinaryMask binarize(const GrayFrame& gray);

/// sqrt(mean((bin(f_o) - bin(resize(f_d)))^2)), f_d resized to f_o first.
double rmse(const GrayFrame& f_o, const GrayFrame& f_d);

struct EvalReport {
  std::vector<double> values;
  double mean = 0.0;
  std::size_t count = 0;
};

/// Throws EmptyBatch on an empty list.
EvalReport batch_eval(
    const std::vector<std::pair<GrayFrame, GrayFrame>>& pairs);

/// Flat `key = value` scene description. Recognized keys:
///   width, height            frame size (default 1280 x 720)
///   seed                     integer, drives all randomness
///   background, paper        luma levels
///   noise_sigma              Gaussian noise std-dev in luma levels
///   quad                     x_tl y_tl x_tr y_tr x_br y_br x_bl y_bl
///   content                  path of a P5 overhead image
///   content_width, content_height   size of procedural writing
///   occluder                 `ellipse cx cy rx ry luma` or
///                            `polygon luma x1 y1 x2 y2 ...` (repeatable)
///   random_occluders         0/1, seeded occluders clear of the corners
///   frames                   number of frames (noise reseeded per frame)
/// Unset geometry is drawn from random_scene(seed).
struct SpecFile {
  SceneSpec scene;
  int width = 1280;
  int height = 720;
  int frames = 1;
};

SpecFile parse_spec(std::istream& in);

/// Writes frame_%06d.pgm, mask_%06d.pgm, content.pgm and corners.txt.
void render_to_dir(const SpecFile& spec, const std::filesystem::path& dir);

/// Scores every `<name>_o.pgm` / `<name>_d.pgm` pair in a directory and
/// prints `name<TAB>rmse` rows followed by `mean` and `count`.
EvalReport eval_dir(const std::filesystem::path& dir, std::ostream& out);

}  // namespace papertab::bench
