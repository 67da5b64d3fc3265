#include "papertab/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "papertab/pnm.hpp"
#include "papertab/segmentation.hpp"

namespace papertab::bench {

namespace {

constexpr std::uint8_t kInkLuma = 40;

bool inside_occluder(const Occluder& occ, double x, double y) {
  if (const auto* e = std::get_if<EllipseOccluder>(&occ)) {
    const double dx = (x - e->center.x()) / e->rx;
    const double dy = (y - e->center.y()) / e->ry;
    return dx * dx + dy * dy <= 1.0;
  }
  const auto& poly = std::get<PolygonOccluder>(occ).vertices;
  if (poly.size() < 3) return false;
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2d& a = poly[i];
    const Point2d& b = poly[(i + 1) % poly.size()];
    const double c =
        (b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x());
    pos |= c > 0;
    neg |= c < 0;
  }
  return !(pos && neg);
}

std::uint8_t occluder_luma(const Occluder& occ) {
  return std::visit([](const auto& o) { return o.luma; }, occ);
}

// Paints an anti-aliased round-capped segment onto white paper.
void draw_segment(GrayFrame& img, const Point2d& a, const Point2d& b,
                  double half_width) {
  const double pad = half_width + 1.0;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x(), b.x()) - pad)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(std::max(a.x(), b.x()) + pad)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - pad)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(std::max(a.y(), b.y()) + pad)));
  const Point2d ab = b - a;
  const double len2 = ab.squaredNorm();
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Point2d p(x, y);
      double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double d = (p - (a + t * ab)).norm();
      const double cover = std::clamp(half_width + 0.5 - d, 0.0, 1.0);
      if (cover <= 0.0) continue;
      const std::uint8_t v = to_u8(255.0 - cover * (255.0 - kInkLuma));
      img(x, y) = std::min(img(x, y), v);
    }
  }
}

std::vector<Occluder> random_occluders(std::mt19937_64& rng,
                                       const SceneSpec& spec, int width,
                                       int height, double max_fraction) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Quadd& q = spec.paper;
  const double size = std::sqrt(q.area());
  SceneSpec probe = spec;
  for (int attempt = 0; attempt < 60; ++attempt) {
    // A palm resting on the bottom or right edge, away from the corners,
    // with the forearm running off the bottom-right of the frame.
    const bool bottom = unit(rng) < 0.6;
    const double t = 0.3 + 0.4 * unit(rng);
    const Point2d edge_point =
        bottom ? Point2d(q.bl() + t * (q.br() - q.bl()))
               : Point2d(q.tr() + t * (q.br() - q.tr()));
    const double shrink = 1.0 - attempt / 80.0;
    EllipseOccluder palm;
    palm.rx = size * (0.16 + 0.16 * unit(rng)) * shrink;
    palm.ry = size * (0.12 + 0.12 * unit(rng)) * shrink;
    Point2d centroid = Point2d::Zero();
    for (const auto& c : q.corners()) centroid += c / 4.0;
    const Point2d inward = (centroid - edge_point).normalized();
    palm.center = edge_point + inward * (0.8 * unit(rng)) * palm.ry;
    palm.luma = static_cast<std::uint8_t>(70 + 40 * unit(rng));

    const Point2d exit(width - 1.0 - 0.1 * width * unit(rng), height - 1.0);
    const Point2d dir = (exit - palm.center).normalized();
    const Point2d normal(-dir.y(), dir.x());
    const double arm = 0.7 * std::min(palm.rx, palm.ry);
    PolygonOccluder forearm;
    forearm.luma = palm.luma;
    forearm.vertices = {palm.center + arm * normal, exit + 1.3 * arm * normal,
                        exit - 1.3 * arm * normal, palm.center - arm * normal};

    probe.occluders = {palm, forearm};
    const auto [fraction, corner] = occlusion_stats(probe, width, height);
    if (!corner && fraction > 0.0 && fraction <= max_fraction) {
      return probe.occluders;
    }
  }
  return {};
}

}  // namespace

bool inside_quad(const Quadd& quad, double x, double y) {
  for (int i = 0; i < 4; ++i) {
    const Point2d& a = quad[i];
    const Point2d& b = quad[(i + 1) % 4];
    // Clockwise on screen: the interior is where this cross is >= 0.
    if ((b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x()) < 0) {
      return false;
    }
  }
  return true;
}

BinaryMask quad_mask(const Quadd& quad, int width, int height) {
  BinaryMask mask(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) mask(x, y) = inside_quad(quad, x, y);
  }
  return mask;
}

GrayFrame render_writing(int width, int height, std::uint64_t seed,
                         double stroke_width) {
  GrayFrame img(width, height, 255);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (stroke_width <= 0.0) stroke_width = std::max(3.0, height / 110.0);
  const double half = stroke_width / 2.0;

  const double margin_x = 0.08 * width;
  const double margin_y = 0.08 * height;
  const double line_gap = std::max(4.0 * stroke_width, height / 14.0);
  const double glyph = 0.6 * line_gap;
  for (double base = margin_y + glyph; base < height - margin_y;
       base += line_gap) {
    double x = margin_x + unit(rng) * glyph;
    const double line_end = width - margin_x - unit(rng) * 0.3 * width;
    while (x < line_end) {
      // One word: a smooth squiggle wandering about the baseline.
      const int letters = 2 + static_cast<int>(unit(rng) * 5);
      const int steps = letters * 6;
      Point2d prev(x, base - glyph * 0.5);
      double phase = unit(rng) * 2.0 * std::numbers::pi;
      for (int s = 1; s <= steps && x < line_end; ++s) {
        x += glyph * 0.16;
        phase += 0.5 + 0.4 * unit(rng);
        const Point2d next(x, base - glyph * (0.5 + 0.45 * std::sin(phase)));
        draw_segment(img, prev, next, half);
        prev = next;
      }
      x += glyph * (0.6 + 0.6 * unit(rng));
    }
  }
  return img;
}

std::pair<double, bool> occlusion_stats(const SceneSpec& spec, int width,
                                        int height) {
  std::size_t paper = 0, covered = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!inside_quad(spec.paper, x, y)) continue;
      ++paper;
      for (const auto& occ : spec.occluders) {
        if (inside_occluder(occ, x, y)) {
          ++covered;
          break;
        }
      }
    }
  }
  bool corner = false;
  for (const auto& c : spec.paper.corners()) {
    for (int dy = -3; dy <= 3 && !corner; ++dy) {
      for (int dx = -3; dx <= 3 && !corner; ++dx) {
        for (const auto& occ : spec.occluders) {
          if (inside_occluder(occ, c.x() + dx, c.y() + dy)) corner = true;
        }
      }
    }
  }
  return {paper ? static_cast<double>(covered) / paper : 0.0, corner};
}

RenderedScene render_scene(const SceneSpec& spec, int width, int height) {
  if (width < 1 || height < 1 || spec.content.empty()) {
    throw Error(ErrorCode::InvalidSpec, "empty frame or content");
  }
  if (spec.paper_luma - spec.background_luma < 40 || spec.paper_luma > 255 ||
      spec.background_luma < 0) {
    throw Error(ErrorCode::InvalidSpec,
                "paper must be at least 40 levels brighter than the desk");
  }
  for (const auto& c : spec.paper.corners()) {
    if (c.x() < 0 || c.y() < 0 || c.x() > width - 1 || c.y() > height - 1) {
      throw Error(ErrorCode::InvalidSpec, "paper quad leaves the frame");
    }
  }

  const Quadd content_rect =
      rect_quad({spec.content.width(), spec.content.height()});
  const Homographyd content_to_scene =
      solve_homography(content_rect, spec.paper);
  RenderedScene out{GrayFrame(width, height,
                              static_cast<std::uint8_t>(spec.background_luma)),
                    quad_mask(spec.paper, width, height), spec.paper,
                    invert_homography(content_to_scene), false};

  const double scale = spec.paper_luma / 255.0;
  const double cmax_x = spec.content.width() - 1;
  const double cmax_y = spec.content.height() - 1;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!out.gt_mask(x, y)) continue;
      Point2d c = apply_homography(out.scene_to_content, Point2d(x, y));
      c.x() = std::clamp(c.x(), 0.0, cmax_x);
      c.y() = std::clamp(c.y(), 0.0, cmax_y);
      out.frame(x, y) =
          to_u8(scale * bilinear_sample(spec.content, c.x(), c.y(), 255));
    }
  }
  for (const auto& occ : spec.occluders) {
    const std::uint8_t luma = occluder_luma(occ);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (inside_occluder(occ, x, y)) out.frame(x, y) = luma;
      }
    }
  }
  if (spec.noise_sigma > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (auto& v : out.frame.data()) v = to_u8(v + noise(rng));
  }
  out.corner_occluded = occlusion_stats(spec, width, height).second;
  return out;
}

SceneSpec random_scene(std::uint64_t seed, const RandomSceneOptions& opts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  SceneSpec spec;
  spec.seed = seed;
  spec.noise_sigma = opts.noise_sigma;
  spec.background_luma = static_cast<int>(between(40, 80));
  spec.paper_luma = static_cast<int>(between(205, 240));
  spec.content = render_writing(opts.content_width, opts.content_height, seed);

  const double fw = opts.frame_width;
  const double fh = opts.frame_height;
  for (int attempt = 0;; ++attempt) {
    // A sheet seen from a lid tilted toward the desk: the far (top) edge is
    // shorter than the near one and the sheet is foreshortened vertically.
    const double vh = between(0.5, 0.75) * fh;
    const double bottom_w = vh * between(0.95, 1.3);
    const double top_w = bottom_w * between(0.65, 0.85);
    const double theta = between(-15.0, 15.0) * std::numbers::pi / 180.0;
    const Point2d center(fw / 2 + between(-0.1, 0.1) * fw,
                         fh / 2 + between(-0.08, 0.08) * fh);
    const Eigen::Rotation2Dd rot(theta);
    std::array<Point2d, 4> pts = {Point2d(-top_w / 2, -vh / 2),
                                  Point2d(top_w / 2, -vh / 2),
                                  Point2d(bottom_w / 2, vh / 2),
                                  Point2d(-bottom_w / 2, vh / 2)};
    bool inside = true;
    for (auto& p : pts) {
      p = center + rot * p +
          Point2d(between(-0.02, 0.02) * vh, between(-0.02, 0.02) * vh);
      inside &= p.x() >= 4 && p.y() >= 4 && p.x() <= fw - 5 && p.y() <= fh - 5;
    }
    if (!inside && attempt < 100) continue;
    spec.paper = order_corners(pts);
    break;
  }
  if (opts.occluders) {
    spec.occluders = random_occluders(rng, spec, opts.frame_width,
                                      opts.frame_height,
                                      opts.max_occluded_fraction);
  }
  return spec;
}

SceneSpec mirror_scene(const SceneSpec& spec, int frame_width) {
  SceneSpec out = spec;
  out.paper = mirror_quad(spec.paper, frame_width);
  const double axis = frame_width - 1;
  for (auto& occ : out.occluders) {
    if (auto* e = std::get_if<EllipseOccluder>(&occ)) {
      e->center.x() = axis - e->center.x();
    } else {
      for (auto& v : std::get<PolygonOccluder>(occ).vertices) {
        v.x() = axis - v.x();
      }
    }
  }
  return out;
}

BinaryMask binarize(const GrayFrame& gray) {
  const auto t = otsu_threshold(histogram(gray));
  const int threshold = t ? *t : 127;
  BinaryMask out(gray.width(), gray.height());
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = gray.data()[i] > threshold;
  }
  return out;
}

double rmse(const GrayFrame& f_o, const GrayFrame& f_d) {
  const BinaryMask a = binarize(f_o);
  const BinaryMask b = binarize(resize(f_d, f_o.width(), f_o.height()));
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    diff += a.data()[i] != b.data()[i];
  }
  return std::sqrt(static_cast<double>(diff) / a.data().size());
}

EvalReport batch_eval(
    const std::vector<std::pair<GrayFrame, GrayFrame>>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyBatch, "no pairs to score");
  EvalReport report;
  double sum = 0.0;
  for (const auto& [f_o, f_d] : pairs) {
    report.values.push_back(rmse(f_o, f_d));
    sum += report.values.back();
  }
  report.count = report.values.size();
  report.mean = sum / report.count;
  return report;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T v{};
  std::string rest;
  if (!(in >> v) || (in >> rest)) {
    throw Error(ErrorCode::InvalidSpec, "bad value for " + key + ": " + value);
  }
  return v;
}

std::vector<double> parse_numbers(const std::string& key,
                                  const std::string& value) {
  std::istringstream in(value);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) {
    throw Error(ErrorCode::InvalidSpec, "bad numbers for " + key);
  }
  return out;
}

Occluder parse_occluder(const std::string& value) {
  std::istringstream in(value);
  std::string kind;
  in >> kind;
  std::string rest;
  std::getline(in, rest);
  const auto nums = parse_numbers("occluder", rest);
  auto luma = [](double v) {
    if (v < 0 || v > 255) throw Error(ErrorCode::InvalidSpec, "bad luma");
    return static_cast<std::uint8_t>(v);
  };
  if (kind == "ellipse" && nums.size() == 5) {
    if (nums[2] <= 0 || nums[3] <= 0) {
      throw Error(ErrorCode::InvalidSpec, "ellipse radii must be positive");
    }
    return EllipseOccluder{Point2d(nums[0], nums[1]), nums[2], nums[3],
                           luma(nums[4])};
  }
  if (kind == "polygon" && nums.size() >= 7 && nums.size() % 2 == 1) {
    PolygonOccluder poly;
    poly.luma = luma(nums[0]);
    for (std::size_t i = 1; i < nums.size(); i += 2) {
      poly.vertices.emplace_back(nums[i], nums[i + 1]);
    }
    return poly;
  }
  throw Error(ErrorCode::InvalidSpec, "bad occluder: " + value);
}

}  // namespace

SpecFile parse_spec(std::istream& in) {
  SpecFile file;
  std::optional<std::uint64_t> seed;
  std::optional<int> background, paper;
  std::optional<double> noise;
  std::optional<Quadd> quad;
  std::optional<GrayFrame> content;
  int content_w = 420, content_h = 594;
  bool random_occ = false;
  std::vector<Occluder> occluders;

  std::string line;
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidSpec, "expected key = value: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "width") {
      file.width = parse_value<int>(key, value);
    } else if (key == "height") {
      file.height = parse_value<int>(key, value);
    } else if (key == "seed") {
      seed = parse_value<std::uint64_t>(key, value);
    } else if (key == "background") {
      background = parse_value<int>(key, value);
    } else if (key == "paper") {
      paper = parse_value<int>(key, value);
    } else if (key == "noise_sigma") {
      noise = parse_value<double>(key, value);
    } else if (key == "quad") {
      const auto v = parse_numbers(key, value);
      if (v.size() != 8) throw Error(ErrorCode::InvalidSpec, "quad needs 8 numbers");
      try {
        quad = Quadd::from_ordered({Point2d(v[0], v[1]), Point2d(v[2], v[3]),
                                    Point2d(v[4], v[5]), Point2d(v[6], v[7])});
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidSpec, e.what());
      }
    } else if (key == "content") {
      content = pnm::as_gray(pnm::read_file(value));
    } else if (key == "content_width") {
      content_w = parse_value<int>(key, value);
    } else if (key == "content_height") {
      content_h = parse_value<int>(key, value);
    } else if (key == "occluder") {
      occluders.push_back(parse_occluder(value));
    } else if (key == "random_occluders") {
      random_occ = parse_value<int>(key, value) != 0;
    } else if (key == "frames") {
      file.frames = parse_value<int>(key, value);
    } else {
      throw Error(ErrorCode::InvalidSpec, "unknown key: " + key);
    }
  }
  if (file.width < 16 || file.height < 16 || file.frames < 1 ||
      content_w < 16 || content_h < 16) {
    throw Error(ErrorCode::InvalidSpec, "sizes and frame count out of range");
  }

  RandomSceneOptions opts;
  opts.frame_width = file.width;
  opts.frame_height = file.height;
  opts.content_width = content_w;
  opts.content_height = content_h;
  SceneSpec& s = file.scene;
  s = random_scene(seed.value_or(0), opts);
  if (background) s.background_luma = *background;
  if (paper) s.paper_luma = *paper;
  if (noise) s.noise_sigma = *noise;
  if (quad) s.paper = *quad;
  if (content) s.content = *std::move(content);
  if (random_occ) {
    std::mt19937_64 rng(s.seed + 1);
    s.occluders = random_occluders(rng, s, file.width, file.height, 0.2);
  }
  s.occluders.insert(s.occluders.end(), occluders.begin(), occluders.end());
  return file;
}

void render_to_dir(const SpecFile& spec, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
  pnm::write_file(dir / "content.pgm", spec.scene.content);
  std::ofstream corners(dir / "corners.txt");
  if (!corners) throw Error(ErrorCode::IoError, "cannot write corners.txt");
  for (int i = 0; i < spec.frames; ++i) {
    SceneSpec s = spec.scene;
    s.seed = spec.scene.seed + static_cast<std::uint64_t>(i);
    const RenderedScene r = render_scene(s, spec.width, spec.height);
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06d.pgm", i);
    pnm::write_file(dir / name, r.frame);
    std::snprintf(name, sizeof(name), "mask_%06d.pgm", i);
    pnm::write_file(dir / name, mask_to_gray(r.gt_mask));
    corners << format_corner_line(i, r.gt_quad) << '\n';
  }
}

EvalReport eval_dir(const std::filesystem::path& dir, std::ostream& out) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  }
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    const std::string suffix = "_o.pgm";
    if (file.size() > suffix.size() &&
        file.compare(file.size() - suffix.size(), suffix.size(), suffix) == 0) {
      names.push_back(file.substr(0, file.size() - suffix.size()));
    }
  }
  std::sort(names.begin(), names.end());
  std::vector<std::pair<GrayFrame, GrayFrame>> pairs;
  for (const auto& name : names) {
    const auto d = dir / (name + "_d.pgm");
    if (!std::filesystem::exists(d)) {
      throw Error(ErrorCode::IoError, "missing output for pair " + name);
    }
    pairs.emplace_back(pnm::as_gray(pnm::read_file(dir / (name + "_o.pgm"))),
                       pnm::as_gray(pnm::read_file(d)));
  }
  const EvalReport report = batch_eval(pairs);
  out << "pair\trmse\n";
  char buf[64];
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f", report.values[i]);
    out << names[i] << '\t' << buf << '\n';
  }
  std::snprintf(buf, sizeof(buf), "%.6f", report.mean);
  out << "mean\t" << buf << '\n' << "count\t" << report.count << '\n';
  return report;
}

}  // namespace papertab::bench
