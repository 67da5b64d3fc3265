#include "papertab/maskquad.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "papertab/cleanup.hpp"

namespace papertab {

namespace {

// Neighbor offsets in clockwise screen order starting east (y down).
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

int direction_of(int dx, int dy) {
  for (int d = 0; d < 8; ++d) {
    if (kDx[d] == dx && kDy[d] == dy) return d;
  }
  return -1;
}

struct Step {
  PixelPos next;
  int back;  // direction from `next` to the last background pixel scanned
};

// Scans the 8-neighborhood of p clockwise, starting just after the
// backtrack direction, and stops at the first foreground pixel.
std::optional<Step> moore_step(const BinaryMask& region, const PixelPos& p,
                               int back) {
  for (int k = 1; k <= 8; ++k) {
    const int d = (back + k) % 8;
    const int x = p.x() + kDx[d];
    const int y = p.y() + kDy[d];
    if (!region.contains(x, y) || !region(x, y)) continue;
    const int prev = (d + 7) % 8;
    const int bx = p.x() + kDx[prev] - x;
    const int by = p.y() + kDy[prev] - y;
    return Step{PixelPos(x, y), direction_of(bx, by)};
  }
  return std::nullopt;
}

double distance_to_line(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                        const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len = ab.norm();
  if (len == 0.0) return (p - a).norm();
  return std::abs(ab.x() * (p.y() - a.y()) - ab.y() * (p.x() - a.x())) / len;
}

// Marks the vertices Douglas-Peucker keeps on the open chain idx[0..n-1].
void douglas_peucker(const Contour& contour, const std::vector<int>& idx,
                     double epsilon, std::vector<std::uint8_t>& keep) {
  std::vector<std::pair<int, int>> stack{{0, static_cast<int>(idx.size()) - 1}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi - lo < 2) continue;
    const Eigen::Vector2d a = contour[idx[lo]].cast<double>();
    const Eigen::Vector2d b = contour[idx[hi]].cast<double>();
    double best = -1.0;
    int best_i = lo;
    for (int i = lo + 1; i < hi; ++i) {
      const double d = distance_to_line(contour[idx[i]].cast<double>(), a, b);
      if (d > best) {
        best = d;
        best_i = i;
      }
    }
    if (best > epsilon) {
      keep[idx[best_i]] = 1;
      stack.push_back({lo, best_i});
      stack.push_back({best_i, hi});
    }
  }
}

int farthest_from(const Contour& contour, const PixelPos& p) {
  int best = 0;
  long best_d = -1;
  for (std::size_t i = 0; i < contour.size(); ++i) {
    const long d = (contour[i] - p).squaredNorm();
    if (d > best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Quadd extreme_point_quad(const Contour& contour) {
  auto pick = [&](auto key) {
    return *std::min_element(contour.begin(), contour.end(),
                             [&](const PixelPos& a, const PixelPos& b) {
                               return key(a) < key(b);
                             });
  };
  const PixelPos tl = pick([](const PixelPos& p) { return p.x() + p.y(); });
  const PixelPos tr = pick([](const PixelPos& p) { return p.y() - p.x(); });
  const PixelPos br = pick([](const PixelPos& p) { return -(p.x() + p.y()); });
  const PixelPos bl = pick([](const PixelPos& p) { return p.x() - p.y(); });
  return order_corners<double>({tl.cast<double>(), tr.cast<double>(),
                                br.cast<double>(), bl.cast<double>()});
}

// Total-least-squares line through a run of contour pixels, as a point on
// the line and a unit direction.
std::optional<std::pair<Eigen::Vector2d, Eigen::Vector2d>> fit_line(
    const Contour& contour, int first, int count) {
  const int n = static_cast<int>(contour.size());
  if (count < 2) return std::nullopt;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (int k = 0; k < count; ++k) {
    mean += contour[(first + k) % n].cast<double>();
  }
  mean /= count;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (int k = 0; k < count; ++k) {
    const Eigen::Vector2d d = contour[(first + k) % n].cast<double>() - mean;
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  return std::make_pair(mean, Eigen::Vector2d(eig.eigenvectors().col(1)));
}

std::optional<Eigen::Vector2d> intersect(
    const std::pair<Eigen::Vector2d, Eigen::Vector2d>& a,
    const std::pair<Eigen::Vector2d, Eigen::Vector2d>& b) {
  const double denom = a.second.x() * b.second.y() - a.second.y() * b.second.x();
  if (std::abs(denom) < 1e-9) return std::nullopt;
  const Eigen::Vector2d d = b.first - a.first;
  const double t = (d.x() * b.second.y() - d.y() * b.second.x()) / denom;
  return Eigen::Vector2d(a.first + t * a.second);
}

// Replaces each simplified vertex by the intersection of lines fitted to the
// contour runs on either side of it, trimming the ends of each run where
// the rasterized corner rounds off. Vertices whose refit is unavailable or
// strays more than a few pixels keep their pixel position.
Quadd refine_corners(const Contour& contour, const Quadd& coarse) {
  const int n = static_cast<int>(contour.size());
  std::array<int, 4> at{};
  for (int i = 0; i < 4; ++i) {
    long best = -1;
    for (int k = 0; k < n; ++k) {
      const Eigen::Vector2i c = coarse[i].cast<int>();
      const long d = (contour[k] - c).squaredNorm();
      if (best < 0 || d < best) {
        best = d;
        at[i] = k;
      }
    }
  }
  std::array<std::optional<std::pair<Eigen::Vector2d, Eigen::Vector2d>>, 4>
      edges;
  for (int i = 0; i < 4; ++i) {
    const int from = at[i];
    const int len = ((at[(i + 1) % 4] - from) % n + n) % n;
    const int trim = std::max(2, len / 10);
    edges[i] = fit_line(contour, from + trim, len - 2 * trim + 1);
  }
  Quadd::Corners refined = coarse.corners();
  for (int i = 0; i < 4; ++i) {
    const auto& before = edges[(i + 3) % 4];
    const auto& after = edges[i];
    if (!before || !after) continue;
    const auto p = intersect(*before, *after);
    if (p && (*p - coarse[i]).norm() <= 3.0) refined[i] = *p;
  }
  try {
    return Quadd::from_ordered(refined);
  } catch (const Error&) {
    return coarse;
  }
}

}  // namespace

BinaryMask largest_region(const BinaryMask& mask) {
  const Labeling labeling = label_components(mask);
  if (labeling.components.empty()) {
    throw Error(ErrorCode::EmptyMask, "mask has no foreground");
  }
  const auto best = std::max_element(
      labeling.components.begin(), labeling.components.end(),
      [](const ComponentStats& a, const ComponentStats& b) {
        return a.area < b.area;
      });
  BinaryMask out(mask.width(), mask.height());
  const auto& labels = labeling.labels.data();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.data()[i] = labels[i] == best->label;
  }
  return out;
}

Contour trace_contour(const BinaryMask& region) {
  std::optional<PixelPos> start;
  for (int y = 0; y < region.height() && !start; ++y) {
    for (int x = 0; x < region.width(); ++x) {
      if (region(x, y)) {
        start = PixelPos(x, y);
        break;
      }
    }
  }
  if (!start) throw Error(ErrorCode::EmptyMask, "region has no foreground");

  const PixelPos p0 = *start;
  Contour contour{p0};
  // Nothing lies above or to the left of p0, so the west neighbor is a
  // valid initial backtrack.
  const auto first = moore_step(region, p0, 4);
  if (!first) return contour;

  const PixelPos second = first->next;
  PixelPos p = first->next;
  int back = first->back;
  const std::size_t limit = 4 * region.pixel_count() + 16;
  for (std::size_t guard = 0; guard < limit; ++guard) {
    const auto step = moore_step(region, p, back);
    if (p == p0 && step->next == second) break;
    contour.push_back(p);
    p = step->next;
    back = step->back;
  }
  return contour;
}

std::vector<PixelPos> simplify_closed(const Contour& contour, double epsilon) {
  const int n = static_cast<int>(contour.size());
  if (n <= 4) return contour;
  const int a = farthest_from(contour, contour[0]);
  const int b = farthest_from(contour, contour[a]);
  const int i0 = std::min(a, b);
  const int i1 = std::max(a, b);

  std::vector<std::uint8_t> keep(n, 0);
  keep[i0] = keep[i1] = 1;
  std::vector<int> chain;
  for (int i = i0; i <= i1; ++i) chain.push_back(i);
  douglas_peucker(contour, chain, epsilon, keep);
  chain.clear();
  for (int i = i1; i != i0 + n; ++i) chain.push_back(i % n);
  chain.push_back(i0);
  douglas_peucker(contour, chain, epsilon, keep);

  std::vector<PixelPos> out;
  for (int k = 0; k < n; ++k) {
    const int i = (i0 + k) % n;
    if (keep[i]) out.push_back(contour[i]);
  }
  return out;
}

Quadd fit_quad(const Contour& contour) {
  if (contour.empty()) {
    throw Error(ErrorCode::QuadFitFailed, "empty contour");
  }
  std::vector<PixelPos> vertices = contour;
  for (double eps = 1.0; vertices.size() > 4 && eps < 1e6; eps *= 2.0) {
    vertices = simplify_closed(contour, eps);
  }
  if (vertices.size() == 4) {
    try {
      return refine_corners(
          contour, order_corners<double>({vertices[0].cast<double>(),
                                          vertices[1].cast<double>(),
                                          vertices[2].cast<double>(),
                                          vertices[3].cast<double>()}));
    } catch (const Error&) {
      // fall through to the extreme-point heuristic
    }
  }
  try {
    return extreme_point_quad(contour);
  } catch (const Error& e) {
    throw Error(ErrorCode::QuadFitFailed, e.what());
  }
}

void SmootherState::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1]");
  }
  if (!(jump_threshold > 0.0 && jump_threshold < 0.5)) {
    throw Error(ErrorCode::InvalidConfig,
                "jump threshold must lie in (0, 0.5)");
  }
}

Quadd smooth_corners(SmootherState& state, const Quadd& quad,
                     double frame_diag) {
  if (!state.previous) {
    state.previous = quad;
    state.rejections = 0;
    return quad;
  }
  const Quadd& prev = *state.previous;
  if (prev.max_corner_distance(quad) > state.jump_threshold * frame_diag) {
    if (++state.rejections <= state.max_rejections) return prev;
    state.previous = quad;
    state.rejections = 0;
    return quad;
  }
  state.rejections = 0;
  Quadd::Corners blended;
  for (int i = 0; i < 4; ++i) {
    blended[i] = state.alpha * quad[i] + (1.0 - state.alpha) * prev[i];
  }
  try {
    state.previous = Quadd::from_ordered(blended);
  } catch (const Error&) {
    state.previous = quad;
  }
  return *state.previous;
}

}  // namespace papertab
