#pragma once

// Slow, obviously-correct reference implementations used as test oracles.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "papertab/cleanup.hpp"
#include "papertab/geometry.hpp"
#include "papertab/raster.hpp"

namespace papertab::oracle {

// Pixel < clipped window mean - C, evaluated by brute force in exact
// integer arithmetic.
inline BinaryMask naive_threshold(const GrayFrame& g, int window, int c) {
  const int r = window / 2;
  BinaryMask out(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      long sum = 0, count = 0;
      for (int v = std::max(0, y - r); v <= std::min(g.height() - 1, y + r); ++v) {
        for (int u = std::max(0, x - r); u <= std::min(g.width() - 1, x + r); ++u) {
          sum += g(u, v);
          ++count;
        }
      }
      out(x, y) = (g(x, y) + c) * count < sum;
    }
  }
  return out;
}

// 8-connected flood fill; labels in raster order of first pixel.
inline Image<std::int32_t, 1> flood_labels(const BinaryMask& m) {
  Image<std::int32_t, 1> labels(m.width(), m.height(), 0);
  std::int32_t next = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y) || labels(x, y)) continue;
      ++next;
      std::vector<std::pair<int, int>> stack{{x, y}};
      labels(x, y) = next;
      while (!stack.empty()) {
        const auto [px, py] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx, ny = py + dy;
            if (!m.contains(nx, ny) || !m(nx, ny) || labels(nx, ny)) continue;
            labels(nx, ny) = next;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  return labels;
}

// True when both label images induce the same partition of the pixels.
inline bool same_partition(const Image<std::int32_t, 1>& a,
                           const Image<std::int32_t, 1>& b) {
  if (!a.same_size(b)) return false;
  std::map<std::int32_t, std::int32_t> ab, ba;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const auto la = a.data()[i], lb = b.data()[i];
    if ((la == 0) != (lb == 0)) return false;
    if (la == 0) continue;
    auto [ia, fresh_a] = ab.emplace(la, lb);
    auto [ib, fresh_b] = ba.emplace(lb, la);
    if (ia->second != lb || ib->second != la) return false;
  }
  return true;
}

inline BinaryMask random_mask(std::mt19937_64& rng, int w, int h,
                              double density) {
  std::bernoulli_distribution on(density);
  BinaryMask m(w, h);
  for (auto& v : m.data()) v = on(rng);
  return m;
}

inline GrayFrame random_gray(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> level(0, 255);
  GrayFrame g(w, h);
  for (auto& v : g.data()) v = static_cast<std::uint8_t>(level(rng));
  return g;
}

// Random strictly convex quad: four points on a jittered ellipse.
inline std::array<Point2d, 4> random_convex_points(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const Point2d c(u(rng) * 1000 - 500, u(rng) * 1000 - 500);
    const double rx = 20 + u(rng) * 600, ry = 20 + u(rng) * 600;
    const double start = u(rng) * 2 * M_PI;
    std::array<Point2d, 4> pts;
    for (int i = 0; i < 4; ++i) {
      const double a = start + (i + 0.15 + 0.7 * u(rng)) * M_PI / 2;
      pts[i] = c + Point2d(rx * std::cos(a), ry * std::sin(a));
    }
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      const Point2d e1 = pts[(i + 1) % 4] - pts[i];
      const Point2d e2 = pts[(i + 2) % 4] - pts[(i + 1) % 4];
      ok = std::abs(e1.x() * e2.y() - e1.y() * e2.x()) > 1e-3 * e1.norm() * e2.norm();
    }
    if (ok) return pts;
  }
}

// Angle sort about the centroid, clockwise on screen, starting from
// min(x + y) with smaller y then smaller x breaking ties.
inline std::array<Point2d, 4> angle_sort(std::array<Point2d, 4> pts) {
  Point2d c = Point2d::Zero();
  for (const auto& p : pts) c += p;
  c /= 4.0;
  std::sort(pts.begin(), pts.end(), [&](const Point2d& a, const Point2d& b) {
    return std::atan2(a.y() - c.y(), a.x() - c.x()) <
           std::atan2(b.y() - c.y(), b.x() - c.x());
  });
  int first = 0;
  for (int i = 1; i < 4; ++i) {
    const double si = pts[i].x() + pts[i].y();
    const double sf = pts[first].x() + pts[first].y();
    if (si < sf || (si == sf && (pts[i].y() < pts[first].y() ||
                                 (pts[i].y() == pts[first].y() &&
                                  pts[i].x() < pts[first].x())))) {
      first = i;
    }
  }
  std::rotate(pts.begin(), pts.begin() + first, pts.end());
  return pts;
}

// Direct 8x8 DLT solve with full-pivot LU, no normalization.
inline Eigen::Matrix3d dlt_oracle(const Quadd& src, const Quadd& dst) {
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double x = src[i].x(), y = src[i].y();
    const double u = dst[i].x(), v = dst[i].y();
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
    b(2 * i) = u;
    b(2 * i + 1) = v;
  }
  const Eigen::Matrix<double, 8, 1> h = a.fullPivLu().solve(b);
  Eigen::Matrix3d m;
  m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  return m;
}

// Inverse via the adjugate, scaled so that entry (2,2) is 1.
inline Eigen::Matrix3d adjugate_inverse(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d adj;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int r0 = (c + 1) % 3, r1 = (c + 2) % 3;
      const int c0 = (r + 1) % 3, c1 = (r + 2) % 3;
      adj(r, c) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    }
  }
  return adj / adj(2, 2);
}

}  // namespace papertab::oracle
