#pragma once

// Planar projective geometry for paper rectification: corner ordering,
// the 4-point homography solve, point mapping and output sizing.
//
// Everything here is templated on the scalar type and built on fixed-size
// Eigen types. Pixel coordinates use the image convention: x to the right,
// y down, integer values at pixel centers.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "papertab/error.hpp"

namespace papertab {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Point2d = Point2<double>;

namespace detail {

template <typename Scalar>
constexpr Scalar kDegenerateTol = Scalar(1e-12);

template <typename Scalar>
Scalar cross(const Point2<Scalar>& a, const Point2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Twice the signed area of triangle (a, b, c); positive when a->b->c turns
// clockwise on screen (y down).
template <typename Scalar>
Scalar turn(const Point2<Scalar>& a, const Point2<Scalar>& b,
            const Point2<Scalar>& c) {
  return cross<Scalar>(b - a, c - b);
}

template <typename Scalar>
bool collinear(const Point2<Scalar>& a, const Point2<Scalar>& b,
               const Point2<Scalar>& c) {
  const Scalar scale = std::max<Scalar>(
      Scalar(1), (b - a).norm() * (c - b).norm());
  return std::abs(turn(a, b, c)) <= kDegenerateTol<Scalar> * scale;
}

/// Dense Gaussian elimination with partial pivoting. Throws SingularSystem
/// when the largest available pivot falls below the degeneracy tolerance.
template <typename Scalar, int N>
Eigen::Matrix<Scalar, N, 1> gauss_solve(Eigen::Matrix<Scalar, N, N> a,
                                        Eigen::Matrix<Scalar, N, 1> b) {
  for (int col = 0; col < N; ++col) {
    int pivot = col;
    for (int row = col + 1; row < N; ++row) {
      if (std::abs(a(row, col)) > std::abs(a(pivot, col))) pivot = row;
    }
    if (std::abs(a(pivot, col)) < kDegenerateTol<Scalar>) {
      throw Error(ErrorCode::SingularSystem, "rank-deficient linear system");
    }
    if (pivot != col) {
      a.row(col).swap(a.row(pivot));
      std::swap(b(col), b(pivot));
    }
    for (int row = col + 1; row < N; ++row) {
      const Scalar f = a(row, col) / a(col, col);
      if (f == Scalar(0)) continue;
      a.row(row).tail(N - col) -= f * a.row(col).tail(N - col);
      b(row) -= f * b(col);
    }
  }
  Eigen::Matrix<Scalar, N, 1> x;
  for (int row = N - 1; row >= 0; --row) {
    Scalar s = b(row);
    for (int k = row + 1; k < N; ++k) s -= a(row, k) * x(k);
    x(row) = s / a(row, row);
  }
  return x;
}

// Similarity that moves the centroid to the origin and the mean distance
// to sqrt(2). Conditions the 8x8 system for pixel-scale coordinates.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> normalizing_transform(
    const std::array<Point2<Scalar>, 4>& pts) {
  Point2<Scalar> c = Point2<Scalar>::Zero();
  for (const auto& p : pts) c += p;
  c /= Scalar(4);
  Scalar mean_dist = 0;
  for (const auto& p : pts) mean_dist += (p - c).norm();
  mean_dist /= Scalar(4);
  const Scalar s = std::sqrt(Scalar(2)) / mean_dist;
  Eigen::Matrix<Scalar, 3, 3> t;
  t << s, 0, -s * c.x(),
       0, s, -s * c.y(),
       0, 0, 1;
  return t;
}

}  // namespace detail

/// Four paper corners in the fixed order TL, TR, BR, BL.
///
/// A Quad is always strictly convex, traversed clockwise on screen, with an
/// area of at least one square pixel. Build one with order_corners() from
/// unordered points, or with from_ordered() when the order is already known.
template <typename Scalar>
class Quad {
 public:
  using Point = Point2<Scalar>;
  using Corners = std::array<Point, 4>;

  static Quad from_ordered(const Corners& corners) {
    for (const auto& p : corners) {
      if (!p.allFinite()) {
        throw Error(ErrorCode::DegenerateQuad, "non-finite corner");
      }
    }
    for (int i = 0; i < 4; ++i) {
      const Point& a = corners[i];
      const Point& b = corners[(i + 1) % 4];
      const Point& c = corners[(i + 2) % 4];
      if (detail::collinear(a, b, c) || detail::turn(a, b, c) <= 0) {
        throw Error(ErrorCode::DegenerateQuad,
                    "corners are not strictly convex and clockwise");
      }
    }
    Quad q(corners);
    if (q.area() < Scalar(1)) {
      throw Error(ErrorCode::DegenerateQuad, "quad area below one pixel");
    }
    return q;
  }

  const Point& operator[](int i) const { return corners_[i]; }
  const Point& tl() const { return corners_[0]; }
  const Point& tr() const { return corners_[1]; }
  const Point& br() const { return corners_[2]; }
  const Point& bl() const { return corners_[3]; }
  const Corners& corners() const { return corners_; }

  Scalar area() const {
    Scalar twice = 0;
    for (int i = 0; i < 4; ++i) {
      twice += detail::cross(corners_[i], corners_[(i + 1) % 4]);
    }
    return std::abs(twice) / Scalar(2);
  }

  /// Largest corner displacement between two quads.
  Scalar max_corner_distance(const Quad& other) const {
    Scalar d = 0;
    for (int i = 0; i < 4; ++i) {
      d = std::max(d, (corners_[i] - other.corners_[i]).norm());
    }
    return d;
  }

  friend bool operator==(const Quad& a, const Quad& b) {
    return a.corners_ == b.corners_;
  }

 private:
  explicit Quad(const Corners& corners) : corners_(corners) {}

  Corners corners_;
};

using Quadd = Quad<double>;

/// Canonicalizes four unordered points into TL, TR, BR, BL.
///
/// Points are sorted clockwise by angle about their centroid; TL is the
/// point with the smallest x + y, ties going to the smaller y and then the
/// smaller x. Throws DegenerateQuad if any three points are collinear, the
/// points are not in convex position, or the area is below one pixel.
template <typename Scalar>
Quad<Scalar> order_corners(std::array<Point2<Scalar>, 4> pts) {
  for (const auto& p : pts) {
    if (!p.allFinite()) {
      throw Error(ErrorCode::DegenerateQuad, "non-finite corner");
    }
  }
  for (int skip = 0; skip < 4; ++skip) {
    std::array<int, 3> idx{};
    for (int i = 0, k = 0; i < 4; ++i) {
      if (i != skip) idx[k++] = i;
    }
    if (detail::collinear(pts[idx[0]], pts[idx[1]], pts[idx[2]])) {
      throw Error(ErrorCode::DegenerateQuad, "three corners are collinear");
    }
  }

  Point2<Scalar> c = Point2<Scalar>::Zero();
  for (const auto& p : pts) c += p;
  c /= Scalar(4);
  // With y pointing down, increasing atan2 angle walks clockwise on screen.
  std::sort(pts.begin(), pts.end(),
            [&c](const Point2<Scalar>& a, const Point2<Scalar>& b) {
              return std::atan2(a.y() - c.y(), a.x() - c.x()) <
                     std::atan2(b.y() - c.y(), b.x() - c.x());
            });

  auto before = [](const Point2<Scalar>& a, const Point2<Scalar>& b) {
    const Scalar sa = a.x() + a.y();
    const Scalar sb = b.x() + b.y();
    if (sa != sb) return sa < sb;
    if (a.y() != b.y()) return a.y() < b.y();
    return a.x() < b.x();
  };
  const auto first = std::min_element(pts.begin(), pts.end(), before);
  std::rotate(pts.begin(), first, pts.end());
  return Quad<Scalar>::from_ordered(pts);
}

/// A nonsingular 3x3 projective map in canonical scale (a33 == 1).
template <typename Scalar>
class Homography {
 public:
  using Matrix = Eigen::Matrix<Scalar, 3, 3>;

  Homography() : m_(Matrix::Identity()) {}

  /// Rescales so a33 == 1. Throws SingularSystem if that is impossible or
  /// the canonical matrix is singular.
  explicit Homography(const Matrix& m) {
    if (!m.allFinite() || std::abs(m(2, 2)) < detail::kDegenerateTol<Scalar>) {
      throw Error(ErrorCode::SingularSystem,
                  "matrix cannot be canonicalized to a33 = 1");
    }
    m_ = m / m(2, 2);
    m_(2, 2) = Scalar(1);
    if (std::abs(m_.determinant()) <= detail::kDegenerateTol<Scalar>) {
      throw Error(ErrorCode::SingularSystem, "singular homography");
    }
  }

  static Homography identity() { return Homography(); }

  const Matrix& matrix() const { return m_; }
  Scalar operator()(int row, int col) const { return m_(row, col); }

  /// Matrix product, canonicalized: (a * b) applies b first.
  friend Homography operator*(const Homography& a, const Homography& b) {
    return Homography(a.m_ * b.m_);
  }

 private:
  Matrix m_;
};

using Homographyd = Homography<double>;

/// Maps p through h: (x', y', w') = h (u, v, 1), returns (x'/w', y'/w').
template <typename Scalar>
Point2<Scalar> apply_homography(const Homography<Scalar>& h,
                                const Point2<Scalar>& p) {
  const Eigen::Matrix<Scalar, 3, 1> v =
      h.matrix() * Eigen::Matrix<Scalar, 3, 1>(p.x(), p.y(), Scalar(1));
  if (std::abs(v.z()) < detail::kDegenerateTol<Scalar>) {
    throw Error(ErrorCode::PointAtInfinity, "point maps to infinity");
  }
  return v.template head<2>() / v.z();
}

/// Solves the homography taking each src corner onto the matching dst
/// corner. The eight unknowns a11..a32 come from an 8x8 system solved by
/// Gaussian elimination on Hartley-normalized coordinates; a33 is fixed to
/// one.
template <typename Scalar>
Homography<Scalar> solve_homography(const Quad<Scalar>& src,
                                    const Quad<Scalar>& dst) {
  using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
  const Mat3 ts = detail::normalizing_transform(src.corners());
  const Mat3 td = detail::normalizing_transform(dst.corners());

  Eigen::Matrix<Scalar, 8, 8> a;
  Eigen::Matrix<Scalar, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const Point2<Scalar> s =
        (ts * src[i].homogeneous()).template head<2>();
    const Point2<Scalar> d =
        (td * dst[i].homogeneous()).template head<2>();
    const Scalar u = s.x(), v = s.y(), x = d.x(), y = d.y();
    a.row(2 * i) << u, v, 1, 0, 0, 0, -u * x, -v * x;
    a.row(2 * i + 1) << 0, 0, 0, u, v, 1, -u * y, -v * y;
    b(2 * i) = x;
    b(2 * i + 1) = y;
  }
  const Eigen::Matrix<Scalar, 8, 1> h = detail::gauss_solve<Scalar, 8>(a, b);

  Mat3 hn;
  hn << h(0), h(1), h(2),
        h(3), h(4), h(5),
        h(6), h(7), Scalar(1);
  return Homography<Scalar>(td.inverse() * hn * ts);
}

template <typename Scalar>
Homography<Scalar> invert_homography(const Homography<Scalar>& h) {
  const Scalar det = h.matrix().determinant();
  if (std::abs(det) < detail::kDegenerateTol<Scalar>) {
    throw Error(ErrorCode::SingularSystem, "homography is not invertible");
  }
  return Homography<Scalar>(h.matrix().inverse());
}

/// Output rectangle sizing: either a fixed paper aspect (w/h) at a given
/// height, or the quad's own longest opposing edge lengths.
struct RectMode {
  enum class Kind { FixedAspect, Estimated };

  static RectMode fixed(double aspect) { return {Kind::FixedAspect, aspect}; }
  static RectMode estimated() { return {Kind::Estimated, 0.0}; }

  Kind kind = Kind::FixedAspect;
  double aspect = 210.0 / 297.0;
};

struct RectSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const RectSize&, const RectSize&) = default;
};

template <typename Scalar>
RectSize target_rect(const Quad<Scalar>& quad, const RectMode& mode,
                     int output_height) {
  if (output_height < 16) {
    throw Error(ErrorCode::InvalidConfig, "output height must be >= 16");
  }
  if (mode.kind == RectMode::Kind::FixedAspect) {
    if (!(mode.aspect > 0.1 && mode.aspect < 10.0)) {
      throw Error(ErrorCode::InvalidConfig, "aspect must lie in (0.1, 10)");
    }
    return {static_cast<int>(std::lround(output_height * mode.aspect)),
            output_height};
  }
  const Scalar w = std::max((quad.tl() - quad.tr()).norm(),
                            (quad.bl() - quad.br()).norm());
  const Scalar h = std::max((quad.tl() - quad.bl()).norm(),
                            (quad.tr() - quad.br()).norm());
  return {static_cast<int>(std::lround(w)),
          static_cast<int>(std::lround(h))};
}

/// Corners of a width x height raster at pixel centers.
template <typename Scalar = double>
Quad<Scalar> rect_quad(RectSize size) {
  const Scalar w = Scalar(size.width - 1);
  const Scalar h = Scalar(size.height - 1);
  return Quad<Scalar>::from_ordered({Point2<Scalar>(0, 0), Point2<Scalar>(w, 0),
                                     Point2<Scalar>(w, h),
                                     Point2<Scalar>(0, h)});
}

/// Mirrors a quad about the vertical axis of a frame `width` pixels wide and
/// re-orders it, so TL/TR/BR/BL keep their on-screen meaning.
template <typename Scalar>
Quad<Scalar> mirror_quad(const Quad<Scalar>& q, int width) {
  std::array<Point2<Scalar>, 4> pts;
  for (int i = 0; i < 4; ++i) {
    pts[i] = Point2<Scalar>(Scalar(width - 1) - q[i].x(), q[i].y());
  }
  return order_corners(pts);
}

// Corner sidecar: `frame_index x_tl y_tl x_tr y_tr x_br y_br x_bl y_bl`.

inline std::string format_corner_line(long frame_index, const Quadd& q) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%ld %.4f %.4f %.4f %.4f %.4f %.4f %.4f %.4f", frame_index,
                q.tl().x(), q.tl().y(), q.tr().x(), q.tr().y(), q.br().x(),
                q.br().y(), q.bl().x(), q.bl().y());
  return buf;
}

inline std::optional<std::pair<long, Quadd>> parse_corner_line(
    const std::string& line) {
  std::istringstream in(line);
  long index = 0;
  std::array<Point2d, 4> pts;
  if (!(in >> index)) return std::nullopt;
  for (auto& p : pts) {
    if (!(in >> p.x() >> p.y())) return std::nullopt;
  }
  std::string rest;
  if (in >> rest) return std::nullopt;
  return std::make_pair(index, Quadd::from_ordered(pts));
}

}  // namespace papertab
