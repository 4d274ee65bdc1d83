#include "superfractal/geometry.hpp"

#include <algorithm>
#include <vector>

namespace superfractal {

namespace {

constexpr double kSingularTol = 1e-12;
constexpr int kValidationGrid = 64;

double denominator(const std::array<double, 12>& c, int offset, Point2 p) {
  return c[offset] * p.x + c[offset + 1] * p.y + c[offset + 2];
}

void validate_projective(const std::array<double, 12>& c) {
  for (int offset : {3, 9}) {
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (int i = 0; i < kValidationGrid; ++i) {
      for (int j = 0; j < kValidationGrid; ++j) {
        const Point2 p{i / double(kValidationGrid - 1), j / double(kValidationGrid - 1)};
        const double den = denominator(c, offset, p);
        if (first) {
          lo = hi = den;
          first = false;
        }
        lo = std::min(lo, den);
        hi = std::max(hi, den);
      }
    }
    if ((lo <= kSingularTol && hi >= -kSingularTol) || std::abs(lo) < kSingularTol ||
        std::abs(hi) < kSingularTol) {
      throw std::invalid_argument("projective map denominator vanishes on the unit square");
    }
  }
}

}  // namespace

Map2 Map2::affine(double a, double b, double e, double c, double d, double g) {
  Map2 m;
  m.kind_ = Kind::affine;
  m.c_ = {a, b, e, c, d, g, 0, 0, 0, 0, 0, 0};
  return m;
}

Map2 Map2::projective(const std::array<double, 12>& coefficients) {
  for (double v : coefficients) {
    if (!std::isfinite(v)) throw std::invalid_argument("projective map coefficient is not finite");
  }
  validate_projective(coefficients);
  Map2 m;
  m.kind_ = Kind::projective;
  m.c_ = coefficients;
  return m;
}

std::span<const double> Map2::coefficients() const {
  return {c_.data(), kind_ == Kind::affine ? std::size_t{6} : std::size_t{12}};
}

Point2 Map2::operator()(Point2 p) const {
  if (kind_ == Kind::affine) {
    return {c_[0] * p.x + c_[1] * p.y + c_[2], c_[3] * p.x + c_[4] * p.y + c_[5]};
  }
  const double nx = c_[0] * p.x + c_[1] * p.y + c_[2];
  const double dx = c_[3] * p.x + c_[4] * p.y + c_[5];
  const double ny = c_[6] * p.x + c_[7] * p.y + c_[8];
  const double dy = c_[9] * p.x + c_[10] * p.y + c_[11];
  if (std::abs(dx) < kSingularTol || std::abs(dy) < kSingularTol) {
    throw SingularEvaluation("projective denominator vanishes at (" + std::to_string(p.x) + ", " +
                             std::to_string(p.y) + ")");
  }
  return {nx / dx, ny / dy};
}

double Map2::affine_operator_norm() const {
  if (kind_ != Kind::affine) throw std::logic_error("operator norm requested for a projective map");
  const double a = c_[0], b = c_[1], c = c_[3], d = c_[4];
  // Largest eigenvalue of L^T L.
  const double p = a * a + c * c;
  const double q = a * b + c * d;
  const double r = b * b + d * d;
  const double tr = p + r;
  const double disc = std::sqrt(std::max(0.0, (p - r) * (p - r) + 4 * q * q));
  return std::sqrt(0.5 * (tr + disc));
}

Similitude2::Similitude2(double scale, const std::array<double, 4>& rotation, Point2 translation)
    : scale_(scale), rotation_(rotation), translation_(translation) {
  if (!(scale > 0.0 && scale < 1.0)) throw std::invalid_argument("similitude scale must lie in (0,1)");
  const auto& o = rotation_;
  const double n0 = o[0] * o[0] + o[2] * o[2];
  const double n1 = o[1] * o[1] + o[3] * o[3];
  const double dot = o[0] * o[1] + o[2] * o[3];
  if (std::abs(n0 - 1) > 1e-12 || std::abs(n1 - 1) > 1e-12 || std::abs(dot) > 1e-12) {
    throw std::invalid_argument("similitude linear part is not orthonormal");
  }
}

Similitude2 Similitude2::from_angle(double scale, double angle, Point2 translation, bool reflect) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  // R(angle) * diag(1, -1) when reflecting.
  const double flip = reflect ? -1.0 : 1.0;
  return Similitude2(scale, {c, -s * flip, s, c * flip}, translation);
}

std::optional<Similitude2> Similitude2::from_map(const Map2& map, double tol) {
  if (!map.is_affine()) return std::nullopt;
  const auto c = map.coefficients();
  const double a = c[0], b = c[1], cc = c[3], d = c[4];
  const double n0 = std::hypot(a, cc);
  const double n1 = std::hypot(b, d);
  if (n0 <= 0.0 || std::abs(n0 - n1) > tol || std::abs(a * b + cc * d) > tol) return std::nullopt;
  if (!(n0 < 1.0)) return std::nullopt;
  const double s = n0;
  try {
    // Re-normalise so the orthonormality check inside the constructor sees exact columns.
    const double inv0 = 1.0 / n0;
    const double inv1 = 1.0 / n1;
    return Similitude2(s, {a * inv0, b * inv1, cc * inv0, d * inv1}, {c[2], c[5]});
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

Map2 Similitude2::to_map() const {
  const auto& o = rotation_;
  Map2 m = Map2::affine(scale_ * o[0], scale_ * o[1], translation_.x, scale_ * o[2], scale_ * o[3],
                        translation_.y);
  m.lipschitz_hint = scale_;
  return m;
}

double estimate_lipschitz(const Map2& map, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("estimate_lipschitz: grid_n must be at least 2");
  grid_n = std::min(grid_n, 64);
  std::vector<Point2> pts;
  std::vector<Point2> imgs;
  pts.reserve(std::size_t(grid_n) * grid_n);
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      pts.push_back({i / double(grid_n - 1), j / double(grid_n - 1)});
    }
  }
  imgs.reserve(pts.size());
  for (const auto& p : pts) imgs.push_back(map(p));

  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = pts[i].x - pts[j].x;
      const double dy = pts[i].y - pts[j].y;
      const double ix = imgs[i].x - imgs[j].x;
      const double iy = imgs[i].y - imgs[j].y;
      const double ratio2 = (ix * ix + iy * iy) / (dx * dx + dy * dy);
      best = std::max(best, ratio2);
    }
  }
  return std::sqrt(best);
}

Point2 fixed_point(const Map2& map) {
  Point2 p{0.5, 0.5};
  double last = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    const Point2 q = map(p);
    if (!is_finite(q)) throw NumericalFailure("fixed_point: iteration diverged");
    last = distance(p, q);
    p = q;
    if (last < 1e-15) return p;
    // Stagnation at the floating-point floor.
    if (last < 1e-12 && distance(map(p), p) >= last) return p;
  }
  if (distance(map(p), p) < 1e-10) return p;
  throw NumericalFailure("fixed_point: no convergence after 1e5 iterations");
}

}  // namespace superfractal
