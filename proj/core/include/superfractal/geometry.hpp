#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace superfractal {

/// Raised when a projective map is evaluated where its denominator vanishes.
class SingularEvaluation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iterative numerical procedure fails to converge.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 p, Point2 q) { return std::hypot(p.x - q.x, p.y - q.y); }

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// A planar point map, either affine or projective.
///
/// Affine coefficients are stored as (a, b, e, c, d, g) and act as
/// (x, y) -> (a x + b y + e, c x + d y + g).
///
/// Projective coefficients are twelve reals, one numerator and one denominator
/// per output coordinate:
///   x' = (c0 x + c1 y + c2) / (c3 x + c4 y + c5)
///   y' = (c6 x + c7 y + c8) / (c9 x + c10 y + c11)
/// A shared denominator is written out twice. Construction rejects maps whose
/// denominators vanish or change sign on a 64x64 grid over the unit square.
class Map2 {
 public:
  enum class Kind { affine, projective };

  static Map2 affine(double a, double b, double e, double c, double d, double g);
  static Map2 projective(const std::array<double, 12>& coefficients);
  static Map2 identity() { return affine(1, 0, 0, 0, 1, 0); }

  Point2 operator()(Point2 p) const;

  Kind kind() const { return kind_; }
  bool is_affine() const { return kind_ == Kind::affine; }
  /// Six coefficients for affine maps, twelve for projective ones.
  std::span<const double> coefficients() const;

  /// Largest singular value of the linear part; affine maps only.
  double affine_operator_norm() const;

  std::optional<double> lipschitz_hint;

 private:
  Map2() = default;
  Kind kind_ = Kind::affine;
  std::array<double, 12> c_{};
};

/// f(x) = s O x + t with O orthonormal.
class Similitude2 {
 public:
  /// `rotation` is row-major (o00, o01, o10, o11).
  Similitude2(double scale, const std::array<double, 4>& rotation, Point2 translation);

  /// Rotation by `angle` radians, optionally preceded by reflection in the x axis.
  static Similitude2 from_angle(double scale, double angle, Point2 translation, bool reflect = false);

  /// Recognises an affine map whose linear part is s times an orthonormal matrix.
  static std::optional<Similitude2> from_map(const Map2& map, double tol = 1e-12);

  double scale() const { return scale_; }
  const std::array<double, 4>& rotation() const { return rotation_; }
  Point2 translation() const { return translation_; }

  Point2 operator()(Point2 p) const { return to_map()(p); }
  Map2 to_map() const;

 private:
  double scale_;
  std::array<double, 4> rotation_;
  Point2 translation_;
};

inline Point2 apply(const Map2& map, Point2 p) { return map(p); }

/// Pairwise grid estimate of the Lipschitz constant over the unit square.
/// This is a lower bound on the true constant. grid_n is capped at 64.
double estimate_lipschitz(const Map2& map, int grid_n = 64);

/// Iterates the map from (1/2, 1/2) until it stops moving. Throws
/// NumericalFailure after 1e5 iterations without convergence.
Point2 fixed_point(const Map2& map);

}  // namespace superfractal
