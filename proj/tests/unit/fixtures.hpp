#pragma once

#include <vector>

#include "superfractal/apps.hpp"
#include "superfractal/ifs.hpp"
#include "superfractal/superfractal.hpp"

namespace fixtures {

using namespace superfractal;

inline Ifs sierpinski(std::vector<double> probs = {1.0 / 3, 1.0 / 3, 1.0 / 3}) {
  return Ifs({Map2::affine(0.5, 0, 0, 0, 0.5, 0), Map2::affine(0.5, 0, 0.5, 0, 0.5, 0),
              Map2::affine(0.5, 0, 0.25, 0, 0.5, 0.5)},
             std::move(probs), "sierpinski");
}

inline Ifs thirds() {
  const double t = 1.0 / 3;
  return Ifs::uniform({Map2::affine(t, 0, 0, 0, t, 0), Map2::affine(t, 0, 2 * t, 0, t, 0),
                       Map2::affine(t, 0, t, 0, t, 2 * t)},
                      "thirds");
}

// The two jumping-fish IFSs.
inline Map2 f11() { return Map2::affine(0.5, -0.375, 0.3125, 0.5, 0.375, 0.1875); }
inline Map2 f21() { return Map2::affine(0.5, 0.375, 0.1875, -0.5, 0.375, 0.6875); }
inline Map2 f12() { return Map2::affine(0.5, -0.375, 0.3125, -0.5, -0.375, 0.8125); }
inline Map2 f22() { return Map2::affine(0.5, 0.375, 0.1875, 0.5, -0.375, 0.3125); }

inline SuperIfs fish(std::size_t screens = 2) {
  return SuperIfs({Ifs::uniform({f11(), f21()}, "fish-1"), Ifs::uniform({f12(), f22()}, "fish-2")}, {0.5, 0.5},
                  screens, "fish");
}

inline SuperIfs sierpinski_pair(std::size_t screens = 2) {
  return SuperIfs({sierpinski(), thirds()}, {0.5, 0.5}, screens, "pair");
}

// Projective ti-tree maps.
inline std::vector<Ifs> titree_ifss(std::vector<double> probs = {0.5, 0.5}) {
  auto p = [](std::array<double, 12> c) { return Map2::projective(c); };
  return {
      Ifs({p({1.629, 0.135, -1.99, -0.780, 0.864, -2.569, 0.505, 1.935, -0.216, 0.780, -0.864, 2.569}),
           p({1.616, -2.758, 3.678, 1.664, -0.944, 3.883, 2.151, 0.567, 2.020, 1.664, -0.944, 3.883})},
          probs, "ti-tree-1", Contractivity::on_average),
      Ifs({p({1.667, 0.098, -2.005, -0.773, 0.790, -2.575, 0.563, 2.064, -0.278, 0.773, -0.790, 2.575}),
           p({1.470, -2.193, 3.035, 2.432, -0.581, 2.872, 1.212, 0.686, 2.059, 2.432, -0.581, 2.872})},
          probs, "ti-tree-2", Contractivity::on_average),
  };
}

inline constexpr Point2 kA{0.25, 0.5};
inline constexpr Point2 kB{0.5, 0.75};
inline constexpr Point2 kC{0.75, 0.5};
inline constexpr Point2 kD{0.5, 0.25};
inline constexpr Point2 kB1{9.0 / 32, 23.0 / 32};
inline constexpr Point2 kB2{23.0 / 32, 23.0 / 32};
inline constexpr Point2 kB3{9.0 / 32, 9.0 / 32};
// f_2^2(B) = (23/32, 9/32), the mirror image of B_3.
inline constexpr Point2 kB4{23.0 / 32, 9.0 / 32};

inline bool lex_less(Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

}  // namespace fixtures
