#pragma once

// Gauss-Legendre rules on [-1, 1] used by the cell quadratures.

#include <array>
#include <cstddef>
#include <span>

namespace hartree::detail {

struct GaussRule {
  std::span<const double> nodes;
  std::span<const double> weights;
};

inline constexpr std::array<double, 1> kGl1x{0.0};
inline constexpr std::array<double, 1> kGl1w{2.0};
inline constexpr std::array<double, 2> kGl2x{-0.57735026918962576451, 0.57735026918962576451};
inline constexpr std::array<double, 2> kGl2w{1.0, 1.0};
inline constexpr std::array<double, 3> kGl3x{-0.77459666924148337704, 0.0,
                                             0.77459666924148337704};
inline constexpr std::array<double, 3> kGl3w{0.55555555555555555556, 0.88888888888888888889,
                                             0.55555555555555555556};
inline constexpr std::array<double, 4> kGl4x{-0.86113631159405257522, -0.33998104358485626480,
                                             0.33998104358485626480, 0.86113631159405257522};
inline constexpr std::array<double, 4> kGl4w{0.34785484513745385737, 0.65214515486254614263,
                                             0.65214515486254614263, 0.34785484513745385737};
inline constexpr std::array<double, 8> kGl8x{
    -0.96028985649753623168, -0.79666647741362673959, -0.52553240991632898582,
    -0.18343464249564980494, 0.18343464249564980494,  0.52553240991632898582,
    0.79666647741362673959,  0.96028985649753623168};
inline constexpr std::array<double, 8> kGl8w{
    0.10122853629037625915, 0.22238103445337447054, 0.31370664587788728734,
    0.36268378337836198297, 0.36268378337836198297, 0.31370664587788728734,
    0.22238103445337447054, 0.10122853629037625915};

/// Rule with at least n points (n <= 4 exact sizes, otherwise 8).
inline GaussRule gauss_rule(std::size_t n) {
  switch (n) {
    case 0:
    case 1:
      return {kGl1x, kGl1w};
    case 2:
      return {kGl2x, kGl2w};
    case 3:
      return {kGl3x, kGl3w};
    case 4:
      return {kGl4x, kGl4w};
    default:
      return {kGl8x, kGl8w};
  }
}

template <class F>
double integrate(const GaussRule& rule, double a, double b, F&& f) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
  }
  return acc * half;
}

}  // namespace hartree::detail
