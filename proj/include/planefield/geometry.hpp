#pragma once

#include <stdexcept>

namespace planefield {

// Axis-aligned rectangle (s1, t1] x (s2, t2] in the quarter plane.
struct Rect {
  double s1 = 0, t1 = 0, s2 = 0, t2 = 0;

  double area() const { return (t1 - s1) * (t2 - s2); }
  void validate() const {
    if (!(0 <= s1 && s1 <= t1 && 0 <= s2 && s2 <= t2))
      throw std::invalid_argument("Rect: requires 0 <= s1 <= t1 and 0 <= s2 <= t2");
  }
};

// Uniform discretization of [0, T1] x [0, T2] into n1 x n2 cells; nodes are
// (i T1/n1, j T2/n2).
struct GridSpec {
  double T1 = 1, T2 = 1;
  int n1 = 1, n2 = 1;

  double h1() const { return T1 / n1; }
  double h2() const { return T2 / n2; }
  double cell_area() const { return h1() * h2(); }
  void validate() const {
    if (!(T1 > 0 && T2 > 0 && n1 >= 1 && n2 >= 1))
      throw std::invalid_argument("GridSpec: requires T1, T2 > 0 and n1, n2 >= 1");
  }
};

struct Point {
  double s = 0, t = 0;
};

}  // namespace planefield
