#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace zdsec {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

inline double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline double sum(const Vec4& a) { return a[0] + a[1] + a[2] + a[3]; }

inline Vec4 scale(const Vec4& a, double c) {
  return {a[0] * c, a[1] * c, a[2] * c, a[3] * c};
}

inline Vec4 add(const Vec4& a, const Vec4& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

inline double linf_diff(const Vec4& a, const Vec4& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double det3(double a, double b, double c,  //
                   double d, double e, double f,  //
                   double g, double h, double i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

// v * M for a row vector v.
inline Vec4 row_times(const Vec4& v, const Mat4& m) {
  Vec4 r{};
  for (int j = 0; j < 4; ++j)
    r[j] = v[0] * m[0][j] + v[1] * m[1][j] + v[2] * m[2][j] + v[3] * m[3][j];
  return r;
}

// Gaussian elimination with partial pivoting on an n x n system (n <= 4).
// Returns false when the largest available pivot falls below pivot_tol.
inline bool solve_dense(int n, double a[4][4], double b[4], double x[4],
                        double pivot_tol = 1e-13) {
  int perm[4] = {0, 1, 2, 3};
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(a[perm[col]][col]);
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(a[perm[r]][col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (!(best > pivot_tol)) return false;
    std::swap(perm[col], perm[piv]);
    const int pr = perm[col];
    for (int r = col + 1; r < n; ++r) {
      const int rr = perm[r];
      const double f = a[rr][col] / a[pr][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[rr][c] -= f * a[pr][c];
      b[rr] -= f * b[pr];
    }
  }
  for (int row = n - 1; row >= 0; --row) {
    const int rr = perm[row];
    double s = b[rr];
    for (int c = row + 1; c < n; ++c) s -= a[rr][c] * x[c];
    x[row] = s / a[rr][row];
  }
  return true;
}

}  // namespace zdsec
