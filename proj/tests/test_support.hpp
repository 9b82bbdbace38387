#pragma once

#include <complex>
#include <random>

#include "dmg/lie_group.hpp"

namespace testing_support {

using dmg::Mat;
using dmg::Mat2c;
using dmg::Mat3;
using dmg::Rng;
using dmg::Vec;
using dmg::Vec3;

inline Vec gauss(Rng& rng, int n, double sigma = 1.0) {
  std::normal_distribution<double> d(0.0, sigma);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

/// Concatenation of coordinate vectors.
inline Vec join(std::initializer_list<Vec> parts) {
  int n = 0;
  for (const Vec& p : parts) n += static_cast<int>(p.size());
  Vec r(n);
  int i = 0;
  for (const Vec& p : parts) {
    r.segment(i, p.size()) = p;
    i += static_cast<int>(p.size());
  }
  return r;
}

inline double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
template <class M>
M expm_series(const M& A) {
  int s = 0;
  double n = A.norm();
  while (n > 0.25) {
    n /= 2;
    ++s;
  }
  const M B = A / std::pow(2.0, s);
  M term = M::Identity(A.rows(), A.cols());
  M sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// Factor M in SL(2,C) as U * L with U unitary and L in the lower-triangular group of
/// positive-diagonal matrices, returned as quaternion and (a, b, c).
inline std::pair<Vec, Vec3> iwasawa_split(const Mat2c& M) {
  using cd = std::complex<double>;
  const Eigen::Vector2cd c1 = M.col(0), c2 = M.col(1);
  const double d = 1.0 / c2.norm();
  const cd z = c2.dot(c1) / (d * c2.squaredNorm());
  Mat2c L;
  L << cd(d, 0), cd(0, 0), z, cd(1.0 / d, 0);
  const Mat2c U = M * L.inverse();
  return {dmg::su2_from_complex(U), dmg::k_from_complex(L)};
}

}  // namespace testing_support
