#pragma once

#include <algorithm>
#include <span>
#include <vector>

namespace csslab {

/// Piecewise 4-point Lagrange interpolation on an ordered node set.
/// Queries outside [x.front(), x.back()] evaluate to zero.
template <class T>
T interp_cubic(std::span<const double> x, std::span<const T> y, double xq) {
  const int n = static_cast<int>(x.size());
  if (xq < x[0] || xq > x[n - 1]) return T{};
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  int j = static_cast<int>(it - x.begin()) - 1;  // xq in [x[j], x[j+1])
  j = std::clamp(j, 1, n - 3);
  const int base = j - 1;
  T acc{};
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (a != b) w *= (xq - x[base + b]) / (x[base + a] - x[base + b]);
    }
    acc += w * y[base + a];
  }
  return acc;
}

template <class T>
std::vector<T> resample_cubic(std::span<const double> x, std::span<const T> y,
                              std::span<const double> xq) {
  std::vector<T> out(xq.size());
  for (std::size_t k = 0; k < xq.size(); ++k) out[k] = interp_cubic(x, y, xq[k]);
  return out;
}

}  // namespace csslab
