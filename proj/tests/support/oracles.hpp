#pragma once

// Independent reference computations used to check engine outputs.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "home/math.hpp"

namespace home::fixture {

/// Path lengths of every image source of order <= max_order in the closed
/// box [0,L]^3, from the closed form x_img = (1 - 2u) x_s + 2 l L per axis
/// with reflection count |2l - u|. Sorted ascending.
inline std::vector<double> shoebox_image_lengths(Vec3 room, Vec3 src, Vec3 lis, int max_order) {
  std::vector<double> out;
  const int lmax = max_order;
  int u[3], l[3];
  for (u[0] = 0; u[0] <= 1; ++u[0])
    for (u[1] = 0; u[1] <= 1; ++u[1])
      for (u[2] = 0; u[2] <= 1; ++u[2])
        for (l[0] = -lmax; l[0] <= lmax; ++l[0])
          for (l[1] = -lmax; l[1] <= lmax; ++l[1])
            for (l[2] = -lmax; l[2] <= lmax; ++l[2]) {
              int order = 0;
              double d2 = 0;
              for (int a = 0; a < 3; ++a) {
                order += std::abs(2 * l[a] - u[a]);
                const double img = (1 - 2 * u[a]) * src[a] + 2 * l[a] * room[a];
                d2 += (img - lis[a]) * (img - lis[a]);
              }
              if (order <= max_order) out.push_back(std::sqrt(d2));
            }
  std::sort(out.begin(), out.end());
  return out;
}

/// Percentile by sorting: rank q*(n-1), linear interpolation.
inline double sorted_percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double rank = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (rank - static_cast<double>(lo));
}

inline double rms(const std::vector<float>& x) {
  double s = 0;
  for (float v : x) s += double(v) * double(v);
  return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace home::fixture
