#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tradenet::detail {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const SimplexOptions& options) {
  const std::size_t n = start.size();
  SimplexResult result;
  if (n == 0) {
    result.value = objective(start);
    result.x = std::move(start);
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += options.initial_step;
  std::vector<double> f(n + 1);
  for (std::size_t i = 0; i <= n; ++i) f[i] = objective(pts[i]);

  std::vector<std::size_t> idx(n + 1);
  auto sort_simplex = [&] {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    std::vector<std::vector<double>> p2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      p2[i] = std::move(pts[idx[i]]);
      f2[i] = f[idx[i]];
    }
    pts = std::move(p2);
    f = std::move(f2);
  };

  auto affine = [n](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
  };

  sort_simplex();
  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    const double spread = f[n] - f[0];
    double diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) diameter = std::max(diameter, std::fabs(pts[i][j] - pts[0][j]));
    if (spread <= options.relative_tolerance * std::fabs(f[0]) || diameter < 1e-12) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

    auto xr = affine(centroid, pts[n], -1.0);
    const double fr = objective(xr);
    if (fr < f[0]) {
      auto xe = affine(centroid, pts[n], -2.0);
      const double fe = objective(xe);
      if (fe < fr) {
        pts[n] = std::move(xe);
        f[n] = fe;
      } else {
        pts[n] = std::move(xr);
        f[n] = fr;
      }
    } else if (fr < f[n - 1]) {
      pts[n] = std::move(xr);
      f[n] = fr;
    } else {
      const bool outside = fr < f[n];
      auto xc = outside ? affine(centroid, xr, 0.5) : affine(centroid, pts[n], 0.5);
      const double fc = objective(xc);
      if (fc < (outside ? fr : f[n])) {
        pts[n] = std::move(xc);
        f[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          pts[i] = affine(pts[0], pts[i], 0.5);
          f[i] = objective(pts[i]);
        }
      }
    }
    sort_simplex();
  }

  result.x = pts[0];
  result.value = f[0];
  result.iterations = it;
  return result;
}

}  // namespace tradenet::detail
