#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// Explicit inverse by Gauss-Jordan elimination with partial pivoting.
inline Dense gauss_jordan_inverse(Dense a) {
  const std::size_t n = a.size();
  Dense inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const double d = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

// Determinant by cofactor expansion along the first row. O(n!), n <= 8.
inline double cofactor_determinant(const Dense& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  double det = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Dense minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<double> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(a[r][c]);
      minor.push_back(std::move(row));
    }
    det += ((j % 2 == 0) ? 1.0 : -1.0) * a[0][j] * cofactor_determinant(minor);
  }
  return det;
}

// Squared-exponential kernel written out independently of the library.
inline double se_kernel(const std::vector<double>& a, const std::vector<double>& b, double sf2,
                        const std::vector<double>& ell) {
  double s = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) s += (a[q] - b[q]) * (a[q] - b[q]) / (ell[q] * ell[q]);
  return sf2 * std::exp(-0.5 * s);
}

struct GpOraclePrediction {
  double mean;
  double variance;
};

// Posterior mean and variance from an explicit dense inverse.
inline GpOraclePrediction gp_posterior(const Dense& x, const std::vector<double>& y, double sf2,
                                       const std::vector<double>& ell, double sn, const std::vector<double>& xs) {
  const std::size_t n = x.size();
  Dense k(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k[i][j] = se_kernel(x[i], x[j], sf2, ell) + (i == j ? sn * sn : 0.0);
  const Dense kinv = gauss_jordan_inverse(k);
  std::vector<double> ks(n);
  for (std::size_t i = 0; i < n; ++i) ks[i] = se_kernel(x[i], xs, sf2, ell);
  double mean = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      mean += ks[i] * kinv[i][j] * y[j];
      quad += ks[i] * kinv[i][j] * ks[j];
    }
  return {mean, se_kernel(xs, xs, sf2, ell) - quad};
}

// Exhaustive list scheduling: tries every assignment of tasks (in order) to
// machines and returns the assignment the earliest-available rule would
// produce, i.e. the one where each task goes to the machine that frees up
// first (ties to the lowest index). Returns per-task (start, end).
//
// Enumeration is the oracle: for each full assignment we simulate the
// machines independently, and keep the unique assignment consistent with
// "start = min over machines of free time".
inline std::vector<std::pair<double, double>> brute_force_list_schedule(const std::vector<double>& durations,
                                                                        std::size_t machines) {
  const std::size_t n = durations.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= machines;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::size_t> assign(n);
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = c % machines;
      c /= machines;
    }
    std::vector<double> free(machines, 0.0);
    std::vector<std::pair<double, double>> times(n);
    bool consistent = true;
    for (std::size_t i = 0; i < n && consistent; ++i) {
      const double earliest = *std::min_element(free.begin(), free.end());
      std::size_t first = 0;
      while (free[first] != earliest) ++first;
      if (assign[i] != first) consistent = false;
      const double start = free[assign[i]];
      times[i] = {start, start + durations[i]};
      free[assign[i]] = start + durations[i];
    }
    if (consistent) return times;
  }
  throw std::runtime_error("no consistent schedule");
}

// Makespan lower bound over all assignments (the optimal schedule).
inline double brute_force_optimal_makespan(const std::vector<double>& durations, std::size_t machines) {
  const std::size_t n = durations.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= machines;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<double> load(machines, 0.0);
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      load[c % machines] += durations[i];
      c /= machines;
    }
    best = std::min(best, *std::max_element(load.begin(), load.end()));
  }
  return best;
}

}  // namespace oracle
