#pragma once

// Test-only oracles: dense grids, Monte Carlo estimates and brute-force
// dominance filtering. These stay independent of the solver path they are
// used to check; everything here reduces to direct evaluation.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Point = std::vector<double>;
using Fn = std::function<double(const Point&)>;
using Pred = std::function<bool(const Point&)>;

// axis-aligned grid with `steps` cells per axis (steps+1 samples)
inline void for_each_grid_point(const Point& lower, const Point& upper,
                                std::size_t steps,
                                const std::function<void(const Point&)>& fn) {
  const std::size_t n = lower.size();
  std::vector<std::size_t> idx(n, 0);
  Point p(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i)
      p[i] = lower[i] + (upper[i] - lower[i]) * double(idx[i]) / double(steps);
    fn(p);
    std::size_t i = 0;
    while (i < n) {
      if (++idx[i] <= steps) break;
      idx[i] = 0;
      ++i;
    }
    if (i == n) break;
  }
}

struct MinResult {
  double value = std::numeric_limits<double>::infinity();
  Point argmin;
};

inline MinResult grid_min(const Fn& f, const Pred& feasible, const Point& lower,
                          const Point& upper, std::size_t steps) {
  MinResult r;
  for_each_grid_point(lower, upper, steps, [&](const Point& p) {
    if (!feasible(p)) return;
    const double v = f(p);
    if (v < r.value) {
      r.value = v;
      r.argmin = p;
    }
  });
  return r;
}

inline MinResult grid_max(const Fn& f, const Pred& feasible, const Point& lower,
                          const Point& upper, std::size_t steps) {
  auto neg = grid_min([&](const Point& p) { return -f(p); }, feasible, lower, upper, steps);
  neg.value = -neg.value;
  return neg;
}

// nondominated subset of value vectors (minimization, strict dominance)
inline std::vector<Point> nondominated(const std::vector<Point>& values) {
  std::vector<Point> front;
  for (std::size_t i = 0; i < values.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < values.size() && !dominated; ++j) {
      if (i == j) continue;
      bool le = true, lt = false;
      for (std::size_t k = 0; k < values[i].size(); ++k) {
        if (values[j][k] > values[i][k] + 1e-12) le = false;
        if (values[j][k] < values[i][k] - 1e-12) lt = true;
      }
      dominated = le && lt;
    }
    if (!dominated) front.push_back(values[i]);
  }
  return front;
}

inline double supnorm_dist_to_set(const Point& p, const std::vector<Point>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : set) {
    double d = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) d = std::max(d, std::abs(p[k] - q[k]));
    best = std::min(best, d);
  }
  return best;
}

// is `p` dominated by any member of `set` beyond tolerance?
inline bool dominated_by_set(const Point& p, const std::vector<Point>& set, double tol) {
  for (const auto& q : set) {
    bool le = true, lt = false;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (q[k] > p[k] + tol) le = false;
      if (q[k] < p[k] - tol) lt = true;
    }
    if (le && lt) return true;
  }
  return false;
}

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // standard error of the mean
};

// Monte Carlo mean of f under the uniform measure given a sampler.
inline McEstimate mc_mean(const Fn& f, const std::function<Point(std::mt19937_64&)>& sampler,
                          std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = f(sampler(rng));
    sum += v;
    sumsq += v * v;
  }
  McEstimate e;
  e.mean = sum / double(samples);
  const double var = std::max(0.0, sumsq / double(samples) - e.mean * e.mean);
  e.stderr_ = std::sqrt(var / double(samples));
  return e;
}

inline std::function<Point(std::mt19937_64&)> box_sampler(Point lower, Point upper) {
  return [lower, upper](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Point p(lower.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = lower[i] + u(rng) * (upper[i] - lower[i]);
    return p;
  };
}

inline std::function<Point(std::mt19937_64&)> ball_sampler(Point center, double radius) {
  return [center, radius](std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = center.size();
    Point p(n);
    double norm = 0.0;
    for (auto& v : p) {
      v = g(rng);
      norm += v * v;
    }
    norm = std::sqrt(std::max(norm, 1e-300));
    const double r = radius * std::pow(u(rng), 1.0 / double(n));
    for (std::size_t i = 0; i < n; ++i) p[i] = center[i] + r * p[i] / norm;
    return p;
  };
}

}  // namespace oracle
