#include "nvcr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nvcr/errors.hpp"

namespace nvcr {

namespace {

using Point = std::vector<double>;

double safe(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

Point combine(const Point& a, const Point& b, double t) {
  // a + t (b - a)
  Point out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

struct Simplex {
  std::vector<Point> pts;
  std::vector<double> vals;

  void sort() {
    std::vector<size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return vals[a] < vals[b]; });
    std::vector<Point> p;
    std::vector<double> v;
    for (size_t i : idx) {
      p.push_back(pts[i]);
      v.push_back(vals[i]);
    }
    pts = std::move(p);
    vals = std::move(v);
  }

  double diameter() const {
    double d = 0.0;
    for (size_t i = 1; i < pts.size(); ++i)
      for (size_t k = 0; k < pts[0].size(); ++k) d = std::max(d, std::abs(pts[i][k] - pts[0][k]));
    return d;
  }
};

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, std::vector<double> step,
                             const NelderMeadOptions& opts) {
  const size_t n = x0.size();
  require(n > 0 && step.size() == n, "optimizer needs matching start point and step sizes");
  for (size_t i = 0; i < n; ++i)
    require(std::isfinite(x0[i]) && std::isfinite(step[i]) && step[i] != 0, "invalid optimizer start");

  NelderMeadResult res;
  auto eval = [&](const Point& p) {
    ++res.evaluations;
    return safe(f(p));
  };

  Point best = std::move(x0);
  double best_val = eval(best);
  for (int round = 0; round <= opts.restarts; ++round) {
    Simplex s;
    s.pts.push_back(best);
    s.vals.push_back(best_val);
    for (size_t i = 0; i < n; ++i) {
      Point p = best;
      p[i] += step[i];
      s.pts.push_back(p);
      s.vals.push_back(eval(p));
    }

    bool done = false;
    while (res.evaluations < opts.max_evaluations) {
      s.sort();
      double scale = 1.0;
      for (double v : s.pts[0]) scale = std::max(scale, std::abs(v));
      const bool small = s.diameter() <= opts.x_tol * scale;
      const bool flat = opts.f_tol > 0 && s.vals.back() - s.vals.front() <= opts.f_tol;
      if (small || flat) {
        done = true;
        break;
      }

      Point centroid(n, 0.0);
      for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) centroid[k] += s.pts[i][k] / static_cast<double>(n);

      const Point& worst = s.pts[n];
      const Point xr = combine(centroid, worst, -1.0);
      const double fr = eval(xr);
      if (fr < s.vals[0]) {
        const Point xe = combine(centroid, worst, -2.0);
        const double fe = eval(xe);
        if (fe < fr) {
          s.pts[n] = xe;
          s.vals[n] = fe;
        } else {
          s.pts[n] = xr;
          s.vals[n] = fr;
        }
        continue;
      }
      if (fr < s.vals[n - 1]) {
        s.pts[n] = xr;
        s.vals[n] = fr;
        continue;
      }
      const bool outside = fr < s.vals[n];
      const Point xc = outside ? combine(centroid, worst, -0.5) : combine(centroid, worst, 0.5);
      const double fc = eval(xc);
      if (fc < (outside ? fr : s.vals[n])) {
        s.pts[n] = xc;
        s.vals[n] = fc;
        continue;
      }
      for (size_t i = 1; i <= n; ++i) {
        s.pts[i] = combine(s.pts[0], s.pts[i], 0.5);
        s.vals[i] = eval(s.pts[i]);
      }
    }
    s.sort();
    best = s.pts[0];
    best_val = s.vals[0];
    res.converged = done;
    if (!done) break;
    // Shrink the restart simplex so later rounds polish rather than explore.
    for (double& h : step) h *= 0.1;
  }
  res.x = best;
  res.fx = best_val;
  return res;
}

std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x, double h) {
  std::vector<double> g(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = h * std::max(1.0, std::abs(x[i]));
    std::vector<double> a = x, b = x;
    a[i] += dx;
    b[i] -= dx;
    g[i] = (f(a) - f(b)) / (2 * dx);
  }
  return g;
}

}  // namespace nvcr
