#include "optcal/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "optcal/error.hpp"

namespace optcal {

double reflect_into(double x, double lo, double hi) {
  const double w = hi - lo;
  if (w <= 0.0) return lo;
  if (x >= lo && x <= hi) return x;
  double t = std::fmod(x - lo, 2.0 * w);
  if (t < 0.0) t += 2.0 * w;
  return t <= w ? lo + t : hi - (t - w);
}

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

class CountingObjective {
 public:
  explicit CountingObjective(const Objective& f) : f_(f) {}
  double operator()(const std::vector<double>& x) {
    ++count_;
    const double v = f_(x);
    if (!std::isfinite(v)) throw ObjectiveNonFinite("objective returned a non-finite value");
    return v;
  }
  std::size_t count() const { return count_; }

 private:
  const Objective& f_;
  std::size_t count_ = 0;
};

std::vector<double> clamp_into(std::vector<double> x, const Box& box) {
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = reflect_into(x[k], box.lower[k], box.upper[k]);
  return x;
}

double diameter(const std::vector<Vertex>& simplex) {
  double d = 0.0;
  for (std::size_t i = 1; i < simplex.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < simplex[0].x.size(); ++k) {
      const double diff = simplex[i].x[k] - simplex[0].x[k];
      s += diff * diff;
    }
    d = std::max(d, std::sqrt(s));
  }
  return d;
}

// Affine combination base + t (toward - base), mirrored into the box.
std::vector<double> along(const std::vector<double>& base, const std::vector<double>& toward, double t,
                          const Box& box) {
  std::vector<double> out(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) out[k] = base[k] + t * (toward[k] - base[k]);
  return clamp_into(std::move(out), box);
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

BoxMinimum nelder_mead(const Objective& objective, const Box& box, std::vector<double> start,
                       const NelderMeadOptions& options) {
  const std::size_t p = box.dim();
  if (start.size() != p) throw DimensionMismatch("nelder_mead: start point has the wrong dimension");
  CountingObjective f(objective);

  start = clamp_into(std::move(start), box);
  std::vector<Vertex> simplex;
  simplex.reserve(p + 1);
  simplex.push_back({start, f(start)});
  for (std::size_t k = 0; k < p; ++k) {
    std::vector<double> v = start;
    const double step = options.initial_step * box.width(k);
    v[k] = (v[k] + step <= box.upper[k]) ? v[k] + step : v[k] - step;
    simplex.push_back({v, f(v)});
  }

  const auto order = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    std::stable_sort(simplex.begin(), simplex.end(), order);
    if (diameter(simplex) < options.diameter_tol) break;

    std::vector<double> centroid(p, 0.0);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t k = 0; k < p; ++k) centroid[k] += simplex[i].x[k] / static_cast<double>(p);

    Vertex& worst = simplex.back();
    const std::vector<double> xr = along(centroid, worst.x, -1.0, box);
    const double fr = f(xr);

    if (fr < simplex.front().f) {
      const std::vector<double> xe = along(centroid, worst.x, -2.0, box);
      const double fe = f(xe);
      worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < simplex[p - 1].f) {
      worst = {xr, fr};
      continue;
    }
    if (fr < worst.f) {
      const std::vector<double> xc = along(centroid, xr, 0.5, box);
      const double fc = f(xc);
      if (fc <= fr) {
        worst = {xc, fc};
        continue;
      }
    } else {
      const std::vector<double> xc = along(centroid, worst.x, 0.5, box);
      const double fc = f(xc);
      if (fc < worst.f) {
        worst = {xc, fc};
        continue;
      }
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 1; i <= p; ++i) {
      simplex[i].x = along(simplex[0].x, simplex[i].x, 0.5, box);
      simplex[i].f = f(simplex[i].x);
    }
  }
  std::stable_sort(simplex.begin(), simplex.end(), order);
  return BoxMinimum{simplex.front().x, simplex.front().f, 1, f.count()};
}

BoxMinimum minimize_box(const Objective& objective, const Box& box, std::size_t starts, RngStream stream,
                        const std::vector<std::vector<double>>& extra_starts, const NelderMeadOptions& options) {
  if (starts == 0 && extra_starts.empty()) throw InvalidArgument("minimize_box: need at least one start");
  std::vector<std::vector<double>> initial = extra_starts;
  if (starts > 0) {
    const PointMatrix lhs = latin_hypercube(stream, starts, box);
    for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
      const Point r = row(lhs, i);
      initial.emplace_back(r.begin(), r.end());
    }
  }

  BoxMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  for (auto& s : initial) {
    BoxMinimum m = nelder_mead(objective, box, s, options);
    evaluations += m.evaluations;
    if (m.value < best.value || (m.value == best.value && lex_less(m.argmin, best.argmin))) best = std::move(m);
  }
  best.starts = initial.size();
  best.evaluations = evaluations;
  return best;
}

}  // namespace optcal
