#include "optcal/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "optcal/error.hpp"

namespace optcal {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t engine_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return splitmix64(seed ^ splitmix64(stream_id ^ 0xD1B54A32D192ED03ULL));
}

// Unbiased integer in [0, bound) by rejection.
std::uint64_t bounded(RngStream& s, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v = s.next_u64();
  while (v >= limit) v = s.next_u64();
  return v % bound;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(engine_seed(seed, stream_id)) {}

RngStream RngStream::substream(std::uint64_t tag) const {
  return RngStream(seed_, splitmix64(stream_id_ * 0x9E3779B97F4A7C15ULL + splitmix64(tag)));
}

double RngStream::next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RngStream::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = next_unit();
  while (u1 <= 0.0) u1 = next_unit();
  const double u2 = next_unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<double> uniform(RngStream& stream, std::size_t d) {
  if (d == 0) throw InvalidArgument("uniform: dimension must be >= 1");
  std::vector<double> p(d);
  for (auto& v : p) v = stream.next_unit();
  return p;
}

PointMatrix uniform_points(RngStream& stream, std::size_t k, std::size_t d) {
  if (d == 0) throw InvalidArgument("uniform_points: dimension must be >= 1");
  PointMatrix pts(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < pts.cols(); ++j) pts(i, j) = stream.next_unit();
  return pts;
}

double normal(RngStream& stream, double sigma) {
  if (sigma < 0.0) throw InvalidArgument("normal: sigma must be >= 0");
  const double z = stream.next_gaussian();
  return sigma == 0.0 ? 0.0 : sigma * z;
}

std::vector<Eigen::Index> permutation(RngStream& stream, Eigen::Index n) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(bounded(stream, static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

PointMatrix latin_hypercube(RngStream& stream, std::size_t k, const Box& box) {
  if (k == 0) throw InvalidArgument("latin_hypercube: k must be >= 1");
  const auto n = static_cast<Eigen::Index>(k);
  PointMatrix pts(n, static_cast<Eigen::Index>(box.dim()));
  for (std::size_t j = 0; j < box.dim(); ++j) {
    if (!(box.width(j) > 0.0)) throw InvalidArgument("latin_hypercube: degenerate box");
    const auto strata = permutation(stream, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = (static_cast<double>(strata[static_cast<std::size_t>(i)]) + stream.next_unit()) /
                       static_cast<double>(k);
      pts(i, static_cast<Eigen::Index>(j)) = box.lower[j] + u * box.width(j);
    }
  }
  return pts;
}

}  // namespace optcal
