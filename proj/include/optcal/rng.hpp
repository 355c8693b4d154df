#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "optcal/types.hpp"

namespace optcal {

inline constexpr std::uint64_t kDefaultSeed = 20240101;

/// SplitMix64 finalizer; used to derive engine seeds from (seed, stream_id).
std::uint64_t splitmix64(std::uint64_t x);

/**
 * Deterministic random stream identified by (seed, stream_id).
 *
 * The engine seed is a hash of both fields, so replicate r of an experiment
 * always sees the same draws no matter which thread runs it or in which
 * order replicates are scheduled. Streams are values: copy one to fork an
 * identical sequence, call substream() to obtain an independent child.
 */
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Child stream keyed by `tag`; does not advance this stream.
  RngStream substream(std::uint64_t tag) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double next_unit();
  /// Standard normal via Box-Muller (pairs cached).
  double next_gaussian();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// A point with d i.i.d. Unif[0,1] coordinates.
std::vector<double> uniform(RngStream& stream, std::size_t d);

/// k i.i.d. uniform points in [0,1]^d, one per row.
PointMatrix uniform_points(RngStream& stream, std::size_t k, std::size_t d);

/// One N(0, sigma^2) draw; sigma == 0 returns exactly 0.
double normal(RngStream& stream, double sigma);

/// k-point Latin hypercube in `box`: each axis is cut into k equal strata and every stratum holds one point.
PointMatrix latin_hypercube(RngStream& stream, std::size_t k, const Box& box);

/// Fisher-Yates permutation of 0..n-1 driven by `stream`.
std::vector<Eigen::Index> permutation(RngStream& stream, Eigen::Index n);

}  // namespace optcal
