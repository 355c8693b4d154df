#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "optcal/rng.hpp"
#include "optcal/types.hpp"

namespace optcal {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  double diameter_tol = 1e-8;
  std::size_t max_iterations = 500;
  /// Initial simplex edge as a fraction of each box width.
  double initial_step = 0.1;
};

struct BoxMinimum {
  std::vector<double> argmin;
  double value = 0.0;
  std::size_t starts = 0;
  std::size_t evaluations = 0;
};

/// Nelder-Mead from one start; trial points are mirrored back into the box.
BoxMinimum nelder_mead(const Objective& objective, const Box& box, std::vector<double> start,
                       const NelderMeadOptions& options = {});

/**
 * Multi-start Nelder-Mead over `box`.
 *
 * Runs from `starts` Latin-hypercube points drawn from `stream` plus every
 * entry of `extra_starts`. The lowest terminal value wins; exact ties go to
 * the lexicographically smallest argmin. Throws ObjectiveNonFinite if the
 * objective returns NaN or infinity anywhere.
 */
BoxMinimum minimize_box(const Objective& objective, const Box& box, std::size_t starts, RngStream stream,
                        const std::vector<std::vector<double>>& extra_starts = {},
                        const NelderMeadOptions& options = {});

/// Mirror a coordinate into [lo, hi].
double reflect_into(double x, double lo, double hi);

}  // namespace optcal
