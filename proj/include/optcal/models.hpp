#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "optcal/calibration.hpp"
#include "optcal/rng.hpp"
#include "optcal/types.hpp"

namespace optcal {

enum class SystemId { Ex1, Ex2, Ex3, Ion };

/// A physical system (when its truth is known) paired with its computer model.
struct NamedSystem {
  SystemId id = SystemId::Ex1;
  std::string name;
  std::size_t dim = 1;
  std::function<double(Point)> zeta;  ///< empty for the ion-channel system
  ComputerModel model;
  /// Population targets where known, e.g. {"L2", {-0.1780}}.
  std::vector<std::pair<std::string, std::vector<double>>> reference_theta;

  bool has_truth() const { return static_cast<bool>(zeta); }
};

// ex1: 1-d, theta in [-1, 1].
double ex1_zeta(double x);
double ex1_eta(double x, double theta);

// ex2: 2-d, theta in [0, 1]^2.
double ex2_zeta(double x1, double x2);
double ex2_eta(double x1, double x2, double theta1, double theta2);

// ex3 (falling ball): v0 in [0, 5], g in [0, 20].
double ex3_zeta(double x);
double ex3_eta(double x, double v0, double g);

/// 4x4 sodium-channel generator A(theta) as printed.
Matrix ion_generator(double theta1, double theta2, double theta3);
/// e_1^T exp(exp(x) A(theta)) e_4
double ion_eta(double x, std::span<const double> theta);

NamedSystem make_system(SystemId id);
/// Accepts "ex1", "ex2", "ex3", "ion".
NamedSystem system_by_name(const std::string& name);
std::string system_name(SystemId id);

/// X ~ Unif([0,1]^d), Y = zeta(X) + N(0, sigma^2). Throws NoTruthAvailable for the ion system.
Dataset generate_dataset(const NamedSystem& system, std::size_t n, double sigma, RngStream stream);

/// CSV with header x1,...,xd,y. The number of x columns is inferred from the header.
Dataset load_dataset_csv(std::istream& in);
Dataset load_dataset_csv(const std::string& path);
/// Header-less or headed CSV of points (x1,...,xd) used by `predict`.
PointMatrix load_points_csv(const std::string& path, std::size_t dim);

}  // namespace optcal
