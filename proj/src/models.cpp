#include "optcal/models.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "optcal/error.hpp"
#include "optcal/linalg.hpp"

namespace optcal {

namespace {
constexpr double kPi = std::numbers::pi;
}

double ex1_zeta(double x) { return std::exp(kPi * x / 5.0) * std::sin(2.0 * kPi * x); }

double ex1_eta(double x, double theta) {
  const double a = 2.0 * kPi * theta * x;
  return ex1_zeta(x) - std::sqrt(theta * theta - theta + 1.0) * (std::sin(a) + std::cos(a));
}

double ex2_zeta(double x1, double x2) {
  return 2.0 / 3.0 * std::exp(x1 + 0.2) - x2 * std::sin(0.4) + 0.4 +
         std::exp(-x1) * (x1 + 0.5) * (x2 * x2 + x2 + 1.0);
}

double ex2_eta(double x1, double x2, double theta1, double theta2) {
  return 2.0 / 3.0 * std::exp(x1 + theta1) - x2 * std::sin(theta2) + theta2;
}

double ex3_zeta(double x) {
  const double t = std::tanh(std::atanh(std::sqrt(0.02)) + std::sqrt(2.0) * x);
  return 8.0 + 2.5 * std::log(50.0 / 49.0 - 50.0 / 49.0 * t * t);
}

double ex3_eta(double x, double v0, double g) { return 8.0 + v0 * x - g * x * x / 2.0; }

Matrix ion_generator(double t1, double t2, double t3) {
  Matrix a(4, 4);
  a << -t2 - t3, t1, 0.0, 0.0,  //
      t2, -t1 - t2, t1, 0.0,    //
      0.0, t2, -t1 - t2, t1,    //
      0.0, 0.0, t2, -t1;
  return a;
}

double ion_eta(double x, std::span<const double> theta) {
  if (theta.size() != 3) throw DimensionMismatch("ion_eta: theta must have 3 components");
  const Matrix e = matrix_exponential(std::exp(x) * ion_generator(theta[0], theta[1], theta[2]));
  return e(0, 3);
}

std::string system_name(SystemId id) {
  switch (id) {
    case SystemId::Ex1:
      return "ex1";
    case SystemId::Ex2:
      return "ex2";
    case SystemId::Ex3:
      return "ex3";
    case SystemId::Ion:
      return "ion";
  }
  return "unknown";
}

NamedSystem make_system(SystemId id) {
  NamedSystem s;
  s.id = id;
  s.name = system_name(id);
  switch (id) {
    case SystemId::Ex1:
      s.dim = 1;
      s.zeta = [](Point x) { return ex1_zeta(x[0]); };
      s.model = {"ex1", 1, Box({-1.0}, {1.0}), [](Point x, Point t) { return ex1_eta(x[0], t[0]); }};
      s.reference_theta = {{"L2", {-0.1780}}, {"opt-pred", {0.3740}}};
      break;
    case SystemId::Ex2:
      s.dim = 2;
      s.zeta = [](Point x) { return ex2_zeta(x[0], x[1]); };
      s.model = {"ex2", 2, Box({0.0, 0.0}, {1.0, 1.0}),
                 [](Point x, Point t) { return ex2_eta(x[0], x[1], t[0], t[1]); }};
      break;
    case SystemId::Ex3:
      s.dim = 1;
      s.zeta = [](Point x) { return ex3_zeta(x[0]); };
      s.model = {"ex3", 1, Box({0.0, 0.0}, {5.0, 20.0}),
                 [](Point x, Point t) { return ex3_eta(x[0], t[0], t[1]); }};
      break;
    case SystemId::Ion:
      s.dim = 1;
      s.model = {"ion", 1, Box({1e-3, 1e-3, 1e-3}, {10.0, 10.0, 10.0}),
                 [](Point x, Point t) { return ion_eta(x[0], t); }};
      break;
  }
  return s;
}

NamedSystem system_by_name(const std::string& name) {
  for (SystemId id : {SystemId::Ex1, SystemId::Ex2, SystemId::Ex3, SystemId::Ion})
    if (system_name(id) == name) return make_system(id);
  throw InvalidArgument("unknown system '" + name + "' (expected ex1, ex2, ex3 or ion)");
}

Dataset generate_dataset(const NamedSystem& system, std::size_t n, double sigma, RngStream stream) {
  if (!system.has_truth())
    throw NoTruthAvailable("system " + system.name + " has no known truth; supply a dataset file instead");
  RngStream design = stream.substream(1);
  RngStream noise = stream.substream(2);
  PointMatrix x = uniform_points(design, n, system.dim);
  Vector y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = system.zeta(row(x, i)) + normal(noise, sigma);
  return Dataset(std::move(x), std::move(y));
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

double parse_real(const std::string& cell, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size())
    throw InvalidArgument("line " + std::to_string(line_no) + ": cannot parse '" + cell + "' as a number");
  return v;
}

bool is_numeric_row(const std::vector<std::string>& cells) {
  for (const auto& c : cells) {
    std::size_t used = 0;
    try {
      (void)std::stod(c, &used);
    } catch (const std::exception&) {
      return false;
    }
    if (used != c.size()) return false;
  }
  return !cells.empty();
}

std::vector<std::vector<double>> read_rows(std::istream& in, std::optional<std::size_t> width, bool require_header,
                                           std::size_t& columns) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (first) {
      first = false;
      columns = cells.size();
      if (width && columns != *width)
        throw DimensionMismatch("expected " + std::to_string(*width) + " columns, found " + std::to_string(columns));
      if (!is_numeric_row(cells)) continue;
      if (require_header) throw InvalidArgument("dataset CSV must start with a header x1,...,xd,y");
    }
    if (cells.size() != columns)
      throw DimensionMismatch("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                              " columns");
    std::vector<double> r;
    r.reserve(cells.size());
    for (const auto& c : cells) r.push_back(parse_real(c, line_no));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

Dataset load_dataset_csv(std::istream& in) {
  std::size_t columns = 0;
  const auto rows = read_rows(in, std::nullopt, true, columns);
  if (columns < 2) throw InvalidArgument("dataset CSV needs at least one input column and a y column");
  if (rows.empty()) throw InvalidArgument("dataset CSV has no rows");
  const auto d = static_cast<Eigen::Index>(columns - 1);
  PointMatrix x(static_cast<Eigen::Index>(rows.size()), d);
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    y(static_cast<Eigen::Index>(i)) = rows[i].back();
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open dataset file " + path);
  return load_dataset_csv(in);
}

PointMatrix load_points_csv(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open points file " + path);
  std::size_t columns = 0;
  const auto rows = read_rows(in, dim, false, columns);
  PointMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return x;
}

}  // namespace optcal
