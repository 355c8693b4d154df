#include "optcal/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include "optcal/error.hpp"

namespace optcal {

std::string method_name(Method m) {
  switch (m) {
    case Method::NoBiasCorr:
      return "NoBiasCorr";
    case Method::NP:
      return "NP";
    case Method::LSCal:
      return "LSCal";
    case Method::OptCal:
      return "OptCal";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::NoBiasCorr, Method::NP, Method::LSCal, Method::OptCal})
    if (method_name(m) == name) return m;
  throw InvalidArgument("unknown method '" + name + "' (expected NoBiasCorr, NP, LSCal or OptCal)");
}

std::vector<double> default_psi_grid(std::size_t dim) {
  std::vector<double> grid = {0.05, 0.1, 0.2, 0.3, 0.5, 1.0};
  const double scale = std::sqrt(static_cast<double>(dim));
  for (auto& g : grid) g *= scale;
  return grid;
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw InvalidArgument("config: replicates must be >= 1");
  if (mc_test_points < 1000) throw InvalidArgument("config: mc_test_points must be >= 1000");
  if (methods.empty()) throw InvalidArgument("config: methods must be nonempty");
  if (sigma2.empty()) throw InvalidArgument("config: sigma2 list must be nonempty");
  for (double s : sigma2)
    if (!(s >= 0.0)) throw InvalidArgument("config: sigma2 values must be >= 0");
  if (n < 5) throw InvalidArgument("config: n must be >= 5");
  if (starts < 1) throw InvalidArgument("config: starts must be >= 1");
  if (lambda_grid.empty()) throw InvalidArgument("config: lambda grid must be nonempty");
  if (psi.fixed && !(*psi.fixed > 0.0)) throw InvalidArgument("config: fixed psi must be positive");
  if (optcal_mode == OptPredMode::Full && max_outer < 1) throw InvalidArgument("config: max_outer must be >= 1");
}

CalibrationOptions ExperimentConfig::calibration_options() const {
  CalibrationOptions o;
  o.starts = starts;
  o.lambda_grid = lambda_grid;
  return o;
}

double cv5_select_psi(const Dataset& data, KernelFamily family, const std::vector<double>& psi_grid,
                      const Vector& eta_at_X, RngStream stream, const std::vector<double>& lambda_grid) {
  if (psi_grid.empty()) throw InvalidArgument("cv5_select_psi: empty psi grid");
  if (psi_grid.size() == 1) return psi_grid.front();
  constexpr Eigen::Index folds = 5;
  const Eigen::Index n = data.size();
  if (n < folds) throw InvalidArgument("cv5_select_psi: need at least 5 observations");
  if (eta_at_X.size() != n) throw DimensionMismatch("cv5_select_psi: eta_at_X size mismatch");

  const auto perm = permutation(stream, n);
  std::vector<std::vector<Eigen::Index>> train(folds), test(folds);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index f = i % folds;
    for (Eigen::Index k = 0; k < folds; ++k)
      (k == f ? test : train)[static_cast<std::size_t>(k)].push_back(perm[static_cast<std::size_t>(i)]);
  }

  const auto dim = static_cast<std::size_t>(data.dim());
  double best_psi = 0.0;
  double best_error = std::numeric_limits<double>::infinity();
  for (double psi : psi_grid) {
    const KernelSpec kernel(family, psi, dim);
    double error = 0.0;
    for (Eigen::Index k = 0; k < folds; ++k) {
      const auto& tr = train[static_cast<std::size_t>(k)];
      const Dataset sub = data.subset(tr);
      Vector eta_sub(static_cast<Eigen::Index>(tr.size()));
      for (std::size_t i = 0; i < tr.size(); ++i) eta_sub(static_cast<Eigen::Index>(i)) = eta_at_X(tr[i]);
      const RidgeProblem problem(sub, eta_sub, kernel);
      const DiscrepancyFit fit = problem.fit(select_lambda_gcv(problem, lambda_grid));
      for (Eigen::Index i : test[static_cast<std::size_t>(k)]) {
        const double pred = eta_at_X(i) + predict_discrepancy(fit, data.point(i));
        error += (data.Y(i) - pred) * (data.Y(i) - pred);
      }
    }
    if (error < best_error || (error == best_error && psi > best_psi)) {
      best_error = error;
      best_psi = psi;
    }
  }
  return best_psi;
}

TestSet make_test_set(const NamedSystem& system, std::size_t points, RngStream stream) {
  if (!system.has_truth()) throw NoTruthAvailable("system " + system.name + " has no known truth");
  TestSet t{uniform_points(stream, points, system.dim), Vector(static_cast<Eigen::Index>(points))};
  for (Eigen::Index i = 0; i < t.x.rows(); ++i) t.truth(i) = system.zeta(row(t.x, i));
  return t;
}

double pmse(const Predictor& predictor, const TestSet& test) {
  std::vector<double> sq(static_cast<std::size_t>(test.x.rows()));
  for (Eigen::Index i = 0; i < test.x.rows(); ++i) {
    const double e = predictor(row(test.x, i)) - test.truth(i);
    sq[static_cast<std::size_t>(i)] = e * e;
  }
  return pairwise_sum(sq) / static_cast<double>(sq.size());
}

double pmse(const Predictor& predictor, const NamedSystem& system, std::size_t mc_test_points, RngStream stream) {
  return pmse(predictor, make_test_set(system, mc_test_points, stream));
}

namespace {

bool wants(const ExperimentConfig& c, Method m) { return std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end(); }

Predictor fit_predictor(std::shared_ptr<const DiscrepancyFit> fit) {
  return [fit = std::move(fit)](Point x) { return predict_discrepancy(*fit, x); };
}

Predictor calibrated_predictor(const ComputerModel& model, std::vector<double> theta,
                               std::shared_ptr<const DiscrepancyFit> fit) {
  return [eta = model.eta, theta = std::move(theta), fit = std::move(fit)](Point x) {
    double v = eta(x, theta);
    if (fit) v += predict_discrepancy(*fit, x);
    return v;
  };
}

}  // namespace

PredictorSet build_predictors(const Dataset& data, const NamedSystem& system, const ExperimentConfig& config,
                              RngStream stream) {
  if (config.methods.empty()) throw InvalidArgument("build_predictors: no methods requested");
  const ComputerModel& model = system.model;
  const CalibrationOptions options = config.calibration_options();
  const auto dim = static_cast<std::size_t>(data.dim());
  const std::vector<double> psi_grid = config.psi.grid.empty() ? default_psi_grid(dim) : config.psi.grid;
  PredictorSet out;

  if (wants(config, Method::NP) || wants(config, Method::NoBiasCorr)) {
    const Vector zeros = Vector::Zero(data.size());
    out.psi_np = config.psi.fixed ? *config.psi.fixed
                                  : cv5_select_psi(data, KernelFamily::Matern32, psi_grid, zeros, stream.substream(1),
                                                   config.lambda_grid);
    const KernelSpec kernel = KernelSpec::matern32(out.psi_np, dim);
    const RidgeProblem problem(data, zeros, kernel);
    auto np_fit = std::make_shared<const DiscrepancyFit>(problem.fit(select_lambda_gcv(problem, config.lambda_grid)));
    if (wants(config, Method::NP)) out.predictors[Method::NP] = fit_predictor(np_fit);
    if (wants(config, Method::NoBiasCorr)) {
      out.l2 = calibrate_l2_from_fit(*np_fit, model, config.l2_mc_points, stream.substream(2), options);
      out.predictors[Method::NoBiasCorr] = calibrated_predictor(model, out.l2->theta_hat, nullptr);
    }
  }

  if (wants(config, Method::LSCal) || wants(config, Method::OptCal)) {
    out.ls = calibrate_ls(data, model, config.starts, stream.substream(3));
    const Vector eta_ls = model.evaluate(data.X, out.ls->theta_hat);
    out.psi_calibration = config.psi.fixed ? *config.psi.fixed
                                           : cv5_select_psi(data, KernelFamily::Matern32, psi_grid, eta_ls,
                                                            stream.substream(4), config.lambda_grid);
    const KernelSpec kernel = KernelSpec::matern32(out.psi_calibration, dim);
    if (wants(config, Method::LSCal)) {
      const RidgeProblem problem(data, eta_ls, kernel);
      out.ls_discrepancy = problem.fit(select_lambda_gcv(problem, config.lambda_grid));
      out.predictors[Method::LSCal] = calibrated_predictor(
          model, out.ls->theta_hat, std::make_shared<const DiscrepancyFit>(*out.ls_discrepancy));
    }
    if (wants(config, Method::OptCal)) {
      out.optpred = calibrate_optpred_from(data, model, kernel, *out.ls, config.optcal_mode, stream.substream(5),
                                           config.max_outer, options);
      out.predictors[Method::OptCal] = calibrated_predictor(
          model, out.optpred->theta_hat, std::make_shared<const DiscrepancyFit>(*out.optpred->discrepancy));
    }
  }
  return out;
}

namespace {

ReplicateRecord run_cell(const ExperimentConfig& config, const NamedSystem& system, std::size_t replicate,
                         std::size_t sigma_index) {
  const double sigma2 = config.sigma2[sigma_index];
  const RngStream cell = RngStream(config.seed, replicate).substream(1000 + sigma_index);
  const Dataset data = generate_dataset(system, config.n, std::sqrt(sigma2), cell.substream(1));
  const PredictorSet set = build_predictors(data, system, config, cell.substream(2));
  const TestSet test = make_test_set(system, config.mc_test_points, cell.substream(3));

  ReplicateRecord rec;
  rec.replicate = replicate;
  rec.sigma2 = sigma2;
  rec.psi_np = set.psi_np;
  rec.psi_calibration = set.psi_calibration;
  for (const auto& [m, predictor] : set.predictors) rec.pmse[m] = pmse(predictor, test);
  if (set.l2) rec.theta[Method::NoBiasCorr] = set.l2->theta_hat;
  if (set.ls) rec.theta[Method::LSCal] = set.ls->theta_hat;
  if (set.optpred) {
    rec.theta[Method::OptCal] = set.optpred->theta_hat;
    rec.optcal_trace = set.optpred->objective_trace;
  }
  return rec;
}

double sample_sd(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1));
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const PmseRow* PmseReport::find(Method m, double sigma2) const {
  for (const auto& r : rows)
    if (r.method == m && r.sigma2 == sigma2) return &r;
  return nullptr;
}

PmseReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const NamedSystem system = system_by_name(config.system);
  if (!system.has_truth()) throw NoTruthAvailable("experiments need a system with a known truth");

  const std::size_t cells = config.replicates * config.sigma2.size();
  std::vector<ReplicateRecord> records(cells);
  std::vector<std::exception_ptr> errors(cells);
  std::atomic<std::size_t> next{0};

  // Cell c = sigma_index * replicates + replicate; each cell owns its stream.
  const auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      const std::size_t sigma_index = c / config.replicates;
      const std::size_t replicate = c % config.replicates;
      try {
        records[c] = run_cell(config, system, replicate, sigma_index);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  std::size_t threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = std::min(threads, cells);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t c = 0; c < cells; ++c) {
    if (!errors[c]) continue;
    const std::string where = "replicate " + std::to_string(c % config.replicates) + " (sigma2 = " +
                              format_real(config.sigma2[c / config.replicates]) + ")";
    try {
      std::rethrow_exception(errors[c]);
    } catch (const std::exception& e) {
      throw Error(where + ": " + e.what());
    }
  }

  PmseReport report;
  report.records = std::move(records);
  for (Method m : config.methods) {
    for (std::size_t k = 0; k < config.sigma2.size(); ++k) {
      std::vector<double> values;
      values.reserve(config.replicates);
      for (std::size_t r = 0; r < config.replicates; ++r)
        values.push_back(report.records[k * config.replicates + r].pmse.at(m));
      const double mean = pairwise_sum(values) / static_cast<double>(values.size());
      report.rows.push_back({m, config.sigma2[k], mean, sample_sd(values, mean), values.size()});
    }
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const PmseRow& a, const PmseRow& b) {
    const std::string an = method_name(a.method), bn = method_name(b.method);
    return an != bn ? an < bn : a.sigma2 < b.sigma2;
  });
  return report;
}

void write_report_csv(const PmseReport& report, std::ostream& out) {
  out << "method,sigma2,mean_pmse,se_pmse,replicates\n";
  for (const auto& r : report.rows)
    out << method_name(r.method) << ',' << format_real(r.sigma2) << ',' << format_real(r.mean_pmse) << ','
        << format_real(r.se_pmse) << ',' << r.replicates << '\n';
}

void write_replicates_csv(const PmseReport& report, std::ostream& out) {
  out << "replicate,sigma2,method,pmse,psi,theta\n";
  for (const auto& rec : report.records) {
    for (const auto& [m, value] : rec.pmse) {
      out << rec.replicate << ',' << format_real(rec.sigma2) << ',' << method_name(m) << ',' << format_real(value)
          << ',' << format_real(m == Method::NP || m == Method::NoBiasCorr ? rec.psi_np : rec.psi_calibration) << ',';
      const auto it = rec.theta.find(m);
      if (it != rec.theta.end())
        for (std::size_t j = 0; j < it->second.size(); ++j) out << (j ? ";" : "") << format_real(it->second[j]);
      out << '\n';
    }
  }
}

std::vector<ProfilePoint> discrepancy_profile(const NamedSystem& system, ProfileNorm norm,
                                              const ProfileOptions& options) {
  if (!system.has_truth()) throw NoTruthAvailable("profile needs a system with a known truth");
  if (system.model.num_params() != 1) throw InvalidArgument("profile supports one-parameter models only");
  if (!(options.theta_step > 0.0)) throw InvalidArgument("profile: theta step must be positive");
  const Box& box = system.model.theta_box;
  const auto steps = static_cast<std::size_t>(std::floor(box.width(0) / options.theta_step + 1e-9));

  std::function<double(const std::function<double(Point)>&)> measure;
  std::shared_ptr<RkhsNormApprox> rkhs;
  PointMatrix quad;
  if (norm == ProfileNorm::Rkhs) {
    rkhs = std::make_shared<RkhsNormApprox>(KernelSpec::matern32(options.psi, system.dim), options.rkhs_grid);
    measure = [&](const std::function<double(Point)>& g) { return (*rkhs)(g); };
  } else {
    // Tensor midpoint rule with about `quadrature_points` nodes.
    const auto per_axis = static_cast<std::size_t>(
        std::max(1.0, std::round(std::pow(static_cast<double>(options.quadrature_points), 1.0 / system.dim))));
    quad = uniform_grid(per_axis + 1, system.dim);
    const double h = 1.0 / static_cast<double>(per_axis);
    // Shift the grid to cell midpoints and drop the points that fell on 1.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < quad.rows(); ++i) {
      bool inside = true;
      for (Eigen::Index j = 0; j < quad.cols(); ++j) inside = inside && quad(i, j) < 1.0 - 0.5 * h;
      if (inside) keep.push_back(i);
    }
    PointMatrix mid(static_cast<Eigen::Index>(keep.size()), quad.cols());
    for (std::size_t i = 0; i < keep.size(); ++i)
      mid.row(static_cast<Eigen::Index>(i)) = quad.row(keep[i]).array() + 0.5 * h;
    quad = std::move(mid);
    measure = [&](const std::function<double(Point)>& g) {
      std::vector<double> sq(static_cast<std::size_t>(quad.rows()));
      for (Eigen::Index i = 0; i < quad.rows(); ++i) {
        const double v = g(row(quad, i));
        sq[static_cast<std::size_t>(i)] = v * v;
      }
      return pairwise_sum(sq) / static_cast<double>(sq.size());
    };
  }

  std::vector<ProfilePoint> out;
  out.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double theta = std::min(box.lower[0] + static_cast<double>(k) * options.theta_step, box.upper[0]);
    const double t[1] = {theta};
    const auto g = [&](Point x) { return system.zeta(x) - system.model.eta(x, t); };
    out.push_back({theta, measure(g)});
  }
  return out;
}

std::vector<std::size_t> profile_local_minima(const std::vector<ProfilePoint>& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < p.size(); ++i)
    if (p[i].norm_sq < p[i - 1].norm_sq && p[i].norm_sq <= p[i + 1].norm_sq) out.push_back(i);
  return out;
}

}  // namespace optcal

namespace optcal {

PropositionInstance make_proposition_instance(std::size_t n, std::size_t p, double sigma2, double psi,
                                              std::size_t test_points, RngStream stream) {
  if (p < 1) throw InvalidArgument("proposition instance: p must be >= 1");
  const NamedSystem ex1 = make_system(SystemId::Ex1);
  PropositionInstance inst{generate_dataset(ex1, n, std::sqrt(sigma2), stream.substream(1)), {},
                           KernelSpec::matern32(psi, 1), {}};
  for (std::size_t j = 0; j < p; ++j)
    inst.model.basis.emplace_back([j](Point x) { return std::pow(x[0], static_cast<double>(j)); });
  RngStream tp = stream.substream(2);
  inst.test_points = uniform_points(tp, test_points, 1);
  return inst;
}

}  // namespace optcal
