#include "optcal/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "optcal/bayes_link.hpp"
#include "optcal/calibration.hpp"
#include "optcal/error.hpp"
#include "optcal/experiments.hpp"
#include "optcal/models.hpp"

namespace optcal {

namespace {

using nlohmann::json;

/// Writes to --out when given, otherwise to the command's stdout stream.
class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InvalidArgument("cannot open output file " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

json fit_to_json(const std::string& model, const std::string& method, const std::vector<double>& theta,
                 const std::optional<DiscrepancyFit>& fit) {
  json j;
  j["model"] = model;
  j["method"] = method;
  j["theta"] = theta;
  if (fit) {
    json d;
    d["kernel"] = {{"family", "matern32"}, {"psi", fit->kernel.psi}, {"dim", fit->kernel.dim}};
    d["lambda"] = fit->lambda;
    d["jitter"] = fit->jitter;
    std::vector<std::vector<double>> pts;
    for (Eigen::Index i = 0; i < fit->points.rows(); ++i) {
      const Point r = row(fit->points, i);
      pts.emplace_back(r.begin(), r.end());
    }
    d["points"] = pts;
    d["coefficients"] = std::vector<double>(fit->coefficients.data(), fit->coefficients.data() + fit->coefficients.size());
    j["discrepancy"] = d;
  } else {
    j["discrepancy"] = nullptr;
  }
  return j;
}

std::optional<DiscrepancyFit> fit_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.at("kernel").at("family").get<std::string>() != "matern32")
    throw InvalidArgument("fit file: unsupported kernel family");
  DiscrepancyFit fit;
  fit.kernel = KernelSpec::matern32(j.at("kernel").at("psi").get<double>(), j.at("kernel").at("dim").get<std::size_t>());
  fit.lambda = j.at("lambda").get<double>();
  fit.jitter = j.value("jitter", 0.0);
  const auto pts = j.at("points").get<std::vector<std::vector<double>>>();
  const auto coef = j.at("coefficients").get<std::vector<double>>();
  if (pts.size() != coef.size()) throw DimensionMismatch("fit file: points and coefficients differ in length");
  fit.points.resize(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(fit.kernel.dim));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].size() != fit.kernel.dim) throw DimensionMismatch("fit file: point dimension mismatch");
    for (std::size_t k = 0; k < fit.kernel.dim; ++k)
      fit.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = pts[i][k];
  }
  fit.coefficients = Eigen::Map<const Vector>(coef.data(), static_cast<Eigen::Index>(coef.size()));
  return fit;
}

std::string join(const std::vector<double>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : std::string()) + format_real(v[i]);
  return s;
}

double pick_psi(const std::string& psi_arg, const Dataset& data, const Vector& eta_at_X, RngStream stream) {
  if (psi_arg != "cv5") {
    std::size_t used = 0;
    const double v = std::stod(psi_arg, &used);
    if (used != psi_arg.size() || !(v > 0.0)) throw InvalidArgument("--psi must be 'cv5' or a positive number");
    return v;
  }
  const auto dim = static_cast<std::size_t>(data.dim());
  return cv5_select_psi(data, KernelFamily::Matern32, default_psi_grid(dim), eta_at_X, stream);
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prediction-oriented calibration of imperfect computer models", "optcal"};
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  std::size_t threads = 1;
  std::string out_path;
  app.add_option("--seed", seed, "Master seed")->capture_default_str();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo benchmark from a key=value config");
  std::string config_path, replicates_path;
  experiment->add_option("--config", config_path, "Config file")->required();
  experiment->add_option("--seed", seed, "Master seed (overrides the config)");
  experiment->add_option("--threads", threads, "Worker threads, 0 = auto")->capture_default_str();
  experiment->add_option("--out", out_path, "Report CSV (default: config output or stdout)");
  experiment->add_option("--replicates-out", replicates_path, "Per-replicate CSV");

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate a library model against a dataset CSV");
  std::string data_path, model_name, method = "optpred", psi_arg = "cv5", mode = "one_step";
  std::size_t starts = 10, mc_points = 4096, max_outer = 10;
  calibrate->add_option("--data", data_path, "Dataset CSV with header x1,...,xd,y")->required();
  calibrate->add_option("--model", model_name, "ex1, ex2, ex3 or ion")->required();
  calibrate->add_option("--method", method, "ls, l2 or optpred")
      ->check(CLI::IsMember({"ls", "l2", "optpred"}))
      ->capture_default_str();
  calibrate->add_option("--psi", psi_arg, "Kernel scale or cv5")->capture_default_str();
  calibrate->add_option("--mode", mode, "one_step or full (optpred only)")
      ->check(CLI::IsMember({"one_step", "full"}))
      ->capture_default_str();
  calibrate->add_option("--starts", starts, "Optimizer starts")->capture_default_str();
  calibrate->add_option("--max-outer", max_outer, "Outer iterations in full mode")->capture_default_str();
  calibrate->add_option("--mc-points", mc_points, "Monte Carlo points for l2")->capture_default_str();
  calibrate->add_option("--seed", seed, "Master seed");
  calibrate->add_option("--out", out_path, "Write the fit as JSON");

  // predict
  auto* predict = app.add_subcommand("predict", "Evaluate a saved fit at points from a CSV");
  std::string fit_path, points_path;
  predict->add_option("--fit", fit_path, "Fit JSON written by calibrate --out")->required();
  predict->add_option("--points", points_path, "CSV of points x1,...,xd")->required();
  predict->add_option("--out", out_path, "Predictions CSV (default stdout)");

  // profile
  auto* profile = app.add_subcommand("profile", "Squared discrepancy norm as a function of theta");
  std::string norm = "rkhs";
  ProfileOptions popt;
  profile->add_option("--model", model_name, "One-parameter system, e.g. ex1")->required();
  profile->add_option("--norm", norm, "l2 or rkhs")->check(CLI::IsMember({"l2", "rkhs"}))->capture_default_str();
  profile->add_option("--psi", popt.psi, "Kernel scale for the RKHS norm")->capture_default_str();
  profile->add_option("--step", popt.theta_step, "Theta grid step")->capture_default_str();
  profile->add_option("--grid", popt.rkhs_grid, "Grid points per axis for the RKHS norm")->capture_default_str();
  profile->add_option("--quad", popt.quadrature_points, "Quadrature points for the L2 norm")->capture_default_str();
  profile->add_option("--out", out_path, "Profile CSV (default stdout)");

  // proposition
  auto* proposition = app.add_subcommand("proposition", "Posterior mean vs. its large-alpha closed form");
  std::size_t prop_n = 20, prop_p = 3, prop_tests = 50;
  std::vector<double> alpha_grid = {1.0, 1e2, 1e4, 1e6, 1e8};
  double beta = 1.0, sigma2 = 0.1, prop_psi = 0.3;
  proposition->add_option("--n", prop_n, "Sample size")->capture_default_str();
  proposition->add_option("--p", prop_p, "Number of polynomial basis functions")->capture_default_str();
  proposition->add_option("--alpha-grid", alpha_grid, "Increasing alpha values")->delimiter(',');
  proposition->add_option("--beta", beta, "Discrepancy prior scale")->capture_default_str();
  proposition->add_option("--sigma2", sigma2, "Noise variance")->capture_default_str();
  proposition->add_option("--psi", prop_psi, "Kernel scale")->capture_default_str();
  proposition->add_option("--test-points", prop_tests, "Number of test points")->capture_default_str();
  proposition->add_option("--seed", seed, "Master seed");
  proposition->add_option("--out", out_path, "Deviation CSV (default stdout)");

  std::vector<const char*> argv;
  argv.push_back("optcal");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*experiment) {
      ExperimentConfig config = load_config(config_path);
      if (experiment->count("--seed") || app.count("--seed")) config.seed = seed;
      if (experiment->count("--threads")) config.threads = threads;
      if (!out_path.empty()) config.output = out_path;
      const PmseReport report = run_experiment(config);
      OutputSink sink(config.output, out);
      write_report_csv(report, sink.get());
      if (!replicates_path.empty()) {
        OutputSink rep(replicates_path, out);
        write_replicates_csv(report, rep.get());
      }
    } else if (*calibrate) {
      const Dataset data = load_dataset_csv(data_path);
      const NamedSystem system = system_by_name(model_name);
      const ComputerModel& model = system.model;
      CalibrationOptions options;
      options.starts = starts;
      const RngStream stream(seed, 0);

      CalibrationResult result;
      double psi = 0.0;
      if (method == "l2") {
        psi = pick_psi(psi_arg, data, Vector::Zero(data.size()), stream.substream(1));
        result = calibrate_l2(data, model, KernelSpec::matern32(psi, model.input_dim), mc_points,
                              stream.substream(2), options);
      } else {
        const CalibrationResult ls = calibrate_ls(data, model, starts, stream.substream(3));
        const Vector eta_ls = model.evaluate(data.X, ls.theta_hat);
        psi = pick_psi(psi_arg, data, eta_ls, stream.substream(4));
        const KernelSpec kernel = KernelSpec::matern32(psi, model.input_dim);
        if (method == "ls") {
          result = ls;
          const RidgeProblem problem(data, eta_ls, kernel);
          result.discrepancy = problem.fit(select_lambda_gcv(problem, options.lambda_grid));
          result.lambda_used = result.discrepancy->lambda;
        } else {
          result = calibrate_optpred_from(data, model, kernel, ls,
                                          mode == "full" ? OptPredMode::Full : OptPredMode::OneStep,
                                          stream.substream(5), max_outer, options);
        }
      }
      out << "method," << to_string(result.method) << "\n";
      out << "theta," << join(result.theta_hat, ',') << "\n";
      out << "lambda," << (result.lambda_used ? format_real(*result.lambda_used) : std::string("NA")) << "\n";
      out << "psi," << format_real(psi) << "\n";
      if (!result.objective_trace.empty()) out << "objective_trace," << join(result.objective_trace, ',') << "\n";
      if (!out_path.empty()) {
        OutputSink sink(out_path, out);
        sink.get() << fit_to_json(model_name, to_string(result.method), result.theta_hat, result.discrepancy).dump(2)
                   << "\n";
      }
    } else if (*predict) {
      std::ifstream in(fit_path);
      if (!in) throw InvalidArgument("cannot open fit file " + fit_path);
      const json j = json::parse(in);
      const NamedSystem system = system_by_name(j.at("model").get<std::string>());
      const std::vector<double> theta = j.at("theta").get<std::vector<double>>();
      if (theta.size() != system.model.num_params()) throw DimensionMismatch("fit file: wrong number of parameters");
      const std::optional<DiscrepancyFit> fit = fit_from_json(j.at("discrepancy"));
      const PointMatrix pts = load_points_csv(points_path, system.model.input_dim);

      OutputSink sink(out_path, out);
      auto& o = sink.get();
      for (std::size_t k = 0; k < system.model.input_dim; ++k) o << 'x' << (k + 1) << ',';
      o << "prediction\n";
      for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const Point x = row(pts, i);
        double v = system.model.eta(x, theta);
        if (fit) v += predict_discrepancy(*fit, x);
        for (double c : x) o << format_real(c) << ',';
        o << format_real(v) << '\n';
      }
    } else if (*profile) {
      const NamedSystem system = system_by_name(model_name);
      const auto points =
          discrepancy_profile(system, norm == "l2" ? ProfileNorm::L2 : ProfileNorm::Rkhs, popt);
      OutputSink sink(out_path, out);
      sink.get() << "theta,norm_sq\n";
      for (const auto& p : points) sink.get() << format_real(p.theta) << ',' << format_real(p.norm_sq) << '\n';
    } else if (*proposition) {
      const PropositionInstance inst =
          make_proposition_instance(prop_n, prop_p, sigma2, prop_psi, prop_tests, RngStream(seed, 0));
      const BayesHyper hyper{1.0, beta, sigma2};
      const auto dev = verify_proposition_limit(inst.data, inst.model, inst.kernel, hyper, alpha_grid, inst.test_points);
      const double range = inst.data.Y.maxCoeff() - inst.data.Y.minCoeff();
      OutputSink sink(out_path, out);
      sink.get() << "alpha,max_deviation,relative_deviation\n";
      for (std::size_t k = 0; k < dev.size(); ++k)
        sink.get() << format_real(alpha_grid[k]) << ',' << format_real(dev[k]) << ','
                   << format_real(range > 0.0 ? dev[k] / range : dev[k]) << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace optcal
