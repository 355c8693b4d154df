#include <fstream>
#include <sstream>

#include "optcal/error.hpp"
#include "optcal/experiments.hpp"

namespace optcal {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::istringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw InvalidArgument("config: " + key + ": '" + v + "' is not a number");
  return x;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const double x = to_real(key, v);
  if (x < 0.0 || x != static_cast<double>(static_cast<std::size_t>(x)))
    throw InvalidArgument("config: " + key + ": '" + v + "' is not a nonnegative integer");
  return static_cast<std::size_t>(x);
}

std::vector<double> to_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_real(key, item));
  if (out.empty()) throw InvalidArgument("config: " + key + " is empty");
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "system") {
      c.system = value;
    } else if (key == "n") {
      c.n = to_count(key, value);
    } else if (key == "sigma2") {
      c.sigma2 = to_reals(key, value);
    } else if (key == "replicates") {
      c.replicates = to_count(key, value);
    } else if (key == "mc_test_points") {
      c.mc_test_points = to_count(key, value);
    } else if (key == "methods") {
      c.methods.clear();
      for (const auto& m : split_list(value)) c.methods.push_back(method_from_name(m));
    } else if (key == "psi") {
      if (value == "cv5")
        c.psi.fixed.reset();
      else
        c.psi.fixed = to_real(key, value);
    } else if (key == "psi_grid") {
      c.psi.grid = to_reals(key, value);
    } else if (key == "lambda_grid") {
      c.lambda_grid = value == "default" ? default_lambda_grid() : to_reals(key, value);
    } else if (key == "starts") {
      c.starts = to_count(key, value);
    } else if (key == "l2_mc_points") {
      c.l2_mc_points = to_count(key, value);
    } else if (key == "optcal_mode") {
      if (value == "one_step")
        c.optcal_mode = OptPredMode::OneStep;
      else if (value == "full")
        c.optcal_mode = OptPredMode::Full;
      else
        throw InvalidArgument("config: optcal_mode must be one_step or full");
    } else if (key == "max_outer") {
      c.max_outer = to_count(key, value);
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (key == "threads") {
      c.threads = to_count(key, value);
    } else if (key == "output") {
      c.output = value;
    } else {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  return parse_config(in);
}

}  // namespace optcal
