#include <fstream>
#include <istream>
#include <string>

#include "noisysort/errors.hpp"
#include "noisysort/harness.hpp"

namespace noisysort {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto item = trim(std::string_view(v).substr(start, comma == std::string::npos ? std::string::npos
                                                                                       : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw PreconditionError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
    throw PreconditionError("config key '" + key + "': expected a nonnegative integer, got '" + v + "'");
  }
  return static_cast<std::uint64_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw PreconditionError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace

ConfigMap parse_config(std::istream& in) {
  ConfigMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    out[trim(std::string_view(body).substr(0, eq))] = trim(std::string_view(body).substr(eq + 1));
  }
  return out;
}

ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in);
}

void apply_config(ExperimentSpec& spec, const ConfigMap& config) {
  for (const auto& [key, value] : config) {
    if (key == "kind") {
      spec.kind = parse_experiment_kind(value);
    } else if (key == "n") {
      spec.n_values.clear();
      for (const auto& v : split_list(value)) spec.n_values.push_back(to_uint(key, v));
    } else if (key == "alpha") {
      spec.alphas.clear();
      for (const auto& v : split_list(value)) spec.alphas.push_back(to_double(key, v));
    } else if (key == "budget") {
      spec.budgets.clear();
      for (const auto& v : split_list(value)) spec.budgets.push_back(to_uint(key, v));
    } else if (key == "lambda") {
      spec.lambdas.clear();
      for (const auto& v : split_list(value)) spec.lambdas.push_back(to_double(key, v));
    } else if (key == "models") {
      spec.models.clear();
      for (const auto& v : split_list(value)) spec.models.push_back(SamplingTag::parse_model(v));
    } else if (key == "estimators") {
      spec.estimators.clear();
      for (const auto& v : split_list(value)) spec.estimators.push_back(parse_estimator(v));
    } else if (key == "replicates") {
      spec.replicates = to_uint(key, value);
    } else if (key == "seed") {
      spec.master_seed = to_uint(key, value);
    } else if (key == "stages") {
      if (value == "auto") {
        spec.stages.reset();
      } else {
        spec.stages = to_uint(key, value);
      }
    } else if (key == "c0") {
      spec.ms.c0 = to_double(key, value);
    } else if (key == "c1") {
      spec.ms.c1 = to_double(key, value);
    } else if (key == "threshold_constant") {
      if (value == "literal") {
        spec.ms.threshold_constant.reset();
      } else {
        spec.ms.threshold_constant = to_double(key, value);
      }
    } else if (key == "lambda_hat") {
      spec.ms.lambda_hat_override = to_double(key, value);
    } else if (key == "estimate_lambda") {
      spec.estimate_lambda = to_bool(key, value);
    } else if (key == "identity_truth") {
      spec.identity_truth = to_bool(key, value);
    } else if (key == "workers") {
      spec.workers = to_uint(key, value);
    } else if (key == "max_n") {
      spec.caps.max_n = to_uint(key, value);
    } else if (key == "max_budget") {
      spec.caps.max_budget = to_uint(key, value);
    } else if (key == "out") {
      spec.output_csv = value;
    } else if (key == "regions_dir") {
      spec.regions_dir = value;
    } else if (key == "timing") {
      spec.timing = to_bool(key, value);
    } else {
      throw PreconditionError("unknown config key '" + key + "'");
    }
  }
}

}  // namespace noisysort
