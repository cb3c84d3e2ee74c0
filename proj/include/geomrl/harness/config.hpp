#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomrl/errors.hpp"
#include "geomrl/optim/train.hpp"
#include "geomrl/policy/adapter.hpp"

namespace geomrl {

// JSON experiment schema. Every object is closed: keys outside the lists
// below are rejected. Defaults are filled in by parse_config and written back
// by to_json, so the echo of a parsed config is fully resolved.
//
// {
//   "env": {
//     "kind": "quat_wahba" | "spd_wahba" | "quat_traj" | "spd_traj",
//     "seed": 1,
//     quat_wahba: "size" 10, "observations" 5, "noise_std" 0, "reward_kind" "exp_neg_dist" | "neg_dist"
//     spd_wahba:  "size" 3, "observations" 5, "spd_dim" 3
//     quat_traj:  "horizon" 50, "amplitude" 0.03, "targets_file" "", "export_targets" false
//     spd_traj:   "horizon" 50, "spd_dim" 3, "spread" 1, "control_points" 5,
//                 "targets_file" "", "export_targets" false
//   },
//   "algorithm": {"kind": "power", "exploration_std": 0.3, "decay": 0.999, "elite_count": 10}
//              | {"kind": "cmaes", "sigma0": 0.3, "population": 0},
//   "adapter": "grl" | "normalize" | "cholesky" | "mandel",
//   "features": {"kind": "auto" | "constant" | "time_rbf" | "state_linear", "n_basis": 10, "width": 0},
//   "base_p": "identity" | "initial_state" | [w, x, y, z] | [d*d entries, row-major],
//   "budget": 1000, "eval_interval": 10, "master_seed": 0, "seeds": [1, 2, 3, 4, 5],
//   "output": "out"
// }

enum class EnvKind { kQuatWahba, kSpdWahba, kQuatTraj, kSpdTraj };

inline std::string to_string(EnvKind k) {
  switch (k) {
    case EnvKind::kQuatWahba: return "quat_wahba";
    case EnvKind::kSpdWahba: return "spd_wahba";
    case EnvKind::kQuatTraj: return "quat_traj";
    case EnvKind::kSpdTraj: return "spd_traj";
  }
  return "?";
}

struct EnvConfig {
  EnvKind kind = EnvKind::kQuatWahba;
  std::uint64_t seed = 1;
  int size = 10;
  int observations = 5;
  double noise_std = 0.0;
  RewardKind reward_kind = RewardKind::kExpNegDist;
  int spd_dim = 3;
  int horizon = 50;
  double amplitude = 0.03;
  double spread = 1.0;
  int control_points = 5;
  std::string targets_file;
  bool export_targets = false;

  bool single_step() const { return kind == EnvKind::kQuatWahba || kind == EnvKind::kSpdWahba; }
};

enum class FeatureChoice { kAuto, kConstant, kTimeRbf, kStateLinear };

struct FeatureConfig {
  FeatureChoice kind = FeatureChoice::kAuto;
  int n_basis = 10;
  double width = 0.0;
};

/// Parameterization base for GRL. An explicit point is used for every factor.
struct BaseConfig {
  enum class Kind { kIdentity, kInitialState, kPoint };
  Kind kind = Kind::kIdentity;
  std::vector<double> values;
};

struct ExperimentConfig {
  EnvConfig env;
  AlgorithmKind algorithm = AlgorithmKind::kPower;
  PowerConfig power;
  CmaesConfig cmaes;
  AdapterMode adapter = AdapterMode::kGrl;
  FeatureConfig features;
  BaseConfig base_p;
  int budget = 1000;
  int eval_interval = 10;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string output = "out";
};

namespace detail {

using nlohmann::json;

inline std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected a JSON object");
}

inline void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed,
                       const std::string& context = "") {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(join_path(path, key), context.empty() ? "unknown key" : "unknown key for " + context);
    }
  }
}

template <class T>
T get_number(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  const std::string field = join_path(path, key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned()) return v.get<T>();
      if (v.get<long long>() < 0) throw ConfigError(field, "expected a non-negative integer");
    }
    return v.get<T>();
  } else {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    return v.get<T>();
  }
}

inline std::string get_string(const json& j, const std::string& key, const std::string& path,
                              const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(join_path(path, key), "expected a string");
  return j.at(key).get<std::string>();
}

inline bool get_bool(const json& j, const std::string& key, const std::string& path, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(join_path(path, key), "expected true or false");
  return j.at(key).get<bool>();
}

template <class E>
E parse_enum(const std::string& value, const std::string& field,
             const std::vector<std::pair<std::string, E>>& options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (name == value) return e;
    names += (names.empty() ? "" : ", ") + name;
  }
  throw ConfigError(field, "unsupported value '" + value + "' (expected one of: " + names + ")");
}

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

inline EnvConfig parse_env(const json& j) {
  require_object(j, "env");
  EnvConfig e;
  if (!j.contains("kind")) throw ConfigError("env.kind", "missing");
  e.kind = parse_enum<EnvKind>(get_string(j, "kind", "env", ""), "env.kind",
                               {{"quat_wahba", EnvKind::kQuatWahba},
                                {"spd_wahba", EnvKind::kSpdWahba},
                                {"quat_traj", EnvKind::kQuatTraj},
                                {"spd_traj", EnvKind::kSpdTraj}});
  std::set<std::string> allowed{"kind", "seed"};
  switch (e.kind) {
    case EnvKind::kQuatWahba: allowed.insert({"size", "observations", "noise_std", "reward_kind"}); break;
    case EnvKind::kSpdWahba:
      allowed.insert({"size", "observations", "spd_dim"});
      e.size = 3;
      break;
    case EnvKind::kQuatTraj: allowed.insert({"horizon", "amplitude", "targets_file", "export_targets"}); break;
    case EnvKind::kSpdTraj:
      allowed.insert({"horizon", "spd_dim", "spread", "control_points", "targets_file", "export_targets"});
      break;
  }
  check_keys(j, "env", allowed, "env kind " + to_string(e.kind));
  e.seed = get_number<std::uint64_t>(j, "seed", "env", e.seed);
  e.size = get_number<int>(j, "size", "env", e.size);
  e.observations = get_number<int>(j, "observations", "env", e.observations);
  e.noise_std = get_number<double>(j, "noise_std", "env", e.noise_std);
  if (j.contains("reward_kind")) {
    e.reward_kind = parse_enum<RewardKind>(get_string(j, "reward_kind", "env", ""), "env.reward_kind",
                                           {{"exp_neg_dist", RewardKind::kExpNegDist},
                                            {"neg_dist", RewardKind::kNegDist}});
  }
  e.spd_dim = get_number<int>(j, "spd_dim", "env", e.spd_dim);
  e.horizon = get_number<int>(j, "horizon", "env", e.horizon);
  e.amplitude = get_number<double>(j, "amplitude", "env", e.amplitude);
  e.spread = get_number<double>(j, "spread", "env", e.spread);
  e.control_points = get_number<int>(j, "control_points", "env", e.control_points);
  e.targets_file = get_string(j, "targets_file", "env", e.targets_file);
  e.export_targets = get_bool(j, "export_targets", "env", e.export_targets);

  require(e.size >= 1, "env.size", "must be at least 1");
  require(e.observations >= 1, "env.observations", "must be at least 1");
  require(e.noise_std >= 0.0, "env.noise_std", "must be non-negative");
  require(e.spd_dim >= 1, "env.spd_dim", "must be at least 1");
  require(e.horizon >= 1, "env.horizon", "must be at least 1");
  require(e.amplitude >= 0.0, "env.amplitude", "must be non-negative");
  require(e.spread > 0.0, "env.spread", "must be positive");
  require(e.control_points >= 1, "env.control_points", "must be at least 1");
  return e;
}

inline void parse_algorithm(const json& j, ExperimentConfig& c) {
  require_object(j, "algorithm");
  if (!j.contains("kind")) throw ConfigError("algorithm.kind", "missing");
  c.algorithm = parse_enum<AlgorithmKind>(get_string(j, "kind", "algorithm", ""), "algorithm.kind",
                                          {{"power", AlgorithmKind::kPower}, {"cmaes", AlgorithmKind::kCmaes}});
  if (c.algorithm == AlgorithmKind::kPower) {
    check_keys(j, "algorithm", {"kind", "exploration_std", "decay", "elite_count"}, "PoWER");
    c.power.exploration_std = get_number<double>(j, "exploration_std", "algorithm", c.power.exploration_std);
    c.power.decay = get_number<double>(j, "decay", "algorithm", c.power.decay);
    c.power.elite_count = get_number<int>(j, "elite_count", "algorithm", c.power.elite_count);
    require(c.power.exploration_std >= 0.0, "algorithm.exploration_std", "must be non-negative");
    require(c.power.decay > 0.0 && c.power.decay <= 1.0, "algorithm.decay", "must be in (0, 1]");
    require(c.power.elite_count >= 1, "algorithm.elite_count", "must be at least 1");
  } else {
    check_keys(j, "algorithm", {"kind", "sigma0", "population"}, "CMA-ES");
    c.cmaes.sigma0 = get_number<double>(j, "sigma0", "algorithm", c.cmaes.sigma0);
    c.cmaes.population = get_number<int>(j, "population", "algorithm", c.cmaes.population);
    require(c.cmaes.sigma0 > 0.0, "algorithm.sigma0", "must be positive");
    require(c.cmaes.population == 0 || c.cmaes.population >= 2, "algorithm.population",
            "must be 0 (default) or at least 2");
  }
}

inline FeatureConfig parse_features(const json& j) {
  require_object(j, "features");
  check_keys(j, "features", {"kind", "n_basis", "width"});
  FeatureConfig f;
  if (j.contains("kind")) {
    f.kind = parse_enum<FeatureChoice>(get_string(j, "kind", "features", ""), "features.kind",
                                       {{"auto", FeatureChoice::kAuto},
                                        {"constant", FeatureChoice::kConstant},
                                        {"time_rbf", FeatureChoice::kTimeRbf},
                                        {"state_linear", FeatureChoice::kStateLinear}});
  }
  f.n_basis = get_number<int>(j, "n_basis", "features", f.n_basis);
  f.width = get_number<double>(j, "width", "features", f.width);
  require(f.n_basis >= 1, "features.n_basis", "must be at least 1");
  require(f.width >= 0.0, "features.width", "must be non-negative (0 selects 1/n_basis)");
  return f;
}

inline Layout layout_for(const EnvConfig& e) {
  switch (e.kind) {
    case EnvKind::kQuatWahba: return Layout(static_cast<std::size_t>(e.size), FactorKind::s3());
    case EnvKind::kSpdWahba: return Layout(static_cast<std::size_t>(e.size), FactorKind::spd(e.spd_dim));
    case EnvKind::kQuatTraj: return {FactorKind::s3()};
    case EnvKind::kSpdTraj: return {FactorKind::spd(e.spd_dim)};
  }
  return {};
}

inline BaseConfig parse_base(const json& j, const EnvConfig& env) {
  BaseConfig b;
  if (j.is_string()) {
    b.kind = parse_enum<BaseConfig::Kind>(j.get<std::string>(), "base_p",
                                          {{"identity", BaseConfig::Kind::kIdentity},
                                           {"initial_state", BaseConfig::Kind::kInitialState}});
    return b;
  }
  if (!j.is_array()) throw ConfigError("base_p", "expected \"identity\", \"initial_state\" or an array of numbers");
  b.kind = BaseConfig::Kind::kPoint;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("base_p[" + std::to_string(i) + "]", "expected a number");
    b.values.push_back(j[i].get<double>());
  }
  const bool quat = env.kind == EnvKind::kQuatWahba || env.kind == EnvKind::kQuatTraj;
  const std::size_t need = quat ? 4u : static_cast<std::size_t>(env.spd_dim * env.spd_dim);
  if (b.values.size() != need) {
    throw ConfigError("base_p", "expected " + std::to_string(need) + " numbers for env kind " + to_string(env.kind));
  }
  if (quat) {
    const double n = Eigen::Map<const Eigen::Vector4d>(b.values.data()).norm();
    if (std::abs(n - 1.0) > 1e-6) throw ConfigError("base_p", "quaternion is not unit norm");
  } else {
    const Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(b.values.data(), env.spd_dim, env.spd_dim).transpose();
    try {
      SpdMatrix check(m);
    } catch (const Error& e) {
      throw ConfigError("base_p", e.what());
    }
  }
  return b;
}

}  // namespace detail

/// Parses and validates a config document. Throws ConfigError naming the
/// offending field.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::require;
  detail::require_object(j, "");
  detail::check_keys(j, "", {"env", "algorithm", "adapter", "features", "base_p", "budget", "eval_interval",
                             "master_seed", "seeds", "output"});
  ExperimentConfig c;
  if (!j.contains("env")) throw ConfigError("env", "missing");
  c.env = detail::parse_env(j.at("env"));
  if (j.contains("algorithm")) detail::parse_algorithm(j.at("algorithm"), c);
  if (j.contains("adapter")) {
    c.adapter = detail::parse_enum<AdapterMode>(detail::get_string(j, "adapter", "", ""), "adapter",
                                                {{"grl", AdapterMode::kGrl},
                                                 {"normalize", AdapterMode::kNormalize},
                                                 {"cholesky", AdapterMode::kCholesky},
                                                 {"mandel", AdapterMode::kMandel}});
  }
  if (!supports(c.adapter, detail::layout_for(c.env))) {
    throw ConfigError("adapter", "adapter " + to_string(c.adapter) + " cannot produce actions for env kind " +
                                     to_string(c.env.kind));
  }
  if (j.contains("features")) c.features = detail::parse_features(j.at("features"));
  if (j.contains("base_p")) c.base_p = detail::parse_base(j.at("base_p"), c.env);
  c.budget = detail::get_number<int>(j, "budget", "", c.budget);
  c.eval_interval = detail::get_number<int>(j, "eval_interval", "", c.eval_interval);
  c.master_seed = detail::get_number<std::uint64_t>(j, "master_seed", "", c.master_seed);
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    if (!s.is_array()) throw ConfigError("seeds", "expected an array of integers");
    c.seeds.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string field = "seeds[" + std::to_string(i) + "]";
      if (!s[i].is_number_integer() || (!s[i].is_number_unsigned() && s[i].get<long long>() < 0)) {
        throw ConfigError(field, "expected a non-negative integer");
      }
      c.seeds.push_back(s[i].get<std::uint64_t>());
    }
  }
  c.output = detail::get_string(j, "output", "", c.output);

  require(c.budget > 0, "budget", "must be positive");
  require(c.eval_interval >= 1, "eval_interval", "must be at least 1");
  require(!c.seeds.empty(), "seeds", "must not be empty");
  require(std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() == c.seeds.size(), "seeds",
          "must be distinct");
  require(!c.output.empty(), "output", "must not be empty");
  return c;
}

/// Fully resolved config; parse_config(to_json(c)) reproduces c. Keys come
/// out sorted, so dump() is stable.
inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json env{{"kind", to_string(c.env.kind)}, {"seed", c.env.seed}};
  switch (c.env.kind) {
    case EnvKind::kQuatWahba:
      env["size"] = c.env.size;
      env["observations"] = c.env.observations;
      env["noise_std"] = c.env.noise_std;
      env["reward_kind"] = c.env.reward_kind == RewardKind::kExpNegDist ? "exp_neg_dist" : "neg_dist";
      break;
    case EnvKind::kSpdWahba:
      env["size"] = c.env.size;
      env["observations"] = c.env.observations;
      env["spd_dim"] = c.env.spd_dim;
      break;
    case EnvKind::kQuatTraj:
      env["horizon"] = c.env.horizon;
      env["amplitude"] = c.env.amplitude;
      env["targets_file"] = c.env.targets_file;
      env["export_targets"] = c.env.export_targets;
      break;
    case EnvKind::kSpdTraj:
      env["horizon"] = c.env.horizon;
      env["spd_dim"] = c.env.spd_dim;
      env["spread"] = c.env.spread;
      env["control_points"] = c.env.control_points;
      env["targets_file"] = c.env.targets_file;
      env["export_targets"] = c.env.export_targets;
      break;
  }
  nlohmann::json algo{{"kind", to_string(c.algorithm)}};
  if (c.algorithm == AlgorithmKind::kPower) {
    algo["exploration_std"] = c.power.exploration_std;
    algo["decay"] = c.power.decay;
    algo["elite_count"] = c.power.elite_count;
  } else {
    algo["sigma0"] = c.cmaes.sigma0;
    algo["population"] = c.cmaes.population;
  }
  const char* fk = "auto";
  switch (c.features.kind) {
    case FeatureChoice::kAuto: fk = "auto"; break;
    case FeatureChoice::kConstant: fk = "constant"; break;
    case FeatureChoice::kTimeRbf: fk = "time_rbf"; break;
    case FeatureChoice::kStateLinear: fk = "state_linear"; break;
  }
  nlohmann::json base;
  switch (c.base_p.kind) {
    case BaseConfig::Kind::kIdentity: base = "identity"; break;
    case BaseConfig::Kind::kInitialState: base = "initial_state"; break;
    case BaseConfig::Kind::kPoint: base = c.base_p.values; break;
  }
  return {{"env", env},
          {"algorithm", algo},
          {"adapter", to_string(c.adapter)},
          {"features", {{"kind", fk}, {"n_basis", c.features.n_basis}, {"width", c.features.width}}},
          {"base_p", base},
          {"budget", c.budget},
          {"eval_interval", c.eval_interval},
          {"master_seed", c.master_seed},
          {"seeds", c.seeds},
          {"output", c.output}};
}

/// Reads a config file. JSON syntax errors are reported with line and column.
/// A relative targets_file is resolved against the config file's directory.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("<syntax>", "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                      ": invalid JSON");
  }
  ExperimentConfig c = parse_config(j);
  if (!c.env.targets_file.empty()) {
    std::filesystem::path p(c.env.targets_file);
    if (p.is_relative()) p = std::filesystem::path(path).parent_path() / p;
    c.env.targets_file = std::filesystem::absolute(p).lexically_normal().string();
  }
  return c;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a(to_json(c).dump()); }

}  // namespace geomrl
