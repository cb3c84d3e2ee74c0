#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geomrl/env/generators.hpp"
#include "geomrl/env/targets_io.hpp"
#include "geomrl/env/trajectory.hpp"
#include "geomrl/env/wahba.hpp"
#include "geomrl/harness/config.hpp"
#include "geomrl/harness/pool.hpp"
#include "geomrl/optim/train.hpp"

namespace geomrl {

/// Environment instance for one seed. Generated instances use
/// derive_seed(env.seed, seed); an imported targets file is shared by all
/// seeds.
inline std::unique_ptr<Environment> make_env(const EnvConfig& e, std::uint64_t seed) {
  const std::uint64_t s = derive_seed(e.seed, seed);
  switch (e.kind) {
    case EnvKind::kQuatWahba:
      return std::make_unique<QuatWahbaEnv>(QuatWahbaEnv::generate(s, e.size, e.observations, e.reward_kind, e.noise_std));
    case EnvKind::kSpdWahba:
      return std::make_unique<SpdWahbaEnv>(SpdWahbaEnv::generate(s, e.size, e.spd_dim, e.observations));
    case EnvKind::kQuatTraj: {
      auto pts = e.targets_file.empty() ? gen_quat_traj(s, e.horizon + 1, e.amplitude)
                                        : quats_from_table(load_table(e.targets_file));
      if (pts.size() < 2) throw ConfigError("env.targets_file", "needs an initial point and at least one target");
      return std::make_unique<QuatTrajEnv>(pts.front(), std::vector<UnitQuaternion>(pts.begin() + 1, pts.end()));
    }
    case EnvKind::kSpdTraj: {
      auto pts = e.targets_file.empty() ? gen_spd_traj(s, e.horizon + 1, e.spd_dim, e.spread, e.control_points)
                                        : spds_from_table(load_table(e.targets_file));
      if (pts.size() < 2) throw ConfigError("env.targets_file", "needs an initial point and at least one target");
      return std::make_unique<SpdTrajEnv>(pts.front(), std::vector<SpdMatrix>(pts.begin() + 1, pts.end()));
    }
  }
  return nullptr;
}

/// Writes the environment's initial point and targets in the plain-text
/// table format (trajectory kinds only).
inline void export_targets(const Environment& env, const std::string& path) {
  const auto* traj = dynamic_cast<const TrajectoryEnv*>(&env);
  if (!traj) return;
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  std::vector<CompositePoint> all{traj->initial()};
  all.insert(all.end(), traj->targets().begin(), traj->targets().end());
  if (env.action_layout().front().kind == ManifoldKind::kS3) {
    std::vector<UnitQuaternion> q;
    for (const auto& p : all) q.push_back(p.get<UnitQuaternion>(0));
    write_quats(out, q);
  } else {
    std::vector<SpdMatrix> w;
    for (const auto& p : all) w.push_back(p.get<SpdMatrix>(0));
    write_spds(out, w);
  }
}

/// "auto" resolves to a constant feature for single-step tasks and a time
/// RBF basis for trajectories.
inline FeatureMap make_features(const FeatureConfig& f, const EnvConfig& e, Environment& env) {
  FeatureChoice k = f.kind;
  if (k == FeatureChoice::kAuto) k = e.single_step() ? FeatureChoice::kConstant : FeatureChoice::kTimeRbf;
  switch (k) {
    case FeatureChoice::kConstant: return FeatureMap::constant();
    case FeatureChoice::kTimeRbf: return FeatureMap::time_rbf(f.n_basis, f.width);
    case FeatureChoice::kStateLinear:
      env.reset();
      return FeatureMap::state_linear(env.state());
    case FeatureChoice::kAuto: break;
  }
  return FeatureMap::constant();
}

/// The configured GRL parameterization base; empty means the reset state.
inline std::optional<CompositePoint> make_base_point(const ExperimentConfig& c) {
  const Layout layout = detail::layout_for(c.env);
  switch (c.base_p.kind) {
    case BaseConfig::Kind::kIdentity: return default_base(layout);
    case BaseConfig::Kind::kInitialState: return std::nullopt;
    case BaseConfig::Kind::kPoint: break;
  }
  const auto& v = c.base_p.values;
  std::vector<FactorPoint> factors;
  for (const auto& k : layout) {
    if (k.kind == ManifoldKind::kS3) {
      const Eigen::Vector4d q(v[0], v[1], v[2], v[3]);
      factors.emplace_back(UnitQuaternion(Eigen::Vector4d(q / q.norm())));
    } else {
      factors.emplace_back(SpdMatrix(Eigen::Map<const Eigen::MatrixXd>(v.data(), k.dim, k.dim).transpose()));
    }
  }
  return CompositePoint(std::move(factors));
}

inline TrainSpec make_train_spec(const ExperimentConfig& c, AdapterMode adapter, FeatureMap features) {
  TrainSpec s;
  s.algorithm = c.algorithm;
  s.power = c.power;
  s.cmaes = c.cmaes;
  s.adapter = adapter;
  s.features = std::move(features);
  s.budget = c.budget;
  s.eval_interval = c.eval_interval;
  s.base_p = make_base_point(c);
  return s;
}

struct ArmResult {
  AdapterMode adapter = AdapterMode::kGrl;
  std::vector<SeedRun> runs;  // in config seed order
};

/// Trains every (adapter, seed) pair on a worker pool. Each seed's run uses
/// run_seed = derive_seed(master_seed, seed), shared across adapters.
inline std::vector<ArmResult> run_arms(const ExperimentConfig& c, const std::vector<AdapterMode>& adapters, int jobs) {
  const int n_seeds = static_cast<int>(c.seeds.size());
  std::vector<ArmResult> arms(adapters.size());
  for (std::size_t a = 0; a < adapters.size(); ++a) {
    arms[a].adapter = adapters[a];
    arms[a].runs.resize(c.seeds.size());
  }
  parallel_for(jobs, static_cast<int>(adapters.size()) * n_seeds, [&](int task) {
    const auto a = static_cast<std::size_t>(task / n_seeds);
    const auto k = static_cast<std::size_t>(task % n_seeds);
    const std::uint64_t seed = c.seeds[k];
    auto env = make_env(c.env, seed);
    const TrainSpec spec = make_train_spec(c, adapters[a], make_features(c.features, c.env, *env));
    arms[a].runs[k] = train_seed(*env, spec, seed, derive_seed(c.master_seed, seed));
  });
  return arms;
}

inline std::vector<AdapterMode> compare_adapters(const ExperimentConfig& c) {
  return applicable_adapters(detail::layout_for(c.env));
}

/// Writes targets_seed<k>.txt for every seed when export_targets is set.
inline void maybe_export_targets(const ExperimentConfig& c, const std::filesystem::path& dir) {
  if (!c.env.export_targets) return;
  for (auto seed : c.seeds) {
    auto env = make_env(c.env, seed);
    export_targets(*env, (dir / ("targets_seed" + std::to_string(seed) + ".txt")).string());
  }
}

}  // namespace geomrl
