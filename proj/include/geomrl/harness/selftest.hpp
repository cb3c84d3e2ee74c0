#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "geomrl/manifold/s3.hpp"
#include "geomrl/manifold/sampling.hpp"
#include "geomrl/manifold/spd.hpp"
#include "geomrl/manifold/vectorize.hpp"
#include "geomrl/optim/cmaes.hpp"
#include "geomrl/optim/power.hpp"
#include "geomrl/policy/policy.hpp"

namespace geomrl::selftest {

/// Operations under test. Swapping one out (e.g. for a deliberately broken
/// transport) lets the properties be checked against a known-bad mutant.
struct Ops {
  std::function<TangentS3(const UnitQuaternion&, const UnitQuaternion&, const TangentS3&)> s3_transport =
      [](const UnitQuaternion& a, const UnitQuaternion& b, const TangentS3& v) { return geomrl::s3_transport(a, b, v); };
  std::function<SpdTangent(const SpdMatrix&, const SpdMatrix&, const SpdTangent&)> spd_transport =
      [](const SpdMatrix& a, const SpdMatrix& b, const SpdTangent& t) { return geomrl::spd_transport(a, b, t); };
};

/// Empty on success, otherwise a description of the first counterexample.
using Outcome = std::optional<std::string>;

struct Property {
  std::string name;
  std::string group;  // "manifold" or "optimizer"
  int cases;
  std::function<Outcome(const Ops&)> check;
};

inline constexpr int kPropertyCases = 10000;

namespace detail {

inline std::string fail_at(int i, const std::string& what) {
  std::ostringstream os;
  os.precision(17);
  os << "case " << i << ": " << what;
  return os.str();
}

inline std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

inline int spd_case_dim(int i) { return i % 2 == 0 ? 3 : 6; }

}  // namespace detail

inline std::vector<Property> registry() {
  using namespace sampling;
  constexpr double kPi = std::numbers::pi;
  constexpr int n = kPropertyCases;
  std::vector<Property> props;

  props.push_back({"s3_exp_log_roundtrip", "manifold", n, [](const Ops&) -> Outcome {
    Rng rng(101);
    for (int i = 0; i < n; ++i) {
      const auto base = random_quaternion(rng);
      const auto target = s3_exp(base, random_s3_tangent(rng, base, kPi - 0.1));
      const double err = (s3_exp(base, s3_log(base, target)).coeffs() - target.coeffs()).norm();
      if (!(err <= 1e-9)) return detail::fail_at(i, "round-trip error " + detail::num(err));
    }
    return std::nullopt;
  }});

  props.push_back({"s3_transport_isometry", "manifold", n, [](const Ops& ops) -> Outcome {
    Rng rng(102);
    for (int i = 0; i < n; ++i) {
      const auto a = random_quaternion(rng);
      const auto b = s3_exp(a, random_s3_tangent(rng, a, kPi - 0.1));
      const TangentS3 u = random_s3_tangent(rng, a, 2.0);
      const TangentS3 v = random_s3_tangent(rng, a, 2.0);
      const TangentS3 tu = ops.s3_transport(a, b, u);
      const TangentS3 tv = ops.s3_transport(a, b, v);
      const double err = std::abs(tu.dot(tv) - u.dot(v)) + std::abs(tu.dot(b.coeffs())) + std::abs(tv.dot(b.coeffs()));
      if (!(err <= 1e-9)) return detail::fail_at(i, "inner product / tangency error " + detail::num(err));
    }
    return std::nullopt;
  }});

  props.push_back({"s3_distance_axioms", "manifold", n, [](const Ops&) -> Outcome {
    Rng rng(103);
    for (int i = 0; i < n; ++i) {
      const auto a = random_quaternion(rng);
      const auto b = random_quaternion(rng);
      const auto c = random_quaternion(rng);
      const double ab = s3_distance(a, b);
      if (!(ab >= 0.0 && ab <= kPi)) return detail::fail_at(i, "distance out of range " + detail::num(ab));
      if (s3_distance(a, a) != 0.0) return detail::fail_at(i, "d(a, a) != 0");
      if (!(std::abs(ab - s3_distance(b, a)) <= 1e-12)) return detail::fail_at(i, "asymmetric");
      if (!(s3_distance(a, c) <= ab + s3_distance(b, c) + 1e-9)) return detail::fail_at(i, "triangle inequality");
    }
    return std::nullopt;
  }});

  props.push_back({"spd_exp_log_roundtrip", "manifold", n, [](const Ops&) -> Outcome {
    Rng rng(104);
    for (int i = 0; i < n; ++i) {
      const int d = detail::spd_case_dim(i);
      const SpdMatrix base = random_spd(rng, d);
      const SpdMatrix target = random_spd(rng, d);
      const double err = (spd_exp(base, spd_log(base, target)).matrix() - target.matrix()).norm();
      if (!(err <= 1e-8)) return detail::fail_at(i, "round-trip error " + detail::num(err));
    }
    return std::nullopt;
  }});

  props.push_back({"spd_transport_isometry", "manifold", n, [](const Ops& ops) -> Outcome {
    Rng rng(105);
    for (int i = 0; i < n; ++i) {
      const SpdMatrix a = random_spd(rng, 3);
      const SpdMatrix b = random_spd(rng, 3);
      const Eigen::MatrixXd t1 = random_symmetric(rng, 3, -1.0, 1.0);
      const Eigen::MatrixXd t2 = random_symmetric(rng, 3, -1.0, 1.0);
      const double before = spd_inner(a, t1, t2);
      const double after = spd_inner(b, ops.spd_transport(a, b, t1), ops.spd_transport(a, b, t2));
      const double err = std::abs(after - before) / std::max(1.0, std::abs(before));
      if (!(err <= 1e-8)) return detail::fail_at(i, "relative inner-product error " + detail::num(err));
    }
    return std::nullopt;
  }});

  props.push_back({"spd_distance_axioms", "manifold", n, [](const Ops&) -> Outcome {
    Rng rng(106);
    for (int i = 0; i < n; ++i) {
      const SpdMatrix a = random_spd(rng, 3);
      const SpdMatrix b = random_spd(rng, 3);
      const SpdMatrix c = random_spd(rng, 3);
      const double ab = spd_distance(a, b);
      if (!(ab >= 0.0)) return detail::fail_at(i, "negative distance");
      if (!(spd_distance(a, a) <= 1e-12)) return detail::fail_at(i, "d(a, a) != 0");
      if (!(std::abs(ab - spd_distance(b, a)) <= 1e-9)) return detail::fail_at(i, "asymmetric");
      if (!(spd_distance(a, c) <= ab + spd_distance(b, c) + 1e-9)) return detail::fail_at(i, "triangle inequality");
    }
    return std::nullopt;
  }});

  props.push_back({"spd_affine_invariance", "manifold", n, [](const Ops&) -> Outcome {
    Rng rng(107);
    for (int i = 0; i < n; ++i) {
      const SpdMatrix a = random_spd(rng, 3);
      const SpdMatrix b = random_spd(rng, 3);
      Eigen::MatrixXd g = gaussian_vector(rng, 9).reshaped(3, 3);
      g += 2.0 * Eigen::MatrixXd::Identity(3, 3);
      if (std::abs(g.determinant()) < 1e-3) continue;
      const SpdMatrix ga(g * a.matrix() * g.transpose());
      const SpdMatrix gb(g * b.matrix() * g.transpose());
      const double err = std::abs(spd_distance(ga, gb) - spd_distance(a, b));
      if (!(err <= 1e-8)) return detail::fail_at(i, "distance changed by " + detail::num(err));
    }
    return std::nullopt;
  }});

  props.push_back({"mandel_isometry", "manifold", n, [](const Ops&) -> Outcome {
    Rng rng(108);
    for (int i = 0; i < n; ++i) {
      const int d = 2 + i % 5;
      const Eigen::MatrixXd a = random_symmetric(rng, d, -3.0, 3.0);
      const Eigen::MatrixXd b = random_symmetric(rng, d, -3.0, 3.0);
      const double frob = (a.array() * b.array()).sum();
      const double err = std::abs(mandel_vec(a).dot(mandel_vec(b)) - frob) / std::max(1.0, std::abs(frob));
      if (!(err <= 1e-12)) return detail::fail_at(i, "inner product mismatch " + detail::num(err));
      if (!((mandel_unvec(mandel_vec(a)) - a).norm() <= 1e-12)) return detail::fail_at(i, "unvec(vec(S)) != S");
    }
    return std::nullopt;
  }});

  props.push_back({"cmaes_sphere_5d", "optimizer", 5, [](const Ops&) -> Outcome {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      std::uniform_real_distribution<double> u(-1, 1);
      Eigen::VectorXd x0(5);
      for (int i = 0; i < 5; ++i) x0[i] = u(rng);
      CmaesConfig cfg;
      cfg.sigma0 = 0.5;
      CmaesState s(x0, cfg);
      int evals = 0;
      double best = std::numeric_limits<double>::infinity();
      while (evals + s.lambda() <= 2000 && best >= 1e-8) {
        std::vector<std::pair<Eigen::VectorXd, double>> ev;
        for (auto& x : s.ask(rng)) {
          const double f = x.squaredNorm();
          best = std::min(best, f);
          ev.emplace_back(x, -f);
          ++evals;
        }
        s.tell(ev);
      }
      if (!(best < 1e-8)) {
        return "seed " + std::to_string(seed) + ": best " + detail::num(best) + " after " + std::to_string(evals) +
               " evaluations";
      }
    }
    return std::nullopt;
  }});

  props.push_back({"power_scalar_quadratic", "optimizer", 5, [](const Ops&) -> Outcome {
    constexpr double kOptimum = 1.3;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      PowerState s(Eigen::MatrixXd::Zero(1, 1), {});
      for (int i = 0; i < 200; ++i) {
        const Eigen::MatrixXd eps = sample_perturbation(s.params(), rng);
        const double x = s.params().theta(0, 0) + eps(0, 0);
        s.update(eps, -(x - kOptimum) * (x - kOptimum));
      }
      const double err = std::abs(s.params().theta(0, 0) - kOptimum);
      if (!(err < 1e-2)) return "seed " + std::to_string(seed) + ": |theta - 1.3| = " + detail::num(err);
    }
    return std::nullopt;
  }});

  props.push_back({"cmaes_covariance_spd", "optimizer", 500, [](const Ops&) -> Outcome {
    Rng rng(109);
    CmaesState s(Eigen::VectorXd::Zero(8), {});
    std::normal_distribution<double> g(0, 1);
    for (int gen = 0; gen < 500; ++gen) {
      std::vector<std::pair<Eigen::VectorXd, double>> ev;
      for (auto& x : s.ask(rng)) ev.emplace_back(x, g(rng));
      s.tell(ev);
      if (!(s.sigma() > 0.0)) return detail::fail_at(gen, "sigma not positive");
      if (s.covariance() != s.covariance().transpose()) return detail::fail_at(gen, "covariance not symmetric");
      Eigen::LLT<Eigen::MatrixXd> llt(s.covariance());
      if (llt.info() != Eigen::Success) return detail::fail_at(gen, "covariance not positive definite");
    }
    return std::nullopt;
  }});

  props.push_back({"power_elites_sorted", "optimizer", 1000, [](const Ops&) -> Outcome {
    Rng rng(110);
    PowerConfig cfg;
    cfg.elite_count = 4;
    PowerState s(Eigen::MatrixXd::Zero(2, 1), cfg);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 1000; ++i) {
      s.update(sample_perturbation(s.params(), rng), u(rng));
      if (s.elites().size() > 4u) return detail::fail_at(i, "elite buffer exceeds its bound");
      for (std::size_t k = 1; k < s.elites().size(); ++k) {
        if (s.elites()[k - 1].return_ < s.elites()[k].return_) return detail::fail_at(i, "elites out of order");
      }
    }
    return std::nullopt;
  }});

  return props;
}

struct PropertyResult {
  std::string name;
  std::string group;
  bool passed;
  double seconds;
  std::string detail;
};

struct Summary {
  std::vector<PropertyResult> results;
  bool all_passed() const {
    for (const auto& r : results) {
      if (!r.passed) return false;
    }
    return !results.empty();
  }
  double seconds(const std::string& group = "") const {
    double s = 0.0;
    for (const auto& r : results) {
      if (group.empty() || r.group == group) s += r.seconds;
    }
    return s;
  }
};

/// Runs every property whose name contains `filter` and prints one line each.
inline Summary run(const std::string& filter, std::ostream& out, const Ops& ops = {}) {
  Summary summary;
  for (const auto& p : registry()) {
    if (!filter.empty() && p.name.find(filter) == std::string::npos) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = p.check(ops);
    } catch (const std::exception& e) {
      outcome = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    PropertyResult r{p.name, p.group, !outcome.has_value(), secs, outcome.value_or("")};
    out << (r.passed ? "PASS " : "FAIL ") << p.name << " (" << p.cases << " cases, " << detail::num(secs) << " s)";
    if (!r.passed) out << ": " << r.detail;
    out << '\n';
    summary.results.push_back(std::move(r));
  }
  return summary;
}

}  // namespace geomrl::selftest
