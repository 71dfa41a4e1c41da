#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "semplan/error.hpp"
#include "semplan/product.hpp"

namespace semplan {

inline constexpr ActionId kNoAction = std::numeric_limits<ActionId>::max();

enum class SweepMode {
  gauss_seidel,  // in-place, fixed state order
  jacobi,        // synchronous; may be split across threads
};

struct PlannerConfig {
  double gamma = 0.99;
  double beta = 1.0;
  double epsilon = 0.01;
  std::size_t max_sweeps = 100000;
  SweepMode sweep = SweepMode::gauss_seidel;
  unsigned threads = 1;

  void validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ModelError("discount must lie in [0, 1)");
    if (!(beta > 0.0)) throw ModelError("step cost must be positive");
    if (!(epsilon > 0.0)) throw ModelError("convergence threshold must be positive");
    if (max_sweeps == 0) throw ModelError("max_sweeps must be positive");
  }

  /// Return of any trajectory that never reaches an accepting state.
  double floor_value() const noexcept { return -beta / (1.0 - gamma); }

  /// Numeric slack used when comparing converged values against floor_value().
  double satisfaction_slack() const noexcept { return 10.0 * epsilon; }
};

struct ValueTable {
  std::vector<double> v;
  double operator[](ProductStateId s) const { return v[s]; }
  std::size_t size() const noexcept { return v.size(); }
};

struct Policy {
  std::vector<ActionId> action;  // kNoAction where undefined

  std::optional<ActionId> at(ProductStateId s) const {
    if (s >= action.size() || action[s] == kNoAction) return std::nullopt;
    return action[s];
  }
  bool operator==(const Policy&) const = default;
};

struct PlanResult {
  ValueTable values;
  Policy policy;
  std::size_t sweeps = 0;
  double residual = 0.0;
  std::vector<double> residuals;             // max-norm change of each sweep
  std::vector<ProductStateId> dead_ends;     // non-terminal, no feasible action
};

/// Edge reward. Cases are tested in order: entering trash from a non-trash
/// state, leaving a terminal state, any other step.
inline double reward(const ProductAutomaton& p, ProductStateId from, ActionId a, ProductStateId to,
                     const PlannerConfig& cfg) {
  if (!p.trash(from) && p.trash(to)) {
    const auto succ = p.successors(from, a);
    const bool physical_move = std::any_of(succ.begin(), succ.end(), [&](const Successor& e) {
      return p.physical(e.state) == p.physical(to);
    });
    if (physical_move) return cfg.floor_value();
  }
  if (p.terminal(from)) return 0.0;
  return -cfg.beta;
}

namespace detail {

// Expected one-step return of `a` at non-terminal `s`. Terminal values are
// pinned to zero so only the entry reward matters for them.
inline double q_value(const ProductAutomaton& p, std::span<const double> v, ProductStateId s, ActionId a,
                      const PlannerConfig& cfg) {
  double q = 0.0;
  for (const auto& e : p.successors(s, a)) {
    const double r = p.trash(e.state) ? cfg.floor_value() : -cfg.beta;
    q += e.p * (r + cfg.gamma * v[e.state]);
  }
  return q;
}

struct Backup {
  double value;
  ActionId action;
};

inline Backup backup(const ProductAutomaton& p, std::span<const double> v, ProductStateId s,
                     const PlannerConfig& cfg) {
  Backup best{-std::numeric_limits<double>::infinity(), kNoAction};
  for (ActionId a = 0; a < p.action_count(); ++a) {
    if (!p.feasible(s, a)) continue;
    const double q = q_value(p, v, s, a, cfg);
    if (q > best.value) best = {q, a};
  }
  if (best.action == kNoAction) best.value = cfg.floor_value();
  return best;
}

}  // namespace detail

/// Discounted value iteration over the product with greedy policy extraction.
///
/// Sweeps until the max-norm change of a sweep is at most `cfg.epsilon`,
/// starting from the floor value. Accepting and trash states are pinned at 0. A state with no feasible
/// action keeps the floor value and is listed in `dead_ends`. Ties in the
/// policy go to the lowest action index. Throws ConvergenceError after
/// `cfg.max_sweeps` sweeps.
inline PlanResult value_iteration(const ProductAutomaton& p, const PlannerConfig& cfg,
                                  const ValueTable* warm_start = nullptr) {
  cfg.validate();
  const std::size_t n = p.state_count();
  PlanResult out;
  // Starting from the floor keeps every iterate below the optimum, so states
  // that cannot reach acceptance sit exactly at the floor.
  std::vector<double> v(n, cfg.floor_value());
  if (warm_start && warm_start->size() == n) v = warm_start->v;
  for (ProductStateId s = 0; s < n; ++s) {
    if (p.terminal(s)) v[s] = 0.0;
  }

  std::vector<double> next;
  double residual = std::numeric_limits<double>::infinity();
  while (residual > cfg.epsilon) {
    if (out.sweeps == cfg.max_sweeps) throw ConvergenceError(out.sweeps, residual);
    residual = 0.0;
    if (cfg.sweep == SweepMode::gauss_seidel) {
      for (ProductStateId s = 0; s < n; ++s) {
        if (p.terminal(s)) continue;
        const double old = v[s];
        v[s] = detail::backup(p, v, s, cfg).value;
        residual = std::max(residual, std::abs(v[s] - old));
      }
    } else {
      next = v;
      const unsigned workers = std::max(1U, std::min<unsigned>(cfg.threads, static_cast<unsigned>(n)));
      std::vector<double> local(workers, 0.0);
      auto sweep_range = [&](unsigned w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        for (std::size_t s = lo; s < hi; ++s) {
          if (p.terminal(static_cast<ProductStateId>(s))) continue;
          next[s] = detail::backup(p, v, static_cast<ProductStateId>(s), cfg).value;
          local[w] = std::max(local[w], std::abs(next[s] - v[s]));
        }
      };
      if (workers == 1) {
        sweep_range(0);
      } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(sweep_range, w);
        for (auto& t : pool) t.join();
      }
      residual = *std::max_element(local.begin(), local.end());
      v.swap(next);
    }
    ++out.sweeps;
    out.residuals.push_back(residual);
  }
  out.residual = residual;

  out.policy.action.assign(n, kNoAction);
  for (ProductStateId s = 0; s < n; ++s) {
    if (p.terminal(s)) continue;
    const auto b = detail::backup(p, v, s, cfg);
    out.policy.action[s] = b.action;
    if (b.action == kNoAction) out.dead_ends.push_back(s);
  }
  out.values.v = std::move(v);
  return out;
}

/// Minimum value over non-terminal states. With `from` non-empty, only the
/// states reachable from `from` are considered. Returns 0 for an empty set.
inline double min_nonterminal_value(const ValueTable& vt, const ProductAutomaton& p,
                                    std::span<const ProductStateId> from = {}) {
  double m = 0.0;
  if (from.empty()) {
    for (ProductStateId s = 0; s < p.state_count(); ++s) {
      if (!p.terminal(s)) m = std::min(m, vt[s]);
    }
  } else {
    for (ProductStateId s : reachable_nonterminal(p, from)) m = std::min(m, vt[s]);
  }
  return m;
}

/// Non-zero-probability satisfaction test: every considered non-terminal
/// value lies strictly above the floor value plus the numeric slack.
inline bool is_satisfying(const ValueTable& vt, const ProductAutomaton& p, const PlannerConfig& cfg,
                          std::span<const ProductStateId> from = {}) {
  return min_nonterminal_value(vt, p, from) > cfg.floor_value() + cfg.satisfaction_slack();
}

/// Exact discounted return of a fixed policy, by solving
/// (I - gamma P_pi) v = r_pi with terminal states pinned at 0.
inline ValueTable exact_policy_value(const ProductAutomaton& p, const Policy& pi, const PlannerConfig& cfg,
                                     std::size_t cap = 200) {
  cfg.validate();
  const std::size_t n = p.state_count();
  if (n > cap) {
    throw CapacityError("exact policy evaluation limited to " + std::to_string(cap) + " states, got " +
                        std::to_string(n));
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (ProductStateId s = 0; s < n; ++s) {
    if (p.terminal(s)) continue;
    bool any_feasible = false;
    for (ActionId b = 0; b < p.action_count(); ++b) any_feasible = any_feasible || p.feasible(s, b);
    const auto act = pi.at(s);
    if (!act) {
      if (any_feasible) throw PolicyError("policy undefined at state " + std::to_string(s));
      rhs[s] = cfg.floor_value();
      continue;
    }
    if (!p.feasible(s, *act)) throw PolicyError("policy picks an infeasible action at state " + std::to_string(s));
    for (const auto& e : p.successors(s, *act)) {
      rhs[s] += e.p * reward(p, s, *act, e.state, cfg);
      if (!p.terminal(e.state)) a(s, e.state) -= cfg.gamma * e.p;
    }
  }
  const Eigen::VectorXd x = a.partialPivLu().solve(rhs);
  ValueTable vt;
  vt.v.assign(x.data(), x.data() + x.size());
  return vt;
}

}  // namespace semplan
