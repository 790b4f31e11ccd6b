#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace ptvf {

using ValueVector = Eigen::VectorXd;

/// Exact Markov reward process under a fixed policy. Ground truth for every
/// operator and fixed-point computation in the library.
///
/// Invariants (checked by validate()): rows of `transition` sum to 1 within
/// 1e-12 with nonnegative entries, `discount` lies strictly inside (0,1),
/// `reward_variance` is entrywise nonnegative, `start_dist` sums to 1.
struct MrpModel {
    Eigen::MatrixXd transition;       // row-stochastic, transition(s, s') = P(s'|s)
    Eigen::VectorXd reward;           // expected one-step reward per state
    Eigen::VectorXd reward_variance;  // per-state variance of the one-step reward
    double discount = 0.0;
    Eigen::VectorXd start_dist;
    std::string name;                 // used in diagnostics

    int n_states() const { return static_cast<int>(reward.size()); }
    void validate() const;            // throws std::invalid_argument
};

/// Finite MDP with transition tensor P(s'|s,a) and reward table R(s,a).
struct MdpModel {
    std::vector<Eigen::MatrixXd> transition;  // one n x n matrix per action
    Eigen::MatrixXd reward;                   // n_states x n_actions
    double discount = 0.0;
    Eigen::VectorXd start_dist;
    std::string name;

    int n_states() const { return static_cast<int>(reward.rows()); }
    int n_actions() const { return static_cast<int>(reward.cols()); }
    void validate() const;
};

/// Marginalizes the MDP under a stochastic policy (rows of `policy` are
/// distributions over actions). The reward variance of the result is the
/// variance of the one-step reward induced by the action choice.
MrpModel reduce_mdp(const MdpModel& mdp, const Eigen::MatrixXd& policy);

/// r + gamma * P * v.
ValueVector bellman_apply(const MrpModel& mrp, const ValueVector& v);

/// Solves (I - gamma * P) v = r directly. The residual is asserted to be
/// below 1e-10 in the max norm.
ValueVector exact_value(const MrpModel& mrp);

/// One application of the corrective-component operator:
/// r + gamma * P * v_p - v_p + gamma * P * v_t.
ValueVector transient_operator_apply(const MrpModel& mrp, const ValueVector& v_p,
                                     const ValueVector& v_t);

/// exact_value(mrp) - v_p, verified to be a fixed point of the operator.
ValueVector transient_fixed_point(const MrpModel& mrp, const ValueVector& v_p);

/// Stationary distribution by power iteration (cap 1e6 iterations,
/// ||dP - d||_1 <= 1e-12). The chain must be irreducible and aperiodic;
/// non-convergence raises a diagnostics error naming the chain.
Eigen::VectorXd stationary_distribution(const MrpModel& mrp);

/// MRP over transition triples (s, a, s'), enumerated lexicographically over
/// entries with P(s'|s,a) > 0. Triple x = (s,a,s') carries reward
/// R(s,a) + gamma * v_p(s') - v_p(s) and transitions to (s',a',s'') with
/// probability policy(s',a') * P(s''|s',a').
struct TripleMrp {
    MrpModel mrp;
    std::vector<std::array<int, 3>> triples;
    int triple_index(int s, int a, int s2) const;  // -1 when absent
};
TripleMrp modified_mrp(const MdpModel& mdp, const Eigen::MatrixXd& policy,
                       const ValueVector& v_p);

/// Projects a triple-space value function back onto original states by
/// averaging over the policy-and-transition weights of the triples leaving
/// each state.
ValueVector restrict_triple_values(const TripleMrp& triple, const MdpModel& mdp,
                                   const Eigen::MatrixXd& policy,
                                   const ValueVector& triple_values);

}  // namespace ptvf
