#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ptvf/environments.hpp"
#include "ptvf/mrp.hpp"
#include "ptvf/rng.hpp"

namespace ptvf {

/// Root mean squared value error with uniform state weighting.
double rmsve(const ValueVector& estimate, const ValueVector& truth);
/// Variant weighted by a state distribution.
double rmsve_weighted(const ValueVector& estimate, const ValueVector& truth,
                      const Eigen::VectorXd& weights);

/// Mean over the non-current tasks of the mean squared error against each
/// task's exact value function.
double offtask_mse(const ValueVector& estimate, const std::vector<ValueVector>& task_values,
                   int current_task);

// ---------------------------------------------------------------------------
// Analytic mean / second-moment / MSE recursion for batched updates.
//
// The agent receives N i.i.d. samples <s, r, s'> per round with s drawn from
// the stationary distribution, accumulates the TD errors, and applies them at
// the end of the round. The recursion evolves the expected estimate m_t, the
// second-moment matrix Sigma_t and the scalar MSE xi_t of that process
// exactly. The TD process and the frozen-permanent corrective process obey
// the same functional form and differ only in initialization, so one
// implementation serves both tags.

enum class AnalyticAlgo { kTd, kPt };

struct AnalyticMseState {
    AnalyticAlgo algo = AnalyticAlgo::kTd;
    Eigen::VectorXd m;
    Eigen::MatrixXd sigma;
    double xi = 0.0;
    int samples_per_round = 1;  // N
    double alpha = 0.0;
};

/// Deterministic initialization at estimate V_0: Sigma = V_0 V_0^T and
/// xi = sum_s (v(s) - V_0(s))^2.
AnalyticMseState analytic_mse_init(AnalyticAlgo algo, const ValueVector& initial_estimate,
                                   const ValueVector& truth, int samples_per_round,
                                   double alpha);

/// One round of the recursion. `stationary` must be the stationary
/// distribution of the chain; `truth` its exact value function.
AnalyticMseState analytic_step(const AnalyticMseState& state, const MrpModel& mrp,
                               const Eigen::VectorXd& stationary, const ValueVector& truth);

/// xi recomputed from the moments: sum_s (v(s)^2 - 2 v(s) m(s) + Sigma(s,s)).
double xi_from_moments(const Eigen::VectorXd& m, const Eigen::MatrixXd& sigma,
                       const ValueVector& truth);

/// Monte-Carlo oracle for the batched process: simulates `runs` independent
/// replicas for `rounds` rounds and returns the empirical mean of
/// sum_s (V_t(s) - v(s))^2 after each round. For kPt the estimate is
/// permanent + w with only w updated; for kTd `permanent` is ignored and
/// `transient_init` is the full initial estimate.
std::vector<double> simulate_batched_mse(const MrpModel& mrp, const Eigen::VectorXd& stationary,
                                         AnalyticAlgo algo, const ValueVector& permanent,
                                         const ValueVector& transient_init,
                                         const ValueVector& truth, double alpha,
                                         int samples_per_round, int rounds, long runs,
                                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Jumpstart objective.

/// J(u) = 1/2 E_tau ||u - v_tau||^2.
double jumpstart_value(const ValueVector& u, const std::vector<ValueVector>& task_values,
                       const Eigen::VectorXd& probabilities);

/// Minimizer of the jumpstart objective (the probability-weighted task-value
/// mean), verified by a central finite-difference stationarity check with
/// gradient norm <= 1e-8.
ValueVector jumpstart_argmin(const std::vector<ValueVector>& task_values,
                             const Eigen::VectorXd& probabilities);

// ---------------------------------------------------------------------------
// Retention and adaptation on a task family.

/// Per-round contraction constant exp(-(1 - gamma^2) / 4) of the tabular
/// convergence bound.
double retention_contraction_constant(double gamma);

/// Analytic crossover bound (in rounds) after which the tracking learner's
/// error on old task i exceeds the permanent error, infinity when the
/// existence condition fails.
double retention_bound(const TaskFamily& family, int old_task);

struct RetentionResult {
    std::vector<double> td_error_sq;  // squared distance to the old task value, per round
    double permanent_error_sq = 0.0;  // constant permanent error D_i
    double analytic_bound = 0.0;      // crossover bound in rounds
    long crossover_round = -1;        // first round exceeding the permanent error
};

/// Tracks a converged-on-task-i learner across a switch to new_task: one
/// sampled synchronous backup per round (step size alpha), recording the
/// squared error to the old task's value function.
RetentionResult retention_curve(const TaskFamily& family, int old_task, int new_task,
                                int rounds, double alpha, Rng& rng);

struct AdaptationResult {
    std::vector<double> pt_error;   // mean squared distance to the new task value
    std::vector<double> td_error;
    std::vector<double> diff_se;    // standard error of the paired difference
};

/// Paired comparison on new-task adaptation: the decomposed learner starts
/// from the family mean (its permanent fixed point), the tracking learner
/// from a uniformly drawn previous task's value; both consume identical
/// sampled targets.
AdaptationResult adaptation_error(const TaskFamily& family, int rounds, int trials,
                                  double alpha, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Monte-Carlo ground truth.

struct McValueResult {
    ValueVector value;
    ValueVector std_error;
    std::vector<long> visits;

    bool visited(int state) const { return visits[state] > 0; }
};

/// First-visit Monte-Carlo state values. `sample_episode` fills the visited
/// state sequence and the rewards observed after each state.
McValueResult first_visit_mc(
    const std::function<void(Rng&, std::vector<int>&, std::vector<double>&)>& sample_episode,
    int n_states, double gamma, int episodes, Rng& rng);

/// Exact optimal action values by Q-value iteration (oracle for control).
Eigen::MatrixXd q_value_iteration(const MdpModel& mdp, double tol = 1e-12);

}  // namespace ptvf
