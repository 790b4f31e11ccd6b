#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ptvf/rng.hpp"

namespace ptvf {

/// How consolidation targets are computed inside a buffer sweep: with the
/// live permanent weights (updated record by record) or frozen at their
/// pre-sweep values.
enum class ConsolidationTarget { kLive, kFrozen };

/// Picks an action epsilon-greedily from a row of action values, breaking
/// exact ties uniformly at random.
int epsilon_greedy(const Eigen::VectorXd& action_values, double epsilon, Rng& rng);

/// Plain linear semi-gradient TD(0).
class LinearTd {
public:
    LinearTd(int dim, double alpha);

    double value(const Eigen::VectorXd& phi) const { return w_.dot(phi); }
    /// One update; `phi_next` is null on terminal transitions (bootstrap 0).
    /// Returns the TD error; throws on non-finite values.
    double update(const Eigen::VectorXd& phi, double reward, const Eigen::VectorXd* phi_next,
                  double gamma);
    void reset() { w_.setZero(); }

    const Eigen::VectorXd& weights() const { return w_; }
    Eigen::VectorXd& weights() { return w_; }
    double alpha() const { return alpha_; }

private:
    Eigen::VectorXd w_;
    double alpha_;
};

/// Prediction learner holding a slowly consolidated permanent component and
/// a fast transient component; the working estimate is their sum evaluated
/// through value().
class PtTdLearner {
public:
    PtTdLearner(int dim, double alpha, double alpha_bar,
                ConsolidationTarget target = ConsolidationTarget::kLive, int sweeps = 1);

    double permanent_value(const Eigen::VectorXd& phi) const { return theta_.dot(phi); }
    double transient_value(const Eigen::VectorXd& phi) const { return w_.dot(phi); }
    double value(const Eigen::VectorXd& phi) const { return theta_.dot(phi) + w_.dot(phi); }

    /// Buffers the visited state and applies the transient update.
    double observe(const Eigen::VectorXd& phi, double reward, const Eigen::VectorXd* phi_next,
                   double gamma);
    /// Transient update only (no buffering).
    double transient_update(const Eigen::VectorXd& phi, double reward,
                            const Eigen::VectorXd* phi_next, double gamma);
    /// Sweeps the buffer into the permanent weights and clears it. Returns
    /// false (without touching anything) when the buffer is empty.
    bool consolidate();
    void reset_transient() { w_.setZero(); }
    /// Task-end handling: consolidate, then reset the transient component.
    void on_task_boundary();

    std::size_t buffer_size() const { return buffer_.size(); }
    void clear_buffer() { buffer_.clear(); }
    void set_alpha(double alpha) { alpha_ = alpha; }
    void set_alpha_bar(double alpha_bar) { alpha_bar_ = alpha_bar; }
    double alpha() const { return alpha_; }
    double alpha_bar() const { return alpha_bar_; }

    const Eigen::VectorXd& permanent_weights() const { return theta_; }
    const Eigen::VectorXd& transient_weights() const { return w_; }
    Eigen::VectorXd& permanent_weights() { return theta_; }
    Eigen::VectorXd& transient_weights() { return w_; }

private:
    Eigen::VectorXd theta_;
    Eigen::VectorXd w_;
    double alpha_;
    double alpha_bar_;
    ConsolidationTarget target_;
    int sweeps_;
    std::vector<Eigen::VectorXd> buffer_;
};

/// Plain linear Q-learning over action-conditioned weights.
class QLearner {
public:
    QLearner(int dim, int n_actions, double alpha);

    double q(const Eigen::VectorXd& phi, int action) const { return q_.col(action).dot(phi); }
    Eigen::VectorXd action_values(const Eigen::VectorXd& phi) const {
        return q_.transpose() * phi;
    }
    int act(const Eigen::VectorXd& phi, double epsilon, Rng& rng) const {
        return epsilon_greedy(action_values(phi), epsilon, rng);
    }
    double update(const Eigen::VectorXd& phi, int action, double reward,
                  const Eigen::VectorXd* phi_next, double gamma);
    void reset() { q_.setZero(); }

    const Eigen::MatrixXd& weights() const { return q_; }

private:
    Eigen::MatrixXd q_;  // dim x actions
    double alpha_;
};

/// Control learner with permanent/transient action-value components.
/// Supports both boundary-driven consolidation (consolidate + reset) and the
/// boundary-free periodic variant (consolidate + decay by lambda).
class PtQLearner {
public:
    PtQLearner(int dim, int n_actions, double alpha, double alpha_bar,
               ConsolidationTarget target = ConsolidationTarget::kLive, int sweeps = 1);

    double q_permanent(const Eigen::VectorXd& phi, int action) const {
        return theta_.col(action).dot(phi);
    }
    double q_transient(const Eigen::VectorXd& phi, int action) const {
        return w_.col(action).dot(phi);
    }
    double q(const Eigen::VectorXd& phi, int action) const {
        return theta_.col(action).dot(phi) + w_.col(action).dot(phi);
    }
    Eigen::VectorXd action_values(const Eigen::VectorXd& phi) const {
        return (theta_ + w_).transpose() * phi;
    }
    int act(const Eigen::VectorXd& phi, double epsilon, Rng& rng) const {
        return epsilon_greedy(action_values(phi), epsilon, rng);
    }

    /// Buffers (state, action) and applies the transient Q-learning update.
    double observe(const Eigen::VectorXd& phi, int action, double reward,
                   const Eigen::VectorXd* phi_next, double gamma);
    double transient_update(const Eigen::VectorXd& phi, int action, double reward,
                            const Eigen::VectorXd* phi_next, double gamma);
    bool consolidate();
    void reset_transient() { w_.setZero(); }
    void decay_transient(double lambda) { w_ *= lambda; }
    void on_task_boundary();
    /// Periodic consolidation of the boundary-free variant.
    void on_period(double lambda);

    std::size_t buffer_size() const { return buffer_.size(); }
    void set_alpha_bar(double alpha_bar) { alpha_bar_ = alpha_bar; }

    const Eigen::MatrixXd& permanent_weights() const { return theta_; }
    const Eigen::MatrixXd& transient_weights() const { return w_; }
    Eigen::MatrixXd& permanent_weights() { return theta_; }
    Eigen::MatrixXd& transient_weights() { return w_; }

private:
    Eigen::MatrixXd theta_;
    Eigen::MatrixXd w_;
    double alpha_;
    double alpha_bar_;
    ConsolidationTarget target_;
    int sweeps_;
    std::vector<std::pair<Eigen::VectorXd, int>> buffer_;
};

}  // namespace ptvf
