#include "ptvf/learners.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ptvf {

namespace {

void check_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw std::runtime_error(std::string("non-finite ") + what + " in learner update");
    }
}

}  // namespace

int epsilon_greedy(const Eigen::VectorXd& action_values, double epsilon, Rng& rng) {
    const int n = static_cast<int>(action_values.size());
    if (rng.uniform() < epsilon) return rng.uniform_int(n);
    const double best = action_values.maxCoeff();
    int ties = 0;
    for (int a = 0; a < n; ++a) {
        if (action_values(a) == best) ++ties;
    }
    int pick = ties > 1 ? rng.uniform_int(ties) : 0;
    for (int a = 0; a < n; ++a) {
        if (action_values(a) == best && pick-- == 0) return a;
    }
    return n - 1;  // unreachable
}

// ---------------------------------------------------------------------------
// LinearTd

LinearTd::LinearTd(int dim, double alpha) : w_(Eigen::VectorXd::Zero(dim)), alpha_(alpha) {
    if (dim < 1) throw std::invalid_argument("LinearTd: dim must be >= 1");
    if (!(alpha >= 0.0)) throw std::invalid_argument("LinearTd: alpha must be >= 0");
}

double LinearTd::update(const Eigen::VectorXd& phi, double reward,
                        const Eigen::VectorXd* phi_next, double gamma) {
    const double bootstrap = phi_next ? gamma * w_.dot(*phi_next) : 0.0;
    const double delta = reward + bootstrap - w_.dot(phi);
    check_finite(delta, "TD error");
    w_ += alpha_ * delta * phi;
    return delta;
}

// ---------------------------------------------------------------------------
// PtTdLearner

PtTdLearner::PtTdLearner(int dim, double alpha, double alpha_bar, ConsolidationTarget target,
                         int sweeps)
    : theta_(Eigen::VectorXd::Zero(dim)),
      w_(Eigen::VectorXd::Zero(dim)),
      alpha_(alpha),
      alpha_bar_(alpha_bar),
      target_(target),
      sweeps_(sweeps) {
    if (dim < 1) throw std::invalid_argument("PtTdLearner: dim must be >= 1");
    if (!(alpha >= 0.0) || !(alpha_bar >= 0.0)) {
        throw std::invalid_argument("PtTdLearner: step sizes must be >= 0");
    }
    if (sweeps < 1) throw std::invalid_argument("PtTdLearner: sweeps must be >= 1");
}

double PtTdLearner::transient_update(const Eigen::VectorXd& phi, double reward,
                                     const Eigen::VectorXd* phi_next, double gamma) {
    const double bootstrap = phi_next ? gamma * value(*phi_next) : 0.0;
    const double delta = reward + bootstrap - value(phi);
    check_finite(delta, "TD error");
    w_ += alpha_ * delta * phi;
    return delta;
}

double PtTdLearner::observe(const Eigen::VectorXd& phi, double reward,
                            const Eigen::VectorXd* phi_next, double gamma) {
    buffer_.push_back(phi);
    return transient_update(phi, reward, phi_next, gamma);
}

bool PtTdLearner::consolidate() {
    if (buffer_.empty()) return false;
    for (int sweep = 0; sweep < sweeps_; ++sweep) {
        if (target_ == ConsolidationTarget::kLive) {
            // Target recomputed with the evolving permanent weights; the
            // permanent term cancels and the correction is the transient
            // value of the record.
            for (const Eigen::VectorXd& phi : buffer_) {
                const double correction = w_.dot(phi);
                check_finite(correction, "consolidation target");
                theta_ += alpha_bar_ * correction * phi;
            }
        } else {
            std::vector<double> targets;
            targets.reserve(buffer_.size());
            for (const Eigen::VectorXd& phi : buffer_) targets.push_back(value(phi));
            for (std::size_t i = 0; i < buffer_.size(); ++i) {
                const double err = targets[i] - theta_.dot(buffer_[i]);
                check_finite(err, "consolidation target");
                theta_ += alpha_bar_ * err * buffer_[i];
            }
        }
    }
    buffer_.clear();
    return true;
}

void PtTdLearner::on_task_boundary() {
    consolidate();
    reset_transient();
}

// ---------------------------------------------------------------------------
// QLearner

QLearner::QLearner(int dim, int n_actions, double alpha)
    : q_(Eigen::MatrixXd::Zero(dim, n_actions)), alpha_(alpha) {
    if (dim < 1 || n_actions < 1) throw std::invalid_argument("QLearner: bad shape");
}

double QLearner::update(const Eigen::VectorXd& phi, int action, double reward,
                        const Eigen::VectorXd* phi_next, double gamma) {
    const double bootstrap =
        phi_next ? gamma * (q_.transpose() * *phi_next).maxCoeff() : 0.0;
    const double delta = reward + bootstrap - q_.col(action).dot(phi);
    check_finite(delta, "TD error");
    q_.col(action) += alpha_ * delta * phi;
    return delta;
}

// ---------------------------------------------------------------------------
// PtQLearner

PtQLearner::PtQLearner(int dim, int n_actions, double alpha, double alpha_bar,
                       ConsolidationTarget target, int sweeps)
    : theta_(Eigen::MatrixXd::Zero(dim, n_actions)),
      w_(Eigen::MatrixXd::Zero(dim, n_actions)),
      alpha_(alpha),
      alpha_bar_(alpha_bar),
      target_(target),
      sweeps_(sweeps) {
    if (dim < 1 || n_actions < 1) throw std::invalid_argument("PtQLearner: bad shape");
    if (sweeps < 1) throw std::invalid_argument("PtQLearner: sweeps must be >= 1");
}

double PtQLearner::transient_update(const Eigen::VectorXd& phi, int action, double reward,
                                    const Eigen::VectorXd* phi_next, double gamma) {
    const double bootstrap =
        phi_next ? gamma * ((theta_ + w_).transpose() * *phi_next).maxCoeff() : 0.0;
    const double delta = reward + bootstrap - q(phi, action);
    check_finite(delta, "TD error");
    w_.col(action) += alpha_ * delta * phi;
    return delta;
}

double PtQLearner::observe(const Eigen::VectorXd& phi, int action, double reward,
                           const Eigen::VectorXd* phi_next, double gamma) {
    buffer_.emplace_back(phi, action);
    return transient_update(phi, action, reward, phi_next, gamma);
}

bool PtQLearner::consolidate() {
    if (buffer_.empty()) return false;
    for (int sweep = 0; sweep < sweeps_; ++sweep) {
        if (target_ == ConsolidationTarget::kLive) {
            for (const auto& [phi, action] : buffer_) {
                const double correction = w_.col(action).dot(phi);
                check_finite(correction, "consolidation target");
                theta_.col(action) += alpha_bar_ * correction * phi;
            }
        } else {
            std::vector<double> targets;
            targets.reserve(buffer_.size());
            for (const auto& [phi, action] : buffer_) targets.push_back(q(phi, action));
            for (std::size_t i = 0; i < buffer_.size(); ++i) {
                const auto& [phi, action] = buffer_[i];
                const double err = targets[i] - theta_.col(action).dot(phi);
                check_finite(err, "consolidation target");
                theta_.col(action) += alpha_bar_ * err * phi;
            }
        }
    }
    buffer_.clear();
    return true;
}

void PtQLearner::on_task_boundary() {
    consolidate();
    reset_transient();
}

void PtQLearner::on_period(double lambda) {
    consolidate();
    decay_transient(lambda);
}

}  // namespace ptvf
