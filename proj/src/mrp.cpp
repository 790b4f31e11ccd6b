#include "ptvf/mrp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ptvf {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

void check_distribution(const Eigen::VectorXd& p, const std::string& what) {
    require(p.minCoeff() >= 0.0, what + ": negative entry");
    require(std::abs(p.sum() - 1.0) <= 1e-12, what + ": does not sum to 1");
}

}  // namespace

void MrpModel::validate() const {
    const int n = n_states();
    require(n >= 1, "empty state space");
    require(transition.rows() == n && transition.cols() == n, "transition shape mismatch");
    require(reward_variance.size() == n, "reward_variance size mismatch");
    require(start_dist.size() == n, "start_dist size mismatch");
    require(discount > 0.0 && discount < 1.0, "discount must lie in (0,1)");
    require(reward_variance.minCoeff() >= 0.0, "reward_variance must be nonnegative");
    for (int s = 0; s < n; ++s) {
        require(transition.row(s).minCoeff() >= 0.0, "negative transition probability");
        require(std::abs(transition.row(s).sum() - 1.0) <= 1e-12,
                "transition row " + std::to_string(s) + " does not sum to 1");
    }
    check_distribution(start_dist, "start_dist");
}

void MdpModel::validate() const {
    const int n = n_states();
    const int a = n_actions();
    require(n >= 1 && a >= 1, "empty MDP");
    require(static_cast<int>(transition.size()) == a, "transition tensor action count mismatch");
    require(start_dist.size() == n, "start_dist size mismatch");
    require(discount > 0.0 && discount < 1.0, "discount must lie in (0,1)");
    for (int act = 0; act < a; ++act) {
        require(transition[act].rows() == n && transition[act].cols() == n,
                "transition slice shape mismatch");
        for (int s = 0; s < n; ++s) {
            require(transition[act].row(s).minCoeff() >= 0.0, "negative transition probability");
            require(std::abs(transition[act].row(s).sum() - 1.0) <= 1e-12,
                    "P(.|s,a) does not sum to 1");
        }
    }
    check_distribution(start_dist, "start_dist");
}

MrpModel reduce_mdp(const MdpModel& mdp, const Eigen::MatrixXd& policy) {
    mdp.validate();
    const int n = mdp.n_states();
    const int n_act = mdp.n_actions();
    require(policy.rows() == n && policy.cols() == n_act, "policy shape mismatch");
    for (int s = 0; s < n; ++s) {
        require(policy.row(s).minCoeff() >= 0.0 && std::abs(policy.row(s).sum() - 1.0) <= 1e-12,
                "policy row " + std::to_string(s) + " is not a distribution");
    }

    MrpModel out;
    out.transition = Eigen::MatrixXd::Zero(n, n);
    out.reward = Eigen::VectorXd::Zero(n);
    out.reward_variance = Eigen::VectorXd::Zero(n);
    out.discount = mdp.discount;
    out.start_dist = mdp.start_dist;
    out.name = mdp.name;
    for (int a = 0; a < n_act; ++a) {
        out.transition += policy.col(a).asDiagonal() * mdp.transition[a];
        out.reward += policy.col(a).cwiseProduct(mdp.reward.col(a));
    }
    for (int s = 0; s < n; ++s) {
        double second_moment = 0.0;
        for (int a = 0; a < n_act; ++a) {
            second_moment += policy(s, a) * mdp.reward(s, a) * mdp.reward(s, a);
        }
        out.reward_variance(s) = std::max(0.0, second_moment - out.reward(s) * out.reward(s));
    }
    out.validate();
    return out;
}

ValueVector bellman_apply(const MrpModel& mrp, const ValueVector& v) {
    if (v.size() != mrp.n_states()) throw std::invalid_argument("value vector size mismatch");
    return mrp.reward + mrp.discount * (mrp.transition * v);
}

ValueVector exact_value(const MrpModel& mrp) {
    const int n = mrp.n_states();
    const Eigen::MatrixXd system =
        Eigen::MatrixXd::Identity(n, n) - mrp.discount * mrp.transition;
    const ValueVector v = system.partialPivLu().solve(mrp.reward);
    const double residual = (system * v - mrp.reward).lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-10)) {
        throw std::runtime_error("exact_value: linear solve residual " +
                                 std::to_string(residual) + " exceeds 1e-10");
    }
    return v;
}

ValueVector transient_operator_apply(const MrpModel& mrp, const ValueVector& v_p,
                                     const ValueVector& v_t) {
    if (v_p.size() != mrp.n_states() || v_t.size() != mrp.n_states()) {
        throw std::invalid_argument("value vector size mismatch");
    }
    return mrp.reward + mrp.discount * (mrp.transition * v_p) - v_p +
           mrp.discount * (mrp.transition * v_t);
}

ValueVector transient_fixed_point(const MrpModel& mrp, const ValueVector& v_p) {
    const ValueVector fp = exact_value(mrp) - v_p;
    const double dev = (transient_operator_apply(mrp, v_p, fp) - fp).lpNorm<Eigen::Infinity>();
    if (!(dev <= 1e-10)) {
        throw std::runtime_error("transient_fixed_point: operator deviation " +
                                 std::to_string(dev));
    }
    return fp;
}

Eigen::VectorXd stationary_distribution(const MrpModel& mrp) {
    const int n = mrp.n_states();
    Eigen::RowVectorXd d = Eigen::RowVectorXd::Constant(n, 1.0 / n);
    constexpr long kMaxIterations = 1000000;
    for (long it = 0; it < kMaxIterations; ++it) {
        Eigen::RowVectorXd next = d * mrp.transition;
        next /= next.sum();
        if ((next - d).lpNorm<1>() <= 1e-12) {
            return next.transpose();
        }
        d = next;
    }
    throw std::runtime_error("stationary_distribution: no convergence after 1e6 iterations on chain '" +
                             (mrp.name.empty() ? std::string("<unnamed>") : mrp.name) + "'");
}

int TripleMrp::triple_index(int s, int a, int s2) const {
    for (int i = 0; i < static_cast<int>(triples.size()); ++i) {
        if (triples[i][0] == s && triples[i][1] == a && triples[i][2] == s2) return i;
    }
    return -1;
}

TripleMrp modified_mrp(const MdpModel& mdp, const Eigen::MatrixXd& policy,
                       const ValueVector& v_p) {
    mdp.validate();
    const int n = mdp.n_states();
    const int n_act = mdp.n_actions();
    if (v_p.size() != n) throw std::invalid_argument("v_p size mismatch");

    TripleMrp out;
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < n_act; ++a) {
            for (int s2 = 0; s2 < n; ++s2) {
                if (mdp.transition[a](s, s2) > 0.0) out.triples.push_back({s, a, s2});
            }
        }
    }
    const int m = static_cast<int>(out.triples.size());
    if (m == 0) throw std::invalid_argument("modified_mrp: empty triple set");

    MrpModel& mrp = out.mrp;
    mrp.transition = Eigen::MatrixXd::Zero(m, m);
    mrp.reward = Eigen::VectorXd::Zero(m);
    mrp.reward_variance = Eigen::VectorXd::Zero(m);
    mrp.discount = mdp.discount;
    mrp.start_dist = Eigen::VectorXd::Zero(m);
    mrp.name = mdp.name + ":triples";

    for (int i = 0; i < m; ++i) {
        const auto [s, a, s2] = out.triples[i];
        mrp.reward(i) = mdp.reward(s, a) + mdp.discount * v_p(s2) - v_p(s);
        mrp.start_dist(i) = mdp.start_dist(s) * policy(s, a) * mdp.transition[a](s, s2);
        for (int j = 0; j < m; ++j) {
            const auto [t, a2, t2] = out.triples[j];
            if (t != s2) continue;
            mrp.transition(i, j) = policy(s2, a2) * mdp.transition[a2](s2, t2);
        }
    }
    const double start_mass = mrp.start_dist.sum();
    if (start_mass > 0.0) {
        mrp.start_dist /= start_mass;
    } else {
        mrp.start_dist.setConstant(1.0 / m);
    }
    mrp.validate();
    return out;
}

ValueVector restrict_triple_values(const TripleMrp& triple, const MdpModel& mdp,
                                   const Eigen::MatrixXd& policy,
                                   const ValueVector& triple_values) {
    const int n = mdp.n_states();
    ValueVector out = ValueVector::Zero(n);
    for (int i = 0; i < static_cast<int>(triple.triples.size()); ++i) {
        const auto [s, a, s2] = triple.triples[i];
        out(s) += policy(s, a) * mdp.transition[a](s, s2) * triple_values(i);
    }
    return out;
}

}  // namespace ptvf
