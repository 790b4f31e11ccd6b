#include "ptvf/environments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ptvf {

namespace {

double unit_draw(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(splitmix64(seed ^ splitmix64(counter + 1)) >> 11) * 0x1.0p-53;
}

}  // namespace

void TaskSchedule::validate() const {
    if (n_tasks < 1) throw std::invalid_argument("schedule: need at least one task");
    if (switch_every < 1) throw std::invalid_argument("schedule: switch_every must be >= 1");
}

int TaskSchedule::task_at_period(long period) const {
    if (order == Order::kCycle) {
        return static_cast<int>(period % n_tasks);
    }
    return static_cast<int>(unit_draw(order_seed, static_cast<std::uint64_t>(period)) * n_tasks);
}

// ---------------------------------------------------------------------------
// DiscreteGrid

DiscreteGrid::DiscreteGrid() {
    // Goal rewards per task in corner order TL, TR, BL, BR.
    tasks_ = {GridTask{{0, 1, 0, 1}}, GridTask{{1, 0, 1, 0}},
              GridTask{{0, 0, 1, 1}}, GridTask{{1, 1, 0, 0}}};
}

void DiscreteGrid::set_task(int task) {
    if (task < 0 || task >= n_tasks()) throw std::invalid_argument("DiscreteGrid: bad task id");
    task_ = task;
}

bool DiscreteGrid::is_goal(int state) const {
    return state == cell(0, 0) || state == cell(0, kSize - 1) ||
           state == cell(kSize - 1, 0) || state == cell(kSize - 1, kSize - 1);
}

namespace {
int corner_goal_id(int state, int size) {
    if (state == 0) return 0;
    if (state == size - 1) return 1;
    if (state == size * (size - 1)) return 2;
    if (state == size * size - 1) return 3;
    return -1;
}
}  // namespace

int DiscreteGrid::move(int state, int action) const {
    int row = state / kSize;
    int col = state % kSize;
    switch (action) {
        case kUp: row = std::max(0, row - 1); break;
        case kDown: row = std::min(kSize - 1, row + 1); break;
        case kLeft: col = std::max(0, col - 1); break;
        case kRight: col = std::min(kSize - 1, col + 1); break;
        default: throw std::invalid_argument("DiscreteGrid: bad action");
    }
    return cell(row, col);
}

int DiscreteGrid::reset(Rng&) {
    state_ = cell(kSize / 2, kSize / 2);
    done_ = false;
    return state_;
}

Transition DiscreteGrid::step(int action, Rng&) {
    if (done_) throw std::logic_error("DiscreteGrid: step on a finished episode");
    Transition tr;
    tr.state = state_;
    tr.action = action;
    tr.next_state = move(state_, action);
    const int goal = corner_goal_id(tr.next_state, kSize);
    if (goal >= 0) {
        tr.reward = tasks_[task_].goal_rewards[goal];
        tr.terminal = true;
        done_ = true;
    }
    state_ = tr.next_state;
    return tr;
}

MdpModel DiscreteGrid::as_mdp(int task) const {
    const int n = n_states();
    MdpModel mdp;
    mdp.transition.assign(4, Eigen::MatrixXd::Zero(n, n));
    mdp.reward = Eigen::MatrixXd::Zero(n, 4);
    mdp.discount = discount();
    mdp.start_dist = Eigen::VectorXd::Zero(n);
    mdp.start_dist(cell(kSize / 2, kSize / 2)) = 1.0;
    mdp.name = "discrete_grid:task" + std::to_string(task);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < 4; ++a) {
            if (is_goal(s)) {
                mdp.transition[a](s, s) = 1.0;  // absorbing, value 0
                continue;
            }
            const int next = move(s, a);
            mdp.transition[a](s, next) = 1.0;
            const int goal = corner_goal_id(next, kSize);
            if (goal >= 0) mdp.reward(s, a) = tasks_[task].goal_rewards[goal];
        }
    }
    return mdp;
}

MrpModel DiscreteGrid::induced_mrp(int task) const {
    const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(n_states(), 4, 0.25);
    return reduce_mdp(as_mdp(task), uniform);
}

// ---------------------------------------------------------------------------
// ContinuousGrid

namespace {
const Eigen::Vector2d kCorners[4] = {
    {0.0, 1.0},  // TL
    {1.0, 1.0},  // TR
    {0.0, 0.0},  // BL
    {1.0, 0.0},  // BR
};
}  // namespace

ContinuousGrid::ContinuousGrid() {
    tasks_ = {GridTask{{0, 1, 0, 1}}, GridTask{{1, 0, 1, 0}},
              GridTask{{0, 0, 1, 1}}, GridTask{{1, 1, 0, 0}}};
}

void ContinuousGrid::set_task(int task) {
    if (task < 0 || task >= n_tasks()) throw std::invalid_argument("ContinuousGrid: bad task id");
    task_ = task;
}

std::optional<int> ContinuousGrid::goal_region(const Eigen::Vector2d& x) {
    for (int g = 0; g < 4; ++g) {
        if ((x - kCorners[g]).lpNorm<1>() <= 0.1) return g;
    }
    return std::nullopt;
}

Eigen::Vector2d ContinuousGrid::reset(Rng& rng) {
    state_ = {rng.uniform(0.45, 0.55), rng.uniform(0.45, 0.55)};
    done_ = false;
    return state_;
}

Eigen::Vector2d ContinuousGrid::reset_at(const Eigen::Vector2d& start) {
    state_ = start;
    done_ = false;
    return state_;
}

ContinuousGrid::Step ContinuousGrid::step(int action, Rng& rng) {
    if (done_) throw std::logic_error("ContinuousGrid: step on a finished episode");
    Step tr;
    tr.state = state_;
    tr.action = action;
    Eigen::Vector2d next = state_;
    switch (action) {
        case kUp: next(1) += 0.1; break;
        case kDown: next(1) -= 0.1; break;
        case kLeft: next(0) -= 0.1; break;
        case kRight: next(0) += 0.1; break;
        default: throw std::invalid_argument("ContinuousGrid: bad action");
    }
    if (noise_enabled_) {
        next(0) += rng.uniform(-0.01, 0.01);
        next(1) += rng.uniform(-0.01, 0.01);
    }
    next(0) = std::clamp(next(0), 0.0, 1.0);
    next(1) = std::clamp(next(1), 0.0, 1.0);
    tr.next_state = next;
    if (auto goal = goal_region(next)) {
        tr.reward = tasks_[task_].goal_rewards[*goal];
        tr.terminal = true;
        done_ = true;
    }
    state_ = next;
    return tr;
}

// ---------------------------------------------------------------------------
// ControlGrid

const char* ControlGrid::default_layout() {
    return ". . . . G2 G1\n"
           ". . . . .  .\n"
           ". . # # .  .\n"
           ". . # # .  .\n"
           ". . . . .  .\n"
           "S . . . .  .\n";
}

ControlGrid ControlGrid::from_text(const std::string& layout) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(layout);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::vector<std::string> row;
        std::string tok;
        while (cells >> tok) row.push_back(tok);
        if (!row.empty()) rows.push_back(row);
    }
    if (rows.empty()) throw std::invalid_argument("control grid layout: empty");
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows[0].size());

    ControlGrid grid;
    grid.rows_ = r;
    grid.cols_ = c;
    grid.wall_.assign(r * c, false);
    grid.goal_.assign(r * c, -1);
    int start = -1;
    bool saw_g1 = false, saw_g2 = false;
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c) {
            throw std::invalid_argument("control grid layout: ragged rows");
        }
        for (int j = 0; j < c; ++j) {
            const std::string& tok = rows[i][j];
            const int id = i * c + j;
            if (tok == ".") continue;
            if (tok == "#") {
                grid.wall_[id] = true;
            } else if (tok == "S") {
                start = id;
            } else if (tok == "G1") {
                grid.goal_[id] = 0;
                saw_g1 = true;
            } else if (tok == "G2") {
                grid.goal_[id] = 1;
                saw_g2 = true;
            } else {
                throw std::invalid_argument("control grid layout: unknown token '" + tok + "'");
            }
        }
    }
    if (start < 0 || !saw_g1 || !saw_g2) {
        throw std::invalid_argument("control grid layout: needs S, G1 and G2");
    }
    grid.start_ = start;
    return grid;
}

ControlGrid ControlGrid::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("control grid layout: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

void ControlGrid::set_task(int task) {
    if (task < 0 || task >= n_tasks()) throw std::invalid_argument("ControlGrid: bad task id");
    task_ = task;
}

int ControlGrid::goal_id(int state) const { return goal_[state]; }

double ControlGrid::goal_reward(int goal, int task) const {
    // Task 0: G1 = +1, G2 = -1; rewards swap on task 1.
    const double g1 = task == 0 ? 1.0 : -1.0;
    return goal == 0 ? g1 : -g1;
}

int ControlGrid::intended_move(int state, int action) const {
    int row = state / cols_;
    int col = state % cols_;
    switch (action) {
        case kUp: --row; break;
        case kDown: ++row; break;
        case kLeft: --col; break;
        case kRight: ++col; break;
        default: throw std::invalid_argument("ControlGrid: bad action");
    }
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_) return state;
    const int next = row * cols_ + col;
    return wall_[next] ? state : next;
}

int ControlGrid::slipped_action(int action, double u) const {
    // 0.9 intended, 0.05 for each perpendicular direction.
    if (u < 0.9) return action;
    const bool vertical = (action == kUp || action == kDown);
    if (u < 0.95) return vertical ? kLeft : kUp;
    return vertical ? kRight : kDown;
}

int ControlGrid::reset(Rng&) {
    state_ = start_;
    done_ = false;
    return state_;
}

Transition ControlGrid::step(int action, Rng& rng) {
    if (done_) throw std::logic_error("ControlGrid: step on a finished episode");
    Transition tr;
    tr.state = state_;
    tr.action = action;
    const int effective = slip_enabled_ ? slipped_action(action, rng.uniform()) : action;
    tr.next_state = intended_move(state_, effective);
    const int goal = goal_[tr.next_state];
    if (goal >= 0) {
        tr.reward = goal_reward(goal, task_);
        tr.terminal = true;
        done_ = true;
    }
    state_ = tr.next_state;
    return tr;
}

MdpModel ControlGrid::as_mdp(int task) const {
    const int n = n_states();
    MdpModel mdp;
    mdp.transition.assign(4, Eigen::MatrixXd::Zero(n, n));
    mdp.reward = Eigen::MatrixXd::Zero(n, 4);
    mdp.discount = discount();
    mdp.start_dist = Eigen::VectorXd::Zero(n);
    mdp.start_dist(start_) = 1.0;
    mdp.name = "control_grid:task" + std::to_string(task);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < 4; ++a) {
            if (goal_[s] >= 0 || wall_[s]) {
                mdp.transition[a](s, s) = 1.0;  // absorbing / unreachable
                continue;
            }
            const bool vertical = (a == kUp || a == kDown);
            const int outcomes[3] = {a, vertical ? kLeft : kUp, vertical ? kRight : kDown};
            const double probs[3] = {0.9, 0.05, 0.05};
            for (int o = 0; o < 3; ++o) {
                const int next = intended_move(s, outcomes[o]);
                mdp.transition[a](s, next) += probs[o];
                if (goal_[next] >= 0) {
                    mdp.reward(s, a) += probs[o] * goal_reward(goal_[next], task);
                }
            }
        }
    }
    return mdp;
}

// ---------------------------------------------------------------------------
// Task family

ValueVector TaskFamily::mean_value() const {
    ValueVector mean = ValueVector::Zero(n_states());
    for (int t = 0; t < n_tasks(); ++t) mean += probabilities(t) * values[t];
    return mean;
}

int TaskFamily::sample_task(Rng& rng) const {
    double u = rng.uniform();
    for (int t = 0; t < n_tasks(); ++t) {
        u -= probabilities(t);
        if (u < 0.0) return t;
    }
    return n_tasks() - 1;
}

Eigen::MatrixXd seven_state_reference_chain() {
    Eigen::MatrixXd p(7, 7);
    p << 0.18, 0.19, 0.08, 0.16, 0.10, 0.11, 0.18,
         0.04, 0.05, 0.01, 0.00, 0.40, 0.00, 0.51,
         0.00, 0.20, 0.00, 0.05, 0.28, 0.06, 0.41,
         0.17, 0.14, 0.09, 0.26, 0.15, 0.19, 0.01,
         0.16, 0.16, 0.16, 0.24, 0.17, 0.00, 0.11,
         0.25, 0.02, 0.24, 0.24, 0.08, 0.05, 0.11,
         0.00, 0.25, 0.19, 0.44, 0.05, 0.00, 0.07;
    // A few printed rows are off by 0.01; renormalize so the chain is exactly
    // stochastic.
    for (int s = 0; s < 7; ++s) p.row(s) /= p.row(s).sum();
    return p;
}

TaskFamily epsilon_task_family(const Eigen::MatrixXd& base_transition, int n_tasks,
                               double epsilon, double discount, std::uint64_t seed,
                               double reward_noise_std) {
    const int n = static_cast<int>(base_transition.rows());
    if (base_transition.cols() != n) throw std::invalid_argument("task family: P must be square");
    if (epsilon < 0.0) throw std::invalid_argument("task family: epsilon must be >= 0");
    if (n_tasks < 1) throw std::invalid_argument("task family: need at least one task");
    if (n_tasks > n + 1) {
        throw std::invalid_argument(
            "task family: cannot place " + std::to_string(n_tasks) +
            " points pairwise equidistant in " + std::to_string(n) + " dimensions");
    }

    Rng rng(seed);
    ValueVector base(n);
    for (int i = 0; i < n; ++i) base(i) = rng.normal();

    // Vertices of a regular simplex with side epsilon: offsets e_t - centroid
    // scaled by epsilon / sqrt(2), rotated into a random subspace.
    Eigen::MatrixXd gaussian(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gaussian(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }

    TaskFamily family;
    family.reward_noise_std = reward_noise_std;
    family.epsilon = epsilon;
    family.probabilities = Eigen::VectorXd::Constant(n_tasks, 1.0 / n_tasks);
    const double scale = epsilon / std::sqrt(2.0);
    for (int t = 0; t < n_tasks; ++t) {
        ValueVector offset = ValueVector::Constant(n_tasks, -1.0 / n_tasks);
        offset(t) += 1.0;
        ValueVector embedded = ValueVector::Zero(n);
        embedded.head(n_tasks) = offset;
        const ValueVector v = base + scale * (q * embedded);

        MrpModel task;
        task.transition = base_transition;
        task.discount = discount;
        task.reward = (Eigen::MatrixXd::Identity(n, n) - discount * base_transition) * v;
        task.reward_variance =
            Eigen::VectorXd::Constant(n, reward_noise_std * reward_noise_std);
        task.start_dist = Eigen::VectorXd::Constant(n, 1.0 / n);
        task.name = "family:task" + std::to_string(t);
        task.validate();
        family.tasks.push_back(std::move(task));
        family.values.push_back(v);
    }
    return family;
}

std::pair<int, double> sample_mrp_transition(const MrpModel& mrp, int state, Rng& rng) {
    double u = rng.uniform();
    int next = mrp.n_states() - 1;
    for (int s = 0; s < mrp.n_states(); ++s) {
        u -= mrp.transition(state, s);
        if (u < 0.0) {
            next = s;
            break;
        }
    }
    double reward = mrp.reward(state);
    const double sd = std::sqrt(mrp.reward_variance(state));
    if (sd > 0.0) reward += rng.normal(0.0, sd);
    return {next, reward};
}

// ---------------------------------------------------------------------------
// ScheduledEnv

ScheduledEnv::ScheduledEnv(DiscreteEnv& env, TaskSchedule schedule)
    : env_(env), schedule_(schedule) {
    schedule_.validate();
    if (schedule_.n_tasks > env.n_tasks()) {
        throw std::invalid_argument("schedule references more tasks than the environment has");
    }
}

void ScheduledEnv::apply_task(long count) {
    const int task = schedule_.task_for_count(count);
    if (task != last_task_) {
        env_.set_task(task);
        if (last_task_ >= 0 && schedule_.boundary_visible) pending_boundary_ = true;
        last_task_ = task;
    }
}

int ScheduledEnv::begin_episode(Rng& rng) {
    if (schedule_.unit == TaskSchedule::Unit::kEpisode) apply_task(episodes_started_);
    ++episodes_started_;
    episode_active_ = true;
    return env_.reset(rng);
}

Transition ScheduledEnv::step(int action, Rng& rng) {
    if (!episode_active_ || env_.episode_done()) {
        throw std::logic_error("ScheduledEnv: stepping a finished episode without reset");
    }
    if (schedule_.unit == TaskSchedule::Unit::kStep) apply_task(global_steps_);
    Transition tr = env_.step(action, rng);
    ++global_steps_;
    if (pending_boundary_) {
        tr.task_boundary = true;
        pending_boundary_ = false;
    }
    if (tr.terminal) episode_active_ = false;
    return tr;
}

}  // namespace ptvf
