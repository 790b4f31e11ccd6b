#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ptvf/mrp.hpp"
#include "ptvf/rng.hpp"

namespace ptvf {

/// One environment step. `task_boundary` is raised on the first step of a
/// new task when the schedule makes boundaries visible.
struct Transition {
    int state = 0;
    int action = 0;
    double reward = 0.0;
    int next_state = 0;
    bool terminal = false;
    bool task_boundary = false;
};

/// Per-task parameters of a grid: reward attached to each goal id.
struct GridTask {
    std::vector<double> goal_rewards;
};

/// Deterministic description of how tasks follow each other.
struct TaskSchedule {
    enum class Unit { kEpisode, kStep };
    enum class Order { kCycle, kIid };

    int n_tasks = 1;
    long switch_every = 1;
    Unit unit = Unit::kEpisode;
    bool boundary_visible = true;
    Order order = Order::kCycle;
    std::uint64_t order_seed = 0;

    void validate() const;
    /// Task active during the given switch period (period = count / switch_every).
    int task_at_period(long period) const;
    int task_for_count(long episode_or_step) const {
        return task_at_period(episode_or_step / switch_every);
    }
};

/// Episodic grid environment interface shared by the tabular grids.
class DiscreteEnv {
public:
    virtual ~DiscreteEnv() = default;
    virtual int n_states() const = 0;
    virtual int n_actions() const = 0;
    virtual int n_tasks() const = 0;
    virtual double discount() const = 0;
    virtual void set_task(int task) = 0;
    virtual int task() const = 0;
    virtual int reset(Rng& rng) = 0;
    virtual Transition step(int action, Rng& rng) = 0;
    virtual bool episode_done() const = 0;
    virtual MdpModel as_mdp(int task) const = 0;
};

// Actions shared by all grids.
inline constexpr int kUp = 0;
inline constexpr int kDown = 1;
inline constexpr int kLeft = 2;
inline constexpr int kRight = 3;

/// 5x5 prediction grid: one goal in each corner, start at the center, moves
/// clamped at walls, reward only on transitions entering a goal. Four tasks
/// permute the corner rewards; discount 0.9.
class DiscreteGrid final : public DiscreteEnv {
public:
    static constexpr int kSize = 5;

    DiscreteGrid();

    int n_states() const override { return kSize * kSize; }
    int n_actions() const override { return 4; }
    int n_tasks() const override { return 4; }
    double discount() const override { return 0.9; }
    void set_task(int task) override;
    int task() const override { return task_; }
    int reset(Rng& rng) override;
    Transition step(int action, Rng& rng) override;
    bool episode_done() const override { return done_; }
    MdpModel as_mdp(int task) const override;

    /// MRP induced by the uniformly random policy under the given task.
    MrpModel induced_mrp(int task) const;

    bool is_goal(int state) const;
    static int cell(int row, int col) { return row * kSize + col; }
    const GridTask& task_params(int task) const { return tasks_[task]; }

private:
    int move(int state, int action) const;

    std::vector<GridTask> tasks_;
    int task_ = 0;
    int state_ = 0;
    bool done_ = true;
};

/// Continuous-state version of the prediction grid on [0,1]^2. Actions move
/// 0.1 along an axis plus uniform noise in [-0.01, 0.01]^2; positions are
/// clamped to the square. Regions within 0.1 (norm-1) of a corner are goals;
/// discount 0.99.
class ContinuousGrid {
public:
    struct Step {
        Eigen::Vector2d state;
        int action = 0;
        double reward = 0.0;
        Eigen::Vector2d next_state;
        bool terminal = false;
    };

    ContinuousGrid();

    int n_actions() const { return 4; }
    int n_tasks() const { return 4; }
    double discount() const { return 0.99; }
    void set_task(int task);
    int task() const { return task_; }
    void set_noise_enabled(bool enabled) { noise_enabled_ = enabled; }  // test hook

    Eigen::Vector2d reset(Rng& rng);
    Eigen::Vector2d reset_at(const Eigen::Vector2d& start);
    Step step(int action, Rng& rng);
    bool episode_done() const { return done_; }

    /// Goal id (0=TL, 1=TR, 2=BL, 3=BR) containing the point, if any.
    static std::optional<int> goal_region(const Eigen::Vector2d& x);

private:
    std::vector<GridTask> tasks_;
    int task_ = 0;
    Eigen::Vector2d state_{0.5, 0.5};
    bool done_ = true;
    bool noise_enabled_ = true;
};

/// 6x6 control grid with two adjacent goals in the top-right corner, start
/// in the bottom-left, obstacle cells that block movement, and 10% action
/// slip onto a perpendicular direction. The two goal rewards (+1/-1) swap
/// between the two tasks; discount 0.95.
class ControlGrid final : public DiscreteEnv {
public:
    /// Layout text: one row per line, cells separated by whitespace.
    /// '.' empty, '#' wall, 'S' start, 'G1'/'G2' goals.
    static ControlGrid from_text(const std::string& layout);
    static ControlGrid from_file(const std::string& path);
    static const char* default_layout();

    int n_states() const override { return rows_ * cols_; }
    int n_actions() const override { return 4; }
    int n_tasks() const override { return 2; }
    double discount() const override { return 0.95; }
    void set_task(int task) override;
    int task() const override { return task_; }
    int reset(Rng& rng) override;
    Transition step(int action, Rng& rng) override;
    bool episode_done() const override { return done_; }
    MdpModel as_mdp(int task) const override;

    void set_slip_enabled(bool enabled) { slip_enabled_ = enabled; }  // test hook

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int start_state() const { return start_; }
    bool is_wall(int state) const { return wall_[state]; }
    int goal_id(int state) const;  // -1 when not a goal
    double goal_reward(int goal, int task) const;

private:
    ControlGrid() = default;
    int intended_move(int state, int action) const;
    int slipped_action(int action, double u) const;

    int rows_ = 0;
    int cols_ = 0;
    int start_ = 0;
    std::vector<bool> wall_;
    std::vector<int> goal_;  // -1 or goal id per cell
    int task_ = 0;
    int state_ = 0;
    bool done_ = true;
    bool slip_enabled_ = true;
};

/// Family of tasks sharing one transition matrix whose value functions are
/// pairwise `epsilon` apart in norm-2. Rewards are r = (I - gamma P) v; the
/// harness adds zero-mean Gaussian noise (std `reward_noise_std`) when
/// sampling rewards, which is what the stored per-state reward variance
/// reflects.
struct TaskFamily {
    std::vector<MrpModel> tasks;
    std::vector<ValueVector> values;
    Eigen::VectorXd probabilities;
    double reward_noise_std = 0.0;
    double epsilon = 0.0;

    int n_tasks() const { return static_cast<int>(tasks.size()); }
    int n_states() const { return tasks.empty() ? 0 : tasks.front().n_states(); }
    double discount() const { return tasks.front().discount; }
    ValueVector mean_value() const;
    int sample_task(Rng& rng) const;
};

TaskFamily epsilon_task_family(const Eigen::MatrixXd& base_transition, int n_tasks,
                               double epsilon, double discount, std::uint64_t seed,
                               double reward_noise_std = 0.1);

/// 7-state reference chain used by default for the task family (rows
/// renormalized to be exactly stochastic).
Eigen::MatrixXd seven_state_reference_chain();

/// Samples one transition (next state, noisy reward) of an MRP from state s.
std::pair<int, double> sample_mrp_transition(const MrpModel& mrp, int state, Rng& rng);

/// Couples an episodic environment with a task schedule: tasks advance per
/// episode or per step and the boundary flag is raised on the first step of
/// a new task when visible.
class ScheduledEnv {
public:
    ScheduledEnv(DiscreteEnv& env, TaskSchedule schedule);

    int begin_episode(Rng& rng);
    Transition step(int action, Rng& rng);  // throws if the episode is over
    bool episode_done() const { return env_.episode_done(); }
    long episodes_started() const { return episodes_started_; }
    int current_task() const { return env_.task(); }
    DiscreteEnv& env() { return env_; }
    const TaskSchedule& schedule() const { return schedule_; }

private:
    void apply_task(long count);

    DiscreteEnv& env_;
    TaskSchedule schedule_;
    long episodes_started_ = 0;
    long global_steps_ = 0;
    bool pending_boundary_ = false;
    int last_task_ = -1;
    bool episode_active_ = false;
};

}  // namespace ptvf
