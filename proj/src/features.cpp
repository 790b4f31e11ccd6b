#include "ptvf/features.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ptvf {

TabularFeatures::TabularFeatures(int n_states) : n_states_(n_states) {
    if (n_states < 1) throw std::invalid_argument("TabularFeatures: n_states must be >= 1");
}

void TabularFeatures::encode_into(int state, Eigen::VectorXd& out) const {
    if (state < 0 || state >= n_states_) {
        throw std::out_of_range("TabularFeatures: state " + std::to_string(state) +
                                " outside [0, " + std::to_string(n_states_) + ")");
    }
    out.setZero(n_states_);
    out(state) = 1.0;
}

RowColFeatures::RowColFeatures(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("RowColFeatures: bad grid shape");
}

void RowColFeatures::encode_into(int state, Eigen::VectorXd& out) const {
    if (state < 0 || state >= rows_ * cols_) {
        throw std::out_of_range("RowColFeatures: cell index out of grid");
    }
    out.setZero(rows_ + cols_);
    out(state / cols_) = 1.0;
    out(rows_ + state % cols_) = 1.0;
}

RbfFeatures::RbfFeatures(int order, double variance, double threshold)
    : order_(order), variance_(variance), threshold_(threshold) {
    if (order < 2) throw std::invalid_argument("RbfFeatures: order must be >= 2");
    if (variance_ <= 0.0) {
        const double sigma = 0.75 / static_cast<double>(order - 1);
        variance_ = sigma * sigma;
    }
}

Eigen::Vector2d RbfFeatures::center(int index) const {
    const double step = 1.0 / static_cast<double>(order_ - 1);
    return {static_cast<double>(index / order_) * step,
            static_cast<double>(index % order_) * step};
}

double RbfFeatures::activation(const Eigen::Vector2d& x, int center_index) const {
    const Eigen::Vector2d c = center(center_index);
    return std::exp(-(x - c).squaredNorm() / (2.0 * variance_));
}

void RbfFeatures::encode_into(const Eigen::Vector2d& x, Eigen::VectorXd& out) const {
    if (x(0) < 0.0 || x(0) > 1.0 || x(1) < 0.0 || x(1) > 1.0) {
        throw std::out_of_range("RbfFeatures: point outside the unit square");
    }
    out.setZero(dimension());
    // Activations decay fast; only centers within the cutoff radius can
    // clear the threshold.
    const double cutoff2 = -2.0 * variance_ * std::log(threshold_);
    const double step = 1.0 / static_cast<double>(order_ - 1);
    const int radius = static_cast<int>(std::ceil(std::sqrt(cutoff2) / step)) + 1;
    const int i0 = std::max(0, static_cast<int>(x(0) / step) - radius);
    const int i1 = std::min(order_ - 1, static_cast<int>(x(0) / step) + radius);
    const int j0 = std::max(0, static_cast<int>(x(1) / step) - radius);
    const int j1 = std::min(order_ - 1, static_cast<int>(x(1) / step) + radius);
    for (int i = i0; i <= i1; ++i) {
        for (int j = j0; j <= j1; ++j) {
            const int k = i * order_ + j;
            if (activation(x, k) > threshold_) out(k) = 1.0;
        }
    }
}

Eigen::VectorXd RbfFeatures::encode(const Eigen::Vector2d& x) const {
    Eigen::VectorXd out(dimension());
    encode_into(x, out);
    return out;
}

}  // namespace ptvf
