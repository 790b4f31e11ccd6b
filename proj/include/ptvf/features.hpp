#pragma once

#include <Eigen/Dense>
#include <memory>

namespace ptvf {

/// Encoder from discrete state ids to fixed-dimension feature vectors.
class FeatureMap {
public:
    virtual ~FeatureMap() = default;
    virtual int dimension() const = 0;
    virtual void encode_into(int state, Eigen::VectorXd& out) const = 0;

    Eigen::VectorXd encode(int state) const {
        Eigen::VectorXd out(dimension());
        encode_into(state, out);
        return out;
    }
};

/// One-hot encoding; linear learning with these features is exactly tabular.
class TabularFeatures final : public FeatureMap {
public:
    explicit TabularFeatures(int n_states);
    int dimension() const override { return n_states_; }
    void encode_into(int state, Eigen::VectorXd& out) const override;

private:
    int n_states_;
};

/// Concatenated one-hot row and one-hot column of a grid cell, e.g. cell
/// (2,2) on a 5x5 grid encodes as [0,0,1,0,0, 0,0,1,0,0].
class RowColFeatures final : public FeatureMap {
public:
    RowColFeatures(int rows, int cols);
    int dimension() const override { return rows_ + cols_; }
    void encode_into(int state, Eigen::VectorXd& out) const override;

private:
    int rows_;
    int cols_;
};

/// Thresholded radial basis features over the unit square. Centers sit on an
/// order x order uniform grid; the unnormalized Gaussian
/// exp(-||x - c||^2 / (2 sigma^2)) is binarized at `threshold` (activation
/// strictly greater than the threshold maps to 1).
class RbfFeatures {
public:
    explicit RbfFeatures(int order = 26, double variance = -1.0, double threshold = 0.5);

    int dimension() const { return order_ * order_; }
    int order() const { return order_; }
    double variance() const { return variance_; }

    double activation(const Eigen::Vector2d& x, int center_index) const;
    void encode_into(const Eigen::Vector2d& x, Eigen::VectorXd& out) const;
    Eigen::VectorXd encode(const Eigen::Vector2d& x) const;
    Eigen::Vector2d center(int index) const;

private:
    int order_;
    double variance_;
    double threshold_;
};

}  // namespace ptvf
