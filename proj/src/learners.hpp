#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "edibench/core.hpp"

namespace edibench::detail {

// Column-wise z-scoring with population standard deviation; constant columns are centred only.
Matrix standardize_columns(const Matrix& m);

// Minimises 1/(2n) ||y - Xw||^2 + alpha ||w||_1 by cyclic coordinate descent. No intercept.
std::vector<double> lasso(const Matrix& x, const std::vector<double>& y, double alpha, int max_iterations,
                          double tolerance);

struct TreeParams {
    int max_depth = 8;
    std::size_t min_samples_split = 2;
};

// Axis-aligned classification tree, entropy criterion, exact thresholds at midpoints.
class TreeClassifier {
public:
    void fit(const Matrix& x, const std::vector<std::int64_t>& y, const TreeParams& params);
    std::int64_t predict(const double* row) const;
    double accuracy(const Matrix& x, const std::vector<std::int64_t>& y) const;

private:
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1, right = -1;
        std::int64_t label = 0;
    };
    int grow(const Matrix& x, const std::vector<std::int64_t>& y, std::vector<std::size_t>& idx, std::size_t begin,
             std::size_t end, int depth);

    TreeParams params_;
    std::size_t classes_ = 0;
    std::vector<std::int64_t> label_values_;
    std::vector<Node> nodes_;
};

struct ForestParams {
    int trees = 50;
    int max_depth = 8;
    std::size_t min_samples_leaf = 1;
    std::uint64_t seed = 0;
};

// Bootstrap regression forest (squared error); importances are the mean impurity decrease per feature,
// normalised per tree.
class ForestRegressor {
public:
    void fit(const Matrix& x, const std::vector<double>& y, const ForestParams& params);
    double predict(const double* row) const;
    const std::vector<double>& importances() const { return importances_; }

private:
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1, right = -1;
        double value = 0.0;
    };
    struct Tree {
        std::vector<Node> nodes;
    };
    int grow(Tree& tree, const Matrix& x, const std::vector<double>& y, std::vector<std::size_t>& idx,
             std::size_t begin, std::size_t end, int depth, std::vector<double>& gain);

    ForestParams params_;
    std::vector<Tree> trees_;
    std::vector<double> importances_;
};

struct LogisticParams {
    double learning_rate = 0.5;
    int iterations = 500;
    double l2 = 1e-4;
};

// Multinomial logistic regression on standardized features, full-batch gradient descent.
class LogisticRegression {
public:
    void fit(const Matrix& x, const std::vector<std::int64_t>& y, std::size_t classes, const LogisticParams& params);
    std::int64_t predict(const double* row) const;

private:
    std::size_t features_ = 0, classes_ = 0;
    std::vector<double> mean_, scale_;
    std::vector<double> w_;  // classes x (features + 1)
};

double r_squared(const std::vector<double>& truth, const std::vector<double>& pred);

// Squared Pearson correlation; 0 when either side is constant.
double squared_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace edibench::detail
