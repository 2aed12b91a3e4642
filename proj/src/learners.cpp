#include "learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edibench/rng.hpp"

namespace edibench::detail {

Matrix standardize_columns(const Matrix& m) {
    Matrix out(m.rows, m.cols);
    for (std::size_t c = 0; c < m.cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < m.rows; ++r) mean += m(r, c);
        mean /= static_cast<double>(m.rows);
        double var = 0.0;
        for (std::size_t r = 0; r < m.rows; ++r) var += (m(r, c) - mean) * (m(r, c) - mean);
        double sd = std::sqrt(var / static_cast<double>(m.rows));
        double inv = sd > 0.0 ? 1.0 / sd : 1.0;
        for (std::size_t r = 0; r < m.rows; ++r) out(r, c) = (m(r, c) - mean) * inv;
    }
    return out;
}

std::vector<double> lasso(const Matrix& x, const std::vector<double>& y, double alpha, int max_iterations,
                          double tolerance) {
    const std::size_t n = x.rows, p = x.cols;
    std::vector<std::vector<double>> cols(p);
    std::vector<double> norm2(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        cols[j] = x.column(j);
        for (double v : cols[j]) norm2[j] += v * v;
    }
    std::vector<double> w(p, 0.0);
    std::vector<double> resid = y;
    const double threshold = alpha * static_cast<double>(n);
    for (int it = 0; it < max_iterations; ++it) {
        double max_delta = 0.0, max_w = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            if (norm2[j] == 0.0) continue;
            const double* xj = cols[j].data();
            double rho = 0.0;
            for (std::size_t r = 0; r < n; ++r) rho += xj[r] * resid[r];
            rho += norm2[j] * w[j];
            double updated = 0.0;
            if (rho > threshold)
                updated = (rho - threshold) / norm2[j];
            else if (rho < -threshold)
                updated = (rho + threshold) / norm2[j];
            double delta = updated - w[j];
            if (delta != 0.0) {
                for (std::size_t r = 0; r < n; ++r) resid[r] -= delta * xj[r];
                w[j] = updated;
            }
            max_delta = std::max(max_delta, std::fabs(delta));
            max_w = std::max(max_w, std::fabs(updated));
        }
        if (max_w == 0.0 || max_delta <= tolerance * max_w) break;
    }
    return w;
}

namespace {

double entropy_of_counts(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    const double inv = 1.0 / static_cast<double>(total);
    for (std::size_t c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) * inv;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

void TreeClassifier::fit(const Matrix& x, const std::vector<std::int64_t>& y, const TreeParams& params) {
    if (x.rows != y.size()) throw Error(ErrorCode::LengthMismatch, "tree inputs differ in length");
    if (x.rows == 0) throw Error(ErrorCode::EmptyInput, "tree needs training samples");
    params_ = params;
    label_values_ = y;
    std::sort(label_values_.begin(), label_values_.end());
    label_values_.erase(std::unique(label_values_.begin(), label_values_.end()), label_values_.end());
    classes_ = label_values_.size();
    std::vector<std::int64_t> coded(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        coded[i] = std::lower_bound(label_values_.begin(), label_values_.end(), y[i]) - label_values_.begin();
    std::vector<std::size_t> idx(x.rows);
    std::iota(idx.begin(), idx.end(), 0);
    nodes_.clear();
    grow(x, coded, idx, 0, idx.size(), 0);
}

int TreeClassifier::grow(const Matrix& x, const std::vector<std::int64_t>& y, std::vector<std::size_t>& idx,
                         std::size_t begin, std::size_t end, int depth) {
    const std::size_t m = end - begin;
    std::vector<std::size_t> counts(classes_, 0);
    for (std::size_t t = begin; t < end; ++t) ++counts[static_cast<std::size_t>(y[idx[t]])];
    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].label = std::max_element(counts.begin(), counts.end()) - counts.begin();
    double parent = entropy_of_counts(counts, m);
    if (depth >= params_.max_depth || m < params_.min_samples_split || parent <= 0.0) return id;

    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, std::int64_t>> sorted(m);
    std::vector<std::size_t> left(classes_);
    for (std::size_t f = 0; f < x.cols; ++f) {
        for (std::size_t t = 0; t < m; ++t) sorted[t] = {x(idx[begin + t], f), y[idx[begin + t]]};
        std::sort(sorted.begin(), sorted.end());
        std::fill(left.begin(), left.end(), 0);
        std::vector<std::size_t> right = counts;
        for (std::size_t t = 0; t + 1 < m; ++t) {
            auto c = static_cast<std::size_t>(sorted[t].second);
            ++left[c];
            --right[c];
            if (sorted[t].first == sorted[t + 1].first) continue;
            std::size_t nl = t + 1, nr = m - nl;
            double child = (static_cast<double>(nl) * entropy_of_counts(left, nl) +
                            static_cast<double>(nr) * entropy_of_counts(right, nr)) /
                           static_cast<double>(m);
            double gain = parent - child;
            if (gain > best_gain + 1e-12) {
                best_gain = gain;
                best_feature = static_cast<int>(f);
                best_threshold = 0.5 * (sorted[t].first + sorted[t + 1].first);
            }
        }
    }
    if (best_feature < 0) return id;
    auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                              idx.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
                                  return x(r, static_cast<std::size_t>(best_feature)) <= best_threshold;
                              });
    std::size_t split = static_cast<std::size_t>(mid - idx.begin());
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    int l = grow(x, y, idx, begin, split, depth + 1);
    int r = grow(x, y, idx, split, end, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

std::int64_t TreeClassifier::predict(const double* row) const {
    int node = 0;
    while (nodes_[node].feature >= 0)
        node = row[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left : nodes_[node].right;
    return label_values_[static_cast<std::size_t>(nodes_[node].label)];
}

double TreeClassifier::accuracy(const Matrix& x, const std::vector<std::int64_t>& y) const {
    if (x.rows == 0) return 0.0;
    std::size_t hit = 0;
    for (std::size_t r = 0; r < x.rows; ++r) hit += predict(&x.data[r * x.cols]) == y[r];
    return static_cast<double>(hit) / static_cast<double>(x.rows);
}

void ForestRegressor::fit(const Matrix& x, const std::vector<double>& y, const ForestParams& params) {
    if (x.rows != y.size()) throw Error(ErrorCode::LengthMismatch, "forest inputs differ in length");
    if (x.rows < 2) throw Error(ErrorCode::TooFewSamples, "forest needs at least 2 samples");
    params_ = params;
    trees_.assign(static_cast<std::size_t>(params.trees), Tree{});
    importances_.assign(x.cols, 0.0);
    Rng rng(hash64(params.seed, 0x7265ULL));
    std::vector<std::size_t> idx(x.rows);
    for (auto& tree : trees_) {
        for (auto& v : idx) v = uniform_index(rng, x.rows);
        std::vector<double> gain(x.cols, 0.0);
        grow(tree, x, y, idx, 0, idx.size(), 0, gain);
        double total = std::accumulate(gain.begin(), gain.end(), 0.0);
        if (total > 0.0)
            for (std::size_t f = 0; f < x.cols; ++f) importances_[f] += gain[f] / total;
    }
    for (auto& v : importances_) v /= static_cast<double>(trees_.size());
}

int ForestRegressor::grow(Tree& tree, const Matrix& x, const std::vector<double>& y, std::vector<std::size_t>& idx,
                          std::size_t begin, std::size_t end, int depth, std::vector<double>& gain) {
    const std::size_t m = end - begin;
    double sum = 0.0, sq = 0.0;
    for (std::size_t t = begin; t < end; ++t) {
        sum += y[idx[t]];
        sq += y[idx[t]] * y[idx[t]];
    }
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[id].value = sum / static_cast<double>(m);
    double parent_sse = sq - sum * sum / static_cast<double>(m);
    if (depth >= params_.max_depth || m < 2 * params_.min_samples_leaf || parent_sse <= 1e-12) return id;

    double best = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, double>> sorted(m);
    for (std::size_t f = 0; f < x.cols; ++f) {
        for (std::size_t t = 0; t < m; ++t) sorted[t] = {x(idx[begin + t], f), y[idx[begin + t]]};
        std::sort(sorted.begin(), sorted.end());
        double ls = 0.0;
        for (std::size_t t = 0; t + 1 < m; ++t) {
            ls += sorted[t].second;
            if (sorted[t].first == sorted[t + 1].first) continue;
            std::size_t nl = t + 1, nr = m - nl;
            if (nl < params_.min_samples_leaf || nr < params_.min_samples_leaf) continue;
            double rs = sum - ls;
            // SSE reduction equals sum_l^2/n_l + sum_r^2/n_r - sum^2/n.
            double score = ls * ls / static_cast<double>(nl) + rs * rs / static_cast<double>(nr);
            if (best_feature < 0 || score > best + 1e-12) {
                best = score;
                best_feature = static_cast<int>(f);
                best_threshold = 0.5 * (sorted[t].first + sorted[t + 1].first);
            }
        }
    }
    if (best_feature < 0) return id;
    double reduction = best - sum * sum / static_cast<double>(m);
    if (reduction <= 0.0) return id;
    gain[static_cast<std::size_t>(best_feature)] += reduction;
    auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                              idx.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
                                  return x(r, static_cast<std::size_t>(best_feature)) <= best_threshold;
                              });
    std::size_t split = static_cast<std::size_t>(mid - idx.begin());
    tree.nodes[id].feature = best_feature;
    tree.nodes[id].threshold = best_threshold;
    int l = grow(tree, x, y, idx, begin, split, depth + 1, gain);
    int r = grow(tree, x, y, idx, split, end, depth + 1, gain);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
}

double ForestRegressor::predict(const double* row) const {
    double s = 0.0;
    for (const auto& tree : trees_) {
        int node = 0;
        while (tree.nodes[node].feature >= 0)
            node = row[tree.nodes[node].feature] <= tree.nodes[node].threshold ? tree.nodes[node].left
                                                                               : tree.nodes[node].right;
        s += tree.nodes[node].value;
    }
    return s / static_cast<double>(trees_.size());
}

void LogisticRegression::fit(const Matrix& x, const std::vector<std::int64_t>& y, std::size_t classes,
                             const LogisticParams& params) {
    if (x.rows != y.size()) throw Error(ErrorCode::LengthMismatch, "logistic inputs differ in length");
    if (x.rows == 0) throw Error(ErrorCode::EmptyInput, "logistic regression needs samples");
    features_ = x.cols;
    classes_ = classes;
    mean_.assign(features_, 0.0);
    scale_.assign(features_, 1.0);
    for (std::size_t f = 0; f < features_; ++f) {
        double m = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) m += x(r, f);
        m /= static_cast<double>(x.rows);
        double v = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) v += (x(r, f) - m) * (x(r, f) - m);
        double sd = std::sqrt(v / static_cast<double>(x.rows));
        mean_[f] = m;
        scale_[f] = sd > 0.0 ? 1.0 / sd : 1.0;
    }
    const std::size_t stride = features_ + 1;
    w_.assign(classes_ * stride, 0.0);
    std::vector<double> xs(x.rows * stride);
    for (std::size_t r = 0; r < x.rows; ++r) {
        for (std::size_t f = 0; f < features_; ++f) xs[r * stride + f] = (x(r, f) - mean_[f]) * scale_[f];
        xs[r * stride + features_] = 1.0;
    }
    std::vector<double> grad(w_.size()), logits(classes_);
    const double inv_n = 1.0 / static_cast<double>(x.rows);
    for (int it = 0; it < params.iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t r = 0; r < x.rows; ++r) {
            const double* row = &xs[r * stride];
            double mx = -1e300;
            for (std::size_t c = 0; c < classes_; ++c) {
                double s = 0.0;
                for (std::size_t f = 0; f < stride; ++f) s += w_[c * stride + f] * row[f];
                logits[c] = s;
                mx = std::max(mx, s);
            }
            double z = 0.0;
            for (auto& l : logits) z += (l = std::exp(l - mx));
            for (std::size_t c = 0; c < classes_; ++c) {
                double g = logits[c] / z - (static_cast<std::size_t>(y[r]) == c ? 1.0 : 0.0);
                for (std::size_t f = 0; f < stride; ++f) grad[c * stride + f] += g * row[f];
            }
        }
        for (std::size_t t = 0; t < w_.size(); ++t)
            w_[t] -= params.learning_rate * (grad[t] * inv_n + params.l2 * w_[t]);
    }
}

std::int64_t LogisticRegression::predict(const double* row) const {
    const std::size_t stride = features_ + 1;
    std::int64_t best = 0;
    double best_score = -1e300;
    for (std::size_t c = 0; c < classes_; ++c) {
        double s = w_[c * stride + features_];
        for (std::size_t f = 0; f < features_; ++f) s += w_[c * stride + f] * (row[f] - mean_[f]) * scale_[f];
        if (s > best_score) {
            best_score = s;
            best = static_cast<std::int64_t>(c);
        }
    }
    return best;
}

double r_squared(const std::vector<double>& truth, const std::vector<double>& pred) {
    if (truth.empty()) return 0.0;
    double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(truth.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
        ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    }
    if (ss_tot <= 0.0) return 0.0;
    return 1.0 - ss_res / ss_tot;
}

double squared_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab * sab / (saa * sbb);
}

}  // namespace edibench::detail
