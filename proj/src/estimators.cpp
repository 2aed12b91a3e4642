#include "edibench/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <numeric>

#include "edibench/rng.hpp"
#include "kdtree.hpp"

namespace edibench {

void DvConfig::validate() const {
    if (hidden_layers.empty()) throw Error(ErrorCode::InvalidArgument, "DV network needs at least one hidden layer");
    for (int h : hidden_layers)
        if (h <= 0) throw Error(ErrorCode::InvalidArgument, "hidden layer sizes must be positive");
    if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
    if (batch_size <= 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
    if (max_epochs <= 0) throw Error(ErrorCode::InvalidArgument, "max epochs must be positive");
    if (!(ema_rate > 0.0 && ema_rate < 1.0)) throw Error(ErrorCode::InvalidArgument, "EMA rate must lie in (0,1)");
}

EstimatorChoice EstimatorChoice::discrete_plugin() { return {}; }

EstimatorChoice EstimatorChoice::binned(int bins) {
    EstimatorChoice c;
    c.kind = Kind::Binned;
    c.bins = bins;
    c.validate();
    return c;
}

EstimatorChoice EstimatorChoice::ksg(int k_neighbors) {
    EstimatorChoice c;
    c.kind = Kind::Ksg;
    c.k_neighbors = k_neighbors;
    c.validate();
    return c;
}

EstimatorChoice EstimatorChoice::neural_dv(const DvConfig& cfg) {
    EstimatorChoice c;
    c.kind = Kind::NeuralDv;
    c.dv = cfg;
    c.validate();
    return c;
}

void EstimatorChoice::validate() const {
    if (kind == Kind::Binned && bins < 2) throw Error(ErrorCode::InvalidArgument, "bins must be >= 2");
    if (kind == Kind::Ksg && k_neighbors < 1) throw Error(ErrorCode::InvalidArgument, "k_neighbors must be >= 1");
    if (kind == Kind::NeuralDv) dv.validate();
}

EstimatorChoice EstimatorChoice::parse(const std::string& text) {
    auto colon = text.find(':');
    std::string head = text.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto parse_int = [&](int fallback) {
        if (arg.empty()) return fallback;
        char* end = nullptr;
        long v = std::strtol(arg.c_str(), &end, 10);
        if (end != arg.c_str() + arg.size() || v <= 0 || v > 1000000)
            throw Error(ErrorCode::InvalidArgument, "bad estimator parameter in '" + text + "'");
        return static_cast<int>(v);
    };
    if (head == "discrete" && arg.empty()) return discrete_plugin();
    if (head == "binned") return binned(parse_int(20));
    if (head == "ksg") return ksg(parse_int(3));
    if (head == "dv" && arg.empty()) return neural_dv();
    throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + text + "'");
}

std::string EstimatorChoice::to_string() const {
    switch (kind) {
        case Kind::DiscretePlugin: return "discrete";
        case Kind::Binned: return "binned:" + std::to_string(bins);
        case Kind::Ksg: return "ksg:" + std::to_string(k_neighbors);
        case Kind::NeuralDv: return "dv";
    }
    return "discrete";
}

namespace {

// Entropy from category counts; counts are sorted first so the result does not depend on label order.
double entropy_from_counts(std::vector<std::size_t> counts, std::size_t n) {
    if (counts.size() <= 1) return 0.0;
    std::sort(counts.begin(), counts.end());
    double acc = 0.0;
    for (std::size_t c : counts) {
        double cd = static_cast<double>(c);
        acc += cd * std::log(cd);
    }
    double nd = static_cast<double>(n);
    double h = std::log(nd) - acc / nd;
    return h > 0.0 ? h : 0.0;
}

std::vector<std::size_t> label_counts(const std::vector<std::int64_t>& labels) {
    std::vector<std::int64_t> s = labels;
    std::sort(s.begin(), s.end());
    std::vector<std::size_t> counts;
    for (std::size_t i = 0; i < s.size();) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        counts.push_back(j - i);
        i = j;
    }
    return counts;
}

std::vector<std::size_t> pair_counts(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
    std::vector<std::pair<std::int64_t, std::int64_t>> s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = {x[i], y[i]};
    std::sort(s.begin(), s.end());
    std::vector<std::size_t> counts;
    for (std::size_t i = 0; i < s.size();) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        counts.push_back(j - i);
        i = j;
    }
    return counts;
}

std::vector<double> digamma_table(std::size_t n) {
    // psi(1) = -gamma, psi(m + 1) = psi(m) + 1/m
    std::vector<double> t(n + 2);
    t[0] = -std::numeric_limits<double>::infinity();
    t[1] = -0.57721566490153286061;
    for (std::size_t m = 1; m + 1 < t.size(); ++m) t[m + 1] = t[m] + 1.0 / static_cast<double>(m);
    return t;
}

std::uint64_t column_hash(const std::vector<double>& col) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (double v : col) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h = mix64(h ^ bits);
    }
    return h;
}

// Adds seeded jitter of magnitude kKsgJitterScale * range; seeded by the column content so that
// the estimate does not depend on argument order.
std::vector<double> jittered(const std::vector<double>& col, std::uint64_t seed) {
    auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    double range = *mx - *mn;
    double scale = kKsgJitterScale * (range > 0.0 ? range : 1.0);
    Rng rng(hash64(seed, column_hash(col)));
    std::vector<double> out(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) out[i] = col[i] + scale * (2.0 * uniform01(rng) - 1.0);
    return out;
}

// Number of j != i with |v[j] - v[i]| < r, where `sorted` holds the values in ascending order.
std::size_t count_1d(const std::vector<double>& sorted, double v, double r) {
    if (!(r > 0.0)) return 0;
    auto lo = std::partition_point(sorted.begin(), sorted.end(), [&](double s) { return !(v - s < r); });
    auto hi = std::partition_point(lo, sorted.end(), [&](double s) { return s - v < r; });
    return static_cast<std::size_t>(hi - lo) - 1;
}

class MarginalCounter {
public:
    explicit MarginalCounter(const std::vector<std::vector<double>>& cols) : cols_(cols) {
        if (cols.size() == 1) {
            sorted_ = cols[0];
            std::sort(sorted_.begin(), sorted_.end());
        } else {
            tree_ = std::make_unique<detail::KdTree>(cols);
        }
    }
    std::size_t count(std::size_t i, double r) const {
        if (tree_) return tree_->count_within(i, r);
        return count_1d(sorted_, cols_[0][i], r);
    }

private:
    const std::vector<std::vector<double>>& cols_;
    std::vector<double> sorted_;
    std::unique_ptr<detail::KdTree> tree_;
};

}  // namespace

double discrete_entropy(const std::vector<std::int64_t>& samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptyInput, "entropy of an empty sequence");
    return entropy_from_counts(label_counts(samples), samples.size());
}

double plugin_mi(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
    if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "MI inputs differ in length");
    if (x.empty()) throw Error(ErrorCode::EmptyInput, "MI of empty sequences");
    double hx = discrete_entropy(x);
    double hy = discrete_entropy(y);
    double hxy = entropy_from_counts(pair_counts(x, y), x.size());
    double mi = (hx + hy) - hxy;
    return mi > 0.0 ? mi : 0.0;
}

bool is_integer_valued(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x) || x != std::floor(x) || std::fabs(x) > 9e15) return false;
    return true;
}

std::vector<std::int64_t> integer_labels(const std::vector<double>& v) {
    std::vector<std::int64_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || v[i] != std::floor(v[i]) || std::fabs(v[i]) > 9e15)
            throw Error(ErrorCode::DomainViolation, "value is not an exact integer");
        out[i] = static_cast<std::int64_t>(v[i]);
    }
    return out;
}

std::vector<std::int64_t> uniform_bins(const std::vector<double>& v, int bins) {
    if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bins must be positive");
    if (v.empty()) return {};
    auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    double lo = *mn, hi = *mx;
    std::vector<std::int64_t> out(v.size(), 0);
    if (!(hi > lo)) return out;
    double width = (hi - lo) / bins;
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto b = static_cast<std::int64_t>((v[i] - lo) / width);
        out[i] = std::clamp<std::int64_t>(b, 0, bins - 1);
    }
    return out;
}

std::vector<std::int64_t> tuple_labels(const std::vector<std::vector<std::int64_t>>& columns) {
    if (columns.empty()) return {};
    std::size_t n = columns[0].size();
    std::vector<std::int64_t> out(n, 0);
    for (const auto& col : columns) {
        if (col.size() != n) throw Error(ErrorCode::LengthMismatch, "tuple columns differ in length");
        std::vector<std::pair<std::int64_t, std::int64_t>> keyed(n);
        for (std::size_t i = 0; i < n; ++i) keyed[i] = {out[i], col[i]};
        std::vector<std::pair<std::int64_t, std::int64_t>> uniq = keyed;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (std::size_t i = 0; i < n; ++i)
            out[i] = std::lower_bound(uniq.begin(), uniq.end(), keyed[i]) - uniq.begin();
    }
    return out;
}

double binned_mi(const std::vector<double>& x, const std::vector<double>& y, int bins, ValueKind kx, ValueKind ky) {
    if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "binned MI inputs differ in length");
    if (x.size() < 2) throw Error(ErrorCode::EmptyInput, "binned MI needs at least 2 samples");
    if (bins < 2) throw Error(ErrorCode::InvalidArgument, "bins must be >= 2");
    auto lx = kx == ValueKind::Discrete ? integer_labels(x) : uniform_bins(x, bins);
    auto ly = ky == ValueKind::Discrete ? integer_labels(y) : uniform_bins(y, bins);
    return plugin_mi(lx, ly);
}

double ksg_mi(const Matrix& x, const Matrix& y, int k_neighbors, std::uint64_t seed) {
    if (x.rows != y.rows) throw Error(ErrorCode::LengthMismatch, "KSG inputs differ in length");
    if (k_neighbors < 1) throw Error(ErrorCode::InvalidArgument, "k_neighbors must be >= 1");
    if (x.cols == 0 || y.cols == 0) throw Error(ErrorCode::EmptyInput, "KSG inputs need at least one column");
    const std::size_t n = x.rows;
    if (n < static_cast<std::size_t>(k_neighbors) + 1)
        throw Error(ErrorCode::TooFewSamples, "KSG needs at least k_neighbors + 1 samples");

    std::vector<std::vector<double>> xs, ys, joint;
    for (std::size_t c = 0; c < x.cols; ++c) xs.push_back(jittered(x.column(c), seed));
    for (std::size_t c = 0; c < y.cols; ++c) ys.push_back(jittered(y.column(c), seed));
    joint = xs;
    joint.insert(joint.end(), ys.begin(), ys.end());

    detail::KdTree tree(joint);
    MarginalCounter cx(xs), cy(ys);
    auto psi = digamma_table(n);

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double eps = tree.kth_neighbor_distance(i, k_neighbors);
        std::size_t nx = cx.count(i, eps);
        std::size_t ny = cy.count(i, eps);
        acc += psi[nx + 1] + psi[ny + 1];
    }
    double mi = psi[static_cast<std::size_t>(k_neighbors)] + psi[n] - acc / static_cast<double>(n);
    return mi > 0.0 ? mi : 0.0;
}

Matrix column_matrix(const std::vector<double>& v) {
    Matrix m(v.size(), 1);
    m.data = v;
    return m;
}

double mutual_information(const Matrix& x, ValueKind kx, const Matrix& y, ValueKind ky, const EstimatorChoice& choice) {
    if (x.rows != y.rows) throw Error(ErrorCode::LengthMismatch, "MI inputs differ in length");
    choice.validate();
    auto labels_of = [](const Matrix& m, ValueKind kind, int bins) {
        std::vector<std::vector<std::int64_t>> cols;
        for (std::size_t c = 0; c < m.cols; ++c)
            cols.push_back(kind == ValueKind::Discrete ? integer_labels(m.column(c)) : uniform_bins(m.column(c), bins));
        return cols.size() == 1 ? cols[0] : tuple_labels(cols);
    };
    switch (choice.kind) {
        case EstimatorChoice::Kind::DiscretePlugin:
            if (kx != ValueKind::Discrete || ky != ValueKind::Discrete)
                throw Error(ErrorCode::IncompatibleEstimator, "discrete plug-in estimator needs discrete inputs");
            return plugin_mi(labels_of(x, kx, 0), labels_of(y, ky, 0));
        case EstimatorChoice::Kind::Binned:
            if (x.rows < 2) throw Error(ErrorCode::EmptyInput, "binned MI needs at least 2 samples");
            return plugin_mi(labels_of(x, kx, choice.bins), labels_of(y, ky, choice.bins));
        case EstimatorChoice::Kind::Ksg:
            return ksg_mi(x, y, choice.k_neighbors);
        case EstimatorChoice::Kind::NeuralDv:
            return neural_dv_mi(x, y, choice.dv);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown estimator");
}

}  // namespace edibench
