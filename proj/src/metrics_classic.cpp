#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "edibench/metrics.hpp"
#include "edibench/rng.hpp"
#include "learners.hpp"

namespace edibench {

void InterventionConfig::validate() const {
    if (votes < 2) throw Error(ErrorCode::InvalidArgument, "votes must be at least 2");
    if (subset_size < 1) throw Error(ErrorCode::InvalidArgument, "subset_size must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorCode::InvalidArgument, "train_fraction must lie in (0,1)");
}

void DciConfig::validate() const {
    if (!(l1_penalty > 0.0)) throw Error(ErrorCode::InvalidArgument, "l1_penalty must be positive");
    if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be positive");
    if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw Error(ErrorCode::InvalidArgument, "test_fraction must lie in (0,1)");
}

namespace {

std::vector<std::vector<std::int64_t>> factor_labels(const Representation& rep) {
    std::vector<std::vector<std::int64_t>> out;
    for (std::size_t j = 0; j < rep.k(); ++j) {
        auto col = rep.factors.column(j);
        out.push_back(rep.factor_kinds[j].is_discrete() ? integer_labels(col)
                                                         : uniform_bins(col, kDefaultQuantizationBins));
    }
    return out;
}

std::size_t distinct(const std::vector<std::int64_t>& v) {
    auto s = v;
    std::sort(s.begin(), s.end());
    return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

void require_varied_factors(const std::vector<std::vector<std::int64_t>>& labels) {
    for (std::size_t j = 0; j < labels.size(); ++j)
        if (distinct(labels[j]) < 2)
            throw Error(ErrorCode::DegenerateFactor, "factor z" + std::to_string(j) + " is constant");
}

// Rows grouped by label, per factor, so a vote can draw samples sharing the anchor's value.
struct Pools {
    std::vector<std::unordered_map<std::int64_t, std::vector<std::size_t>>> by_factor;

    explicit Pools(const std::vector<std::vector<std::int64_t>>& labels) : by_factor(labels.size()) {
        for (std::size_t j = 0; j < labels.size(); ++j)
            for (std::size_t r = 0; r < labels[j].size(); ++r) by_factor[j][labels[j][r]].push_back(r);
    }
    const std::vector<std::size_t>& pool(std::size_t j, std::int64_t value) const { return by_factor[j].at(value); }
};

std::size_t argmax_first(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Top value minus runner-up; a single entry is its own gap.
double top_gap(std::vector<double> v) {
    if (v.size() == 1) return v[0];
    std::partial_sort(v.begin(), v.begin() + 2, v.end(), std::greater<>());
    return v[0] - v[1];
}

double entropy_base(const std::vector<double>& p, double base) {
    if (base <= 1.0) return 0.0;
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log(x);
    return h / std::log(base);
}

}  // namespace

double zdiff(const Representation& rep, const InterventionConfig& cfg) {
    cfg.validate();
    auto labels = factor_labels(rep);
    require_varied_factors(labels);
    const std::size_t n = rep.n(), k = rep.k(), d = rep.d();
    Pools pools(labels);
    Rng rng(hash64(cfg.seed, 0x7a64ULL));
    const auto votes = static_cast<std::size_t>(cfg.votes);
    Matrix features(votes, d);
    std::vector<std::int64_t> target(votes);
    for (std::size_t v = 0; v < votes; ++v) {
        std::size_t f = uniform_index(rng, k);
        for (int l = 0; l < cfg.subset_size; ++l) {
            std::size_t a = uniform_index(rng, n);
            const auto& pool = pools.pool(f, labels[f][a]);
            std::size_t b = pool[uniform_index(rng, pool.size())];
            for (std::size_t i = 0; i < d; ++i) features(v, i) += std::fabs(rep.codes(a, i) - rep.codes(b, i));
        }
        for (std::size_t i = 0; i < d; ++i) features(v, i) /= cfg.subset_size;
        target[v] = static_cast<std::int64_t>(f);
    }
    const auto train = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(votes)));
    std::vector<std::size_t> tr(train), te(votes - train);
    std::iota(tr.begin(), tr.end(), 0);
    std::iota(te.begin(), te.end(), train);
    detail::LogisticRegression clf;
    std::vector<std::int64_t> ytr(target.begin(), target.begin() + static_cast<std::ptrdiff_t>(train));
    clf.fit(features.select_rows(tr), ytr, k, {});
    std::size_t hit = 0;
    for (std::size_t v : te) hit += clf.predict(&features.data[v * d]) == target[v];
    return te.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(te.size());
}

double zminvar(const Representation& rep, const InterventionConfig& cfg) {
    cfg.validate();
    auto labels = factor_labels(rep);
    require_varied_factors(labels);
    const std::size_t n = rep.n(), k = rep.k(), d = rep.d();
    std::vector<double> inv_sd(d);
    for (std::size_t i = 0; i < d; ++i) {
        auto col = rep.codes.column(i);
        double m = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
        double v = 0.0;
        for (double x : col) v += (x - m) * (x - m);
        double sd = std::sqrt(v / static_cast<double>(n));
        if (!(sd > 0.0)) throw Error(ErrorCode::DegenerateCode, "code c" + std::to_string(i) + " has zero variance");
        inv_sd[i] = 1.0 / sd;
    }
    Pools pools(labels);
    Rng rng(hash64(cfg.seed, 0x7a6dULL));
    const auto votes = static_cast<std::size_t>(cfg.votes);
    const auto m = static_cast<std::size_t>(cfg.subset_size);
    std::vector<std::pair<std::size_t, std::size_t>> cast(votes);
    std::vector<double> sum(d), sq(d);
    for (std::size_t v = 0; v < votes; ++v) {
        std::size_t f = uniform_index(rng, k);
        const auto& pool = pools.pool(f, labels[f][uniform_index(rng, n)]);
        std::fill(sum.begin(), sum.end(), 0.0);
        std::fill(sq.begin(), sq.end(), 0.0);
        for (std::size_t l = 0; l < m; ++l) {
            std::size_t r = pool[uniform_index(rng, pool.size())];
            for (std::size_t i = 0; i < d; ++i) {
                double x = rep.codes(r, i) * inv_sd[i];
                sum[i] += x;
                sq[i] += x * x;
            }
        }
        std::size_t best = 0;
        double best_var = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double mean = sum[i] / static_cast<double>(m);
            double var = std::max(0.0, sq[i] / static_cast<double>(m) - mean * mean);
            if (i == 0 || var < best_var) {
                best_var = var;
                best = i;
            }
        }
        cast[v] = {best, f};
    }
    const auto train = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(votes)));
    std::vector<std::vector<std::size_t>> counts(d, std::vector<std::size_t>(k, 0));
    for (std::size_t v = 0; v < train; ++v) ++counts[cast[v].first][cast[v].second];
    std::vector<std::size_t> majority(d);
    for (std::size_t i = 0; i < d; ++i)
        majority[i] = static_cast<std::size_t>(std::max_element(counts[i].begin(), counts[i].end()) - counts[i].begin());
    std::size_t hit = 0;
    for (std::size_t v = train; v < votes; ++v) hit += majority[cast[v].first] == cast[v].second;
    return votes > train ? static_cast<double>(hit) / static_cast<double>(votes - train) : 0.0;
}

double sap(const Representation& rep) {
    const std::size_t n = rep.n(), k = rep.k(), d = rep.d();
    if (n < 10) throw Error(ErrorCode::TooFewSamples, "SAP needs at least 10 samples");
    const std::size_t train = static_cast<std::size_t>(std::floor(0.7 * static_cast<double>(n)));
    std::vector<std::size_t> tr(train), te(n - train);
    std::iota(tr.begin(), tr.end(), 0);
    std::iota(te.begin(), te.end(), train);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        auto z = rep.factors.column(j);
        std::vector<double> scores(d);
        if (rep.factor_kinds[j].is_discrete()) {
            auto labels = integer_labels(z);
            std::size_t q = distinct(labels);
            if (q < 2) throw Error(ErrorCode::DegenerateFactor, "factor z" + std::to_string(j) + " is constant");
            detail::TreeParams params;
            params.max_depth = static_cast<int>(std::ceil(std::log2(static_cast<double>(q))));
            std::vector<std::int64_t> ytr(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(train));
            std::vector<std::int64_t> yte(labels.begin() + static_cast<std::ptrdiff_t>(train), labels.end());
            for (std::size_t i = 0; i < d; ++i) {
                Matrix c = rep.codes.select_columns({i});
                detail::TreeClassifier tree;
                tree.fit(c.select_rows(tr), ytr, params);
                scores[i] = tree.accuracy(c.select_rows(te), yte);
            }
        } else {
            for (std::size_t i = 0; i < d; ++i) scores[i] = detail::squared_correlation(rep.codes.column(i), z);
        }
        total += top_gap(scores);
    }
    return total / static_cast<double>(k);
}

std::vector<double> mig_gaps(InfoContext& ctx) {
    std::vector<double> gaps(ctx.k());
    for (std::size_t j = 0; j < ctx.k(); ++j) {
        double h = ctx.factor_entropy(j);
        if (!(h > 0.0)) throw Error(ErrorCode::ZeroEntropyFactor, "factor z" + std::to_string(j) + " has zero entropy");
        std::vector<double> col(ctx.d());
        for (std::size_t i = 0; i < ctx.d(); ++i) col[i] = ctx.pairwise(i, j);
        gaps[j] = top_gap(col) / h;
    }
    return gaps;
}

double mig(InfoContext& ctx) {
    auto gaps = mig_gaps(ctx);
    return std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
}

double mig(const Representation& rep, const InfoOptions& options) {
    InfoContext ctx(rep, options);
    return mig(ctx);
}

double mig_sup(InfoContext& ctx) {
    double total = 0.0;
    for (std::size_t i = 0; i < ctx.d(); ++i) {
        double h = ctx.code_entropy(i);
        if (!(h > 0.0)) throw Error(ErrorCode::ZeroEntropyCode, "code c" + std::to_string(i) + " has zero entropy");
        std::vector<double> row(ctx.k());
        for (std::size_t j = 0; j < ctx.k(); ++j) row[j] = ctx.pairwise(i, j);
        total += top_gap(row) / h;
    }
    return total / static_cast<double>(ctx.d());
}

double mig_sup(const Representation& rep, const InfoOptions& options) {
    InfoContext ctx(rep, options);
    return mig_sup(ctx);
}

double modularity_score(InfoContext& ctx) {
    const std::size_t k = ctx.k();
    double total = 0.0;
    for (std::size_t i = 0; i < ctx.d(); ++i) {
        std::vector<double> sq(k);
        for (std::size_t j = 0; j < k; ++j) sq[j] = ctx.pairwise(i, j) * ctx.pairwise(i, j);
        double mx = *std::max_element(sq.begin(), sq.end());
        if (!(mx > 0.0))
            throw Error(ErrorCode::ZeroMaxMi, "code c" + std::to_string(i) + " has zero MI with every factor");
        if (k == 1) {
            total += 1.0;
            continue;
        }
        double rest = std::accumulate(sq.begin(), sq.end(), 0.0) - mx;
        total += 1.0 - rest / (mx * static_cast<double>(k - 1));
    }
    return total / static_cast<double>(ctx.d());
}

double modularity_score(const Representation& rep, const InfoOptions& options) {
    InfoContext ctx(rep, options);
    return modularity_score(ctx);
}

double dcimig(InfoContext& ctx) {
    const std::size_t k = ctx.k();
    double hsum = 0.0;
    for (std::size_t j = 0; j < k; ++j) hsum += ctx.factor_entropy(j);
    if (!(hsum > 0.0)) throw Error(ErrorCode::ZeroEntropyFactor, "factors have zero total entropy");
    std::vector<double> claimed(k, 0.0);
    for (std::size_t i = 0; i < ctx.d(); ++i) {
        std::vector<double> row(k);
        for (std::size_t j = 0; j < k; ++j) row[j] = ctx.pairwise(i, j);
        std::size_t owner = argmax_first(row);
        claimed[owner] = std::max(claimed[owner], top_gap(row));
    }
    return std::accumulate(claimed.begin(), claimed.end(), 0.0) / hsum;
}

double dcimig(const Representation& rep, const InfoOptions& options) {
    InfoContext ctx(rep, options);
    return dcimig(ctx);
}

std::pair<double, double> dci_scores(const Matrix& importance) {
    const std::size_t d = importance.rows, k = importance.cols;
    double total = std::accumulate(importance.data.begin(), importance.data.end(), 0.0);
    if (!(total > 0.0)) throw Error(ErrorCode::AllZeroImportance, "importance matrix is all zero");
    double disent = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < k; ++j) row += importance(i, j);
        if (row <= 0.0) continue;
        std::vector<double> p(k);
        for (std::size_t j = 0; j < k; ++j) p[j] = importance(i, j) / row;
        disent += (row / total) * (1.0 - entropy_base(p, static_cast<double>(k)));
    }
    double comp = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < d; ++i) col += importance(i, j);
        std::vector<double> p(d, 0.0);
        if (col > 0.0)
            for (std::size_t i = 0; i < d; ++i) p[i] = importance(i, j) / col;
        comp += col > 0.0 ? 1.0 - entropy_base(p, static_cast<double>(d)) : 0.0;
    }
    return {disent, comp / static_cast<double>(k)};
}

namespace {

struct Split {
    std::vector<std::size_t> train, test;
};

Split dci_split(std::size_t n, double test_fraction) {
    auto ntest = static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(n)));
    ntest = std::clamp<std::size_t>(ntest, 1, n - 1);
    Split s;
    for (std::size_t r = 0; r < n; ++r) (r < n - ntest ? s.train : s.test).push_back(r);
    return s;
}

// Held-out R^2 for continuous factors, accuracy of the rounded prediction for discrete ones, clamped to [0,1].
double informativeness(const FactorKind& kind, const std::vector<double>& truth, const std::vector<double>& pred) {
    double v;
    if (kind.is_discrete()) {
        std::size_t hit = 0;
        for (std::size_t t = 0; t < truth.size(); ++t) {
            double r = std::clamp(std::round(pred[t]), 0.0, static_cast<double>(kind.categories - 1));
            hit += r == truth[t];
        }
        v = static_cast<double>(hit) / static_cast<double>(truth.size());
    } else {
        v = detail::r_squared(truth, pred);
    }
    return std::clamp(v, 0.0, 1.0);
}

void check_dci_input(const Representation& rep) {
    if (rep.n() < 100) throw Error(ErrorCode::TooFewSamples, "DCI needs at least 100 samples");
}

}  // namespace

DciResult dci(const Representation& rep, const DciConfig& cfg) {
    cfg.validate();
    check_dci_input(rep);
    const std::size_t d = rep.d(), k = rep.k();
    Matrix cs = detail::standardize_columns(rep.codes);
    Matrix zs = detail::standardize_columns(rep.factors);
    Split split = dci_split(rep.n(), cfg.test_fraction);
    Matrix xtr = cs.select_rows(split.train);
    Matrix raw(d, k);
    double info = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        auto zcol = zs.column(j);
        std::vector<double> ytr;
        for (std::size_t r : split.train) ytr.push_back(zcol[r]);
        auto w = detail::lasso(xtr, ytr, cfg.l1_penalty, cfg.max_iterations, cfg.tolerance);
        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) sum += raw(i, j) = std::fabs(w[i]);
        if (!(sum > 0.0))
            throw Error(ErrorCode::AllZeroImportance, "LASSO zeroed every coefficient for factor z" + std::to_string(j));
        // Map predictions back to the factor's units before scoring.
        auto zraw = rep.factors.column(j);
        double mean = std::accumulate(zraw.begin(), zraw.end(), 0.0) / static_cast<double>(zraw.size());
        double var = 0.0;
        for (double x : zraw) var += (x - mean) * (x - mean);
        double sd = std::sqrt(var / static_cast<double>(zraw.size()));
        std::vector<double> truth, pred;
        for (std::size_t r : split.test) {
            double p = 0.0;
            for (std::size_t i = 0; i < d; ++i) p += w[i] * cs(r, i);
            truth.push_back(zraw[r]);
            pred.push_back(mean + sd * p);
        }
        info += informativeness(rep.factor_kinds[j], truth, pred);
    }
    DciResult out;
    out.importance = Matrix(d, k);
    for (std::size_t j = 0; j < k; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < d; ++i) col += raw(i, j);
        for (std::size_t i = 0; i < d; ++i) out.importance(i, j) = raw(i, j) / col;
    }
    std::tie(out.disentanglement, out.completeness) = dci_scores(out.importance);
    out.informativeness = info / static_cast<double>(k);
    return out;
}

DciResult dci_forest(const Representation& rep, const DciConfig& cfg) {
    cfg.validate();
    check_dci_input(rep);
    const std::size_t d = rep.d(), k = rep.k();
    Split split = dci_split(rep.n(), cfg.test_fraction);
    Matrix xtr = rep.codes.select_rows(split.train);
    DciResult out;
    out.importance = Matrix(d, k);
    double info = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        auto z = rep.factors.column(j);
        std::vector<double> ytr;
        for (std::size_t r : split.train) ytr.push_back(z[r]);
        detail::ForestRegressor forest;
        detail::ForestParams params;
        params.seed = hash64(cfg.seed, j);
        forest.fit(xtr, ytr, params);
        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) sum += forest.importances()[i];
        if (!(sum > 0.0))
            throw Error(ErrorCode::AllZeroImportance, "forest found no informative split for factor z" + std::to_string(j));
        for (std::size_t i = 0; i < d; ++i) out.importance(i, j) = forest.importances()[i] / sum;
        std::vector<double> truth, pred;
        for (std::size_t r : split.test) {
            truth.push_back(z[r]);
            pred.push_back(forest.predict(&rep.codes.data[r * d]));
        }
        info += informativeness(rep.factor_kinds[j], truth, pred);
    }
    std::tie(out.disentanglement, out.completeness) = dci_scores(out.importance);
    out.informativeness = info / static_cast<double>(k);
    return out;
}

}  // namespace edibench
