#include "kdtree.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "edibench/kernels.hpp"

namespace edibench::detail {

KdTree::KdTree(const std::vector<std::vector<double>>& columns, std::size_t leaf_size)
    : n_(columns.empty() ? 0 : columns[0].size()),
      dim_(columns.size()),
      leaf_size_(std::clamp<std::size_t>(leaf_size, 1, kMaxLeaf)) {
    order_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) order_[i] = i;
    cols_ = columns;
    if (n_ > 0) build(0, n_);
    // Reorder coordinates into tree order so leaves are contiguous.
    std::vector<std::vector<double>> permuted(dim_, std::vector<double>(n_));
    for (std::size_t d = 0; d < dim_; ++d)
        for (std::size_t p = 0; p < n_; ++p) permuted[d][p] = columns[d][order_[p]];
    cols_ = std::move(permuted);
    col_ptrs_.resize(dim_);
    for (std::size_t d = 0; d < dim_; ++d) col_ptrs_[d] = cols_[d].data();
    position_.resize(n_);
    for (std::size_t p = 0; p < n_; ++p) position_[order_[p]] = p;
}

int KdTree::build(std::size_t begin, std::size_t end) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end, -1, -1});
    lo_.resize(lo_.size() + dim_);
    hi_.resize(hi_.size() + dim_);
    std::size_t best_dim = 0;
    double best_spread = -1.0;
    for (std::size_t d = 0; d < dim_; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t p = begin; p < end; ++p) {
            double v = cols_[d][order_[p]];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        lo_[id * dim_ + d] = lo;
        hi_[id * dim_ + d] = hi;
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            best_dim = d;
        }
    }
    if (end - begin <= leaf_size_ || best_spread <= 0.0) return id;
    std::size_t mid = begin + (end - begin) / 2;
    const auto& col = cols_[best_dim];
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&col](std::size_t a, std::size_t b) { return col[a] < col[b] || (col[a] == col[b] && a < b); });
    int left = build(begin, mid);
    int right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

double KdTree::box_min_dist(int node, const double* q) const {
    double m = 0.0;
    const double* lo = &lo_[node * dim_];
    const double* hi = &hi_[node * dim_];
    for (std::size_t d = 0; d < dim_; ++d) {
        double v = std::max(lo[d] - q[d], q[d] - hi[d]);
        if (v > m) m = v;
    }
    return m;
}

double KdTree::box_max_dist(int node, const double* q) const {
    double m = 0.0;
    const double* lo = &lo_[node * dim_];
    const double* hi = &hi_[node * dim_];
    for (std::size_t d = 0; d < dim_; ++d) {
        double v = std::max(q[d] - lo[d], hi[d] - q[d]);
        if (v > m) m = v;
    }
    return m;
}

void KdTree::knn(int node, const double* q, std::size_t self_pos, int k, double* best) const {
    const Node& nd = nodes_[node];
    if (nd.left < 0) {
        std::array<double, kMaxLeaf> dist;
        for (std::size_t start = nd.begin; start < nd.end; start += kMaxLeaf) {
            std::size_t count = std::min(kMaxLeaf, nd.end - start);
            kernels::chebyshev(col_ptrs_.data(), dim_, start, count, q, dist.data());
            for (std::size_t t = 0; t < count; ++t) {
                if (start + t == self_pos) continue;
                double v = dist[t];
                if (v < best[k - 1]) {
                    int pos = k - 1;
                    while (pos > 0 && best[pos - 1] > v) {
                        best[pos] = best[pos - 1];
                        --pos;
                    }
                    best[pos] = v;
                }
            }
        }
        return;
    }
    double dl = box_min_dist(nd.left, q);
    double dr = box_min_dist(nd.right, q);
    int first = nd.left, second = nd.right;
    if (dr < dl) {
        std::swap(first, second);
        std::swap(dl, dr);
    }
    if (dl <= best[k - 1]) knn(first, q, self_pos, k, best);
    if (dr <= best[k - 1]) knn(second, q, self_pos, k, best);
}

double KdTree::kth_neighbor_distance(std::size_t i, int k) const {
    std::size_t pos = position_[i];
    std::array<double, 16> qbuf;
    std::vector<double> qheap;
    double* q = qbuf.data();
    if (dim_ > qbuf.size()) {
        qheap.resize(dim_);
        q = qheap.data();
    }
    for (std::size_t d = 0; d < dim_; ++d) q[d] = cols_[d][pos];
    std::vector<double> best(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
    knn(0, q, pos, k, best.data());
    return best[static_cast<std::size_t>(k) - 1];
}

std::size_t KdTree::count(int node, const double* q, double r) const {
    if (box_min_dist(node, q) >= r) return 0;
    const Node& nd = nodes_[node];
    if (box_max_dist(node, q) < r) return nd.end - nd.begin;
    if (nd.left < 0) {
        std::array<double, kMaxLeaf> dist;
        std::size_t c = 0;
        for (std::size_t start = nd.begin; start < nd.end; start += kMaxLeaf) {
            std::size_t cnt = std::min(kMaxLeaf, nd.end - start);
            kernels::chebyshev(col_ptrs_.data(), dim_, start, cnt, q, dist.data());
            for (std::size_t t = 0; t < cnt; ++t) c += dist[t] < r ? 1 : 0;
        }
        return c;
    }
    return count(nd.left, q, r) + count(nd.right, q, r);
}

std::size_t KdTree::count_within(std::size_t i, double r) const {
    if (!(r > 0.0)) return 0;
    std::size_t pos = position_[i];
    std::vector<double> q(dim_);
    for (std::size_t d = 0; d < dim_; ++d) q[d] = cols_[d][pos];
    return count(0, q.data(), r) - 1;
}

}  // namespace edibench::detail
