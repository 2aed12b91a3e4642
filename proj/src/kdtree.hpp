#pragma once

#include <cstddef>
#include <vector>

namespace edibench::detail {

// Static k-d tree under the max-norm. Points are stored column-wise in tree order.
class KdTree {
public:
    // columns[d][i] is coordinate d of point i.
    explicit KdTree(const std::vector<std::vector<double>>& columns, std::size_t leaf_size = 16);

    static constexpr std::size_t kMaxLeaf = 64;

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }

    // Distance to the k-th nearest neighbour of point i, excluding i itself.
    double kth_neighbor_distance(std::size_t i, int k) const;

    // Number of points j != i with max-norm distance to point i strictly below r.
    std::size_t count_within(std::size_t i, double r) const;

private:
    struct Node {
        std::size_t begin = 0, end = 0;
        int left = -1, right = -1;
    };

    int build(std::size_t begin, std::size_t end);
    void knn(int node, const double* q, std::size_t self_pos, int k, double* best) const;
    std::size_t count(int node, const double* q, double r) const;
    double box_min_dist(int node, const double* q) const;
    double box_max_dist(int node, const double* q) const;

    std::size_t n_ = 0, dim_ = 0, leaf_size_ = 16;
    std::vector<std::vector<double>> cols_;
    std::vector<const double*> col_ptrs_;
    std::vector<std::size_t> order_;     // tree position -> original index
    std::vector<std::size_t> position_;  // original index -> tree position
    std::vector<Node> nodes_;
    std::vector<double> lo_, hi_;  // per node bounding boxes, dim_ entries each
};

}  // namespace edibench::detail
