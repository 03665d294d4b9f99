#include "flowids/knn.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <string>
#include <utility>

namespace flowids {

namespace {

// Candidate neighbour, ordered by (distance, stored index).
using Entry = std::pair<double, Eigen::Index>;

// Max-heap of the k best candidates seen so far; the top is the current k-th.
class Neighbours {
public:
    explicit Neighbours(std::size_t k) : k_(k) { heap_.reserve(k); }

    bool full() const { return heap_.size() == k_; }
    const Entry& worst() const { return heap_.front(); }

    void offer(double dist, Eigen::Index idx) {
        if (!full()) {
            heap_.emplace_back(dist, idx);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (Entry{dist, idx} < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = {dist, idx};
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    const std::vector<Entry>& entries() const { return heap_; }

private:
    std::size_t k_;
    std::vector<Entry> heap_;
};

// Squared distance, abandoned early once it exceeds `bound`. The partial sums
// are accumulated in the same order as the full sum, so an abandoned
// candidate really is farther than `bound`.
inline double partial_distance(const double* row, const double* x, Eigen::Index d, double bound) {
    double dist = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        const double diff = row[j] - x[j];
        dist += diff * diff;
        if (dist > bound) return dist;
    }
    return dist;
}

}  // namespace

/// Exact k-d tree over the stored samples with per-node bounding boxes.
class KdTree {
public:
    explicit KdTree(const num::Matrix& samples) : d_(samples.cols()) {
        const Eigen::Index n = samples.rows();
        order_.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) order_[static_cast<std::size_t>(i)] = i;
        if (n > 0) build(samples, 0, n);
        points_.resize(static_cast<std::size_t>(n * d_));
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d_; ++j)
                points_[static_cast<std::size_t>(i * d_ + j)] = samples(order_[static_cast<std::size_t>(i)], j);
    }

    void search(const double* x, Neighbours& nb) const {
        if (!nodes_.empty()) visit(0, x, nb);
    }

private:
    struct Node {
        Eigen::Index begin, end;
        int left = -1, right = -1;
        Eigen::Index min_index;
        bool uniform;  // every point identical; order_ is ascending here
    };

    static constexpr Eigen::Index kLeafSize = 24;

    int build(const num::Matrix& samples, Eigen::Index begin, Eigen::Index end) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({begin, end, -1, -1, 0, false});
        box_.resize(box_.size() + static_cast<std::size_t>(2 * d_));
        double* lo = &box_[static_cast<std::size_t>(id) * static_cast<std::size_t>(2 * d_)];
        double* hi = lo + d_;
        Eigen::Index min_index = order_[static_cast<std::size_t>(begin)];
        for (Eigen::Index j = 0; j < d_; ++j) lo[j] = hi[j] = samples(min_index, j);
        for (Eigen::Index p = begin; p < end; ++p) {
            const Eigen::Index i = order_[static_cast<std::size_t>(p)];
            min_index = std::min(min_index, i);
            for (Eigen::Index j = 0; j < d_; ++j) {
                lo[j] = std::min(lo[j], samples(i, j));
                hi[j] = std::max(hi[j], samples(i, j));
            }
        }
        Eigen::Index axis = 0;
        double spread = -1.0;
        for (Eigen::Index j = 0; j < d_; ++j)
            if (hi[j] - lo[j] > spread) {
                spread = hi[j] - lo[j];
                axis = j;
            }
        nodes_[static_cast<std::size_t>(id)].min_index = min_index;

        auto first = order_.begin() + begin;
        auto last = order_.begin() + end;
        if (spread <= 0.0 || d_ == 0) {
            std::sort(first, last);
            nodes_[static_cast<std::size_t>(id)].uniform = true;
            return id;
        }
        if (end - begin <= kLeafSize) return id;

        const Eigen::Index mid = begin + (end - begin) / 2;
        std::nth_element(first, order_.begin() + mid, last, [&](Eigen::Index a, Eigen::Index b) {
            const double va = samples(a, axis), vb = samples(b, axis);
            return va < vb || (va == vb && a < b);
        });
        const int left = build(samples, begin, mid);
        const int right = build(samples, mid, end);
        nodes_[static_cast<std::size_t>(id)].left = left;
        nodes_[static_cast<std::size_t>(id)].right = right;
        return id;
    }

    double box_distance(int id, const double* x) const {
        const double* lo = &box_[static_cast<std::size_t>(id) * static_cast<std::size_t>(2 * d_)];
        const double* hi = lo + d_;
        double dist = 0.0;
        for (Eigen::Index j = 0; j < d_; ++j) {
            const double gap = x[j] < lo[j] ? lo[j] - x[j] : x[j] > hi[j] ? x[j] - hi[j] : 0.0;
            dist += gap * gap;
        }
        return dist;
    }

    // A node can hold an improvement only if its nearest possible point beats
    // the current k-th neighbour under the (distance, index) order.
    bool worth_visiting(int id, double lower_bound, const Neighbours& nb) const {
        if (!nb.full()) return true;
        const Entry& worst = nb.worst();
        return lower_bound < worst.first ||
               (lower_bound == worst.first && nodes_[static_cast<std::size_t>(id)].min_index < worst.second);
    }

    void visit(int id, const double* x, Neighbours& nb) const {
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        if (node.left < 0) {
            for (Eigen::Index p = node.begin; p < node.end; ++p) {
                const double bound = nb.full() ? nb.worst().first : std::numeric_limits<double>::infinity();
                const double dist = partial_distance(&points_[static_cast<std::size_t>(p * d_)], x, d_, bound);
                const Eigen::Index idx = order_[static_cast<std::size_t>(p)];
                if (nb.full() && !(Entry{dist, idx} < nb.worst())) {
                    // identical points in ascending index order: the rest lose too
                    if (node.uniform) return;
                    continue;
                }
                nb.offer(dist, idx);
            }
            return;
        }
        const double dl = box_distance(node.left, x);
        const double dr = box_distance(node.right, x);
        const int near = dl <= dr ? node.left : node.right;
        const int far = dl <= dr ? node.right : node.left;
        if (worth_visiting(near, std::min(dl, dr), nb)) visit(near, x, nb);
        if (worth_visiting(far, std::max(dl, dr), nb)) visit(far, x, nb);
    }

    Eigen::Index d_;
    std::vector<Node> nodes_;
    std::vector<double> box_;  // per node: lo[d], hi[d]
    std::vector<Eigen::Index> order_;
    std::vector<double> points_;  // samples permuted into leaf order
};

KnnModel knn_train(num::Matrix samples, std::vector<Vote> targets, int k) {
    if (k < 1 || k % 2 == 0)
        throw ConfigError("kNN: k must be a positive odd integer, got " + std::to_string(k));
    if (static_cast<std::size_t>(samples.rows()) != targets.size())
        throw std::invalid_argument("kNN: sample and target counts differ");
    if (static_cast<Eigen::Index>(k) > samples.rows())
        throw ConfigError("kNN: k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(samples.rows()) + " stored samples");
    auto index = std::make_shared<const KdTree>(samples);
    return KnnModel{std::move(samples), std::move(targets), k, std::move(index)};
}

KnnResult knn_classify(const KnnModel& model, std::span<const double> x) {
    const Eigen::Index d = model.dim();
    if (static_cast<Eigen::Index>(x.size()) != d)
        throw std::invalid_argument("kNN: query has dimension " + std::to_string(x.size()) +
                                    ", model expects " + std::to_string(d));

    Neighbours nb(static_cast<std::size_t>(model.k));
    if (model.index) {
        model.index->search(x.data(), nb);
    } else {
        const double* data = model.samples.data();
        for (Eigen::Index i = 0; i < model.samples.rows(); ++i) {
            const double bound = nb.full() ? nb.worst().first : std::numeric_limits<double>::infinity();
            const double dist = partial_distance(data + i * d, x.data(), d, bound);
            if (!nb.full() || dist < bound) nb.offer(dist, i);
        }
    }

    int balance = 0;
    for (const auto& [dist, idx] : nb.entries())
        balance += static_cast<int>(static_cast<std::int8_t>(model.targets[static_cast<std::size_t>(idx)]));
    return {balance > 0 ? Vote::positive : Vote::negative,
            static_cast<double>(balance) / static_cast<double>(model.k)};
}

std::vector<Vote> knn_predict(const KnnModel& model, const num::Matrix& x) {
    std::vector<Vote> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        out.push_back(knn_classify(model, std::span<const double>(x.row(i).data(),
                                                                  static_cast<std::size_t>(x.cols())))
                          .vote);
    return out;
}

}  // namespace flowids
