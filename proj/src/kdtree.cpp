#include "lexann/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace lexann {

namespace {

struct HeapEntry {
  double dist_sq;
  DocId doc_id;
};

// Max-heap: top is the current worst of the k best, where "worse" means
// larger distance, then larger doc_id.
struct WorseFirst {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.dist_sq != b.dist_sq) return a.dist_sq < b.dist_sq;
    return a.doc_id < b.doc_id;
  }
};

using BoundedHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, WorseFirst>;

}  // namespace

std::int32_t KdTree::build_node(std::vector<std::uint32_t>& order,
                                const std::vector<std::vector<double>>& points,
                                std::uint32_t begin, std::uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;

  const std::uint32_t count = end - begin;
  if (count > kLeafSize) {
    // Widest spread picks the split axis; first axis wins ties.
    std::uint32_t axis = 0;
    double best_spread = -1.0;
    for (std::uint32_t a = 0; a < dim_; ++a) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::uint32_t i = begin; i < end; ++i) {
        const double v = points[order[i]][a];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double spread = hi - lo;
      if (spread > best_spread) {
        best_spread = spread;
        axis = a;
      }
    }

    const std::uint32_t mid = begin + count / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&points, axis](std::uint32_t a, std::uint32_t b) {
                       return points[a][axis] < points[b][axis];
                     });
    node.axis = axis;
    node.split = points[order[mid]][axis];
    const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    const std::int32_t left = build_node(order, points, begin, mid);
    const std::int32_t right = build_node(order, points, mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  return self;
}

KdTree KdTree::build(const std::vector<std::vector<double>>& points,
                     const std::vector<DocId>& ids) {
  if (points.size() != ids.size()) {
    throw std::invalid_argument("kdtree: points and ids differ in length");
  }
  KdTree tree;
  if (points.empty()) return tree;

  tree.dim_ = points[0].size();
  if (tree.dim_ < 1 || tree.dim_ > kMaxDim) {
    throw std::invalid_argument("kdtree: dimension must be in [1, 8]");
  }
  for (const auto& p : points) {
    if (p.size() != tree.dim_) {
      throw std::invalid_argument("kdtree: points differ in dimension");
    }
  }

  std::vector<std::uint32_t> order(points.size());
  std::iota(order.begin(), order.end(), 0u);
  tree.root_ = tree.build_node(order, points, 0, static_cast<std::uint32_t>(points.size()));

  tree.pts_.resize(points.size() * tree.dim_);
  tree.ids_.resize(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    tree.ids_[i] = ids[order[i]];
    const auto& src = points[order[i]];
    std::copy(src.begin(), src.end(), tree.pts_.begin() + i * tree.dim_);
  }
  return tree;
}

KdTree KdTree::build(const std::vector<std::vector<double>>& points) {
  std::vector<DocId> ids(points.size());
  std::iota(ids.begin(), ids.end(), 0u);
  return build(points, ids);
}

std::vector<KdTree::Neighbor> KdTree::knn(const std::vector<double>& query,
                                          std::size_t k) const {
  if (k < 1) {
    throw std::invalid_argument("knn: k must be >= 1");
  }
  if (size() == 0) return {};
  if (query.size() != dim_) {
    throw std::invalid_argument("knn: query dimension mismatch");
  }

  BoundedHeap heap;
  auto offer = [&heap, k](double dist_sq, DocId id) {
    if (heap.size() < k) {
      heap.push(HeapEntry{dist_sq, id});
      return;
    }
    const HeapEntry& worst = heap.top();
    if (dist_sq < worst.dist_sq ||
        (dist_sq == worst.dist_sq && id < worst.doc_id)) {
      heap.pop();
      heap.push(HeapEntry{dist_sq, id});
    }
  };

  // Recursive branch-and-bound; depth is log-bounded by the median splits.
  auto visit = [&](auto&& self, std::int32_t node_idx) -> void {
    const Node& node = nodes_[static_cast<std::size_t>(node_idx)];
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const double* p = pts_.data() + static_cast<std::size_t>(i) * dim_;
        double dist_sq = 0.0;
        for (std::size_t a = 0; a < dim_; ++a) {
          const double d = query[a] - p[a];
          dist_sq += d * d;
        }
        offer(dist_sq, ids_[i]);
      }
      return;
    }
    const double diff = query[node.axis] - node.split;
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    self(self, near);
    // The far side may still hold an equal-distance point with a smaller
    // doc_id, so prune only on strict excess.
    if (heap.size() < k || diff * diff <= heap.top().dist_sq) {
      self(self, far);
    }
  };
  visit(visit, root_);

  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    const HeapEntry& e = heap.top();
    out[i] = Neighbor{e.doc_id, std::sqrt(e.dist_sq)};
    heap.pop();
  }
  return out;
}

}  // namespace lexann
