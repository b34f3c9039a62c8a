#pragma once

#include <cstdint>
#include <vector>

#include "lexann/inverted_index.hpp"  // DocId

namespace lexann {

/// Exact k-nearest-neighbor search over low-dimensional points.
///
/// Median split on the widest-spread axis, leaf size 16, branch-and-bound
/// with exact Euclidean distances. Results are identical to a brute-force
/// scan, including the tie rule (ascending doc_id on equal distance); in a
/// reduction pipeline all approximation comes from the reduction itself.
/// Dimensionality is capped at 8.
class KdTree {
public:
  static constexpr std::size_t kMaxDim = 8;
  static constexpr std::size_t kLeafSize = 16;

  struct Neighbor {
    DocId doc_id = 0;
    double distance = 0.0;
  };

  KdTree() = default;

  static KdTree build(const std::vector<std::vector<double>>& points,
                      const std::vector<DocId>& ids);

  /// Convenience: ids 0..n-1.
  static KdTree build(const std::vector<std::vector<double>>& points);

  /// The exact k nearest points, distance ascending, ties by ascending
  /// doc_id. k > size() returns everything; k < 1 throws.
  std::vector<Neighbor> knn(const std::vector<double>& query, std::size_t k) const;

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }

private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;     // leaf: scan [begin, end)
    std::int32_t left = -1;    // < 0 marks a leaf
    std::int32_t right = -1;
    std::uint32_t axis = 0;
    double split = 0.0;
  };

  std::int32_t build_node(std::vector<std::uint32_t>& order,
                          const std::vector<std::vector<double>>& points,
                          std::uint32_t begin, std::uint32_t end);

  std::size_t dim_ = 0;
  std::vector<double> pts_;   // n * dim, leaf-contiguous layout
  std::vector<DocId> ids_;    // aligned with pts_
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace lexann
