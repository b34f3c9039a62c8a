#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexann/linalg.hpp"

namespace lexann {

enum class ReductionPipeline {
  pca,          // mean-center, project onto top-p principal axes
  ppa_pca_ppa,  // remove top-D directions, PCA to p, remove again (D capped at p-1)
};

ReductionPipeline parse_pipeline(std::string_view name);  // throws on unknown name
const char* pipeline_name(ReductionPipeline p);

/// Fitted dimensionality-reduction state. transform() applies exactly the
/// stages that produced the reduced corpus, so corpus vectors map
/// bit-for-bit onto their reduced entries.
class ProjectionModel {
public:
  struct PpaStage {
    std::vector<double> mean;
    Matrix removed_axes;  // rows = directions projected out
  };
  struct PcaStage {
    std::vector<double> mean;
    Matrix axes;  // p x dim, rows orthonormal, variance-descending
    std::vector<double> explained_variance;
  };

  ReductionPipeline pipeline = ReductionPipeline::pca;
  std::uint32_t ppa_d = 0;
  std::optional<PpaStage> pre;   // ppa-pca-ppa only
  PcaStage pca;
  std::optional<PpaStage> post;  // ppa-pca-ppa only; absent when capped to 0

  std::size_t input_dim() const { return pca.axes.cols(); }
  std::size_t output_dim() const { return pca.axes.rows(); }

  std::vector<double> transform(const std::vector<double>& x) const;
  std::vector<double> transform(const std::vector<float>& x) const;

  void save(std::ostream& out) const;
  static ProjectionModel load(std::istream& in);
  std::uint64_t size_bytes() const;
};

/// Fits mean + top-p principal axes of the sample covariance.
/// Requires 1 <= p <= dim and |x| > p.
ProjectionModel pca_fit(const Points& x, std::size_t p);

/// Post-processing: mean-center, then remove the projections onto the top
/// d_remove principal directions. Requires d_remove >= 1, |x| > d_remove and
/// d_remove < rank(x).
Points ppa(const Points& x, std::size_t d_remove);

/// Fits the chosen pipeline and reduces the corpus to p (<= 8) dimensions.
/// reduced[i] == model.transform(corpus[i]) bit-for-bit.
std::pair<ProjectionModel, Points> reduce(const std::vector<std::vector<float>>& corpus,
                                          ReductionPipeline pipeline, std::size_t p,
                                          std::size_t ppa_d);

}  // namespace lexann
