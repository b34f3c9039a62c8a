#include "lexann/projection.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "lexann/binio.hpp"
#include "lexann/errors.hpp"

namespace lexann {

namespace {

constexpr char kMagic[8] = {'L', 'E', 'X', 'A', 'N', 'N', 'P', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

struct FittedAxes {
  std::vector<double> mean;
  Matrix axes;  // count x dim
  std::vector<double> eigenvalues;  // full spectrum, descending
};

// Mean + top-`count` covariance eigenvectors of x.
FittedAxes fit_axes(const Points& x, std::size_t count) {
  FittedAxes f;
  f.mean = column_mean(x);
  SymmetricEigen eig = eigen_symmetric(covariance(x, f.mean));
  const std::size_t dim = f.mean.size();
  f.axes = Matrix(count, dim);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < dim; ++j) f.axes(i, j) = eig.vectors(i, j);
  }
  f.eigenvalues = std::move(eig.values);
  return f;
}

std::size_t numeric_rank(const std::vector<double>& eigenvalues) {
  if (eigenvalues.empty() || eigenvalues[0] <= 0.0) return 0;
  const double tol = eigenvalues[0] * 1e-9;
  std::size_t rank = 0;
  for (double v : eigenvalues) {
    if (v > tol) ++rank;
  }
  return rank;
}

std::vector<double> apply_ppa(const ProjectionModel::PpaStage& stage,
                              const std::vector<double>& x) {
  const std::size_t dim = stage.mean.size();
  std::vector<double> y(dim);
  for (std::size_t j = 0; j < dim; ++j) y[j] = x[j] - stage.mean[j];
  for (std::size_t i = 0; i < stage.removed_axes.rows(); ++i) {
    const double* u = stage.removed_axes.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < dim; ++j) dot += u[j] * y[j];
    for (std::size_t j = 0; j < dim; ++j) y[j] -= dot * u[j];
  }
  return y;
}

std::vector<double> apply_pca(const ProjectionModel::PcaStage& stage,
                              const std::vector<double>& x) {
  const std::size_t dim = stage.mean.size();
  std::vector<double> centered(dim);
  for (std::size_t j = 0; j < dim; ++j) centered[j] = x[j] - stage.mean[j];
  std::vector<double> out(stage.axes.rows());
  for (std::size_t i = 0; i < stage.axes.rows(); ++i) {
    const double* a = stage.axes.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < dim; ++j) dot += a[j] * centered[j];
    out[i] = dot;
  }
  return out;
}

ProjectionModel::PpaStage make_ppa_stage(const Points& x, std::size_t d_remove) {
  if (d_remove < 1) {
    throw std::invalid_argument("ppa removal depth must be >= 1");
  }
  if (x.size() <= d_remove) {
    throw std::invalid_argument("ppa needs more points than removed directions");
  }
  FittedAxes f = fit_axes(x, std::min(d_remove, x[0].size()));
  if (d_remove >= numeric_rank(f.eigenvalues)) {
    throw std::invalid_argument("ppa removal depth must be below the data rank");
  }
  return ProjectionModel::PpaStage{std::move(f.mean), std::move(f.axes)};
}

void write_vec(binio::Writer& w, const std::vector<double>& v) {
  for (double x : v) w.f64(x);
}

void write_mat(binio::Writer& w, const Matrix& m) {
  for (double x : m.data()) w.f64(x);
}

std::vector<double> read_vec(binio::Reader& r, std::size_t n, const char* what) {
  std::vector<double> v(n);
  for (auto& x : v) x = r.f64(what);
  return v;
}

Matrix read_mat(binio::Reader& r, std::size_t rows, std::size_t cols, const char* what) {
  Matrix m(rows, cols);
  for (auto& x : m.data()) x = r.f64(what);
  return m;
}

}  // namespace

ReductionPipeline parse_pipeline(std::string_view name) {
  if (name == "pca") return ReductionPipeline::pca;
  if (name == "ppa-pca-ppa") return ReductionPipeline::ppa_pca_ppa;
  throw std::invalid_argument("unknown reduction pipeline '" + std::string(name) +
                              "' (expected 'pca' or 'ppa-pca-ppa')");
}

const char* pipeline_name(ReductionPipeline p) {
  return p == ReductionPipeline::pca ? "pca" : "ppa-pca-ppa";
}

std::vector<double> ProjectionModel::transform(const std::vector<double>& x) const {
  if (x.size() != input_dim()) {
    throw std::invalid_argument("transform: vector dimension mismatch");
  }
  std::vector<double> y = pre ? apply_ppa(*pre, x) : x;
  y = apply_pca(pca, y);
  if (post) y = apply_ppa(*post, y);
  return y;
}

std::vector<double> ProjectionModel::transform(const std::vector<float>& x) const {
  return transform(std::vector<double>(x.begin(), x.end()));
}

ProjectionModel pca_fit(const Points& x, std::size_t p) {
  if (x.empty()) {
    throw std::invalid_argument("pca_fit: empty point set");
  }
  const std::size_t dim = x[0].size();
  if (p < 1 || p > dim) {
    throw std::invalid_argument("pca_fit: p must satisfy 1 <= p <= dim");
  }
  if (x.size() <= p || x.size() <= 1) {
    throw std::invalid_argument("pca_fit: needs more points than components");
  }
  FittedAxes f = fit_axes(x, p);
  ProjectionModel model;
  model.pipeline = ReductionPipeline::pca;
  model.pca.mean = std::move(f.mean);
  model.pca.axes = std::move(f.axes);
  model.pca.explained_variance.assign(f.eigenvalues.begin(), f.eigenvalues.begin() + p);
  return model;
}

Points ppa(const Points& x, std::size_t d_remove) {
  ProjectionModel::PpaStage stage = make_ppa_stage(x, d_remove);
  Points out;
  out.reserve(x.size());
  for (const auto& row : x) out.push_back(apply_ppa(stage, row));
  return out;
}

std::pair<ProjectionModel, Points> reduce(const std::vector<std::vector<float>>& corpus,
                                          ReductionPipeline pipeline, std::size_t p,
                                          std::size_t ppa_d) {
  if (p < 1 || p > 8) {
    throw std::invalid_argument("reduce: target dimension must be in [1, 8]");
  }
  const Points points = to_points(corpus);

  ProjectionModel model;
  if (pipeline == ReductionPipeline::pca) {
    model = pca_fit(points, p);
  } else {
    if (ppa_d < 1) {
      throw std::invalid_argument("ppa-pca-ppa requires a removal depth >= 1");
    }
    model.pipeline = ReductionPipeline::ppa_pca_ppa;
    model.ppa_d = static_cast<std::uint32_t>(ppa_d);

    model.pre = make_ppa_stage(points, ppa_d);
    Points stripped;
    stripped.reserve(points.size());
    for (const auto& row : points) stripped.push_back(apply_ppa(*model.pre, row));

    ProjectionModel pca_part = pca_fit(stripped, p);
    model.pca = std::move(pca_part.pca);

    // Second pass runs in the reduced space; only p - 1 directions remain.
    const std::size_t d2 = std::min<std::size_t>(ppa_d, p - 1);
    if (d2 >= 1) {
      Points projected;
      projected.reserve(stripped.size());
      for (const auto& row : stripped) projected.push_back(apply_pca(model.pca, row));
      model.post = make_ppa_stage(projected, d2);
    }
  }

  Points reduced;
  reduced.reserve(corpus.size());
  for (const auto& row : corpus) reduced.push_back(model.transform(row));
  return {std::move(model), std::move(reduced)};
}

void ProjectionModel::save(std::ostream& out) const {
  binio::Writer w(out);
  w.bytes(kMagic, sizeof(kMagic));
  nlohmann::json header = {
      {"version", kFormatVersion},
      {"pipeline", pipeline_name(pipeline)},
      {"ppa_d", ppa_d},
      {"input_dim", input_dim()},
      {"output_dim", output_dim()},
      {"has_pre", pre.has_value()},
      {"has_post", post.has_value()},
      {"pre_rows", pre ? pre->removed_axes.rows() : 0},
      {"post_rows", post ? post->removed_axes.rows() : 0},
  };
  w.str(header.dump());
  if (pre) {
    write_vec(w, pre->mean);
    write_mat(w, pre->removed_axes);
  }
  write_vec(w, pca.mean);
  write_mat(w, pca.axes);
  w.u32(static_cast<std::uint32_t>(pca.explained_variance.size()));
  write_vec(w, pca.explained_variance);
  if (post) {
    write_vec(w, post->mean);
    write_mat(w, post->removed_axes);
  }
}

ProjectionModel ProjectionModel::load(std::istream& in) {
  binio::Reader r(in);
  char magic[8];
  r.bytes(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("bad magic: not a lexann projection model", 0);
  }
  const std::size_t header_at = r.offset();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.str("header"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad JSON header: ") + e.what(), header_at);
  }
  if (header.value("version", 0u) != kFormatVersion) {
    throw ParseError("unsupported projection model version", header_at);
  }

  ProjectionModel m;
  m.pipeline = parse_pipeline(header.at("pipeline").get<std::string>());
  m.ppa_d = header.at("ppa_d").get<std::uint32_t>();
  const auto in_dim = header.at("input_dim").get<std::size_t>();
  const auto out_dim = header.at("output_dim").get<std::size_t>();

  if (header.at("has_pre").get<bool>()) {
    const auto rows = header.at("pre_rows").get<std::size_t>();
    ProjectionModel::PpaStage s;
    s.mean = read_vec(r, in_dim, "pre mean");
    s.removed_axes = read_mat(r, rows, in_dim, "pre axes");
    m.pre = std::move(s);
  }
  m.pca.mean = read_vec(r, in_dim, "pca mean");
  m.pca.axes = read_mat(r, out_dim, in_dim, "pca axes");
  const std::uint32_t ev = r.u32("explained variance count");
  m.pca.explained_variance = read_vec(r, ev, "explained variance");
  if (header.at("has_post").get<bool>()) {
    const auto rows = header.at("post_rows").get<std::size_t>();
    ProjectionModel::PpaStage s;
    s.mean = read_vec(r, out_dim, "post mean");
    s.removed_axes = read_mat(r, rows, out_dim, "post axes");
    m.post = std::move(s);
  }
  return m;
}

std::uint64_t ProjectionModel::size_bytes() const {
  binio::CountingBuf buf;
  std::ostream out(&buf);
  save(out);
  return buf.count();
}

}  // namespace lexann
