#include "xling/alignment.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace xling {

namespace {

// Fixes the SVD sign ambiguity: the largest-magnitude entry of each left
// singular vector is made positive, with the matching right vector
// flipped in tandem. Keeps fitted maps identical across runs.
void fix_svd_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  for (Eigen::Index j = 0; j < u.cols() && j < v.cols(); ++j) {
    Eigen::Index imax = 0;
    double amax = -1.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      double a = std::abs(u(i, j));
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    if (u(imax, j) < 0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }
}

// Inverse symmetric square root via eigendecomposition. Throws when the
// matrix is numerically non-positive-definite.
Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& m, const char* name) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw DataError(std::string("eigendecomposition of ") + name + " failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  double max_ev = ev.maxCoeff();
  double tol = 1e-12 * std::max(1.0, max_ev);
  if (ev.minCoeff() <= tol)
    throw DataError(std::string(name) +
                    " is numerically non-positive-definite; increase the "
                    "ridge parameter");
  Eigen::VectorXd inv_sqrt = ev.array().rsqrt();
  return es.eigenvectors() * inv_sqrt.asDiagonal() *
         es.eigenvectors().transpose();
}

void write_matrix(std::ostream& out, const std::string& name,
                  const Eigen::MatrixXd& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& expect_name,
                            const std::string& path) {
  std::string name;
  Eigen::Index rows, cols;
  if (!(in >> name >> rows >> cols) || name != expect_name)
    throw DataError(path + ": expected matrix block '" + expect_name + "'");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j)))
        throw DataError(path + ": truncated matrix '" + expect_name + "'");
  return m;
}

}  // namespace

std::string to_string(MapMethod m) {
  switch (m) {
    case MapMethod::cca: return "cca";
    case MapMethod::least_squares: return "least_squares";
    case MapMethod::procrustes: return "procrustes";
  }
  return "?";
}

MapMethod map_method_from_string(const std::string& s) {
  if (s == "cca") return MapMethod::cca;
  if (s == "least_squares" || s == "ls") return MapMethod::least_squares;
  if (s == "procrustes") return MapMethod::procrustes;
  throw UsageError("unknown map method: '" + s + "'");
}

Eigen::RowVectorXd ProjectionMap::apply(const Eigen::RowVectorXd& x) const {
  if (x.cols() != d_source())
    throw DataError("vector dimension " + std::to_string(x.cols()) +
                    " does not match map source dimension " +
                    std::to_string(d_source()));
  if (method == MapMethod::cca)
    return (x - source_mean.transpose()) * W + target_mean.transpose();
  return x * W;
}

PairedMatrix pair_matrices(const SeedDictionary& dict,
                           const EmbeddingSpace& source,
                           const EmbeddingSpace& target) {
  PairedMatrix pm;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> rows;
  for (const auto& [src, tgt] : dict.pairs) {
    Eigen::Index i = source.row_of(src);
    Eigen::Index j = target.row_of(tgt);
    if (i < 0 || j < 0) {
      ++pm.skipped;
      continue;
    }
    rows.emplace_back(i, j);
    pm.kept_pairs.emplace_back(src, tgt);
  }
  if (rows.empty())
    throw DataError("no in-vocabulary pairs between '" + source.language_id() +
                    "' and '" + target.language_id() + "'");
  pm.X.resize(rows.size(), source.dim());
  pm.Y.resize(rows.size(), target.dim());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    pm.X.row(r) = source.vectors().row(rows[r].first);
    pm.Y.row(r) = target.vectors().row(rows[r].second);
  }
  return pm;
}

ProjectionMap fit_least_squares(const PairedMatrix& pm, double ridge) {
  if (pm.X.rows() < 1) throw DataError("least squares needs at least one pair");
  if (ridge < 0) ridge = 0;
  Eigen::MatrixXd gram = pm.X.transpose() * pm.X;
  gram.diagonal().array() += ridge;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible())
    throw DataError("normal equations are singular; retry with a positive "
                    "ridge parameter");
  ProjectionMap map;
  map.method = MapMethod::least_squares;
  map.ridge = ridge;
  map.W = lu.solve(pm.X.transpose() * pm.Y);
  return map;
}

ProjectionMap fit_procrustes(const PairedMatrix& pm) {
  if (pm.X.cols() != pm.Y.cols())
    throw DataError("procrustes requires equal dimensions, got " +
                    std::to_string(pm.X.cols()) + " and " +
                    std::to_string(pm.Y.cols()));
  Eigen::Index d = pm.X.cols();
  if (pm.X.rows() < d)
    std::cerr << "warning: procrustes fit with " << pm.X.rows()
              << " pairs in dimension " << d << " is under-determined\n";
  Eigen::MatrixXd c = pm.X.transpose() * pm.Y;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  double smax = svd.singularValues()(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-12 * std::max(1.0, smax)) ++rank;
  if (rank < d)
    std::cerr << "warning: cross-covariance has rank " << rank << " < " << d
              << "; the procrustes solution is not unique\n";
  fix_svd_signs(u, v);
  ProjectionMap map;
  map.method = MapMethod::procrustes;
  map.orthogonal = true;
  map.W = u * v.transpose();
  return map;
}

ProjectionMap fit_cca(const PairedMatrix& pm, double keep_ratio, double ridge) {
  if (pm.X.rows() < 2) throw DataError("cca needs at least two pairs");
  if (!(keep_ratio > 0.0 && keep_ratio <= 1.0))
    throw UsageError("cca keep_ratio must lie in (0,1]");
  const double n = static_cast<double>(pm.X.rows());

  Eigen::RowVectorXd mean_x = pm.X.colwise().mean();
  Eigen::RowVectorXd mean_y = pm.Y.colwise().mean();
  Eigen::MatrixXd xc = pm.X.rowwise() - mean_x;
  Eigen::MatrixXd yc = pm.Y.rowwise() - mean_y;

  Eigen::MatrixXd cxx = xc.transpose() * xc / n;
  Eigen::MatrixXd cyy = yc.transpose() * yc / n;
  Eigen::MatrixXd cxy = xc.transpose() * yc / n;
  if (ridge < 0)
    ridge = 1e-5 * 0.5 *
            (cxx.diagonal().mean() + cyy.diagonal().mean());
  cxx.diagonal().array() += ridge;
  cyy.diagonal().array() += ridge;

  Eigen::MatrixXd isx = inverse_sqrt_spd(cxx, "Cxx");
  Eigen::MatrixXd isy = inverse_sqrt_spd(cyy, "Cyy");

  Eigen::MatrixXd m = isx * cxy * isy;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  fix_svd_signs(u, v);

  Eigen::Index dmin = std::min(pm.X.cols(), pm.Y.cols());
  Eigen::Index k = static_cast<Eigen::Index>(
      std::ceil(keep_ratio * static_cast<double>(dmin)));
  if (k < 1) k = 1;
  if (k > dmin) k = dmin;

  ProjectionMap map;
  map.method = MapMethod::cca;
  map.ridge = ridge;
  map.k = k;
  map.A = isx * u.leftCols(k);
  map.B = isy * v.leftCols(k);
  map.correlations = svd.singularValues().head(k);
  map.source_mean = mean_x.transpose();
  map.target_mean = mean_y.transpose();
  // Composed map into the target space: x -> (x - mean_x) A B+ + mean_y.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(map.B);
  map.W = map.A * cod.pseudoInverse();
  return map;
}

ProjectionMap fit_map(const PairedMatrix& pm, MapMethod method,
                      double keep_ratio, double ridge) {
  switch (method) {
    case MapMethod::cca:
      return fit_cca(pm, keep_ratio, ridge);
    case MapMethod::least_squares:
      return fit_least_squares(pm, ridge < 0 ? 0.0 : ridge);
    case MapMethod::procrustes:
      return fit_procrustes(pm);
  }
  throw UsageError("unknown map method");
}

EmbeddingSpace project_space(const EmbeddingSpace& source,
                             const ProjectionMap& map) {
  if (source.dim() != map.d_source())
    throw DataError("space dimension " + std::to_string(source.dim()) +
                    " does not match map source dimension " +
                    std::to_string(map.d_source()));
  Eigen::MatrixXd out;
  if (map.method == MapMethod::cca) {
    out = (source.vectors().rowwise() - map.source_mean.transpose()) * map.W;
    out.rowwise() += map.target_mean.transpose();
  } else {
    out = source.vectors() * map.W;
  }
  return source.with_vectors(std::move(out));
}

void save_projection_map(const ProjectionMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write projection map: " + path);
  out << "xling-projection-map v1\n";
  out << "method " << to_string(map.method) << '\n';
  out << "orthogonal " << (map.orthogonal ? 1 : 0) << '\n';
  out << "ridge " << format_double(map.ridge) << '\n';
  write_matrix(out, "W", map.W);
  if (map.method == MapMethod::cca) {
    write_matrix(out, "A", map.A);
    write_matrix(out, "B", map.B);
    write_matrix(out, "correlations", map.correlations);
    write_matrix(out, "source_mean", map.source_mean);
    write_matrix(out, "target_mean", map.target_mean);
  }
  if (!out) throw DataError("write failed: " + path);
}

ProjectionMap load_projection_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open projection map: " + path);
  std::string magic, version;
  if (!(in >> magic >> version) || magic != "xling-projection-map" ||
      version != "v1")
    throw DataError(path + ": not a projection map file");
  std::string key, value;
  ProjectionMap map;
  if (!(in >> key >> value) || key != "method")
    throw DataError(path + ": missing method line");
  map.method = map_method_from_string(value);
  int orth;
  if (!(in >> key >> orth) || key != "orthogonal")
    throw DataError(path + ": missing orthogonal line");
  map.orthogonal = orth != 0;
  if (!(in >> key >> map.ridge) || key != "ridge")
    throw DataError(path + ": missing ridge line");
  map.W = read_matrix(in, "W", path);
  if (map.method == MapMethod::cca) {
    map.A = read_matrix(in, "A", path);
    map.B = read_matrix(in, "B", path);
    map.correlations = read_matrix(in, "correlations", path);
    map.source_mean = read_matrix(in, "source_mean", path);
    map.target_mean = read_matrix(in, "target_mean", path);
    map.k = map.A.cols();
  }
  return map;
}

}  // namespace xling
