#ifndef XLING_ALIGNMENT_HPP
#define XLING_ALIGNMENT_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "xling/dictionary.hpp"
#include "xling/embedding.hpp"

namespace xling {

// Seed vectors realized from a dictionary: row i of X and Y come from the
// same pair. Out-of-vocabulary pairs are skipped and counted.
struct PairedMatrix {
  Eigen::MatrixXd X;  // n x d_source
  Eigen::MatrixXd Y;  // n x d_target
  std::vector<std::pair<std::string, std::string>> kept_pairs;
  std::size_t skipped = 0;
};

enum class MapMethod { cca, least_squares, procrustes };

std::string to_string(MapMethod m);
MapMethod map_method_from_string(const std::string& s);

// A fitted linear map between embedding spaces. For CCA the map is
// affine: x maps to (x - source_mean) * W + target_mean; the canonical
// projections A, B and the correlations are kept alongside the composed W.
struct ProjectionMap {
  MapMethod method = MapMethod::least_squares;
  Eigen::MatrixXd W;  // d_source x d_target
  bool orthogonal = false;
  double ridge = 0.0;

  // CCA only.
  Eigen::MatrixXd A;  // d_source x k
  Eigen::MatrixXd B;  // d_target x k
  Eigen::VectorXd correlations;
  Eigen::VectorXd source_mean;
  Eigen::VectorXd target_mean;
  Eigen::Index k = 0;

  Eigen::Index d_source() const { return W.rows(); }
  Eigen::Index d_target() const { return W.cols(); }

  // Applies the full (affine for CCA) rule to one source-space vector.
  Eigen::RowVectorXd apply(const Eigen::RowVectorXd& x) const;
};

// Pass for `ridge` to get the scale-aware default
// 1e-5 * mean covariance diagonal.
inline constexpr double kAutoRidge = -1.0;

PairedMatrix pair_matrices(const SeedDictionary& dict,
                           const EmbeddingSpace& source,
                           const EmbeddingSpace& target);

// W = argmin |XW - Y|_F^2 + ridge |W|_F^2 via the normal equations.
ProjectionMap fit_least_squares(const PairedMatrix& pm, double ridge = 0.0);

// Orthogonal map W = U V^T from the SVD of X^T Y. Requires equal
// dimensions.
ProjectionMap fit_procrustes(const PairedMatrix& pm);

// Regularized CCA with the composed source-to-target map W = A B+.
ProjectionMap fit_cca(const PairedMatrix& pm, double keep_ratio = 1.0,
                      double ridge = kAutoRidge);

ProjectionMap fit_map(const PairedMatrix& pm, MapMethod method,
                      double keep_ratio = 1.0, double ridge = kAutoRidge);

// Transforms every vector of a space; vocabulary and frequencies carry
// over unchanged.
EmbeddingSpace project_space(const EmbeddingSpace& source,
                             const ProjectionMap& map);

// Self-describing text serialization; load reproduces projections within
// 1e-12 (numbers are printed with round-trip precision).
void save_projection_map(const ProjectionMap& map, const std::string& path);
ProjectionMap load_projection_map(const std::string& path);

}  // namespace xling

#endif
