#include "xling/intrinsic.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace xling {

namespace {

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Plain ordered-summation dot product. Retrieval deliberately avoids
// vectorized reductions so results are reproducible against a naive
// reference loop.
double dot(const double* a, const double* b, Eigen::Index n) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TranslationTestSet load_test_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open test set: " + path);
  TranslationTestSet test;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string src, tgt, extra;
    if (!(ss >> src >> tgt) || (ss >> extra))
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected exactly two space-separated columns");
    if (test.gold[src].insert(tgt).second) ++test.pair_count;
  }
  if (test.gold.empty()) throw DataError(path + ": empty test set");
  return test;
}

namespace {

// Candidate store with rows contiguous and norms precomputed, shared
// across the queries of one evaluation run.
struct CandidateIndex {
  explicit CandidateIndex(const EmbeddingSpace& space)
      : space(space), rows(space.vectors()), norms(space.size()) {
    for (Eigen::Index i = 0; i < space.size(); ++i) {
      const double* row = rows.data() + i * space.dim();
      norms[i] = std::sqrt(dot(row, row, space.dim()));
    }
  }

  Neighbor query(const Eigen::RowVectorXd& q,
                 const std::set<std::string>& exclude) const {
    const Eigen::Index d = space.dim();
    double qn = std::sqrt(dot(q.data(), q.data(), d));
    bool found = false;
    Neighbor best;
    for (Eigen::Index i = 0; i < space.size(); ++i) {
      const std::string& word = space.vocabulary()[i];
      if (!exclude.empty() && exclude.count(word)) continue;
      const double* row = rows.data() + i * d;
      double cos;
      if (qn == 0.0 || norms[i] == 0.0)
        cos = -std::numeric_limits<double>::infinity();
      else
        cos = dot(q.data(), row, d) / (qn * norms[i]);
      if (!found || cos > best.cosine ||
          (cos == best.cosine && word < best.word)) {
        found = true;
        best.word = word;
        best.cosine = cos;
      }
    }
    if (!found)
      throw DataError("nearest neighbor over an empty candidate set");
    return best;
  }

  const EmbeddingSpace& space;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows;
  std::vector<double> norms;
};

}  // namespace

Neighbor nearest_neighbor(const Eigen::RowVectorXd& query,
                          const EmbeddingSpace& space,
                          const std::set<std::string>& exclude) {
  if (query.cols() != space.dim())
    throw DataError("query dimension does not match space dimension");
  return CandidateIndex(space).query(query, exclude);
}

P1Report precision_at_1(const EmbeddingSpace& projected_source,
                        const EmbeddingSpace& target,
                        const TranslationTestSet& test, bool keep_per_word) {
  if (projected_source.dim() != target.dim())
    throw DataError("projected source and target dimensions differ");
  P1Report report;
  CandidateIndex index(target);
  static const std::set<std::string> no_exclude;
  for (const auto& [src, gold_set] : test.gold) {
    Eigen::Index row = projected_source.row_of(src);
    bool any_gold_in_vocab = false;
    for (const std::string& g : gold_set)
      if (target.contains(g)) {
        any_gold_in_vocab = true;
        break;
      }
    if (row < 0 || !any_gold_in_vocab) {
      ++report.skipped_oov;
      continue;
    }
    Neighbor nn = index.query(projected_source.vectors().row(row), no_exclude);
    bool hit = gold_set.count(nn.word) > 0;
    ++report.evaluated;
    if (hit) ++report.hits;
    if (keep_per_word) report.per_word.emplace_back(src, nn.word, hit);
  }
  if (report.evaluated > 0)
    report.p_at_1 =
        static_cast<double>(report.hits) / static_cast<double>(report.evaluated);
  else
    report.all_oov_warning = true;
  return report;
}

std::string summary_line(const P1Report& report) {
  std::ostringstream ss;
  ss << "P@1 " << format_double(report.p_at_1) << " evaluated "
     << report.evaluated << " skipped " << report.skipped_oov;
  return ss.str();
}

void save_p1_report(const P1Report& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << "source\tretrieved\thit\n";
  for (const auto& [src, retrieved, hit] : report.per_word)
    out << src << '\t' << retrieved << '\t' << (hit ? 1 : 0) << '\n';
  out << "# " << summary_line(report) << '\n';
}

}  // namespace xling
