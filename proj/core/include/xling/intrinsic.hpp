#ifndef XLING_INTRINSIC_HPP
#define XLING_INTRINSIC_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "xling/embedding.hpp"

namespace xling {

// Gold word translations; repeated source words accumulate acceptable
// targets.
struct TranslationTestSet {
  std::map<std::string, std::set<std::string>> gold;
  std::size_t pair_count = 0;
};

// MUSE-style space-separated pair file.
TranslationTestSet load_test_set(const std::string& path);

struct P1Report {
  double p_at_1 = 0.0;
  std::size_t hits = 0;
  std::size_t evaluated = 0;
  std::size_t skipped_oov = 0;
  bool all_oov_warning = false;
  // (source, retrieved target, hit) per evaluated word.
  std::vector<std::tuple<std::string, std::string, bool>> per_word;
};

struct Neighbor {
  std::string word;
  double cosine = 0.0;
};

// Exhaustive cosine argmax over the vocabulary minus `exclude`. Ties go
// to the lexicographically smaller word; zero queries and zero rows never
// win.
Neighbor nearest_neighbor(const Eigen::RowVectorXd& query,
                          const EmbeddingSpace& space,
                          const std::set<std::string>& exclude = {});

// P@1 of a projected source space against a target space and gold test
// set. Source words missing from the projected space, and gold sets with
// no in-vocabulary target, are skipped and counted.
P1Report precision_at_1(const EmbeddingSpace& projected_source,
                        const EmbeddingSpace& target,
                        const TranslationTestSet& test,
                        bool keep_per_word = false);

std::string summary_line(const P1Report& report);
void save_p1_report(const P1Report& report, const std::string& path);

}  // namespace xling

#endif
