#ifndef XLING_EMBEDDING_HPP
#define XLING_EMBEDDING_HPP

#include <Eigen/Dense>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "xling/common.hpp"

namespace xling {

// Word frequency counts. Iteration is deterministic: ranking ties break
// lexicographically on the word.
struct FrequencyTable {
  std::map<std::string, long long> entries;

  long long count(const std::string& word) const {
    auto it = entries.find(word);
    return it == entries.end() ? 0 : it->second;
  }

  // Words ordered by (count desc, word asc).
  std::vector<std::string> ranked() const;
};

FrequencyTable load_frequency_table(const std::string& path);
void save_frequency_table(const FrequencyTable& table, const std::string& path);

// A monolingual embedding space: vocabulary, one dense row per word, and
// optionally the corpus frequency of each word. Immutable after
// construction; safe for concurrent reads.
class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;
  EmbeddingSpace(std::string language_id, std::vector<std::string> vocabulary,
                 Eigen::MatrixXd vectors,
                 std::map<std::string, long long> frequencies = {});

  const std::string& language_id() const { return language_id_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }
  const std::map<std::string, long long>& frequencies() const {
    return frequencies_;
  }

  Eigen::Index size() const { return vectors_.rows(); }
  Eigen::Index dim() const { return vectors_.cols(); }

  bool contains(const std::string& word) const {
    return index_.count(word) > 0;
  }
  // Row index of a word, or -1.
  Eigen::Index row_of(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? -1 : it->second;
  }
  Eigen::MatrixXd::ConstRowXpr vector_of(const std::string& word) const;

  EmbeddingSpace with_vectors(Eigen::MatrixXd vectors) const;
  EmbeddingSpace with_language_id(std::string language_id) const;

 private:
  std::string language_id_;
  std::vector<std::string> vocabulary_;
  Eigen::MatrixXd vectors_;
  std::map<std::string, long long> frequencies_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

// Reads the word2vec text format: optional "vocab_size dim" header line,
// then "word v1 v2 ... vd" per line. Binary files are rejected.
EmbeddingSpace load_embeddings(const std::string& path,
                               bool expect_header = true,
                               const std::string& language_id = "");

// Writes the text format with a header; numbers round-trip exactly.
void save_embeddings(const EmbeddingSpace& space, const std::string& path);

struct NormalizeResult {
  EmbeddingSpace space;
  std::vector<std::string> zero_words;  // rows left untouched at norm 0
};

// Scales every row to unit Euclidean norm. All-zero rows are preserved
// and reported.
NormalizeResult unit_normalize(const EmbeddingSpace& space);

}  // namespace xling

#endif
