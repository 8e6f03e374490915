#ifndef XLING_TAGGER_HPP
#define XLING_TAGGER_HPP

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "xling/embedding.hpp"

namespace xling {

// Parallel token/label sequences under the BIO scheme.
struct TaggedCorpus {
  std::vector<std::vector<std::string>> sequences;
  std::vector<std::vector<std::string>> labels;
  std::string language_id;

  std::size_t size() const { return sequences.size(); }
};

struct Span {
  std::string entity_type;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // inclusive

  bool operator==(const Span&) const = default;
};

// token<TAB>label per line, blank line between sequences.
TaggedCorpus load_conll(const std::string& path,
                        const std::string& language_id = "");
void save_conll(const TaggedCorpus& corpus, const std::string& path);

bool is_valid_bio_label(const std::string& label);

// Maximal spans under the conlleval convention: an orphan I-e starts a
// new span; B-e always starts one.
std::vector<Span> extract_spans(const std::vector<std::string>& labels);

// Inverse of extract_spans for non-overlapping sorted spans.
std::vector<std::string> spans_to_bio(const std::vector<Span>& spans,
                                      std::size_t length);

// Window-embedding features: concatenated embeddings at offsets
// -radius..+radius (zero for OOV / out of bounds) plus a constant bias.
Eigen::MatrixXd featurize(const std::vector<std::string>& tokens,
                          const EmbeddingSpace& embeddings, int radius,
                          std::size_t* oov_count = nullptr);

// Averaged structured perceptron over window-embedding features with a
// linear-chain transition structure.
struct TaggerModel {
  std::vector<std::string> label_set;  // "O" first, rest sorted
  Eigen::MatrixXd emission;            // |L| x ((2r+1) d + 1)
  // (|L|+1)^2; index |L| is the shared start/stop state.
  Eigen::MatrixXd transition;
  int radius = 1;
  Eigen::Index dim = 0;
  int epochs = 0;
  std::uint64_t seed = 0;
  bool averaged = true;

  Eigen::Index feature_dim() const {
    return (2 * static_cast<Eigen::Index>(radius) + 1) * dim + 1;
  }
  std::vector<std::string> entity_types() const;
};

TaggerModel train_tagger(
    const std::vector<TaggedCorpus>& train,
    const std::map<std::string, const EmbeddingSpace*>& embeddings,
    int epochs = 10, std::uint64_t seed = 1, int radius = 1);

// Exact max-score path; score ties prefer the lower label index ("O"
// first).
std::vector<std::string> viterbi_decode(const TaggerModel& model,
                                        const Eigen::MatrixXd& features);

std::vector<std::string> tag_sequence(const TaggerModel& model,
                                      const std::vector<std::string>& tokens,
                                      const EmbeddingSpace& embeddings);

struct TypeScore {
  std::size_t gold = 0, predicted = 0, correct = 0;
  double precision = 0, recall = 0, f1 = 0;
};

struct F1Report {
  std::map<std::string, TypeScore> per_type;
  double average_f1 = 0;  // macro over entity types
};

// Exact-match span F1, macro-averaged across entity types.
F1Report evaluate_f1(const TaggerModel& model, const TaggedCorpus& test,
                     const EmbeddingSpace& embeddings);

// Span F1 of given predictions against gold labels.
F1Report score_spans(const std::vector<std::vector<std::string>>& gold,
                     const std::vector<std::vector<std::string>>& predicted,
                     const std::vector<std::string>& entity_types);

std::string summary_line(const F1Report& report);
void save_f1_report(const F1Report& report, const std::string& path);

void save_tagger_model(const TaggerModel& model, const std::string& path);
TaggerModel load_tagger_model(const std::string& path);

}  // namespace xling

#endif
