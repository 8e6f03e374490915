#ifndef XLING_SYNTHETIC_HPP
#define XLING_SYNTHETIC_HPP

#include <Eigen/Dense>
#include <string>

#include "xling/dictionary.hpp"
#include "xling/embedding.hpp"
#include "xling/tagger.hpp"

namespace xling {

enum class MapKind { orthogonal, general_linear };

MapKind map_kind_from_string(const std::string& s);
std::string to_string(MapKind k);

// Configuration of a bilingual world with known ground truth.
struct SyntheticWorldConfig {
  std::size_t vocab_size = 1000;
  Eigen::Index dim = 50;
  double noise_sigma = 0.0;
  // Per-word noise multiplier (rank / vocab)^power: 0 gives uniform noise,
  // positive values make rare words noisier (estimation-noise shape).
  double noise_rank_power = 0.0;
  MapKind map_kind = MapKind::orthogonal;
  double zipf_exponent = 1.0;
  std::uint64_t seed = 1;
  std::size_t dict_train = 200;
  std::size_t dict_test = 100;

  void validate() const;
};

// Paired pseudo-English ("e...") and pseudo-German ("g...") spaces with
// source_i = target_i * true_map + noise, plus gold train/test
// dictionaries (disjoint bijections) and optional parallel corpora.
struct SyntheticWorld {
  SyntheticWorldConfig config;
  EmbeddingSpace target_space;  // pivot, "en"
  EmbeddingSpace source_space;  // low-resource, "de"
  Eigen::MatrixXd true_map;
  SeedDictionary gold_train;
  SeedDictionary gold_test;
  TaggedCorpus target_corpus;
  TaggedCorpus source_corpus;

  std::string target_word(std::size_t rank) const;  // rank is 0-based
  std::string source_word(std::size_t rank) const;
  // Full gold bijection as a provider lexicon (source -> target).
  std::map<std::string, std::string> gold_lexicon() const;
};

SyntheticWorld generate_world(const SyntheticWorldConfig& config);

struct CorpusStats {
  std::size_t sequences = 0;
  std::map<std::string, std::size_t> spans_per_type;
};

// Templated parallel corpora: context tokens from the high-frequency
// stratum, JOB_TITLE spans of 1-3 tokens and ORG_NAME spans of 1-2
// tokens from designated vocabulary strata. The source corpus is the
// token-by-token gold translation of the target corpus.
CorpusStats generate_tagged_corpora(SyntheticWorld& world,
                                    std::size_t n_sequences,
                                    std::uint64_t seed,
                                    double avg_entities = 3.0);

// Entity stratum bounds, exposed for tests ([lo, hi) 0-based ranks).
struct Strata {
  std::size_t context_hi;  // context/header words: [0, context_hi)
  std::size_t job_lo, job_hi;
  std::size_t org_lo, org_hi;
};
Strata world_strata(std::size_t vocab_size);

// Writes the world through the standard file formats plus a manifest.
void export_world(const SyntheticWorld& world, const std::string& dir);

}  // namespace xling

#endif
