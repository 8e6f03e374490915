#ifndef XLING_EXPERIMENTS_HPP
#define XLING_EXPERIMENTS_HPP

#include <array>
#include <string>
#include <vector>

#include "xling/alignment.hpp"
#include "xling/config.hpp"
#include "xling/dictionary.hpp"
#include "xling/embedding.hpp"
#include "xling/intrinsic.hpp"
#include "xling/synthetic.hpp"
#include "xling/tagger.hpp"

namespace xling {

// Input files of an experiment run, loaded once and shared across cells.
struct ExperimentInputs {
  EmbeddingSpace source_space;
  EmbeddingSpace target_space;
  FrequencyTable source_freq;
  FrequencyTable target_freq;
  std::set<std::string> stopwords;
  std::string lexicon_path;
  std::string muse_path;
  std::string idp_path;
  TranslationTestSet test_set;
  TaggedCorpus target_corpus;
  TaggedCorpus source_corpus;
};

struct ExperimentSettings {
  std::vector<std::string> sources = {"idp", "muse", "domain"};
  std::vector<long long> sizes = {10000, 5000, 1000};
  std::vector<std::string> bands = {"high", "lower"};
  long long base_size = 5000;
  MapMethod method = MapMethod::cca;
  double keep_ratio = 1.0;
  double ridge = kAutoRidge;
  std::vector<long long> threshold_candidates;
  int epochs = 10;
  int radius = 1;
  std::size_t joint_docs = 200;
  std::array<double, 3> fractions = {0.70, 0.15, 0.15};
  std::uint64_t master_seed = 1;
  bool sequential = true;
  // Data scaling: fixed dictionary settings plus doc counts ("all"
  // allowed).
  std::string scaling_source = "domain";
  long long scaling_size = 5000;
  std::string scaling_band = "high";
  std::vector<std::string> doc_counts = {"0", "200", "500", "all"};
};

struct ExperimentReport {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_tsv() const;
  void save(const std::string& path) const;
};

ExperimentInputs load_experiment_inputs(Config& config);
ExperimentSettings load_experiment_settings(Config& config);

// One factor-grid run: dictionary construction, map fit, projection,
// P@1, zero-shot F1 and joint F1 per cell. Sequential mode follows the
// one-factor-at-a-time protocol; otherwise the full Cartesian grid runs.
ExperimentReport run_factor_grid(const ExperimentInputs& inputs,
                                 const ExperimentSettings& settings);

// Data-scaling run: monolingual vs cross-lingual F1 per low-resource doc
// count, with the gain column.
ExperimentReport run_data_scaling(const ExperimentInputs& inputs,
                                  const ExperimentSettings& settings);

struct CorpusSplit {
  TaggedCorpus train, dev, test;
};

// Seeded document-level split; sizes by floor with the remainder going
// to train.
CorpusSplit split_corpus(const TaggedCorpus& corpus,
                         const std::array<double, 3>& fractions,
                         std::uint64_t seed);

}  // namespace xling

#endif
