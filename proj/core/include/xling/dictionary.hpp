#ifndef XLING_DICTIONARY_HPP
#define XLING_DICTIONARY_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xling/embedding.hpp"

namespace xling {

enum class DictSource { domain, muse, idp, synthetic };
enum class SelectionKind { high_freq, lower_band, explicit_list };
enum class FreqBand { high, lower };
enum class PairFormat { space_separated, tsv };

std::string to_string(DictSource s);
DictSource dict_source_from_string(const std::string& s);
FreqBand freq_band_from_string(const std::string& s);

// An ordered bilingual seed lexicon. No duplicate pairs, no empty words,
// no internal whitespace.
struct SeedDictionary {
  std::vector<std::pair<std::string, std::string>> pairs;
  DictSource source_kind = DictSource::synthetic;
  SelectionKind selection = SelectionKind::explicit_list;
  std::size_t requested_size = 0;
  std::string provenance_notes;

  std::size_t size() const { return pairs.size(); }
  void check_invariants() const;
};

// Deterministic word translation source. Absent entries mean "no
// translation known".
class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  virtual std::map<std::string, std::string> translate_batch(
      const std::vector<std::string>& words) const = 0;
  virtual bool concurrent_safe() const { return false; }
};

// Reference provider backed by a TSV lexicon (source<TAB>target).
class FileLexiconProvider : public TranslationProvider {
 public:
  explicit FileLexiconProvider(const std::string& path);
  explicit FileLexiconProvider(std::map<std::string, std::string> lexicon)
      : lexicon_(std::move(lexicon)) {}

  std::map<std::string, std::string> translate_batch(
      const std::vector<std::string>& words) const override;
  bool concurrent_safe() const override { return true; }

 private:
  std::map<std::string, std::string> lexicon_;
};

// Picks seed words from a frequency ranking. band=high takes the top of
// the (stopword/length-filtered) ranking; band=lower takes words whose
// rank falls in the (5%, 10%] interval of the filtered ranking.
std::vector<std::string> select_seed_words(const FrequencyTable& freqs,
                                           FreqBand band, std::size_t size,
                                           const std::set<std::string>& stopwords,
                                           std::size_t min_length = 3);

// Selects with 1.5x oversampling, translates, drops misses, truncates to
// exactly `size` pairs in frequency order.
SeedDictionary build_domain_dictionary(const FrequencyTable& freqs,
                                       const TranslationProvider& provider,
                                       FreqBand band, std::size_t size,
                                       const std::set<std::string>& stopwords,
                                       std::size_t min_length = 3);

// Loads a two-column pair file (MUSE space-separated or IDP TSV).
// Exact duplicate pairs are dropped keeping the first occurrence.
SeedDictionary load_pair_dictionary(const std::string& path, PairFormat format,
                                    DictSource kind);

void save_pair_dictionary(const SeedDictionary& dict, const std::string& path,
                          PairFormat format);

struct ValidationResult {
  SeedDictionary dict;
  // (source word, reason) for each dropped pair.
  std::vector<std::pair<std::string, std::string>> drops;
};

// Keeps pairs whose target word reaches `threshold` occurrences in the
// target-language corpus. Absent target words count as 0.
ValidationResult validate_pairs(const SeedDictionary& dict,
                                const FrequencyTable& target_freqs,
                                long long threshold);

// Picks the candidate threshold maximizing the evaluator score of the
// validated dictionary; ties break toward the smallest threshold.
std::pair<long long, double> tune_validation_threshold(
    const SeedDictionary& dict, const FrequencyTable& target_freqs,
    const std::vector<long long>& candidates,
    const std::function<double(const SeedDictionary&)>& evaluator);

struct DictSplit {
  SeedDictionary train;
  SeedDictionary held_out;
  // Pairs relocated from held_out to train because their source word also
  // occurred on the train side.
  std::size_t moved = 0;
};

// Seeded disjoint split with no source-word leakage across the cut.
DictSplit split_dictionary(const SeedDictionary& dict, double train_fraction,
                           std::uint64_t seed);

std::set<std::string> load_stopwords(const std::string& path);

}  // namespace xling

#endif
