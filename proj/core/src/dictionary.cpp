#include "xling/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace xling {

namespace {

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool has_whitespace(const std::string& w) {
  return w.find_first_of(" \t\r\n") != std::string::npos;
}

// Filtered ranking for seed selection: stopwords and short words removed.
std::vector<std::string> filtered_ranking(const FrequencyTable& freqs,
                                          const std::set<std::string>& stopwords,
                                          std::size_t min_length) {
  std::vector<std::string> out;
  for (const std::string& w : freqs.ranked()) {
    if (stopwords.count(w)) continue;
    if (utf8_length(w) < min_length) continue;
    out.push_back(w);
  }
  return out;
}

// Candidate pool for a band, before truncation to the requested size.
std::vector<std::string> band_candidates(const FrequencyTable& freqs,
                                         FreqBand band,
                                         const std::set<std::string>& stopwords,
                                         std::size_t min_length) {
  std::vector<std::string> ranking =
      filtered_ranking(freqs, stopwords, min_length);
  if (band == FreqBand::high) return ranking;
  // Ranks strictly above floor(0.05 V) and at most floor(0.10 V).
  std::size_t v = ranking.size();
  std::size_t lo = v * 5 / 100;
  std::size_t hi = v * 10 / 100;
  if (hi > v) hi = v;
  if (lo >= hi) return {};
  return std::vector<std::string>(ranking.begin() + lo, ranking.begin() + hi);
}

}  // namespace

std::string to_string(DictSource s) {
  switch (s) {
    case DictSource::domain: return "domain";
    case DictSource::muse: return "muse";
    case DictSource::idp: return "idp";
    case DictSource::synthetic: return "synthetic";
  }
  return "?";
}

DictSource dict_source_from_string(const std::string& s) {
  if (s == "domain") return DictSource::domain;
  if (s == "muse") return DictSource::muse;
  if (s == "idp") return DictSource::idp;
  if (s == "synthetic") return DictSource::synthetic;
  throw UsageError("unknown dictionary source: '" + s + "'");
}

FreqBand freq_band_from_string(const std::string& s) {
  if (s == "high") return FreqBand::high;
  if (s == "lower") return FreqBand::lower;
  throw UsageError("unknown frequency band: '" + s + "'");
}

void SeedDictionary::check_invariants() const {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [src, tgt] : pairs) {
    if (src.empty() || tgt.empty())
      throw DataError("dictionary contains an empty word");
    if (has_whitespace(src) || has_whitespace(tgt))
      throw DataError("dictionary word contains whitespace: '" + src + "' / '" +
                      tgt + "'");
    if (!seen.emplace(src, tgt).second)
      throw DataError("duplicate dictionary pair: " + src + " " + tgt);
  }
}

FileLexiconProvider::FileLexiconProvider(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected source<TAB>target");
    lexicon_.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
}

std::map<std::string, std::string> FileLexiconProvider::translate_batch(
    const std::vector<std::string>& words) const {
  std::map<std::string, std::string> out;
  for (const std::string& w : words) {
    auto it = lexicon_.find(w);
    if (it != lexicon_.end()) out.emplace(w, it->second);
  }
  return out;
}

std::vector<std::string> select_seed_words(const FrequencyTable& freqs,
                                           FreqBand band, std::size_t size,
                                           const std::set<std::string>& stopwords,
                                           std::size_t min_length) {
  if (size < 1) throw UsageError("seed selection size must be >= 1");
  std::vector<std::string> pool =
      band_candidates(freqs, band, stopwords, min_length);
  if (pool.size() < size)
    throw DataError("requested " + std::to_string(size) +
                    " seed words but only " + std::to_string(pool.size()) +
                    " candidates available in band");
  pool.resize(size);
  return pool;
}

SeedDictionary build_domain_dictionary(const FrequencyTable& freqs,
                                       const TranslationProvider& provider,
                                       FreqBand band, std::size_t size,
                                       const std::set<std::string>& stopwords,
                                       std::size_t min_length) {
  std::vector<std::string> pool =
      band_candidates(freqs, band, stopwords, min_length);
  // 1.5x oversampling absorbs provider misses; truncated back below.
  std::size_t want = static_cast<std::size_t>(std::ceil(1.5 * size));
  if (pool.size() < size)
    throw DataError("requested " + std::to_string(size) +
                    " seed words but only " + std::to_string(pool.size()) +
                    " candidates available in band");
  if (pool.size() > want) pool.resize(want);

  std::map<std::string, std::string> translations;
  try {
    translations = provider.translate_batch(pool);
  } catch (const std::exception& e) {
    std::string msg = "translation provider failed on batch of " +
                      std::to_string(pool.size()) + " words: " + e.what();
    throw DataError(msg);
  }

  SeedDictionary dict;
  dict.source_kind = DictSource::domain;
  dict.selection = band == FreqBand::high ? SelectionKind::high_freq
                                          : SelectionKind::lower_band;
  dict.requested_size = size;
  std::set<std::pair<std::string, std::string>> seen;
  for (const std::string& w : pool) {
    auto it = translations.find(w);
    if (it == translations.end()) continue;
    if (it->second.empty() || has_whitespace(it->second)) continue;
    if (!seen.emplace(w, it->second).second) continue;
    dict.pairs.emplace_back(w, it->second);
    if (dict.pairs.size() == size) break;
  }
  if (dict.pairs.size() < size)
    throw DataError("only " + std::to_string(dict.pairs.size()) +
                    " of the requested " + std::to_string(size) +
                    " pairs survived translation");
  dict.check_invariants();
  return dict;
}

SeedDictionary load_pair_dictionary(const std::string& path, PairFormat format,
                                    DictSource kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dictionary file: " + path);
  SeedDictionary dict;
  dict.source_kind = kind;
  dict.requested_size = 0;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    std::string src, tgt;
    if (format == PairFormat::tsv) {
      auto tab = line.find('\t');
      if (tab == std::string::npos ||
          line.find('\t', tab + 1) != std::string::npos)
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": expected exactly two tab-separated columns");
      src = line.substr(0, tab);
      tgt = line.substr(tab + 1);
    } else {
      std::istringstream ss(line);
      std::string extra;
      if (!(ss >> src >> tgt) || (ss >> extra))
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": expected exactly two space-separated columns");
    }
    if (src.empty() || tgt.empty() || has_whitespace(src) || has_whitespace(tgt))
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed pair");
    if (seen.emplace(src, tgt).second) dict.pairs.emplace_back(src, tgt);
  }
  if (dict.pairs.empty()) throw DataError(path + ": empty dictionary");
  dict.requested_size = dict.pairs.size();
  return dict;
}

void save_pair_dictionary(const SeedDictionary& dict, const std::string& path,
                          PairFormat format) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dictionary file: " + path);
  char sep = format == PairFormat::tsv ? '\t' : ' ';
  for (const auto& [src, tgt] : dict.pairs) out << src << sep << tgt << '\n';
}

ValidationResult validate_pairs(const SeedDictionary& dict,
                                const FrequencyTable& target_freqs,
                                long long threshold) {
  ValidationResult result;
  result.dict = dict;
  result.dict.pairs.clear();
  for (const auto& [src, tgt] : dict.pairs) {
    long long c = target_freqs.count(tgt);
    if (c >= threshold) {
      result.dict.pairs.emplace_back(src, tgt);
    } else {
      result.drops.emplace_back(
          src, "target '" + tgt + "' frequency " + std::to_string(c) +
                   " below threshold " + std::to_string(threshold));
    }
  }
  return result;
}

std::pair<long long, double> tune_validation_threshold(
    const SeedDictionary& dict, const FrequencyTable& target_freqs,
    const std::vector<long long>& candidates,
    const std::function<double(const SeedDictionary&)>& evaluator) {
  if (candidates.empty())
    throw UsageError("threshold candidate list must be non-empty");
  std::vector<long long> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  bool have = false;
  long long best_t = 0;
  double best_score = 0;
  for (long long t : sorted) {
    double score = evaluator(validate_pairs(dict, target_freqs, t).dict);
    if (!have || score > best_score) {
      have = true;
      best_t = t;
      best_score = score;
    }
  }
  return {best_t, best_score};
}

DictSplit split_dictionary(const SeedDictionary& dict, double train_fraction,
                           std::uint64_t seed) {
  if (dict.pairs.size() < 2)
    throw UsageError("need at least 2 pairs to split");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw UsageError("train fraction must lie in (0,1)");
  std::size_t n = dict.pairs.size();
  std::size_t n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n)
    throw UsageError("split fraction produces an empty side");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  DictSplit split;
  split.train = dict;
  split.train.pairs.clear();
  split.held_out = dict;
  split.held_out.pairs.clear();

  std::unordered_set<std::string> train_sources;
  for (std::size_t i = 0; i < n_train; ++i) {
    const auto& p = dict.pairs[order[i]];
    train_sources.insert(p.first);
    split.train.pairs.push_back(p);
  }
  for (std::size_t i = n_train; i < n; ++i) {
    const auto& p = dict.pairs[order[i]];
    if (train_sources.count(p.first)) {
      split.train.pairs.push_back(p);
      ++split.moved;
    } else {
      split.held_out.pairs.push_back(p);
    }
  }
  if (split.held_out.pairs.empty())
    throw DataError("all held-out pairs shared source words with the train "
                    "side; split is empty");
  return split;
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    chomp(line);
    if (!line.empty()) words.insert(line);
  }
  return words;
}

}  // namespace xling
