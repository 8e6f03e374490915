#include "xling/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace xling {

namespace {

std::string word_form(char prefix, std::size_t rank, std::size_t vocab_size) {
  std::size_t width = 4;
  for (std::size_t v = vocab_size; v >= 10000; v /= 10) ++width;
  std::string digits = std::to_string(rank + 1);
  std::string out(1, prefix);
  out.append(width > digits.size() ? width - digits.size() : 0, '0');
  out += digits;
  return out;
}

// Zipfian counts: count(rank r) = max(1, round(1e6 * r^-z)).
long long zipf_count(std::size_t rank0, double z) {
  double c = 1e6 * std::pow(static_cast<double>(rank0 + 1), -z);
  long long v = static_cast<long long>(std::llround(c));
  return v < 1 ? 1 : v;
}

}  // namespace

MapKind map_kind_from_string(const std::string& s) {
  if (s == "orthogonal") return MapKind::orthogonal;
  if (s == "general_linear") return MapKind::general_linear;
  throw UsageError("unknown map kind: '" + s + "'");
}

std::string to_string(MapKind k) {
  return k == MapKind::orthogonal ? "orthogonal" : "general_linear";
}

void SyntheticWorldConfig::validate() const {
  if (vocab_size < 1) throw UsageError("vocab_size must be >= 1");
  if (dim < 1) throw UsageError("dim must be >= 1");
  if (static_cast<std::size_t>(dim) > vocab_size)
    throw UsageError("dim must not exceed vocab_size");
  if (noise_sigma < 0) throw UsageError("noise_sigma must be >= 0");
  if (zipf_exponent <= 0) throw UsageError("zipf_exponent must be > 0");
  if (dict_train + dict_test > vocab_size)
    throw UsageError("dict_train + dict_test must not exceed vocab_size");
  if (dict_train < 1 || dict_test < 1)
    throw UsageError("dictionary sizes must be >= 1");
}

std::string SyntheticWorld::target_word(std::size_t rank) const {
  return word_form('e', rank, config.vocab_size);
}

std::string SyntheticWorld::source_word(std::size_t rank) const {
  return word_form('g', rank, config.vocab_size);
}

std::map<std::string, std::string> SyntheticWorld::gold_lexicon() const {
  std::map<std::string, std::string> lex;
  for (std::size_t i = 0; i < config.vocab_size; ++i)
    lex.emplace(source_word(i), target_word(i));
  return lex;
}

SyntheticWorld generate_world(const SyntheticWorldConfig& config) {
  config.validate();
  const std::size_t v = config.vocab_size;
  const Eigen::Index d = config.dim;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticWorld world;
  world.config = config;

  Eigen::MatrixXd target(v, d);
  for (std::size_t i = 0; i < v; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) target(i, j) = gauss(rng);
    target.row(i).normalize();
  }

  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = gauss(rng);
  if (config.map_kind == MapKind::orthogonal) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Positive R diagonal makes the factorization, hence the map, unique.
    for (Eigen::Index j = 0; j < d; ++j)
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    world.true_map = q;
  } else {
    // Diagonally dominant so the map is safely invertible.
    world.true_map = g / std::sqrt(static_cast<double>(d)) +
                     Eigen::MatrixXd::Identity(d, d);
  }

  Eigen::MatrixXd source = target * world.true_map;
  if (config.noise_sigma > 0) {
    double base = config.noise_sigma / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < v; ++i) {
      double scale = base;
      if (config.noise_rank_power > 0)
        scale *= std::pow(static_cast<double>(i + 1) / static_cast<double>(v),
                          config.noise_rank_power);
      for (Eigen::Index j = 0; j < d; ++j) source(i, j) += scale * gauss(rng);
    }
  }

  std::vector<std::string> target_vocab(v), source_vocab(v);
  std::map<std::string, long long> target_freq, source_freq;
  for (std::size_t i = 0; i < v; ++i) {
    target_vocab[i] = world.target_word(i);
    source_vocab[i] = world.source_word(i);
    long long c = zipf_count(i, config.zipf_exponent);
    target_freq[target_vocab[i]] = c;
    source_freq[source_vocab[i]] = c;
  }

  world.target_space = EmbeddingSpace("en", std::move(target_vocab),
                                      std::move(target), std::move(target_freq));
  world.source_space = EmbeddingSpace("de", std::move(source_vocab),
                                      std::move(source), std::move(source_freq));

  // Seeded shuffle of word indices; the first dict_train go to the train
  // dictionary, the next dict_test to the held-out one.
  std::vector<std::size_t> order(v);
  for (std::size_t i = 0; i < v; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  world.gold_train.source_kind = DictSource::synthetic;
  world.gold_train.requested_size = config.dict_train;
  world.gold_test.source_kind = DictSource::synthetic;
  world.gold_test.requested_size = config.dict_test;
  for (std::size_t i = 0; i < config.dict_train; ++i)
    world.gold_train.pairs.emplace_back(world.source_word(order[i]),
                                        world.target_word(order[i]));
  for (std::size_t i = 0; i < config.dict_test; ++i)
    world.gold_test.pairs.emplace_back(
        world.source_word(order[config.dict_train + i]),
        world.target_word(order[config.dict_train + i]));
  return world;
}

Strata world_strata(std::size_t vocab_size) {
  Strata s;
  s.context_hi = std::max<std::size_t>(2, vocab_size * 5 / 100);
  s.job_lo = s.context_hi;
  s.job_hi = std::max(s.job_lo + 2, vocab_size * 30 / 100);
  s.org_lo = s.job_hi;
  s.org_hi = std::max(s.org_lo + 2, vocab_size * 55 / 100);
  if (s.org_hi > vocab_size)
    throw DataError("vocabulary too small for corpus strata");
  return s;
}

CorpusStats generate_tagged_corpora(SyntheticWorld& world,
                                    std::size_t n_sequences,
                                    std::uint64_t seed, double avg_entities) {
  if (n_sequences < 1) throw UsageError("need at least one sequence");
  if (avg_entities < 1.0)
    throw UsageError("average entities per sequence must be >= 1");
  Strata strata = world_strata(world.config.vocab_size);
  std::mt19937_64 rng(seed);

  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi - 1)(rng);
  };

  TaggedCorpus target;
  target.language_id = "en";
  CorpusStats stats;
  // Geometric-ish entity count: 1 guaranteed, then continue with
  // probability p chosen so the mean is avg_entities.
  double p_more = 1.0 - 1.0 / avg_entities;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t s = 0; s < n_sequences; ++s) {
    std::vector<std::string> tokens, labels;
    auto emit_context = [&](std::size_t n) {
      for (std::size_t i = 0; i < n; ++i) {
        tokens.push_back(world.target_word(pick(0, strata.context_hi)));
        labels.push_back("O");
      }
    };
    emit_context(2 + pick(0, 3));
    std::size_t entities = 0;
    do {
      bool job = unit(rng) < 0.5;
      std::size_t len = job ? 1 + pick(0, 3) : 1 + pick(0, 2);
      const char* type = job ? "JOB_TITLE" : "ORG_NAME";
      std::size_t lo = job ? strata.job_lo : strata.org_lo;
      std::size_t hi = job ? strata.job_hi : strata.org_hi;
      for (std::size_t t = 0; t < len; ++t) {
        tokens.push_back(world.target_word(pick(lo, hi)));
        labels.push_back((t == 0 ? "B-" : "I-") + std::string(type));
      }
      ++stats.spans_per_type[type];
      ++entities;
      emit_context(1 + pick(0, 2));
    } while (unit(rng) < p_more);
    target.sequences.push_back(std::move(tokens));
    target.labels.push_back(std::move(labels));
  }
  stats.sequences = n_sequences;

  // The source corpus is the verbatim gold translation, labels included.
  TaggedCorpus source;
  source.language_id = "de";
  source.labels = target.labels;
  for (const auto& seq : target.sequences) {
    std::vector<std::string> translated;
    translated.reserve(seq.size());
    for (const std::string& w : seq) {
      std::string t = w;
      t[0] = 'g';
      translated.push_back(std::move(t));
    }
    source.sequences.push_back(std::move(translated));
  }
  world.target_corpus = std::move(target);
  world.source_corpus = std::move(source);
  return stats;
}

void export_world(const SyntheticWorld& world, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };

  save_embeddings(world.target_space, path("target_embeddings.vec"));
  save_embeddings(world.source_space, path("source_embeddings.vec"));

  FrequencyTable tf, sf;
  tf.entries = world.target_space.frequencies();
  sf.entries = world.source_space.frequencies();
  save_frequency_table(tf, path("target_freq.tsv"));
  save_frequency_table(sf, path("source_freq.tsv"));

  save_pair_dictionary(world.gold_train, path("gold_train.dict"),
                       PairFormat::space_separated);
  save_pair_dictionary(world.gold_test, path("gold_test.dict"),
                       PairFormat::space_separated);

  {
    std::ofstream lex(path("lexicon.tsv"));
    for (const auto& [src, tgt] : world.gold_lexicon())
      lex << src << '\t' << tgt << '\n';
  }

  // Generic-dictionary stand-ins: seeded random subsets of the bijection,
  // so muse/idp grid cells are runnable on synthetic worlds.
  auto subset_dict = [&](std::uint64_t salt, DictSource kind) {
    std::vector<std::size_t> idx(world.config.vocab_size);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::mt19937_64 rng(derive_seed(world.config.seed, "generic-" +
                                    std::to_string(salt)));
    std::shuffle(idx.begin(), idx.end(), rng);
    SeedDictionary d;
    d.source_kind = kind;
    std::size_t n = std::min(world.config.vocab_size,
                             std::max<std::size_t>(world.config.dict_train,
                                                   world.config.vocab_size / 2));
    for (std::size_t i = 0; i < n; ++i)
      d.pairs.emplace_back(world.source_word(idx[i]), world.target_word(idx[i]));
    d.requested_size = d.pairs.size();
    return d;
  };
  save_pair_dictionary(subset_dict(1, DictSource::muse), path("muse.dict"),
                       PairFormat::space_separated);
  save_pair_dictionary(subset_dict(2, DictSource::idp), path("idp.tsv"),
                       PairFormat::tsv);

  if (!world.target_corpus.sequences.empty()) {
    save_conll(world.target_corpus, path("target_corpus.conll"));
    save_conll(world.source_corpus, path("source_corpus.conll"));
  }
  { std::ofstream stop(path("stopwords.txt")); }

  std::ofstream manifest(path("manifest.cfg"));
  manifest << "world.vocab_size = " << world.config.vocab_size << '\n';
  manifest << "world.dim = " << world.config.dim << '\n';
  manifest << "world.noise_sigma = " << format_double(world.config.noise_sigma)
           << '\n';
  manifest << "world.noise_rank_power = "
           << format_double(world.config.noise_rank_power) << '\n';
  manifest << "world.map_kind = " << to_string(world.config.map_kind) << '\n';
  manifest << "world.zipf_exponent = "
           << format_double(world.config.zipf_exponent) << '\n';
  manifest << "world.seed = " << world.config.seed << '\n';
  manifest << "world.dict_train = " << world.config.dict_train << '\n';
  manifest << "world.dict_test = " << world.config.dict_test << '\n';
  manifest << "paths.source_embeddings = " << path("source_embeddings.vec")
           << '\n';
  manifest << "paths.target_embeddings = " << path("target_embeddings.vec")
           << '\n';
  manifest << "paths.source_freq = " << path("source_freq.tsv") << '\n';
  manifest << "paths.target_freq = " << path("target_freq.tsv") << '\n';
  manifest << "paths.lexicon = " << path("lexicon.tsv") << '\n';
  manifest << "paths.muse_dict = " << path("muse.dict") << '\n';
  manifest << "paths.idp_dict = " << path("idp.tsv") << '\n';
  manifest << "paths.test_set = " << path("gold_test.dict") << '\n';
  manifest << "paths.stopwords = " << path("stopwords.txt") << '\n';
  if (!world.target_corpus.sequences.empty()) {
    manifest << "paths.target_corpus = " << path("target_corpus.conll") << '\n';
    manifest << "paths.source_corpus = " << path("source_corpus.conll") << '\n';
  }
}

}  // namespace xling
