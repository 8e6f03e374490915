#include <doctest.h>

#include <filesystem>
#include <set>

#include "test_util.hpp"
#include "xling/alignment.hpp"
#include "xling/intrinsic.hpp"
#include "xling/synthetic.hpp"

using namespace xling;

namespace {

SyntheticWorldConfig small_config() {
  SyntheticWorldConfig config;
  config.vocab_size = 300;
  config.dim = 16;
  config.seed = 9;
  config.dict_train = 80;
  config.dict_test = 40;
  return config;
}

}  // namespace

TEST_CASE("config validation rejects impossible worlds") {
  SyntheticWorldConfig config = small_config();
  config.dict_train = 200;
  config.dict_test = 150;  // 350 > vocab
  CHECK_THROWS_AS(config.validate(), UsageError);
  config = small_config();
  config.dim = 0;
  CHECK_THROWS_AS(config.validate(), UsageError);
  config = small_config();
  config.noise_sigma = -1;
  CHECK_THROWS_AS(config.validate(), UsageError);
  small_config().validate();
}

TEST_CASE("a noiseless world satisfies source = target * map exactly") {
  SyntheticWorldConfig config = small_config();
  SyntheticWorld world = generate_world(config);
  CHECK(world.source_space.size() == 300);
  CHECK(world.target_space.size() == 300);
  Eigen::MatrixXd reconstructed =
      world.target_space.vectors() * world.true_map;
  double err =
      (reconstructed - world.source_space.vectors()).cwiseAbs().maxCoeff();
  CHECK(err < 1e-12);
  // orthogonal map: M^T M = I
  Eigen::MatrixXd gram = world.true_map.transpose() * world.true_map;
  CHECK((gram - Eigen::MatrixXd::Identity(config.dim, config.dim))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  // target rows are unit length
  for (Eigen::Index i = 0; i < world.target_space.size(); ++i)
    CHECK(world.target_space.vectors().row(i).norm() ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noise moves the source space, general_linear skews the map") {
  SyntheticWorldConfig config = small_config();
  config.noise_sigma = 0.5;
  config.map_kind = MapKind::general_linear;
  SyntheticWorld world = generate_world(config);
  Eigen::MatrixXd clean = world.target_space.vectors() * world.true_map;
  CHECK((clean - world.source_space.vectors()).cwiseAbs().maxCoeff() > 1e-6);
  Eigen::MatrixXd gram = world.true_map.transpose() * world.true_map;
  CHECK((gram - Eigen::MatrixXd::Identity(config.dim, config.dim))
            .cwiseAbs()
            .maxCoeff() > 1e-6);
}

TEST_CASE("generation is deterministic in the seed") {
  SyntheticWorldConfig config = small_config();
  config.noise_sigma = 0.3;
  SyntheticWorld a = generate_world(config);
  SyntheticWorld b = generate_world(config);
  CHECK(a.target_space.vectors() == b.target_space.vectors());
  CHECK(a.source_space.vectors() == b.source_space.vectors());
  CHECK(a.true_map == b.true_map);
  CHECK(a.gold_train.pairs == b.gold_train.pairs);
  CHECK(a.gold_test.pairs == b.gold_test.pairs);

  config.seed = 10;
  SyntheticWorld c = generate_world(config);
  CHECK(a.target_space.vectors() != c.target_space.vectors());
}

TEST_CASE("word forms pair by rank and the frequencies follow Zipf") {
  SyntheticWorld world = generate_world(small_config());
  CHECK(world.target_word(0) == "e0001");
  CHECK(world.source_word(0) == "g0001");
  CHECK(world.gold_lexicon().at("g0017") == "e0017");
  CHECK(world.gold_lexicon().size() == 300);

  const auto& freqs = world.source_space.frequencies();
  long long c1 = freqs.at("g0001");
  long long c10 = freqs.at("g0010");
  long long c100 = freqs.at("g0100");
  CHECK(double(c1) / double(c10) == doctest::Approx(10.0).epsilon(0.01));
  CHECK(double(c1) / double(c100) == doctest::Approx(100.0).epsilon(0.01));
  CHECK(freqs.at("g0300") >= 1);
  // both languages share the count profile
  CHECK(world.target_space.frequencies().at("e0010") == c10);
}

TEST_CASE("gold dictionaries are disjoint bijections of the right size") {
  SyntheticWorld world = generate_world(small_config());
  CHECK(world.gold_train.pairs.size() == 80);
  CHECK(world.gold_test.pairs.size() == 40);
  std::set<std::string> sources, targets;
  for (const SeedDictionary* d : {&world.gold_train, &world.gold_test}) {
    d->check_invariants();
    for (const auto& [s, t] : d->pairs) {
      CHECK(sources.insert(s).second);
      CHECK(targets.insert(t).second);
      CHECK(world.gold_lexicon().at(s) == t);
    }
  }
}

TEST_CASE("entity strata partition the vocabulary as documented") {
  Strata strata = world_strata(1000);
  CHECK(strata.context_hi == 50);
  CHECK(strata.job_lo == 50);
  CHECK(strata.job_hi == 300);
  CHECK(strata.org_lo == 300);
  CHECK(strata.org_hi == 550);
}

TEST_CASE("tagged corpora are parallel gold translations") {
  SyntheticWorld world = generate_world(small_config());
  CorpusStats stats = generate_tagged_corpora(world, 40, 3);
  CHECK(stats.sequences == 40);
  CHECK(world.target_corpus.size() == 40);
  CHECK(world.source_corpus.size() == 40);
  CHECK(stats.spans_per_type.at("JOB_TITLE") > 0);
  CHECK(stats.spans_per_type.at("ORG_NAME") > 0);

  Strata strata = world_strata(world.config.vocab_size);
  auto lexicon = world.gold_lexicon();
  std::size_t total_spans = 0;
  for (std::size_t i = 0; i < 40; ++i) {
    const auto& tgt = world.target_corpus.sequences[i];
    const auto& src = world.source_corpus.sequences[i];
    REQUIRE(tgt.size() == src.size());
    CHECK(world.target_corpus.labels[i] == world.source_corpus.labels[i]);
    for (std::size_t t = 0; t < tgt.size(); ++t)
      CHECK(lexicon.at(src[t]) == tgt[t]);
    // every token stays inside the stratum its label dictates
    for (std::size_t t = 0; t < tgt.size(); ++t) {
      std::size_t rank = std::stoul(tgt[t].substr(1)) - 1;
      const std::string& label = world.target_corpus.labels[i][t];
      if (label == "O") {
        CHECK(rank < strata.context_hi);
      } else if (label.ends_with("JOB_TITLE")) {
        CHECK(rank >= strata.job_lo);
        CHECK(rank < strata.job_hi);
      } else {
        CHECK(rank >= strata.org_lo);
        CHECK(rank < strata.org_hi);
      }
      CHECK(is_valid_bio_label(label));
    }
    total_spans += extract_spans(world.target_corpus.labels[i]).size();
  }
  CHECK(total_spans ==
        stats.spans_per_type.at("JOB_TITLE") +
            stats.spans_per_type.at("ORG_NAME"));
  // around 3 entities per sequence on average
  CHECK(total_spans > 40 * 2);
  CHECK(total_spans < 40 * 5);
}

TEST_CASE("corpus generation is deterministic in its seed") {
  SyntheticWorld a = generate_world(small_config());
  SyntheticWorld b = generate_world(small_config());
  generate_tagged_corpora(a, 20, 7);
  generate_tagged_corpora(b, 20, 7);
  CHECK(a.target_corpus.sequences == b.target_corpus.sequences);
  CHECK(a.target_corpus.labels == b.target_corpus.labels);
  generate_tagged_corpora(b, 20, 8);
  CHECK(a.target_corpus.sequences != b.target_corpus.sequences);
}

TEST_CASE("a noiseless orthogonal world aligns perfectly end to end") {
  SyntheticWorldConfig config = small_config();
  config.vocab_size = 400;
  config.dict_train = 100;
  config.dict_test = 100;
  SyntheticWorld world = generate_world(config);
  PairedMatrix pm =
      pair_matrices(world.gold_train, world.source_space, world.target_space);
  ProjectionMap map = fit_procrustes(pm);
  CHECK((map.W - world.true_map.transpose()).cwiseAbs().maxCoeff() < 1e-8);
  EmbeddingSpace projected = project_space(world.source_space, map);
  TranslationTestSet test;
  for (const auto& [s, t] : world.gold_test.pairs)
    if (test.gold[s].insert(t).second) ++test.pair_count;
  CHECK(precision_at_1(projected, world.target_space, test).p_at_1 == 1.0);
}

TEST_CASE("export_world writes loadable files and a manifest") {
  TempDir dir;
  SyntheticWorld world = generate_world(small_config());
  generate_tagged_corpora(world, 10, 1);
  std::string out = (dir.path() / "world").string();
  export_world(world, out);

  namespace fs = std::filesystem;
  EmbeddingSpace target =
      load_embeddings(out + "/target_embeddings.vec", true, "en");
  EmbeddingSpace source =
      load_embeddings(out + "/source_embeddings.vec", true, "de");
  CHECK(target.vectors() == world.target_space.vectors());
  CHECK(source.vocabulary() == world.source_space.vocabulary());
  FrequencyTable freqs = load_frequency_table(out + "/source_freq.tsv");
  CHECK(freqs.entries == world.source_space.frequencies());
  SeedDictionary train = load_pair_dictionary(
      out + "/gold_train.dict", PairFormat::space_separated,
      DictSource::synthetic);
  CHECK(train.pairs == world.gold_train.pairs);
  CHECK(fs::exists(out + "/gold_test.dict"));
  CHECK(fs::exists(out + "/lexicon.tsv"));
  CHECK(fs::exists(out + "/muse.dict"));
  CHECK(fs::exists(out + "/idp.tsv"));
  CHECK(fs::exists(out + "/stopwords.txt"));
  CHECK(fs::exists(out + "/target_corpus.conll"));
  CHECK(fs::exists(out + "/source_corpus.conll"));
  CHECK(fs::exists(out + "/manifest.cfg"));
  TaggedCorpus corpus = load_conll(out + "/target_corpus.conll", "en");
  CHECK(corpus.labels == world.target_corpus.labels);
}
