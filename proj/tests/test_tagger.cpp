#include <doctest.h>

#include <random>

#include "test_util.hpp"
#include "xling/tagger.hpp"

using namespace xling;

namespace {

EmbeddingSpace toy_space(const std::vector<std::string>& vocab,
                         Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd m(vocab.size(), d);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = gauss(rng);
  return EmbeddingSpace("xx", vocab, m);
}

// Exhaustive path enumeration; independent of the Viterbi recursion.
std::vector<std::string> brute_force_decode(const TaggerModel& model,
                                            const Eigen::MatrixXd& features) {
  const std::size_t L = model.label_set.size();
  const std::size_t n = features.rows();
  const std::size_t boundary = L;
  std::vector<std::size_t> path(n, 0), best_path;
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    double score = model.transition(boundary, path[0]);
    for (std::size_t t = 0; t < n; ++t) {
      for (Eigen::Index j = 0; j < features.cols(); ++j)
        score += model.emission(path[t], j) * features(t, j);
      if (t + 1 < n) score += model.transition(path[t], path[t + 1]);
    }
    score += model.transition(path[n - 1], boundary);
    if (score > best) {  // first (lexicographically smallest) path wins ties
      best = score;
      best_path = path;
    }
    std::size_t t = n;
    while (t > 0 && path[t - 1] == L - 1) path[--t] = 0;
    if (t == 0) break;
    ++path[t - 1];
  }
  std::vector<std::string> labels;
  for (std::size_t i : best_path) labels.push_back(model.label_set[i]);
  return labels;
}

TaggerModel random_model(const std::vector<std::string>& label_set,
                         Eigen::Index dim, int radius, std::uint64_t seed) {
  TaggerModel model;
  model.label_set = label_set;
  model.radius = radius;
  model.dim = dim;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  model.emission.resize(label_set.size(), model.feature_dim());
  model.transition.resize(label_set.size() + 1, label_set.size() + 1);
  for (Eigen::Index i = 0; i < model.emission.rows(); ++i)
    for (Eigen::Index j = 0; j < model.emission.cols(); ++j)
      model.emission(i, j) = gauss(rng);
  for (Eigen::Index i = 0; i < model.transition.rows(); ++i)
    for (Eigen::Index j = 0; j < model.transition.cols(); ++j)
      model.transition(i, j) = gauss(rng);
  return model;
}

TaggedCorpus single(const std::vector<std::string>& tokens,
                    const std::vector<std::string>& labels,
                    const std::string& lang = "xx") {
  TaggedCorpus c;
  c.sequences = {tokens};
  c.labels = {labels};
  c.language_id = lang;
  return c;
}

}  // namespace

TEST_CASE("load_conll parses sequences and rejects bad labels") {
  TempDir dir;
  write_file(dir.file("a.conll"),
             "Java\tB-JOB_TITLE\nEntwickler\tI-JOB_TITLE\n\nbei\tO\n\n");
  TaggedCorpus corpus = load_conll(dir.file("a.conll"), "de");
  REQUIRE(corpus.size() == 2);
  CHECK(corpus.sequences[0] ==
        std::vector<std::string>{"Java", "Entwickler"});
  CHECK(corpus.labels[0] ==
        std::vector<std::string>{"B-JOB_TITLE", "I-JOB_TITLE"});
  CHECK(corpus.labels[1] == std::vector<std::string>{"O"});
  CHECK(corpus.language_id == "de");

  write_file(dir.file("bad.conll"), "Java\tB-JOB_TITLE\nfoo\tX-THING\n");
  CHECK_THROWS_WITH_AS(load_conll(dir.file("bad.conll")),
                       doctest::Contains(":2"), DataError);
  write_file(dir.file("nolabel.conll"), "Java\n");
  CHECK_THROWS_AS(load_conll(dir.file("nolabel.conll")), DataError);
}

TEST_CASE("conll round-trip") {
  TempDir dir;
  TaggedCorpus corpus = single({"a", "b"}, {"O", "B-ORG_NAME"});
  corpus.sequences.push_back({"c"});
  corpus.labels.push_back({"O"});
  save_conll(corpus, dir.file("rt.conll"));
  TaggedCorpus back = load_conll(dir.file("rt.conll"), "xx");
  CHECK(back.sequences == corpus.sequences);
  CHECK(back.labels == corpus.labels);
}

TEST_CASE("is_valid_bio_label") {
  CHECK(is_valid_bio_label("O"));
  CHECK(is_valid_bio_label("B-JOB_TITLE"));
  CHECK(is_valid_bio_label("I-X"));
  CHECK_FALSE(is_valid_bio_label("B-"));
  CHECK_FALSE(is_valid_bio_label("S-JOB_TITLE"));
  CHECK_FALSE(is_valid_bio_label(""));
  CHECK_FALSE(is_valid_bio_label("o"));
}

TEST_CASE("extract_spans handles B/I patterns") {
  CHECK(extract_spans({"O", "B-JOB_TITLE", "I-JOB_TITLE", "O"}) ==
        std::vector<Span>{{"JOB_TITLE", 1, 2}});
  // adjacent entities of the same type split on B
  CHECK(extract_spans({"B-ORG_NAME", "B-ORG_NAME"}) ==
        std::vector<Span>{{"ORG_NAME", 0, 0}, {"ORG_NAME", 1, 1}});
  // orphan I starts a span; a type change ends one
  CHECK(extract_spans({"I-JOB_TITLE", "I-ORG_NAME", "I-ORG_NAME"}) ==
        std::vector<Span>{{"JOB_TITLE", 0, 0}, {"ORG_NAME", 1, 2}});
  CHECK(extract_spans({"O", "O"}).empty());
}

TEST_CASE("spans_to_bio inverts extract_spans") {
  std::vector<Span> spans = {{"JOB_TITLE", 1, 2}, {"ORG_NAME", 4, 4}};
  auto labels = spans_to_bio(spans, 6);
  CHECK(labels == std::vector<std::string>{"O", "B-JOB_TITLE", "I-JOB_TITLE",
                                           "O", "B-ORG_NAME", "O"});
  CHECK(extract_spans(labels) == spans);
}

TEST_CASE("random span sets round-trip through BIO") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 50; ++round) {
    std::size_t n = 1 + rng() % 20;
    std::vector<Span> spans;
    std::size_t pos = rng() % 3;
    while (pos < n) {
      std::size_t len = 1 + rng() % 3;
      std::size_t end = std::min(pos + len - 1, n - 1);
      spans.push_back({rng() % 2 ? "JOB_TITLE" : "ORG_NAME", pos, end});
      pos = end + 1 + rng() % 3 + 1;  // gap >= 1 keeps spans unambiguous
    }
    CHECK(extract_spans(spans_to_bio(spans, n)) == spans);
  }
}

TEST_CASE("featurize concatenates window embeddings with a bias") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 3, 4;
  EmbeddingSpace space("xx", {"a", "b"}, m);
  std::size_t oov = 99;
  Eigen::MatrixXd f = featurize({"a", "zz", "b"}, space, 1, &oov);
  CHECK(oov == 1);
  REQUIRE(f.rows() == 3);
  REQUIRE(f.cols() == 7);  // 3 * 2 + bias
  // position 0: left context out of bounds (zeros), center "a", right OOV
  Eigen::RowVectorXd expected(7);
  expected << 0, 0, 1, 2, 0, 0, 1;
  CHECK(f.row(0) == expected);
  expected << 1, 2, 0, 0, 3, 4, 1;
  CHECK(f.row(1) == expected);
  expected << 0, 0, 3, 4, 0, 0, 1;
  CHECK(f.row(2) == expected);
}

TEST_CASE("viterbi matches exhaustive path enumeration") {
  std::vector<std::string> labels = {"O", "B-JOB_TITLE", "I-JOB_TITLE"};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int round = 0; round < 30; ++round) {
    TaggerModel model = random_model(labels, 3, 1, 100 + round);
    std::size_t n = 1 + rng() % 4;
    Eigen::MatrixXd features(n, model.feature_dim());
    for (Eigen::Index i = 0; i < features.rows(); ++i)
      for (Eigen::Index j = 0; j < features.cols(); ++j)
        features(i, j) = gauss(rng);
    CHECK(viterbi_decode(model, features) ==
          brute_force_decode(model, features));
  }
}

TEST_CASE("zero weights decode to all O") {
  TaggerModel model;
  model.label_set = {"O", "B-ORG_NAME", "I-ORG_NAME"};
  model.radius = 1;
  model.dim = 2;
  model.emission = Eigen::MatrixXd::Zero(3, model.feature_dim());
  model.transition = Eigen::MatrixXd::Zero(4, 4);
  Eigen::MatrixXd features = Eigen::MatrixXd::Ones(5, model.feature_dim());
  CHECK(viterbi_decode(model, features) ==
        std::vector<std::string>(5, "O"));
}

TEST_CASE("training is deterministic and memorizes a small corpus") {
  std::vector<std::string> vocab = {"java", "entwickler", "bei", "siemens",
                                    "in", "muenchen"};
  EmbeddingSpace space = toy_space(vocab, 8, 3);
  TaggedCorpus corpus;
  corpus.language_id = "xx";
  corpus.sequences = {
      {"java", "entwickler", "bei", "siemens"},
      {"in", "muenchen", "bei", "siemens"},
      {"java", "entwickler", "in", "muenchen"},
  };
  corpus.labels = {
      {"B-JOB_TITLE", "I-JOB_TITLE", "O", "B-ORG_NAME"},
      {"O", "O", "O", "B-ORG_NAME"},
      {"B-JOB_TITLE", "I-JOB_TITLE", "O", "O"},
  };
  std::map<std::string, const EmbeddingSpace*> embeddings = {{"xx", &space}};
  TaggerModel a = train_tagger({corpus}, embeddings, 20, 5);
  TaggerModel b = train_tagger({corpus}, embeddings, 20, 5);
  CHECK(a.emission == b.emission);
  CHECK(a.transition == b.transition);
  // observed labels only; "O" first, the rest sorted
  CHECK(a.label_set ==
        std::vector<std::string>{"O", "B-JOB_TITLE", "B-ORG_NAME",
                                 "I-JOB_TITLE"});
  for (std::size_t i = 0; i < corpus.size(); ++i)
    CHECK(tag_sequence(a, corpus.sequences[i], space) == corpus.labels[i]);
  F1Report report = evaluate_f1(a, corpus, space);
  CHECK(report.average_f1 == 1.0);
}

TEST_CASE("score_spans on hand-worked examples") {
  std::vector<std::string> types = {"JOB_TITLE", "ORG_NAME"};

  SUBCASE("perfect prediction") {
    std::vector<std::vector<std::string>> gold = {
        {"B-JOB_TITLE", "I-JOB_TITLE", "O", "B-ORG_NAME"}};
    F1Report r = score_spans(gold, gold, types);
    CHECK(r.average_f1 == 1.0);
    CHECK(r.per_type.at("JOB_TITLE").f1 == 1.0);
  }

  SUBCASE("partial overlap is a miss under exact match") {
    std::vector<std::vector<std::string>> gold = {
        {"B-JOB_TITLE", "I-JOB_TITLE", "O"}};
    std::vector<std::vector<std::string>> pred = {
        {"B-JOB_TITLE", "O", "O"}};
    F1Report r = score_spans(gold, pred, types);
    CHECK(r.per_type.at("JOB_TITLE").correct == 0);
    CHECK(r.per_type.at("JOB_TITLE").f1 == 0.0);
  }

  SUBCASE("mixed counts give the derived macro average") {
    // JOB_TITLE: 3 predicted, 2 correct, 2 gold -> P=2/3, R=1, F1=0.8.
    // ORG_NAME: nothing predicted, 1 gold -> F1=0. Macro average 0.4.
    std::vector<std::vector<std::string>> gold = {
        {"B-JOB_TITLE", "O", "B-JOB_TITLE", "O", "B-ORG_NAME"}};
    std::vector<std::vector<std::string>> pred = {
        {"B-JOB_TITLE", "O", "B-JOB_TITLE", "B-JOB_TITLE", "O"}};
    F1Report r = score_spans(gold, pred, types);
    const TypeScore& job = r.per_type.at("JOB_TITLE");
    CHECK(job.predicted == 3);
    CHECK(job.gold == 2);
    CHECK(job.correct == 2);
    CHECK(job.precision == doctest::Approx(2.0 / 3.0));
    CHECK(job.recall == 1.0);
    CHECK(job.f1 == doctest::Approx(0.8));
    CHECK(r.per_type.at("ORG_NAME").f1 == 0.0);
    CHECK(r.average_f1 == doctest::Approx(0.4));
  }

  SUBCASE("empty gold and prediction score zero, not NaN") {
    std::vector<std::vector<std::string>> empty = {{"O", "O"}};
    F1Report r = score_spans(empty, empty, types);
    CHECK(r.average_f1 == 0.0);
    CHECK(r.per_type.at("JOB_TITLE").f1 == 0.0);
  }
}

TEST_CASE("swapping gold and prediction swaps precision and recall") {
  std::vector<std::string> types = {"JOB_TITLE", "ORG_NAME"};
  std::mt19937_64 rng(13);
  std::vector<std::string> pool = {"O",          "B-JOB_TITLE", "I-JOB_TITLE",
                                   "B-ORG_NAME", "I-ORG_NAME"};
  for (int round = 0; round < 20; ++round) {
    std::vector<std::vector<std::string>> a, b;
    for (int s = 0; s < 3; ++s) {
      std::size_t n = 2 + rng() % 8;
      std::vector<std::string> ga, gb;
      for (std::size_t t = 0; t < n; ++t) {
        ga.push_back(pool[rng() % pool.size()]);
        gb.push_back(pool[rng() % pool.size()]);
      }
      a.push_back(ga);
      b.push_back(gb);
    }
    F1Report ab = score_spans(a, b, types);
    F1Report ba = score_spans(b, a, types);
    for (const std::string& t : types) {
      CHECK(ab.per_type.at(t).precision == ba.per_type.at(t).recall);
      CHECK(ab.per_type.at(t).recall == ba.per_type.at(t).precision);
      CHECK(ab.per_type.at(t).f1 == doctest::Approx(ba.per_type.at(t).f1));
    }
  }
}

TEST_CASE("a model trained in one language decodes another space") {
  // Zero-shot contract: the decoder only needs a space of matching
  // dimension, not the training vocabulary.
  std::vector<std::string> en = {"developer", "at", "acme"};
  std::vector<std::string> de = {"entwickler", "bei", "acmeg"};
  EmbeddingSpace en_space = toy_space(en, 6, 21);
  // copy English vectors so the aligned-space assumption holds exactly
  EmbeddingSpace de_space("de", de, en_space.vectors());
  TaggedCorpus corpus = single({"developer", "at", "acme"},
                               {"B-JOB_TITLE", "O", "B-ORG_NAME"}, "en");
  std::map<std::string, const EmbeddingSpace*> embeddings = {{"en", &en_space}};
  TaggerModel model = train_tagger({corpus}, embeddings, 15, 2);
  CHECK(tag_sequence(model, de, de_space) ==
        std::vector<std::string>{"B-JOB_TITLE", "O", "B-ORG_NAME"});
}

TEST_CASE("model serialization round-trips bitwise") {
  TempDir dir;
  TaggerModel model =
      random_model({"O", "B-JOB_TITLE", "I-JOB_TITLE"}, 4, 1, 31);
  model.epochs = 10;
  model.seed = 31;
  save_tagger_model(model, dir.file("m.tagger"));
  TaggerModel back = load_tagger_model(dir.file("m.tagger"));
  CHECK(back.label_set == model.label_set);
  CHECK(back.emission == model.emission);
  CHECK(back.transition == model.transition);
  CHECK(back.radius == model.radius);
  CHECK(back.dim == model.dim);
  CHECK(back.epochs == model.epochs);
  CHECK(back.seed == model.seed);
}

TEST_CASE("summary line format") {
  F1Report report;
  report.average_f1 = 0.25;
  report.per_type["JOB_TITLE"].f1 = 0.5;
  report.per_type["ORG_NAME"].f1 = 0.0;
  CHECK(summary_line(report) ==
        "F1 0.25 JOB_TITLE 0.5 ORG_NAME 0");
}
