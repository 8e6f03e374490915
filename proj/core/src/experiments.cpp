#include "xling/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace xling {

namespace {

std::string fmt_f1(double v) { return format_double(v); }

TaggedCorpus subset_corpus(const TaggedCorpus& corpus,
                           const std::vector<std::size_t>& order,
                           std::size_t n) {
  TaggedCorpus out;
  out.language_id = corpus.language_id;
  for (std::size_t i = 0; i < n; ++i) {
    out.sequences.push_back(corpus.sequences[order[i]]);
    out.labels.push_back(corpus.labels[order[i]]);
  }
  return out;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

struct CellResult {
  std::size_t pairs = 0;
  P1Report p1;
  double zero_shot_f1 = 0;
  double joint_f1 = 0;
  long long threshold = 0;
};

// Builds the seed dictionary for one cell according to the source factor.
SeedDictionary build_cell_dictionary(const ExperimentInputs& inputs,
                                     const std::string& source,
                                     long long size, const std::string& band) {
  if (source == "domain") {
    FileLexiconProvider provider(inputs.lexicon_path);
    return build_domain_dictionary(inputs.source_freq, provider,
                                   freq_band_from_string(band),
                                   static_cast<std::size_t>(size),
                                   inputs.stopwords);
  }
  const std::string& path = source == "muse" ? inputs.muse_path
                                             : inputs.idp_path;
  PairFormat format =
      source == "muse" ? PairFormat::space_separated : PairFormat::tsv;
  if (path.empty())
    throw DataError("no dictionary file configured for source '" + source +
                    "'");
  SeedDictionary dict =
      load_pair_dictionary(path, format, dict_source_from_string(source));
  if (dict.pairs.size() > static_cast<std::size_t>(size))
    dict.pairs.resize(size);
  dict.requested_size = size;
  return dict;
}

}  // namespace

std::string ExperimentReport::to_tsv() const {
  std::ostringstream ss;
  for (std::size_t i = 0; i < header.size(); ++i)
    ss << (i ? "\t" : "") << header[i];
  ss << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      ss << (i ? "\t" : "") << row[i];
    ss << '\n';
  }
  return ss.str();
}

void ExperimentReport::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << to_tsv();
}

ExperimentInputs load_experiment_inputs(Config& config) {
  ExperimentInputs inputs;
  inputs.source_space = load_embeddings(
      config.require_string("paths.source_embeddings"), true, "de");
  inputs.target_space = load_embeddings(
      config.require_string("paths.target_embeddings"), true, "en");
  inputs.source_freq =
      load_frequency_table(config.require_string("paths.source_freq"));
  inputs.target_freq =
      load_frequency_table(config.require_string("paths.target_freq"));
  std::string stop = config.get_string("paths.stopwords", "");
  if (!stop.empty()) inputs.stopwords = load_stopwords(stop);
  inputs.lexicon_path = config.get_string("paths.lexicon", "");
  inputs.muse_path = config.get_string("paths.muse_dict", "");
  inputs.idp_path = config.get_string("paths.idp_dict", "");
  inputs.test_set = load_test_set(config.require_string("paths.test_set"));
  inputs.target_corpus =
      load_conll(config.require_string("paths.target_corpus"), "en");
  inputs.source_corpus =
      load_conll(config.require_string("paths.source_corpus"), "de");
  return inputs;
}

ExperimentSettings load_experiment_settings(Config& config) {
  ExperimentSettings s;
  s.sources = config.get_string_list("grid.sources", s.sources);
  s.sizes = config.get_int_list("grid.sizes", s.sizes);
  s.bands = config.get_string_list("grid.bands", s.bands);
  s.base_size = config.get_int("grid.base_size", s.base_size);
  s.method =
      map_method_from_string(config.get_string("map.method", "cca"));
  s.keep_ratio = config.get_double("map.keep_ratio", s.keep_ratio);
  s.ridge = config.get_double("map.ridge", s.ridge);
  s.threshold_candidates =
      config.get_int_list("dict.threshold_candidates", {});
  s.epochs = static_cast<int>(config.get_int("tagger.epochs", s.epochs));
  s.radius = static_cast<int>(config.get_int("tagger.radius", s.radius));
  s.joint_docs = static_cast<std::size_t>(
      config.get_int("grid.joint_docs", static_cast<long long>(s.joint_docs)));
  s.fractions[0] = config.get_double("split.train", s.fractions[0]);
  s.fractions[1] = config.get_double("split.dev", s.fractions[1]);
  s.fractions[2] = config.get_double("split.test", s.fractions[2]);
  s.master_seed =
      static_cast<std::uint64_t>(config.get_int("seed", 1));
  s.sequential = config.get_bool("grid.sequential", s.sequential);
  s.scaling_source = config.get_string("scaling.source", s.scaling_source);
  s.scaling_size = config.get_int("scaling.size", s.scaling_size);
  s.scaling_band = config.get_string("scaling.band", s.scaling_band);
  s.doc_counts = config.get_string_list("scaling.doc_counts", s.doc_counts);
  return s;
}

CorpusSplit split_corpus(const TaggedCorpus& corpus,
                         const std::array<double, 3>& fractions,
                         std::uint64_t seed) {
  double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw UsageError("split fractions must sum to 1");
  std::size_t n = corpus.size();
  std::size_t n_dev = static_cast<std::size_t>(std::floor(fractions[1] * n));
  std::size_t n_test = static_cast<std::size_t>(std::floor(fractions[2] * n));
  std::size_t n_train = n - n_dev - n_test;  // floor + remainder
  std::vector<std::size_t> order = shuffled_indices(n, seed);
  CorpusSplit split;
  split.train = subset_corpus(corpus, order, n_train);
  TaggedCorpus rest;
  rest.language_id = corpus.language_id;
  split.dev.language_id = corpus.language_id;
  split.test.language_id = corpus.language_id;
  for (std::size_t i = n_train; i < n_train + n_dev; ++i) {
    split.dev.sequences.push_back(corpus.sequences[order[i]]);
    split.dev.labels.push_back(corpus.labels[order[i]]);
  }
  for (std::size_t i = n_train + n_dev; i < n; ++i) {
    split.test.sequences.push_back(corpus.sequences[order[i]]);
    split.test.labels.push_back(corpus.labels[order[i]]);
  }
  return split;
}

namespace {

// Everything downstream of a built dictionary: tune, fit, project,
// score. Shared by the grid and scaling runs.
CellResult evaluate_dictionary(const ExperimentInputs& inputs,
                               const ExperimentSettings& settings,
                               SeedDictionary dict, std::uint64_t cell_seed,
                               const CorpusSplit& target_split,
                               const CorpusSplit& source_split,
                               const TaggedCorpus& joint_subset) {
  CellResult result;

  // Validation-threshold tuning on a held-out slice of the dictionary.
  bool tune = settings.threshold_candidates.size() > 1 ||
              (settings.threshold_candidates.size() == 1 &&
               settings.threshold_candidates[0] != 0);
  if (tune) {
    DictSplit tune_split = split_dictionary(dict, 0.9, cell_seed);
    TranslationTestSet held;
    for (const auto& [src, tgt] : tune_split.held_out.pairs)
      if (held.gold[src].insert(tgt).second) ++held.pair_count;
    auto evaluator = [&](const SeedDictionary& d) {
      if (d.pairs.empty()) return 0.0;
      PairedMatrix pm =
          pair_matrices(d, inputs.source_space, inputs.target_space);
      ProjectionMap map = fit_map(pm, settings.method, settings.keep_ratio,
                                  settings.ridge);
      EmbeddingSpace projected = project_space(inputs.source_space, map);
      return precision_at_1(projected, inputs.target_space, held).p_at_1;
    };
    auto [best_t, score] =
        tune_validation_threshold(tune_split.train, inputs.target_freq,
                                  settings.threshold_candidates, evaluator);
    result.threshold = best_t;
    dict = validate_pairs(dict, inputs.target_freq, best_t).dict;
    if (dict.pairs.empty())
      throw DataError("validation threshold removed every pair");
  }

  PairedMatrix pm = pair_matrices(dict, inputs.source_space,
                                  inputs.target_space);
  result.pairs = pm.kept_pairs.size();
  ProjectionMap map =
      fit_map(pm, settings.method, settings.keep_ratio, settings.ridge);
  EmbeddingSpace projected = project_space(inputs.source_space, map);

  result.p1 = precision_at_1(projected, inputs.target_space, inputs.test_set);

  std::map<std::string, const EmbeddingSpace*> spaces = {
      {"en", &inputs.target_space}, {"de", &projected}};

  TaggerModel zero_shot =
      train_tagger({target_split.train}, spaces, settings.epochs,
                   derive_seed(cell_seed, "tagger-zs"), settings.radius);
  result.zero_shot_f1 =
      evaluate_f1(zero_shot, source_split.test, projected).average_f1;

  if (joint_subset.size() > 0) {
    TaggerModel joint = train_tagger(
        {target_split.train, joint_subset}, spaces, settings.epochs,
        derive_seed(cell_seed, "tagger-joint"), settings.radius);
    result.joint_f1 =
        evaluate_f1(joint, source_split.test, projected).average_f1;
  } else {
    result.joint_f1 = result.zero_shot_f1;
  }
  return result;
}

}  // namespace

ExperimentReport run_factor_grid(const ExperimentInputs& inputs,
                                 const ExperimentSettings& settings) {
  ExperimentReport report;
  report.header = {"block",        "source",      "size",     "band",
                   "pairs",        "threshold",   "p_at_1",   "evaluated",
                   "skipped_oov",  "zero_shot_f1", "joint_f1", "cell_seed",
                   "status"};

  CorpusSplit target_split =
      split_corpus(inputs.target_corpus, settings.fractions,
                   derive_seed(settings.master_seed, "split-en"));
  CorpusSplit source_split =
      split_corpus(inputs.source_corpus, settings.fractions,
                   derive_seed(settings.master_seed, "split-de"));

  // One fixed low-resource subset per master seed, shared by every cell.
  std::vector<std::size_t> joint_order = shuffled_indices(
      source_split.train.size(),
      derive_seed(settings.master_seed, "joint-subset"));
  TaggedCorpus joint_subset = subset_corpus(
      source_split.train, joint_order,
      std::min(settings.joint_docs, source_split.train.size()));

  struct Cell {
    std::string block, source, band;
    long long size;
  };
  std::vector<Cell> cells;
  std::vector<std::size_t> block_bounds;

  if (settings.sequential) {
    for (const std::string& src : settings.sources)
      cells.push_back({"source", src, "high", settings.base_size});
    block_bounds.push_back(cells.size());
    for (const std::string& band : settings.bands)
      cells.push_back({"band", "", band, settings.base_size});
    block_bounds.push_back(cells.size());
    for (long long size : settings.sizes)
      cells.push_back({"size", "", "", size});
    block_bounds.push_back(cells.size());
  } else {
    for (const std::string& src : settings.sources)
      for (long long size : settings.sizes)
        for (const std::string& band : settings.bands)
          cells.push_back({"grid", src, band, size});
  }

  std::string best_source = settings.sources.empty() ? "domain"
                                                     : settings.sources.front();
  std::string best_band = "high";
  double block_best = -1;
  std::size_t block_idx = 0;

  for (std::size_t i = 0; i < cells.size(); ++i) {
    Cell cell = cells[i];
    if (settings.sequential) {
      if (block_idx < block_bounds.size() && i == block_bounds[block_idx]) {
        ++block_idx;
        block_best = -1;
      }
      if (cell.source.empty()) cell.source = best_source;
      if (cell.band.empty()) cell.band = best_band;
    }
    std::string key = "source=" + cell.source +
                      " size=" + std::to_string(cell.size) +
                      " band=" + cell.band;
    std::uint64_t cell_seed = derive_seed(settings.master_seed, key);
    std::vector<std::string> row = {cell.block,
                                    cell.source,
                                    std::to_string(cell.size),
                                    cell.band,
                                    "",
                                    "",
                                    "",
                                    "",
                                    "",
                                    "",
                                    "",
                                    std::to_string(cell_seed),
                                    ""};
    try {
      SeedDictionary dict =
          build_cell_dictionary(inputs, cell.source, cell.size, cell.band);
      CellResult r =
          evaluate_dictionary(inputs, settings, std::move(dict), cell_seed,
                              target_split, source_split, joint_subset);
      row[4] = std::to_string(r.pairs);
      row[5] = std::to_string(r.threshold);
      row[6] = fmt_f1(r.p1.p_at_1);
      row[7] = std::to_string(r.p1.evaluated);
      row[8] = std::to_string(r.p1.skipped_oov);
      row[9] = fmt_f1(r.zero_shot_f1);
      row[10] = fmt_f1(r.joint_f1);
      row[12] = "ok";
      if (settings.sequential && r.zero_shot_f1 > block_best) {
        block_best = r.zero_shot_f1;
        if (cell.block == "source") best_source = cell.source;
        if (cell.block == "band") best_band = cell.band;
      }
    } catch (const std::exception& e) {
      row[12] = std::string("error: ") + e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport run_data_scaling(const ExperimentInputs& inputs,
                                  const ExperimentSettings& settings) {
  ExperimentReport report;
  report.header = {"low_resource_docs", "monolingual_f1", "cross_lingual_f1",
                   "gain"};

  CorpusSplit target_split =
      split_corpus(inputs.target_corpus, settings.fractions,
                   derive_seed(settings.master_seed, "split-en"));
  CorpusSplit source_split =
      split_corpus(inputs.source_corpus, settings.fractions,
                   derive_seed(settings.master_seed, "split-de"));

  std::uint64_t run_seed = derive_seed(settings.master_seed, "scaling");
  SeedDictionary dict = build_cell_dictionary(
      inputs, settings.scaling_source, settings.scaling_size,
      settings.scaling_band);
  PairedMatrix pm =
      pair_matrices(dict, inputs.source_space, inputs.target_space);
  ProjectionMap map =
      fit_map(pm, settings.method, settings.keep_ratio, settings.ridge);
  EmbeddingSpace projected = project_space(inputs.source_space, map);

  std::map<std::string, const EmbeddingSpace*> cross_spaces = {
      {"en", &inputs.target_space}, {"de", &projected}};
  std::map<std::string, const EmbeddingSpace*> mono_spaces = {
      {"de", &inputs.source_space}};

  std::vector<std::size_t> order = shuffled_indices(
      source_split.train.size(), derive_seed(settings.master_seed,
                                             "joint-subset"));

  for (const std::string& count_str : settings.doc_counts) {
    std::size_t c;
    if (count_str == "all" || count_str == "full") {
      c = source_split.train.size();
    } else {
      long long parsed = std::stoll(count_str);
      if (parsed < 0) throw UsageError("doc count must be non-negative");
      c = static_cast<std::size_t>(parsed);
      if (c > source_split.train.size())
        throw DataError("doc count " + count_str +
                        " exceeds low-resource train size " +
                        std::to_string(source_split.train.size()));
    }
    TaggedCorpus subset = subset_corpus(source_split.train, order, c);

    std::string mono_str = "-";
    double mono_f1 = 0;
    if (c > 0) {
      TaggerModel mono = train_tagger(
          {subset}, mono_spaces, settings.epochs,
          derive_seed(run_seed, "mono-" + count_str), settings.radius);
      mono_f1 =
          evaluate_f1(mono, source_split.test, inputs.source_space).average_f1;
      mono_str = fmt_f1(mono_f1);
    }

    std::vector<TaggedCorpus> cross_train = {target_split.train};
    if (c > 0) cross_train.push_back(subset);
    TaggerModel cross = train_tagger(
        cross_train, cross_spaces, settings.epochs,
        derive_seed(run_seed, "cross-" + count_str), settings.radius);
    double cross_f1 =
        evaluate_f1(cross, source_split.test, projected).average_f1;

    double gain = c > 0 ? cross_f1 - mono_f1 : cross_f1;
    report.rows.push_back(
        {count_str, mono_str, fmt_f1(cross_f1), fmt_f1(gain)});
  }
  return report;
}

}  // namespace xling
