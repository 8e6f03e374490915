// Command-line driver for the cross-lingual embedding toolkit.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "xling/alignment.hpp"
#include "xling/config.hpp"
#include "xling/dictionary.hpp"
#include "xling/embedding.hpp"
#include "xling/experiments.hpp"
#include "xling/intrinsic.hpp"
#include "xling/synthetic.hpp"
#include "xling/tagger.hpp"

namespace {

using namespace xling;

// lang=path arguments for multi-language corpora and embeddings.
std::pair<std::string, std::string> split_lang_arg(const std::string& arg) {
  auto eq = arg.find('=');
  if (eq == std::string::npos)
    throw UsageError("expected lang=path, got '" + arg + "'");
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

int run(int argc, char** argv) {
  CLI::App app{"Cross-lingual embedding alignment and evaluation toolkit"};
  app.require_subcommand(1);

  // gen-world
  auto* gen = app.add_subcommand("gen-world",
                                 "Generate a synthetic bilingual world");
  std::string gen_out = "world";
  SyntheticWorldConfig wc;
  std::size_t gen_sequences = 200;
  double gen_avg_entities = 3.0;
  std::string gen_map_kind = "orthogonal";
  gen->add_option("--out", gen_out, "Output directory");
  gen->add_option("--vocab", wc.vocab_size, "Vocabulary size");
  gen->add_option("--dim", wc.dim, "Embedding dimension");
  gen->add_option("--noise", wc.noise_sigma, "Noise sigma");
  gen->add_option("--noise-rank-power", wc.noise_rank_power,
                  "Rank-dependent noise exponent");
  gen->add_option("--map-kind", gen_map_kind, "orthogonal|general_linear");
  gen->add_option("--zipf", wc.zipf_exponent, "Zipf exponent");
  gen->add_option("--seed", wc.seed, "RNG seed");
  gen->add_option("--dict-train", wc.dict_train, "Gold train pairs");
  gen->add_option("--dict-test", wc.dict_test, "Gold test pairs");
  gen->add_option("--sequences", gen_sequences, "Corpus sequences per language");
  gen->add_option("--avg-entities", gen_avg_entities,
                  "Average entity spans per sequence");

  // build-dict
  auto* bd = app.add_subcommand("build-dict", "Build a domain seed dictionary");
  std::string bd_freqs, bd_lexicon, bd_stopwords, bd_out, bd_band = "high";
  std::string bd_target_freqs;
  std::size_t bd_size = 1000;
  long long bd_threshold = 0;
  bd->add_option("--freqs", bd_freqs, "Source frequency TSV")->required();
  bd->add_option("--lexicon", bd_lexicon, "Provider lexicon TSV")->required();
  bd->add_option("--band", bd_band, "high|lower");
  bd->add_option("--size", bd_size, "Requested pair count");
  bd->add_option("--stopwords", bd_stopwords, "Stopword file");
  bd->add_option("--target-freqs", bd_target_freqs,
                 "Target frequency TSV for validation");
  bd->add_option("--threshold", bd_threshold, "Validation threshold");
  bd->add_option("--out", bd_out, "Output dictionary path")->required();

  // fit-map
  auto* fm = app.add_subcommand("fit-map", "Fit a projection map");
  std::string fm_dict, fm_source, fm_target, fm_out, fm_method = "cca";
  std::string fm_format = "space_separated";
  double fm_ridge = kAutoRidge, fm_keep = 1.0;
  fm->add_option("--dict", fm_dict, "Seed dictionary")->required();
  fm->add_option("--format", fm_format, "space_separated|tsv");
  fm->add_option("--source-emb", fm_source, "Source embeddings")->required();
  fm->add_option("--target-emb", fm_target, "Target embeddings")->required();
  fm->add_option("--method", fm_method, "cca|least_squares|procrustes");
  fm->add_option("--ridge", fm_ridge, "Ridge (negative = auto)");
  fm->add_option("--keep-ratio", fm_keep, "CCA kept-dimension ratio");
  fm->add_option("--out", fm_out, "Output map path")->required();

  // project
  auto* pr = app.add_subcommand("project", "Project a space through a map");
  std::string pr_map, pr_source, pr_out;
  pr->add_option("--map", pr_map, "Projection map file")->required();
  pr->add_option("--source-emb", pr_source, "Source embeddings")->required();
  pr->add_option("--out", pr_out, "Output embeddings path")->required();

  // eval-p1
  auto* ep = app.add_subcommand("eval-p1", "Word-translation P@1");
  std::string ep_projected, ep_target, ep_test, ep_report;
  ep->add_option("--projected", ep_projected, "Projected source embeddings")
      ->required();
  ep->add_option("--target-emb", ep_target, "Target embeddings")->required();
  ep->add_option("--test-set", ep_test, "Gold pair file")->required();
  ep->add_option("--report", ep_report, "Per-word TSV report path");

  // train-tagger
  auto* tt = app.add_subcommand("train-tagger", "Train the BIO tagger");
  std::vector<std::string> tt_train, tt_emb;
  int tt_epochs = 10, tt_radius = 1;
  std::uint64_t tt_seed = 1;
  std::string tt_out;
  tt->add_option("--train", tt_train, "lang=corpus.conll (repeatable)")
      ->required();
  tt->add_option("--emb", tt_emb, "lang=embeddings.vec (repeatable)")
      ->required();
  tt->add_option("--epochs", tt_epochs, "Training epochs");
  tt->add_option("--radius", tt_radius, "Feature window radius");
  tt->add_option("--seed", tt_seed, "Shuffle seed");
  tt->add_option("--out", tt_out, "Output model path")->required();

  // eval-f1
  auto* ef = app.add_subcommand("eval-f1", "Span F1 of a tagger model");
  std::string ef_model, ef_test, ef_emb, ef_report;
  ef->add_option("--model", ef_model, "Tagger model")->required();
  ef->add_option("--test", ef_test, "Test corpus")->required();
  ef->add_option("--emb", ef_emb, "Embeddings for the test language")
      ->required();
  ef->add_option("--report", ef_report, "Per-type TSV report path");

  // grid / scaling
  auto* gr = app.add_subcommand("grid", "Run the factor-grid experiment");
  auto* sc = app.add_subcommand("scaling", "Run the data-scaling experiment");
  std::string gr_config, gr_out = "grid_report.tsv";
  std::string sc_config, sc_out = "scaling_report.tsv";
  std::vector<std::string> gr_set, sc_set;
  gr->add_option("--config", gr_config, "Config file")->required();
  gr->add_option("--out", gr_out, "Report path");
  gr->add_option("--set", gr_set, "key=value override (repeatable)");
  sc->add_option("--config", sc_config, "Config file")->required();
  sc->add_option("--out", sc_out, "Report path");
  sc->add_option("--set", sc_set, "key=value override (repeatable)");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    wc.map_kind = map_kind_from_string(gen_map_kind);
    SyntheticWorld world = generate_world(wc);
    if (gen_sequences > 0) {
      CorpusStats stats = generate_tagged_corpora(
          world, gen_sequences, derive_seed(wc.seed, "corpora"),
          gen_avg_entities);
      std::cerr << "generated " << stats.sequences << " sequences";
      for (const auto& [type, n] : stats.spans_per_type)
        std::cerr << ", " << n << " " << type;
      std::cerr << '\n';
    }
    export_world(world, gen_out);
    std::cout << (std::filesystem::path(gen_out) / "manifest.cfg").string()
              << '\n';
  } else if (bd->parsed()) {
    FrequencyTable freqs = load_frequency_table(bd_freqs);
    FileLexiconProvider provider(bd_lexicon);
    std::set<std::string> stopwords;
    if (!bd_stopwords.empty()) stopwords = load_stopwords(bd_stopwords);
    SeedDictionary dict = build_domain_dictionary(
        freqs, provider, freq_band_from_string(bd_band), bd_size, stopwords);
    if (!bd_target_freqs.empty() && bd_threshold > 0) {
      FrequencyTable tf = load_frequency_table(bd_target_freqs);
      ValidationResult vr = validate_pairs(dict, tf, bd_threshold);
      std::cerr << "validation dropped " << vr.drops.size() << " pairs\n";
      dict = vr.dict;
    }
    save_pair_dictionary(dict, bd_out, PairFormat::space_separated);
    std::cout << dict.pairs.size() << " pairs written to " << bd_out << '\n';
  } else if (fm->parsed()) {
    PairFormat format = fm_format == "tsv" ? PairFormat::tsv
                                           : PairFormat::space_separated;
    SeedDictionary dict =
        load_pair_dictionary(fm_dict, format, DictSource::domain);
    EmbeddingSpace source = load_embeddings(fm_source, true, "source");
    EmbeddingSpace target = load_embeddings(fm_target, true, "target");
    PairedMatrix pm = pair_matrices(dict, source, target);
    std::cerr << pm.kept_pairs.size() << " pairs in vocabulary, " << pm.skipped
              << " skipped\n";
    ProjectionMap map =
        fit_map(pm, map_method_from_string(fm_method), fm_keep, fm_ridge);
    save_projection_map(map, fm_out);
    std::cout << "map written to " << fm_out << '\n';
  } else if (pr->parsed()) {
    ProjectionMap map = load_projection_map(pr_map);
    EmbeddingSpace source = load_embeddings(pr_source, true, "source");
    save_embeddings(project_space(source, map), pr_out);
    std::cout << "projected embeddings written to " << pr_out << '\n';
  } else if (ep->parsed()) {
    EmbeddingSpace projected = load_embeddings(ep_projected, true, "source");
    EmbeddingSpace target = load_embeddings(ep_target, true, "target");
    TranslationTestSet test = load_test_set(ep_test);
    P1Report report =
        precision_at_1(projected, target, test, !ep_report.empty());
    if (!ep_report.empty()) save_p1_report(report, ep_report);
    std::cout << summary_line(report) << '\n';
  } else if (tt->parsed()) {
    std::map<std::string, EmbeddingSpace> spaces;
    std::map<std::string, const EmbeddingSpace*> space_ptrs;
    for (const std::string& arg : tt_emb) {
      auto [lang, path] = split_lang_arg(arg);
      spaces.emplace(lang, load_embeddings(path, true, lang));
    }
    for (auto& [lang, space] : spaces) space_ptrs[lang] = &space;
    std::vector<TaggedCorpus> corpora;
    for (const std::string& arg : tt_train) {
      auto [lang, path] = split_lang_arg(arg);
      corpora.push_back(load_conll(path, lang));
    }
    TaggerModel model =
        train_tagger(corpora, space_ptrs, tt_epochs, tt_seed, tt_radius);
    save_tagger_model(model, tt_out);
    std::cout << "model written to " << tt_out << '\n';
  } else if (ef->parsed()) {
    TaggerModel model = load_tagger_model(ef_model);
    TaggedCorpus test = load_conll(ef_test, "test");
    EmbeddingSpace emb = load_embeddings(ef_emb, true, "test");
    F1Report report = evaluate_f1(model, test, emb);
    if (!ef_report.empty()) save_f1_report(report, ef_report);
    std::cout << summary_line(report) << '\n';
  } else if (gr->parsed() || sc->parsed()) {
    bool is_grid = gr->parsed();
    Config config = Config::load(is_grid ? gr_config : sc_config);
    for (const std::string& s : is_grid ? gr_set : sc_set)
      config.set_override(s);
    ExperimentInputs inputs = load_experiment_inputs(config);
    ExperimentSettings settings = load_experiment_settings(config);
    ExperimentReport report = is_grid ? run_factor_grid(inputs, settings)
                                      : run_data_scaling(inputs, settings);
    const std::string& out = is_grid ? gr_out : sc_out;
    report.save(out);
    config.save_effective(out + ".effective.cfg");
    std::cout << "report written to " << out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const xling::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const xling::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
