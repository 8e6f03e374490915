#include "xling/tagger.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace xling {

namespace {

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Ordered-summation dot product; keeps decode scores reproducible against
// a naive reference loop.
double dot(const double* a, const double* b, Eigen::Index n) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Emission score table computed with plain loops, one row per token.
Eigen::MatrixXd emission_scores(const Eigen::MatrixXd& emission,
                                const Eigen::MatrixXd& features) {
  Eigen::Index n = features.rows(), m = emission.rows();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> em =
      emission;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ft =
      features;
  Eigen::MatrixXd scores(n, m);
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index l = 0; l < m; ++l)
      scores(t, l) = dot(em.data() + l * em.cols(), ft.data() + t * ft.cols(),
                         em.cols());
  return scores;
}

std::vector<Eigen::Index> viterbi_path(const Eigen::MatrixXd& scores,
                                       const Eigen::MatrixXd& transition) {
  const Eigen::Index n = scores.rows();
  const Eigen::Index m = scores.cols();
  const Eigen::Index boundary = m;  // shared start/stop state
  Eigen::MatrixXd v(n, m);
  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> back(n, m);
  for (Eigen::Index l = 0; l < m; ++l)
    v(0, l) = transition(boundary, l) + scores(0, l);
  for (Eigen::Index t = 1; t < n; ++t) {
    for (Eigen::Index l = 0; l < m; ++l) {
      Eigen::Index best_p = 0;
      double best = v(t - 1, 0) + transition(0, l);
      for (Eigen::Index p = 1; p < m; ++p) {
        double s = v(t - 1, p) + transition(p, l);
        if (s > best) {  // ties keep the lower previous label index
          best = s;
          best_p = p;
        }
      }
      v(t, l) = best + scores(t, l);
      back(t, l) = best_p;
    }
  }
  Eigen::Index best_l = 0;
  double best = v(n - 1, 0) + transition(0, boundary);
  for (Eigen::Index l = 1; l < m; ++l) {
    double s = v(n - 1, l) + transition(l, boundary);
    if (s > best) {
      best = s;
      best_l = l;
    }
  }
  std::vector<Eigen::Index> path(n);
  path[n - 1] = best_l;
  for (Eigen::Index t = n - 1; t > 0; --t) path[t - 1] = back(t, path[t]);
  return path;
}

}  // namespace

bool is_valid_bio_label(const std::string& label) {
  if (label == "O") return true;
  if (label.size() < 3) return false;
  if (label[0] != 'B' && label[0] != 'I') return false;
  return label[1] == '-';
}

TaggedCorpus load_conll(const std::string& path,
                        const std::string& language_id) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  TaggedCorpus corpus;
  corpus.language_id = language_id;
  std::vector<std::string> tokens, labels;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&]() {
    if (!tokens.empty()) {
      corpus.sequences.push_back(std::move(tokens));
      corpus.labels.push_back(std::move(labels));
      tokens.clear();
      labels.clear();
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) {
      flush();
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected token<TAB>label");
    std::string token = line.substr(0, tab);
    std::string label = line.substr(tab + 1);
    if (!is_valid_bio_label(label))
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": malformed BIO label '" + label + "'");
    tokens.push_back(std::move(token));
    labels.push_back(std::move(label));
  }
  flush();
  if (corpus.sequences.empty()) throw DataError(path + ": empty corpus");
  return corpus;
}

void save_conll(const TaggedCorpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    for (std::size_t t = 0; t < corpus.sequences[s].size(); ++t)
      out << corpus.sequences[s][t] << '\t' << corpus.labels[s][t] << '\n';
    out << '\n';
  }
}

std::vector<Span> extract_spans(const std::vector<std::string>& labels) {
  std::vector<Span> spans;
  std::string open_type;
  std::size_t open_start = 0;
  auto close = [&](std::size_t end_exclusive) {
    if (!open_type.empty()) {
      spans.push_back({open_type, open_start, end_exclusive - 1});
      open_type.clear();
    }
  };
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const std::string& lab = labels[t];
    if (lab == "O") {
      close(t);
    } else {
      std::string type = lab.substr(2);
      if (lab[0] == 'B' || open_type != type) {
        close(t);
        open_type = type;
        open_start = t;
      }
    }
  }
  close(labels.size());
  return spans;
}

std::vector<std::string> spans_to_bio(const std::vector<Span>& spans,
                                      std::size_t length) {
  std::vector<std::string> labels(length, "O");
  for (const Span& sp : spans) {
    if (sp.end >= length || sp.start > sp.end)
      throw DataError("span out of range");
    labels[sp.start] = "B-" + sp.entity_type;
    for (std::size_t t = sp.start + 1; t <= sp.end; ++t)
      labels[t] = "I-" + sp.entity_type;
  }
  return labels;
}

Eigen::MatrixXd featurize(const std::vector<std::string>& tokens,
                          const EmbeddingSpace& embeddings, int radius,
                          std::size_t* oov_count) {
  const Eigen::Index d = embeddings.dim();
  const Eigen::Index width = (2 * static_cast<Eigen::Index>(radius) + 1) * d + 1;
  const Eigen::Index n = static_cast<Eigen::Index>(tokens.size());
  Eigen::MatrixXd feats = Eigen::MatrixXd::Zero(n, width);
  std::size_t oov = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    for (int off = -radius; off <= radius; ++off) {
      Eigen::Index pos = t + off;
      Eigen::Index slot = (off + radius) * d;
      if (pos < 0 || pos >= n) continue;
      Eigen::Index row = embeddings.row_of(tokens[pos]);
      if (row < 0) {
        if (off == 0) ++oov;
        continue;  // zero slot for OOV
      }
      feats.block(t, slot, 1, d) = embeddings.vectors().row(row);
    }
    feats(t, width - 1) = 1.0;  // bias
  }
  if (oov_count) *oov_count = oov;
  return feats;
}

std::vector<std::string> TaggerModel::entity_types() const {
  std::set<std::string> types;
  for (const std::string& lab : label_set)
    if (lab != "O") types.insert(lab.substr(2));
  return {types.begin(), types.end()};
}

TaggerModel train_tagger(
    const std::vector<TaggedCorpus>& train,
    const std::map<std::string, const EmbeddingSpace*>& embeddings,
    int epochs, std::uint64_t seed, int radius) {
  if (train.empty()) throw DataError("no training corpora");
  if (epochs < 1) throw UsageError("epochs must be >= 1");

  std::set<std::string> label_pool;
  Eigen::Index dim = -1;
  for (const TaggedCorpus& corpus : train) {
    auto it = embeddings.find(corpus.language_id);
    if (it == embeddings.end())
      throw DataError("no embedding space for language '" +
                      corpus.language_id + "'");
    if (dim < 0)
      dim = it->second->dim();
    else if (dim != it->second->dim())
      throw DataError("embedding dimension mismatch across languages");
    for (const auto& labs : corpus.labels)
      for (const std::string& lab : labs) label_pool.insert(lab);
  }
  label_pool.erase("O");

  TaggerModel model;
  model.label_set.push_back("O");
  model.label_set.insert(model.label_set.end(), label_pool.begin(),
                         label_pool.end());
  model.radius = radius;
  model.dim = dim;
  model.epochs = epochs;
  model.seed = seed;

  const Eigen::Index m = static_cast<Eigen::Index>(model.label_set.size());
  const Eigen::Index fdim = model.feature_dim();
  std::map<std::string, Eigen::Index> label_index;
  for (Eigen::Index i = 0; i < m; ++i) label_index[model.label_set[i]] = i;

  // Pre-featurize everything once; corpora are concatenated and the
  // concatenation reshuffled each epoch.
  std::vector<Eigen::MatrixXd> features;
  std::vector<std::vector<Eigen::Index>> gold;
  for (const TaggedCorpus& corpus : train) {
    const EmbeddingSpace& space = *embeddings.at(corpus.language_id);
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      features.push_back(featurize(corpus.sequences[s], space, radius));
      std::vector<Eigen::Index> g(corpus.labels[s].size());
      for (std::size_t t = 0; t < g.size(); ++t)
        g[t] = label_index.at(corpus.labels[s][t]);
      gold.push_back(std::move(g));
    }
  }
  if (features.empty()) throw DataError("no training sequences");

  Eigen::MatrixXd w_e = Eigen::MatrixXd::Zero(m, fdim);
  Eigen::MatrixXd w_t = Eigen::MatrixXd::Zero(m + 1, m + 1);
  Eigen::MatrixXd u_e = Eigen::MatrixXd::Zero(m, fdim);
  Eigen::MatrixXd u_t = Eigen::MatrixXd::Zero(m + 1, m + 1);

  std::vector<std::size_t> order(features.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  const Eigen::Index boundary = m;
  double step = 1.0;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const Eigen::MatrixXd& feats = features[idx];
      const std::vector<Eigen::Index>& g = gold[idx];
      Eigen::MatrixXd scores = emission_scores(w_e, feats);
      std::vector<Eigen::Index> pred = viterbi_path(scores, w_t);
      if (pred != g) {
        for (std::size_t t = 0; t < g.size(); ++t) {
          if (pred[t] != g[t]) {
            w_e.row(g[t]) += feats.row(t);
            w_e.row(pred[t]) -= feats.row(t);
            u_e.row(g[t]) += step * feats.row(t);
            u_e.row(pred[t]) -= step * feats.row(t);
          }
          Eigen::Index gp = t == 0 ? boundary : g[t - 1];
          Eigen::Index pp = t == 0 ? boundary : pred[t - 1];
          if (gp != pp || g[t] != pred[t]) {
            w_t(gp, g[t]) += 1;
            w_t(pp, pred[t]) -= 1;
            u_t(gp, g[t]) += step;
            u_t(pp, pred[t]) -= step;
          }
        }
        if (g.back() != pred.back()) {
          w_t(g.back(), boundary) += 1;
          w_t(pred.back(), boundary) -= 1;
          u_t(g.back(), boundary) += step;
          u_t(pred.back(), boundary) -= step;
        }
      }
      step += 1.0;
    }
  }

  // Average of the weight vector after every sequence: with updates
  // applied at steps s_j, avg = ((N+1) w - sum_j s_j delta_j) / N.
  double total = step - 1.0;
  model.emission = ((total + 1.0) * w_e - u_e) / total;
  model.transition = ((total + 1.0) * w_t - u_t) / total;
  return model;
}

std::vector<std::string> viterbi_decode(const TaggerModel& model,
                                        const Eigen::MatrixXd& features) {
  if (features.cols() != model.feature_dim())
    throw DataError("feature width does not match model");
  if (features.rows() == 0) return {};
  Eigen::MatrixXd scores = emission_scores(model.emission, features);
  std::vector<Eigen::Index> path = viterbi_path(scores, model.transition);
  std::vector<std::string> out(path.size());
  for (std::size_t t = 0; t < path.size(); ++t)
    out[t] = model.label_set[path[t]];
  return out;
}

std::vector<std::string> tag_sequence(const TaggerModel& model,
                                      const std::vector<std::string>& tokens,
                                      const EmbeddingSpace& embeddings) {
  if (embeddings.dim() != model.dim)
    throw DataError("embedding dimension does not match model");
  return viterbi_decode(model, featurize(tokens, embeddings, model.radius));
}

F1Report score_spans(const std::vector<std::vector<std::string>>& gold,
                     const std::vector<std::vector<std::string>>& predicted,
                     const std::vector<std::string>& entity_types) {
  if (gold.size() != predicted.size())
    throw DataError("gold and predicted corpora differ in size");
  F1Report report;
  for (const std::string& e : entity_types) report.per_type[e];
  for (std::size_t s = 0; s < gold.size(); ++s) {
    std::vector<Span> gs = extract_spans(gold[s]);
    std::vector<Span> ps = extract_spans(predicted[s]);
    for (const Span& sp : gs)
      if (report.per_type.count(sp.entity_type))
        ++report.per_type[sp.entity_type].gold;
    for (const Span& sp : ps) {
      if (!report.per_type.count(sp.entity_type)) continue;
      ++report.per_type[sp.entity_type].predicted;
      if (std::find(gs.begin(), gs.end(), sp) != gs.end())
        ++report.per_type[sp.entity_type].correct;
    }
  }
  double sum_f1 = 0;
  for (auto& [type, sc] : report.per_type) {
    sc.precision = sc.predicted ? static_cast<double>(sc.correct) / sc.predicted
                                : 0.0;
    sc.recall = sc.gold ? static_cast<double>(sc.correct) / sc.gold : 0.0;
    sc.f1 = (sc.precision + sc.recall) > 0
                ? 2 * sc.precision * sc.recall / (sc.precision + sc.recall)
                : 0.0;
    sum_f1 += sc.f1;
  }
  report.average_f1 =
      report.per_type.empty() ? 0.0 : sum_f1 / report.per_type.size();
  return report;
}

F1Report evaluate_f1(const TaggerModel& model, const TaggedCorpus& test,
                     const EmbeddingSpace& embeddings) {
  std::vector<std::vector<std::string>> predicted;
  predicted.reserve(test.size());
  for (const auto& tokens : test.sequences)
    predicted.push_back(tag_sequence(model, tokens, embeddings));
  return score_spans(test.labels, predicted, model.entity_types());
}

std::string summary_line(const F1Report& report) {
  std::ostringstream ss;
  ss << "F1 " << format_double(report.average_f1);
  for (const auto& [type, sc] : report.per_type)
    ss << ' ' << type << ' ' << format_double(sc.f1);
  return ss.str();
}

void save_f1_report(const F1Report& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << "entity\tgold\tpredicted\tcorrect\tprecision\trecall\tf1\n";
  for (const auto& [type, sc] : report.per_type)
    out << type << '\t' << sc.gold << '\t' << sc.predicted << '\t' << sc.correct
        << '\t' << format_double(sc.precision) << '\t'
        << format_double(sc.recall) << '\t' << format_double(sc.f1) << '\n';
  out << "# " << summary_line(report) << '\n';
}

void save_tagger_model(const TaggerModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model: " + path);
  out << "xling-tagger-model v1\n";
  out << "labels";
  for (const std::string& lab : model.label_set) out << ' ' << lab;
  out << '\n';
  out << "radius " << model.radius << '\n';
  out << "dim " << model.dim << '\n';
  out << "epochs " << model.epochs << '\n';
  out << "seed " << model.seed << '\n';
  out << "averaged " << (model.averaged ? 1 : 0) << '\n';
  auto write_matrix = [&](const char* name, const Eigen::MatrixXd& mat) {
    out << name << ' ' << mat.rows() << ' ' << mat.cols() << '\n';
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) {
        if (j) out << ' ';
        out << format_double(mat(i, j));
      }
      out << '\n';
    }
  };
  write_matrix("emission", model.emission);
  write_matrix("transition", model.transition);
  if (!out) throw DataError("write failed: " + path);
}

TaggerModel load_tagger_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model: " + path);
  std::string magic, version;
  if (!(in >> magic >> version) || magic != "xling-tagger-model" ||
      version != "v1")
    throw DataError(path + ": not a tagger model file");
  TaggerModel model;
  std::string key;
  in >> key;
  if (key != "labels") throw DataError(path + ": missing label line");
  std::string rest;
  std::getline(in, rest);
  std::istringstream ls(rest);
  std::string lab;
  while (ls >> lab) model.label_set.push_back(lab);
  int averaged = 1;
  if (!(in >> key >> model.radius) || key != "radius")
    throw DataError(path + ": missing radius");
  if (!(in >> key >> model.dim) || key != "dim")
    throw DataError(path + ": missing dim");
  if (!(in >> key >> model.epochs) || key != "epochs")
    throw DataError(path + ": missing epochs");
  if (!(in >> key >> model.seed) || key != "seed")
    throw DataError(path + ": missing seed");
  if (!(in >> key >> averaged) || key != "averaged")
    throw DataError(path + ": missing averaged flag");
  model.averaged = averaged != 0;
  auto read_matrix = [&](const char* name) {
    std::string n;
    Eigen::Index rows, cols;
    if (!(in >> n >> rows >> cols) || n != name)
      throw DataError(path + ": expected matrix '" + name + "'");
    Eigen::MatrixXd mat(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        if (!(in >> mat(i, j)))
          throw DataError(path + ": truncated matrix '" + name + "'");
    return mat;
  };
  model.emission = read_matrix("emission");
  model.transition = read_matrix("transition");
  return model;
}

}  // namespace xling
