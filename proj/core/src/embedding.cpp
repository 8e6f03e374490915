#include "xling/embedding.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace xling {

namespace {

// Strips a trailing '\r' so CRLF files read the same as LF files.
void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_component(const std::string& tok, const std::string& path,
                       std::size_t line_no) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": non-numeric vector component '" + tok + "'");
  return v;
}

}  // namespace

std::vector<std::string> FrequencyTable::ranked() const {
  std::vector<std::string> words;
  words.reserve(entries.size());
  for (const auto& [w, c] : entries) words.push_back(w);
  std::stable_sort(words.begin(), words.end(),
                   [this](const std::string& a, const std::string& b) {
                     long long ca = entries.at(a), cb = entries.at(b);
                     if (ca != cb) return ca > cb;
                     return a < b;
                   });
  return words;
}

FrequencyTable load_frequency_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open frequency table: " + path);
  FrequencyTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected exactly two tab-separated fields");
    std::string word = line.substr(0, tab);
    std::string count_str = line.substr(tab + 1);
    char* end = nullptr;
    long long count = std::strtoll(count_str.c_str(), &end, 10);
    if (end == count_str.c_str() || *end != '\0')
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": non-integer count '" + count_str + "'");
    if (count < 1)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": count must be >= 1 for word '" + word + "'");
    if (!table.entries.emplace(word, count).second)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": duplicate word '" + word + "'");
  }
  return table;
}

void save_frequency_table(const FrequencyTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write frequency table: " + path);
  for (const auto& [w, c] : table.entries) out << w << '\t' << c << '\n';
}

EmbeddingSpace::EmbeddingSpace(std::string language_id,
                               std::vector<std::string> vocabulary,
                               Eigen::MatrixXd vectors,
                               std::map<std::string, long long> frequencies)
    : language_id_(std::move(language_id)),
      vocabulary_(std::move(vocabulary)),
      vectors_(std::move(vectors)),
      frequencies_(std::move(frequencies)) {
  if (static_cast<Eigen::Index>(vocabulary_.size()) != vectors_.rows())
    throw DataError("vocabulary size does not match vector row count");
  index_.reserve(vocabulary_.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(vocabulary_.size()); ++i) {
    if (!index_.emplace(vocabulary_[i], i).second)
      throw DataError("duplicate word in vocabulary: '" + vocabulary_[i] + "'");
  }
  for (const auto& [w, c] : frequencies_) {
    if (!index_.count(w))
      throw DataError("frequency entry for word not in vocabulary: '" + w + "'");
    if (c < 0) throw DataError("negative frequency for word '" + w + "'");
  }
}

Eigen::MatrixXd::ConstRowXpr EmbeddingSpace::vector_of(
    const std::string& word) const {
  Eigen::Index r = row_of(word);
  if (r < 0) throw DataError("word not in vocabulary: '" + word + "'");
  return vectors_.row(r);
}

EmbeddingSpace EmbeddingSpace::with_vectors(Eigen::MatrixXd vectors) const {
  return EmbeddingSpace(language_id_, vocabulary_, std::move(vectors),
                        frequencies_);
}

EmbeddingSpace EmbeddingSpace::with_language_id(std::string language_id) const {
  return EmbeddingSpace(std::move(language_id), vocabulary_, vectors_,
                        frequencies_);
}

EmbeddingSpace load_embeddings(const std::string& path, bool expect_header,
                               const std::string& language_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file: " + path);

  std::vector<std::string> vocab;
  std::unordered_set<std::string> seen;
  std::vector<std::vector<double>> rows;
  Eigen::Index declared_rows = -1, declared_dim = -1;
  Eigen::Index dim = -1;

  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    if (line.find('\0') != std::string::npos)
      throw DataError(path + ": binary content detected; only the text "
                      "word2vec format is supported");
    std::istringstream ss(line);
    if (first && expect_header) {
      first = false;
      long long n, d;
      std::string extra;
      std::istringstream hs(line);
      if (hs >> n >> d && !(hs >> extra) && n > 0 && d > 0) {
        declared_rows = n;
        declared_dim = d;
        continue;
      }
      // No header after all; fall through and parse as a vector row.
    }
    first = false;
    std::string word;
    ss >> word;
    std::vector<double> vec;
    std::string tok;
    while (ss >> tok) vec.push_back(parse_component(tok, path, line_no));
    if (vec.empty())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": no vector components for word '" + word + "'");
    if (dim < 0) {
      dim = static_cast<Eigen::Index>(vec.size());
      if (declared_dim >= 0 && declared_dim != dim)
        throw DataError(path + ": header declares dimension " +
                        std::to_string(declared_dim) + " but rows have " +
                        std::to_string(dim));
    } else if (static_cast<Eigen::Index>(vec.size()) != dim) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": dimension mismatch for word '" + word + "' (expected " +
                      std::to_string(dim) + ", got " +
                      std::to_string(vec.size()) + ")");
    }
    if (!seen.insert(word).second)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": duplicate word '" + word + "'");
    vocab.push_back(std::move(word));
    rows.push_back(std::move(vec));
  }
  if (vocab.empty()) throw DataError(path + ": no embedding rows found");
  if (declared_rows >= 0 &&
      declared_rows != static_cast<Eigen::Index>(vocab.size()))
    throw DataError(path + ": header declares " + std::to_string(declared_rows) +
                    " rows, found " + std::to_string(vocab.size()));

  Eigen::MatrixXd m(vocab.size(), dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = rows[i][j];
  return EmbeddingSpace(language_id, std::move(vocab), std::move(m));
}

void save_embeddings(const EmbeddingSpace& space, const std::string& path) {
  if (space.size() == 0)
    throw DataError("refusing to write embedding file with empty vocabulary");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write embedding file: " + path);
  out << space.size() << ' ' << space.dim() << '\n';
  for (Eigen::Index i = 0; i < space.size(); ++i) {
    out << space.vocabulary()[i];
    for (Eigen::Index j = 0; j < space.dim(); ++j)
      out << ' ' << format_double(space.vectors()(i, j));
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

NormalizeResult unit_normalize(const EmbeddingSpace& space) {
  Eigen::MatrixXd m = space.vectors();
  std::vector<std::string> zeros;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double norm = m.row(i).norm();
    if (norm == 0.0) {
      zeros.push_back(space.vocabulary()[i]);
      continue;
    }
    // Iterate to a fixed point so normalizing an already-normalized row
    // changes nothing, component-wise exactly.
    for (int iter = 0; iter < 4 && norm != 1.0; ++iter) {
      Eigen::RowVectorXd scaled = m.row(i) / norm;
      if (scaled == m.row(i)) break;
      m.row(i) = scaled;
      norm = m.row(i).norm();
    }
  }
  return {space.with_vectors(std::move(m)), std::move(zeros)};
}

}  // namespace xling
