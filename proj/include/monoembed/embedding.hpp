#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "monoembed/code_model.hpp"
#include "monoembed/error.hpp"

namespace monoembed {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw std::invalid_argument("ragged rows");
      std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// N x M class embeddings; row r belongs to class_ids[r].
struct EmbeddingMatrix {
  std::string app_name;
  std::string provider;
  Matrix values;
  std::vector<int> class_ids;

  std::size_t n() const { return values.rows(); }
  std::size_t m() const { return values.cols(); }

  /// Row of a class id, or -1.
  int row_of(int class_id) const {
    for (std::size_t r = 0; r < class_ids.size(); ++r) {
      if (class_ids[r] == class_id) return static_cast<int>(r);
    }
    return -1;
  }

  void validate() const {
    if (class_ids.size() != values.rows()) fail_input("embedding: class id count does not match row count");
    if (values.rows() > 0 && values.cols() < 1) fail_input("embedding: dimension must be >= 1");
    for (double v : values.data()) {
      if (!std::isfinite(v)) fail_input("embedding: non-finite value");
    }
  }
};

inline std::vector<int> identity_ids(std::size_t n) {
  std::vector<int> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(i);
  return ids;
}

/// Lexicographically sorted vocabulary over all class terms.
inline std::vector<std::string> corpus_vocabulary(const LabeledCorpus& corpus) {
  std::map<std::string, int> seen;
  for (const auto& c : corpus.classes) {
    for (const auto& [t, k] : c.terms) seen[t] += k;
  }
  std::vector<std::string> vocab;
  vocab.reserve(seen.size());
  for (const auto& [t, k] : seen) vocab.push_back(t);
  return vocab;
}

/// Raw term counts, columns = sorted corpus vocabulary.
inline EmbeddingMatrix embed_bow(const LabeledCorpus& corpus) {
  const auto vocab = corpus_vocabulary(corpus);
  if (vocab.empty()) fail_input("no semantic terms in corpus " + corpus.app_name);
  std::map<std::string, std::size_t> col;
  for (std::size_t j = 0; j < vocab.size(); ++j) col[vocab[j]] = j;
  EmbeddingMatrix out{corpus.app_name, "bow", Matrix(corpus.classes.size(), vocab.size()),
                      identity_ids(corpus.classes.size())};
  for (const auto& c : corpus.classes) {
    for (const auto& [t, k] : c.terms) out.values(c.id, col.at(t)) = k;
  }
  return out;
}

/// Smoothed inverse document frequency ln((1 + N) / (1 + df)).
inline double smoothed_idf(std::size_t num_docs, std::size_t doc_freq) {
  return std::log((1.0 + static_cast<double>(num_docs)) / (1.0 + static_cast<double>(doc_freq)));
}

/// Term frequency times smoothed idf. Rows are not normalized.
inline EmbeddingMatrix embed_tfidf(const LabeledCorpus& corpus) {
  EmbeddingMatrix out = embed_bow(corpus);
  out.provider = "tfidf";
  const std::size_t n = out.n(), m = out.m();
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t df = 0;
    for (std::size_t i = 0; i < n; ++i) df += out.values(i, j) > 0 ? 1 : 0;
    const double idf = smoothed_idf(n, df);
    for (std::size_t i = 0; i < n; ++i) out.values(i, j) *= idf;
  }
  return out;
}

/// Dense adjacency rows of a dependency graph (m = n).
inline EmbeddingMatrix embed_graph_rows(const LabeledCorpus& corpus, const DependencyGraph& g, bool symmetric = false) {
  const std::size_t n = corpus.classes.size();
  if (g.n != static_cast<int>(n)) fail_input("graph size does not match corpus " + corpus.app_name);
  EmbeddingMatrix out{corpus.app_name, g.kind == GraphKind::calls ? "calls_row" : "interactions_row",
                      Matrix(n, n), identity_ids(n)};
  for (const auto& e : g.edges) {
    out.values(e.src, e.dst) += static_cast<double>(e.weight);
    if (symmetric) out.values(e.dst, e.src) += static_cast<double>(e.weight);
  }
  return out;
}

inline EmbeddingMatrix embed_calls_row(const LabeledCorpus& corpus, bool symmetric = false) {
  return embed_graph_rows(corpus, corpus.calls, symmetric);
}

inline EmbeddingMatrix embed_interactions_row(const LabeledCorpus& corpus, bool symmetric = false) {
  return embed_graph_rows(corpus, corpus.interactions, symmetric);
}

/// Column-wise z-score with the sample standard deviation (ddof = 1).
/// Zero-variance columns become all zero.
inline Matrix standardize(const Matrix& x) {
  const std::size_t n = x.rows(), m = x.cols();
  if (n < 2) fail_input("standardize needs at least 2 rows");
  Matrix out(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    double mean = 0.0, lo = x(0, j), hi = x(0, j), scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean += x(i, j);
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
      scale = std::max(scale, std::abs(x(i, j)));
    }
    mean /= static_cast<double>(n);
    if (lo == hi) continue;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    // Rounding residue of a constant column.
    if (sd <= 1e-12 * std::max(1.0, scale)) continue;
    for (std::size_t i = 0; i < n; ++i) out(i, j) = (x(i, j) - mean) / sd;
  }
  return out;
}

inline EmbeddingMatrix standardize(const EmbeddingMatrix& e) {
  EmbeddingMatrix out = e;
  out.values = standardize(e.values);
  return out;
}

inline constexpr const char* kEmbeddingFormat = "monoembed-emb-v1";

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_embedding_csv(std::ostream& out, const EmbeddingMatrix& e) {
  out << "# " << kEmbeddingFormat << " app=" << e.app_name << " provider=" << e.provider << '\n';
  out << "class_id";
  for (std::size_t j = 0; j < e.m(); ++j) out << ",d" << j;
  out << '\n';
  for (std::size_t i = 0; i < e.n(); ++i) {
    out << e.class_ids[i];
    for (double v : e.values.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

inline EmbeddingMatrix read_embedding_csv(std::istream& in, const std::string& name = "embedding") {
  EmbeddingMatrix e;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0 || line.find(kEmbeddingFormat) == std::string::npos) {
    fail_input(name + ": missing '# " + std::string(kEmbeddingFormat) + "' header");
  }
  std::istringstream hs(line.substr(2));
  std::string field;
  while (hs >> field) {
    if (field.rfind("app=", 0) == 0) e.app_name = field.substr(4);
    if (field.rfind("provider=", 0) == 0) e.provider = field.substr(9);
  }
  if (!std::getline(in, line) || line.rfind("class_id", 0) != 0) fail_input(name + ": missing column header");
  const std::size_t m = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (m < 1) fail_input(name + ": no embedding columns");
  std::vector<double> data;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t cols = 0;
    bool first = true;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        if (first) {
          e.class_ids.push_back(std::stoi(cell, &used));
        } else {
          data.push_back(std::stod(cell, &used));
          ++cols;
        }
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail_input(name + " line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      first = false;
    }
    if (cols != m) fail_input(name + " line " + std::to_string(lineno) + ": expected " + std::to_string(m) + " values");
  }
  e.values = Matrix(e.class_ids.size(), m);
  std::copy(data.begin(), data.end(), e.values.data().begin());
  e.validate();
  return e;
}

inline void save_embedding(const std::filesystem::path& p, const EmbeddingMatrix& e) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) fail_input("cannot write " + p.string());
  write_embedding_csv(out, e);
}

inline EmbeddingMatrix load_embedding(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail_input("cannot read " + p.string());
  return read_embedding_csv(in, p.string());
}

}  // namespace monoembed
