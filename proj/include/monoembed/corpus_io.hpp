#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "monoembed/code_model.hpp"
#include "monoembed/error.hpp"

namespace monoembed {

inline constexpr const char* kCorpusFormat = "monoembed-corpus-v1";

using ojson = nlohmann::ordered_json;

namespace detail {

inline ojson parse_json_line(const std::string& line, const std::string& what, int lineno) {
  try {
    return ojson::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail_input(what + " line " + std::to_string(lineno) + ": " + e.what());
  }
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) fail_input("cannot write " + p.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail_input("cannot read " + p.string());
  return in;
}

}  // namespace detail

inline void write_corpus(std::ostream& out, const LabeledCorpus& corpus) {
  ojson header;
  header["app"] = corpus.app_name;
  header["n"] = corpus.size();
  header["format"] = kCorpusFormat;
  out << header.dump() << '\n';
  for (const auto& c : corpus.classes) {
    ojson row;
    row["id"] = c.id;
    row["fqn"] = c.fqn;
    row["path"] = c.path;
    row["source"] = c.source;
    ojson methods = ojson::array();
    for (const auto& m : c.methods) {
      ojson jm;
      jm["name"] = m.name;
      jm["params"] = m.param_types;
      jm["ret"] = m.return_type;
      jm["vis"] = m.visibility;
      methods.push_back(std::move(jm));
    }
    row["methods"] = std::move(methods);
    ojson terms = ojson::object();
    for (const auto& [t, k] : c.terms) terms[t] = k;
    row["terms"] = std::move(terms);
    if (corpus.labels) {
      row["label"] = (*corpus.labels)[c.id];
    } else {
      row["label"] = nullptr;
    }
    out << row.dump() << '\n';
  }
}

/// Reads the class rows of a corpus file. Graphs are left empty.
inline LabeledCorpus read_corpus(std::istream& in, const std::string& name = "corpus") {
  LabeledCorpus corpus;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) fail_input(name + ": empty corpus file");
  ++lineno;
  const ojson header = detail::parse_json_line(line, name, lineno);
  if (header.value("format", "") != kCorpusFormat) fail_input(name + ": not a " + std::string(kCorpusFormat) + " file");
  corpus.app_name = header.at("app").get<std::string>();
  const int n = header.at("n").get<int>();
  std::vector<std::string> labels;
  bool any_label = false, any_missing = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const ojson row = detail::parse_json_line(line, name, lineno);
    try {
      ClassUnit c;
      c.id = row.at("id").get<int>();
      c.fqn = row.at("fqn").get<std::string>();
      c.path = row.at("path").get<std::string>();
      c.source = row.at("source").get<std::string>();
      for (const auto& jm : row.at("methods")) {
        c.methods.push_back(MethodSig{jm.at("name").get<std::string>(),
                                      jm.at("params").get<std::vector<std::string>>(),
                                      jm.at("ret").get<std::string>(), jm.at("vis").get<std::string>()});
      }
      for (const auto& [t, k] : row.at("terms").items()) c.terms[t] = k.get<int>();
      if (c.id != static_cast<int>(corpus.classes.size())) fail_input(name + ": ids must be contiguous from 0");
      const auto& label = row.at("label");
      if (label.is_null()) {
        any_missing = true;
        labels.emplace_back();
      } else {
        any_label = true;
        labels.push_back(label.get<std::string>());
      }
      corpus.classes.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      fail_input(name + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (corpus.size() != n) fail_input(name + ": header says n=" + std::to_string(n) + " but found " +
                                     std::to_string(corpus.size()) + " classes");
  if (any_label && any_missing) fail_input(name + ": labels must be present for every class or for none");
  if (any_label) corpus.labels = std::move(labels);
  corpus.calls.n = corpus.interactions.n = n;
  return corpus;
}

inline void write_graph(std::ostream& out, const DependencyGraph& g) {
  ojson header;
  header["kind"] = std::string(to_string(g.kind));
  header["n"] = g.n;
  out << header.dump() << '\n';
  for (const auto& e : g.edges) {
    ojson row;
    row["src"] = e.src;
    row["dst"] = e.dst;
    row["w"] = e.weight;
    out << row.dump() << '\n';
  }
}

inline DependencyGraph read_graph(std::istream& in, const std::string& name = "graph") {
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line)) fail_input(name + ": empty graph file");
  const ojson header = detail::parse_json_line(line, name, lineno);
  DependencyGraph g;
  const std::string kind = header.at("kind").get<std::string>();
  if (kind == "calls") {
    g.kind = GraphKind::calls;
  } else if (kind == "interactions") {
    g.kind = GraphKind::interactions;
  } else {
    fail_input(name + ": unknown graph kind " + kind);
  }
  g.n = header.at("n").get<int>();
  std::map<std::pair<int, int>, std::int64_t> counts;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const ojson row = detail::parse_json_line(line, name, lineno);
    const int src = row.at("src").get<int>(), dst = row.at("dst").get<int>();
    const auto w = row.at("w").get<std::int64_t>();
    if (src < 0 || dst < 0 || src >= g.n || dst >= g.n) fail_input(name + ": edge endpoint out of range");
    if (src == dst || w < 1) fail_input(name + ": self loop or non-positive weight");
    if (!counts.emplace(std::pair{src, dst}, w).second) fail_input(name + ": duplicate edge");
  }
  return DependencyGraph::from_counts(g.kind, g.n, counts);
}

/// Sibling file names used for a corpus bundle: X.corpus.jsonl, X.calls.jsonl, X.interactions.jsonl.
struct CorpusPaths {
  std::filesystem::path corpus, calls, interactions;

  static CorpusPaths from_corpus(const std::filesystem::path& corpus_file) {
    std::string base = corpus_file.string();
    const std::string suffix = ".corpus.jsonl";
    if (base.size() > suffix.size() && base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0) {
      base.resize(base.size() - suffix.size());
    } else if (corpus_file.extension() == ".jsonl") {
      base = (corpus_file.parent_path() / corpus_file.stem()).string();
    }
    return {corpus_file, base + ".calls.jsonl", base + ".interactions.jsonl"};
  }
};

inline void save_corpus(const std::filesystem::path& corpus_file, const LabeledCorpus& corpus) {
  const auto paths = CorpusPaths::from_corpus(corpus_file);
  {
    auto out = detail::open_out(paths.corpus);
    write_corpus(out, corpus);
  }
  {
    auto out = detail::open_out(paths.calls);
    write_graph(out, corpus.calls);
  }
  auto out = detail::open_out(paths.interactions);
  write_graph(out, corpus.interactions);
}

/// Loads a corpus and its graph files; graphs missing on disk are rebuilt from the class sources.
inline LabeledCorpus load_corpus(const std::filesystem::path& corpus_file) {
  const auto paths = CorpusPaths::from_corpus(corpus_file);
  auto in = detail::open_in(paths.corpus);
  LabeledCorpus corpus = read_corpus(in, paths.corpus.string());
  const bool have_calls = std::filesystem::exists(paths.calls);
  const bool have_inter = std::filesystem::exists(paths.interactions);
  if (have_calls && have_inter) {
    auto ci = detail::open_in(paths.calls);
    corpus.calls = read_graph(ci, paths.calls.string());
    auto ii = detail::open_in(paths.interactions);
    corpus.interactions = read_graph(ii, paths.interactions.string());
    if (corpus.calls.n != corpus.size() || corpus.interactions.n != corpus.size()) {
      fail_input(corpus_file.string() + ": graph size does not match class count");
    }
  } else {
    auto graphs = build_graphs(corpus.classes);
    corpus.calls = std::move(graphs.calls);
    corpus.interactions = std::move(graphs.interactions);
  }
  return corpus;
}

/// All *.corpus.jsonl files of a directory, sorted by file name.
inline std::vector<std::filesystem::path> list_corpus_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) fail_input("not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.size() > 13 && name.ends_with(".corpus.jsonl")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<LabeledCorpus> load_corpora(const std::filesystem::path& dir) {
  std::vector<LabeledCorpus> out;
  for (const auto& p : list_corpus_files(dir)) out.push_back(load_corpus(p));
  return out;
}

/// Attaches service labels from a {fqn: service} map; every class needs one and every fqn must exist.
inline void apply_labels(LabeledCorpus& corpus, const std::map<std::string, std::string>& by_fqn,
                         const std::string& name = "labels") {
  std::vector<std::string> labels(corpus.classes.size());
  for (const auto& c : corpus.classes) {
    const auto it = by_fqn.find(c.fqn);
    if (it == by_fqn.end()) fail_input(name + ": no label for " + c.fqn);
    labels[c.id] = it->second;
  }
  for (const auto& [fqn, service] : by_fqn) {
    if (!corpus.find(fqn)) fail_input(name + ": unknown class " + fqn);
  }
  corpus.labels = std::move(labels);
}

inline std::map<std::string, std::string> load_label_map(const std::filesystem::path& p) {
  auto in = detail::open_in(p);
  try {
    return nlohmann::json::parse(in).get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail_input(p.string() + ": " + e.what());
  }
}

}  // namespace monoembed
