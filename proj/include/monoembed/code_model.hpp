#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "monoembed/error.hpp"
#include "monoembed/glob.hpp"
#include "monoembed/java_parser.hpp"
#include "monoembed/terms.hpp"

namespace monoembed {

struct MethodSig {
  std::string name;
  std::vector<std::string> param_types;
  std::string return_type;
  std::string visibility;  // public | protected | package | private

  bool is_constructor() const { return name == return_type; }
  bool operator==(const MethodSig&) const = default;
};

struct ClassUnit {
  int id = 0;
  std::string fqn;
  std::string path;  // relative to the corpus root, '/' separated
  std::string source;
  std::vector<MethodSig> methods;
  TermCounts terms;

  std::string simple_name() const {
    const auto dot = fqn.rfind('.');
    return dot == std::string::npos ? fqn : fqn.substr(dot + 1);
  }
  std::string package() const {
    const auto dot = fqn.rfind('.');
    return dot == std::string::npos ? std::string() : fqn.substr(0, dot);
  }
};

enum class GraphKind { calls, interactions };

inline std::string_view to_string(GraphKind k) { return k == GraphKind::calls ? "calls" : "interactions"; }

struct Edge {
  int src = 0;
  int dst = 0;
  std::int64_t weight = 0;
  bool operator==(const Edge&) const = default;
};

/// Weighted class dependency graph. Edges are kept sorted by (src, dst),
/// one entry per pair, weights >= 1, no self loops.
struct DependencyGraph {
  GraphKind kind = GraphKind::calls;
  int n = 0;
  std::vector<Edge> edges;

  std::int64_t weight(int src, int dst) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{src, dst}, [](const Edge& e, const auto& key) {
      return std::pair{e.src, e.dst} < key;
    });
    return (it != edges.end() && it->src == src && it->dst == dst) ? it->weight : 0;
  }

  static DependencyGraph from_counts(GraphKind kind, int n, const std::map<std::pair<int, int>, std::int64_t>& counts) {
    DependencyGraph g{kind, n, {}};
    for (const auto& [key, w] : counts) {
      if (w > 0 && key.first != key.second) g.edges.push_back({key.first, key.second, w});
    }
    return g;
  }
};

struct LabeledCorpus {
  std::string app_name;
  std::vector<ClassUnit> classes;
  DependencyGraph calls{GraphKind::calls, 0, {}};
  DependencyGraph interactions{GraphKind::interactions, 0, {}};
  std::optional<std::vector<std::string>> labels;  // labels[id] = service name

  int size() const { return static_cast<int>(classes.size()); }

  std::optional<int> find(std::string_view fqn) const {
    for (const auto& c : classes) {
      if (c.fqn == fqn) return c.id;
    }
    return std::nullopt;
  }

  /// Distinct service names, sorted.
  std::vector<std::string> services() const {
    std::set<std::string> s;
    if (labels) s.insert(labels->begin(), labels->end());
    return {s.begin(), s.end()};
  }
};

struct ParseOptions {
  std::vector<std::string> ignore_globs;
  /// Files matching these globs still yield a term-only unit when they fail to parse.
  std::vector<std::string> raw_text_globs;
  TermOptions terms;
};

namespace detail {

inline void collect_methods(const java::TypeDecl& decl, std::vector<MethodSig>& out) {
  for (const auto& m : decl.methods) {
    MethodSig sig;
    sig.name = m.name;
    for (const auto& p : m.params) sig.param_types.push_back(p.type.text);
    sig.return_type = m.is_constructor ? decl.name : m.ret.text;
    sig.visibility = m.visibility;
    out.push_back(std::move(sig));
  }
  for (const auto& inner : decl.nested) collect_methods(inner, out);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail_input("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fqn_of(const std::string& package, const std::string& name) {
  return package.empty() ? name : package + "." + name;
}

}  // namespace detail

/// Parses one file's text into class units (ids unassigned). Throws on parse failure.
inline std::vector<ClassUnit> parse_java_source(std::string_view text, const std::string& rel_path,
                                                const TermOptions& term_opts = {}) {
  const java::CompilationUnit unit = java::parse_java(text);
  std::vector<ClassUnit> out;
  for (const auto& decl : unit.types) {
    ClassUnit cu;
    cu.fqn = detail::fqn_of(unit.package, decl.name);
    cu.path = rel_path;
    const std::size_t b = unit.tokens[decl.first_token].begin;
    const std::size_t e = unit.tokens[decl.last_token].end;
    cu.source = std::string(text.substr(b, e - b));
    detail::collect_methods(decl, cu.methods);
    cu.terms = extract_terms(cu.source, term_opts);
    out.push_back(std::move(cu));
  }
  return out;
}

/// Walks `root` for .java files, one unit per top-level type, ids by sorted fqn.
/// Unparseable files are skipped with a warning.
inline std::vector<ClassUnit> parse_class_units(const std::filesystem::path& root, const ParseOptions& opts = {},
                                                std::vector<std::string>* warnings = nullptr) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) fail_input("not a readable directory: " + root.string());
  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) fail_input("cannot read directory " + root.string() + ": " + ec.message());
  for (const auto& entry : it) {
    if (entry.is_regular_file() && entry.path().extension() == ".java") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  auto warn = [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };
  std::vector<ClassUnit> units;
  for (const auto& file : files) {
    const std::string rel = fs::relative(file, root).generic_string();
    if (glob_any(opts.ignore_globs, rel)) continue;
    const std::string text = detail::read_file(file);
    try {
      auto parsed = parse_java_source(text, rel, opts.terms);
      for (auto& cu : parsed) units.push_back(std::move(cu));
    } catch (const std::runtime_error& err) {
      if (glob_any(opts.raw_text_globs, rel)) {
        ClassUnit cu;
        cu.fqn = file.stem().string();
        cu.path = rel;
        cu.source = text;
        cu.terms = extract_terms(text, opts.terms);
        if (!cu.source.empty()) units.push_back(std::move(cu));
        warn(rel + ": parse failed, kept raw text terms (" + err.what() + ")");
      } else {
        warn(rel + ": skipped, " + err.what());
      }
    }
  }
  std::stable_sort(units.begin(), units.end(), [](const ClassUnit& a, const ClassUnit& b) { return a.fqn < b.fqn; });
  std::vector<ClassUnit> unique;
  for (auto& cu : units) {
    if (!unique.empty() && unique.back().fqn == cu.fqn) {
      warn(cu.path + ": duplicate class " + cu.fqn + " ignored (first seen in " + unique.back().path + ")");
      continue;
    }
    unique.push_back(std::move(cu));
  }
  for (std::size_t i = 0; i < unique.size(); ++i) unique[i].id = static_cast<int>(i);
  return unique;
}

struct CorpusGraphs {
  DependencyGraph calls;
  DependencyGraph interactions;
};

namespace detail {

/// Per-class view used by the graph builder: the re-parsed declaration with
/// nested types folded in.
struct ClassFacts {
  bool parsed = false;
  std::string package;
  std::vector<const java::TypeDecl*> decls;  // top-level first, then nested
  java::CompilationUnit unit;
  std::set<std::string> method_names;
  std::unordered_map<std::string, std::string> field_types;  // field name -> outer simple type
  std::vector<std::string> supertypes;                       // simple names, extends first
};

inline void flatten(const java::TypeDecl& d, std::vector<const java::TypeDecl*>& out) {
  out.push_back(&d);
  for (const auto& inner : d.nested) flatten(inner, out);
}

class GraphBuilder {
 public:
  explicit GraphBuilder(const std::vector<ClassUnit>& classes) : classes_(classes), facts_(classes.size()) {
    for (const auto& c : classes) by_simple_[c.simple_name()].push_back(c.id);
    for (std::size_t i = 0; i < classes.size(); ++i) load(i);
    for (std::size_t i = 0; i < classes.size(); ++i) {
      for (const auto& m : facts_[i].method_names) declaring_[m].push_back(static_cast<int>(i));
    }
  }

  CorpusGraphs build() {
    const int n = static_cast<int>(classes_.size());
    for (int i = 0; i < n; ++i) {
      if (facts_[i].parsed) scan_class(i);
    }
    std::map<std::pair<int, int>, std::int64_t> inter = calls_;
    for (const auto& [key, w] : refs_) inter[key] += w;
    return {DependencyGraph::from_counts(GraphKind::calls, n, calls_),
            DependencyGraph::from_counts(GraphKind::interactions, n, inter)};
  }

 private:
  void load(std::size_t i) {
    ClassFacts& f = facts_[i];
    f.package = classes_[i].package();
    try {
      f.unit = java::parse_java(classes_[i].source);
    } catch (const std::runtime_error&) {
      return;
    }
    if (f.unit.types.empty()) return;
    f.parsed = true;
    flatten(f.unit.types.front(), f.decls);
    for (const auto* d : f.decls) {
      for (const auto& m : d->methods) {
        if (!m.is_constructor) f.method_names.insert(m.name);
      }
      for (const auto& fd : d->fields) {
        for (const auto& name : fd.names) f.field_types[name] = fd.type.names.empty() ? "" : fd.type.names.front();
      }
    }
    const auto& top = f.unit.types.front();
    for (const auto& t : top.extends) f.supertypes.push_back(t.names.front());
    for (const auto& t : top.implements) f.supertypes.push_back(t.names.front());
  }

  /// Corpus id of a simple type name seen from class `from`, or -1 when unknown or ambiguous.
  int resolve_type(int from, const std::string& simple) const {
    auto it = by_simple_.find(simple);
    if (it == by_simple_.end()) return -1;
    if (it->second.size() == 1) return it->second.front();
    int hit = -1;
    for (int cand : it->second) {
      if (classes_[cand].package() == facts_[from].package) {
        if (hit != -1) return -1;
        hit = cand;
      }
    }
    return hit;
  }

  /// Class in `start`'s supertype closure (start included) that declares `method`.
  int declaring_class(int start, const std::string& method) const {
    std::vector<int> queue{start};
    std::set<int> seen{start};
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int c = queue[q];
      if (facts_[c].method_names.count(method)) return c;
      for (const auto& s : facts_[c].supertypes) {
        const int sup = resolve_type(c, s);
        if (sup >= 0 && seen.insert(sup).second) queue.push_back(sup);
      }
    }
    return -1;
  }

  int unique_declarer(const std::string& method) const {
    auto it = declaring_.find(method);
    return (it != declaring_.end() && it->second.size() == 1) ? it->second.front() : -1;
  }

  void add_call(int from, int to) {
    if (to >= 0 && to != from) ++calls_[{from, to}];
  }
  void add_ref(int from, const java::TypeRef& t) {
    for (const auto& name : t.names) {
      const int to = resolve_type(from, name);
      if (to >= 0 && to != from) ++refs_[{from, to}];
    }
  }

  void scan_class(int i) {
    const ClassFacts& f = facts_[i];
    for (const auto* d : f.decls) {
      for (const auto& t : d->extends) add_inheritance(i, t);
      for (const auto& t : d->implements) add_inheritance(i, t);
      for (const auto& fd : d->fields) add_ref(i, fd.type);
      for (const auto& m : d->methods) {
        std::unordered_map<std::string, std::string> locals;
        for (const auto& p : m.params) {
          add_ref(i, p.type);
          locals[p.name] = p.type.names.empty() ? "" : p.type.names.front();
        }
        if (m.has_body) scan_code(i, m.body, locals);
      }
      for (const auto& r : d->code) {
        std::unordered_map<std::string, std::string> locals;
        scan_code(i, r, locals);
      }
    }
  }

  void add_inheritance(int i, const java::TypeRef& t) {
    const int to = resolve_type(i, t.names.front());
    if (to >= 0 && to != i) ++refs_[{i, to}];
  }

  static bool declaration_boundary(const java::Token& prev) {
    return prev.is_op("{") || prev.is_op("}") || prev.is_op(";") || prev.is_op("(") || prev.is_op(",") ||
           prev.is_op(":") || prev.is_kw("final") || prev.is_kw("instanceof");
  }

  static bool ends_type(const java::Token& t) {
    return t.kind == java::TokenKind::identifier || t.is_op(">") || t.is_op("]") ||
           (t.kind == java::TokenKind::keyword && (java::is_primitive_type(t.text) || t.text == "void"));
  }

  void scan_code(int i, java::TokenRange range, std::unordered_map<std::string, std::string>& locals) {
    const auto& toks = facts_[i].unit.tokens;
    using java::TokenKind;
    // Pass 1: local declarations `Type name (= ; , : ) [)`.
    for (std::size_t k = range.begin; k < range.end; ++k) {
      const auto& t = toks[k];
      const bool typeish = t.kind == TokenKind::identifier ||
                           (t.kind == TokenKind::keyword && java::is_primitive_type(t.text));
      if (!typeish) continue;
      if (k > range.begin && !declaration_boundary(toks[k - 1])) continue;
      std::size_t after = 0;
      java::TypeRef type;
      if (!java::Parser::parse_type_at(toks, k, after, type) || after >= range.end) continue;
      if (toks[after].kind != TokenKind::identifier) continue;
      const auto& next = toks[after + 1];
      if (!(next.is_op("=") || next.is_op(";") || next.is_op(",") || next.is_op(":") || next.is_op(")") ||
            next.is_op("["))) {
        continue;
      }
      add_ref(i, type);
      locals[toks[after].text] = type.names.empty() ? "" : type.names.front();
    }
    // Pass 2: invocations.
    for (std::size_t k = range.begin; k < range.end; ++k) {
      const auto& t = toks[k];
      if (t.is_kw("new")) {
        std::size_t after = 0;
        java::TypeRef type;
        if (java::Parser::parse_type_at(toks, k + 1, after, type)) {
          if (toks[after].is_op("(") && !type.names.empty()) add_call(i, resolve_type(i, type.names.front()));
          k = after - 1;
        }
        continue;
      }
      if (t.is_op("::") && k > range.begin && k + 1 < range.end) {
        const auto& m = toks[k + 1];
        if (m.is_kw("new")) {
          add_call(i, resolve_type(i, toks[k - 1].text));
        } else if (m.kind == TokenKind::identifier) {
          resolve_qualified_call(i, k, m.text, locals);
        }
        continue;
      }
      if (t.kind != TokenKind::identifier || k + 1 >= range.end || !toks[k + 1].is_op("(")) continue;
      if (k > range.begin && (toks[k - 1].is_op(".") || toks[k - 1].is_op("::"))) {
        resolve_qualified_call(i, k - 1, t.text, locals);
        continue;
      }
      if (k > range.begin && ends_type(toks[k - 1])) continue;  // a declaration, not a call
      if (facts_[i].method_names.count(t.text)) continue;       // own method
      add_call(i, inherited_target(i, t.text));
    }
  }

  int inherited_target(int i, const std::string& method) const {
    for (const auto& s : facts_[i].supertypes) {
      const int sup = resolve_type(i, s);
      if (sup >= 0) {
        const int d = declaring_class(sup, method);
        if (d >= 0) return d;
      }
    }
    return -1;
  }

  /// `dot` is the index of the '.' or '::' separating receiver and method name.
  void resolve_qualified_call(int i, std::size_t dot, const std::string& method,
                              const std::unordered_map<std::string, std::string>& locals) {
    const auto& toks = facts_[i].unit.tokens;
    if (dot == 0) return;
    const auto& recv = toks[dot - 1];
    using java::TokenKind;
    auto via_type = [&](int type_id) {
      if (type_id < 0) return;
      const int d = declaring_class(type_id, method);
      add_call(i, d >= 0 ? d : type_id);
    };
    if (recv.is_kw("this")) {
      if (!facts_[i].method_names.count(method)) add_call(i, inherited_target(i, method));
      return;
    }
    if (recv.is_kw("super")) {
      add_call(i, inherited_target(i, method));
      return;
    }
    if (recv.kind == TokenKind::identifier) {
      const bool dotted = dot >= 2 && toks[dot - 2].is_op(".");
      if (dotted) {
        if (dot >= 3 && toks[dot - 3].is_kw("this")) {
          auto f = facts_[i].field_types.find(recv.text);
          if (f != facts_[i].field_types.end()) via_type(resolve_type(i, f->second));
          return;
        }
        const int cls = resolve_type(i, recv.text);
        if (cls >= 0) {
          via_type(cls);
        } else {
          add_call(i, unique_declarer(method));
        }
        return;
      }
      if (auto l = locals.find(recv.text); l != locals.end()) {
        if (l->second != "var") {
          via_type(resolve_type(i, l->second));
        } else {
          add_call(i, unique_declarer(method));
        }
        return;
      }
      if (auto f = facts_[i].field_types.find(recv.text); f != facts_[i].field_types.end()) {
        via_type(resolve_type(i, f->second));
        return;
      }
      const int cls = resolve_type(i, recv.text);
      if (cls >= 0) {
        via_type(cls);
        return;
      }
      // Capitalized names are classes outside the corpus (System, Math, ...).
      if (!recv.text.empty() && std::isupper(static_cast<unsigned char>(recv.text.front()))) return;
      add_call(i, unique_declarer(method));
      return;
    }
    // Complex receiver expression: fall back to a corpus-unique method name.
    add_call(i, unique_declarer(method));
  }

  const std::vector<ClassUnit>& classes_;
  std::vector<ClassFacts> facts_;
  std::unordered_map<std::string, std::vector<int>> by_simple_;
  std::unordered_map<std::string, std::vector<int>> declaring_;
  std::map<std::pair<int, int>, std::int64_t> calls_;
  std::map<std::pair<int, int>, std::int64_t> refs_;
};

}  // namespace detail

/// Builds both graphs in one pass over the class sources.
inline CorpusGraphs build_graphs(const std::vector<ClassUnit>& classes) {
  return detail::GraphBuilder(classes).build();
}

inline DependencyGraph build_call_graph(const std::vector<ClassUnit>& classes) { return build_graphs(classes).calls; }

inline DependencyGraph build_interaction_graph(const std::vector<ClassUnit>& classes) {
  return build_graphs(classes).interactions;
}

/// parse + graphs for one source tree.
inline LabeledCorpus analyze_source_tree(const std::filesystem::path& root, std::string app_name,
                                         const ParseOptions& opts = {}, std::vector<std::string>* warnings = nullptr) {
  LabeledCorpus corpus;
  corpus.app_name = std::move(app_name);
  corpus.classes = parse_class_units(root, opts, warnings);
  auto graphs = build_graphs(corpus.classes);
  corpus.calls = std::move(graphs.calls);
  corpus.interactions = std::move(graphs.interactions);
  return corpus;
}

}  // namespace monoembed
