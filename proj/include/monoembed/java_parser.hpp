#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "monoembed/java_lexer.hpp"

namespace monoembed::java {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A syntactic type use. `text` is the normalized spelling ("List<Owner>"),
/// `names` every simple type name occurring in it (outer type first).
struct TypeRef {
  std::string text;
  std::vector<std::string> names;
};

struct TokenRange {
  std::size_t begin = 0;  // token indices, half open
  std::size_t end = 0;
};

struct Param {
  TypeRef type;
  std::string name;
};

struct FieldDecl {
  TypeRef type;
  std::vector<std::string> names;
};

struct MethodDecl {
  std::string name;
  std::vector<Param> params;
  TypeRef ret;  // for constructors, the class name
  std::string visibility;
  bool is_constructor = false;
  bool has_body = false;
  TokenRange body;
};

enum class TypeKind { class_type, interface_type, enum_type, record_type, annotation_type };

struct TypeDecl {
  TypeKind kind = TypeKind::class_type;
  std::string name;
  std::vector<TypeRef> extends;
  std::vector<TypeRef> implements;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  std::vector<TokenRange> code;  // initializer blocks, field initializers, enum constant args
  std::vector<TypeDecl> nested;
  std::size_t first_token = 0;  // first modifier/annotation of the declaration
  std::size_t last_token = 0;   // closing brace
};

struct CompilationUnit {
  std::string package;
  std::vector<std::string> imports;  // as written, without "import" / "static"
  std::vector<TypeDecl> types;
  std::vector<Token> tokens;
};

/// Declaration-level recursive-descent parser. It recognizes types, members,
/// signatures and method-body extents; statements are left as token ranges.
class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens, std::size_t pos = 0) : toks_(tokens), pos_(pos) {}

  CompilationUnit parse_unit() {
    CompilationUnit unit;
    skip_annotations();
    if (peek().is_kw("package")) {
      ++pos_;
      unit.package = qualified_name();
      expect_op(";");
    }
    while (peek().is_kw("import")) {
      ++pos_;
      if (peek().is_kw("static")) ++pos_;
      std::string name = qualified_name();
      if (peek().is_op(".") && peek(1).is_op("*")) {
        pos_ += 2;
        name += ".*";
      }
      expect_op(";");
      unit.imports.push_back(std::move(name));
    }
    while (!at_end()) {
      if (peek().is_op(";")) {
        ++pos_;
        continue;
      }
      const std::size_t start = pos_;
      std::string vis;
      skip_modifiers(vis);
      if (!starts_type_decl()) throw ParseError(where("expected type declaration"));
      unit.types.push_back(type_decl(start));
    }
    return unit;
  }

  /// Parses a type at `pos`; on success returns the index after it.
  static bool parse_type_at(const std::vector<Token>& toks, std::size_t pos, std::size_t& after, TypeRef& out) {
    Parser p(toks, pos);
    TypeRef t;
    if (!p.try_type(t)) return false;
    after = p.pos_;
    out = std::move(t);
    return true;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_end() const { return peek().kind == TokenKind::end; }

  std::string where(const std::string& msg) const { return msg + " at line " + std::to_string(peek().line); }

  void expect_op(std::string_view op) {
    if (!peek().is_op(op)) throw ParseError(where("expected '" + std::string(op) + "'"));
    ++pos_;
  }

  std::string identifier() {
    if (peek().kind != TokenKind::identifier) throw ParseError(where("expected identifier"));
    return toks_[pos_++].text;
  }

  std::string qualified_name() {
    std::string name = identifier();
    while (peek().is_op(".") && peek(1).kind == TokenKind::identifier) {
      pos_ += 1;
      name += "." + identifier();
    }
    return name;
  }

  /// Skips a balanced group starting at an opening token; returns the index of the closer.
  std::size_t skip_balanced(std::string_view open, std::string_view close) {
    if (!peek().is_op(open)) throw ParseError(where("expected '" + std::string(open) + "'"));
    int depth = 0;
    while (!at_end()) {
      if (peek().is_op(open)) {
        ++depth;
      } else if (peek().is_op(close)) {
        if (--depth == 0) return pos_++;
      }
      ++pos_;
    }
    throw ParseError("unbalanced '" + std::string(open) + "'");
  }

  void skip_annotation() {
    ++pos_;  // '@'
    qualified_name();
    if (peek().is_op("(")) skip_balanced("(", ")");
  }

  void skip_annotations() {
    while (peek().is_op("@") && !peek(1).is_kw("interface")) skip_annotation();
  }

  void skip_modifiers(std::string& visibility) {
    for (;;) {
      const Token& t = peek();
      if (t.is_op("@") && !peek(1).is_kw("interface")) {
        skip_annotation();
      } else if (t.is_kw("public") || t.is_kw("protected") || t.is_kw("private")) {
        visibility = t.text;
        ++pos_;
      } else if (t.is_kw("static") || t.is_kw("final") || t.is_kw("abstract") || t.is_kw("native") ||
                 t.is_kw("synchronized") || t.is_kw("transient") || t.is_kw("volatile") ||
                 t.is_kw("strictfp") || (t.is_kw("default") && !peek(1).is_op(":"))) {
        ++pos_;
      } else if (t.kind == TokenKind::identifier && (t.text == "sealed" || t.text == "non") &&
                 (peek(1).kind == TokenKind::keyword || peek(1).kind == TokenKind::identifier ||
                  peek(1).is_op("-"))) {
        // sealed / non-sealed
        if (t.text == "non" && peek(1).is_op("-")) {
          pos_ += 3;
        } else if (t.text == "sealed") {
          ++pos_;
        } else {
          return;
        }
      } else {
        return;
      }
    }
  }

  bool starts_type_decl() const {
    const Token& t = peek();
    if (t.is_kw("class") || t.is_kw("interface") || t.is_kw("enum")) return true;
    if (t.is_op("@") && peek(1).is_kw("interface")) return true;
    return t.kind == TokenKind::identifier && t.text == "record" && peek(1).kind == TokenKind::identifier &&
           (peek(2).is_op("(") || peek(2).is_op("<"));
  }

  bool try_type_args(TypeRef& t) {
    if (!peek().is_op("<")) return true;
    ++pos_;
    t.text += "<";
    if (peek().is_op(">")) {  // diamond
      ++pos_;
      t.text += ">";
      return true;
    }
    for (bool first = true;; first = false) {
      if (!first) {
        if (!peek().is_op(",")) break;
        ++pos_;
        t.text += ",";
      }
      skip_annotations();
      if (peek().is_op("?")) {
        ++pos_;
        t.text += "?";
        if (peek().is_kw("extends") || peek().is_kw("super")) {
          t.text += " " + peek().text + " ";
          ++pos_;
        } else {
          continue;
        }
      }
      TypeRef inner;
      if (!try_type(inner)) return false;
      t.text += inner.text;
      t.names.insert(t.names.end(), inner.names.begin(), inner.names.end());
      while (peek().is_op("&")) {
        ++pos_;
        TypeRef bound;
        if (!try_type(bound)) return false;
        t.text += "&" + bound.text;
        t.names.insert(t.names.end(), bound.names.begin(), bound.names.end());
      }
    }
    if (!peek().is_op(">")) return false;
    ++pos_;
    t.text += ">";
    return true;
  }

  bool try_type(TypeRef& t) {
    skip_annotations();
    const Token& first = peek();
    if (first.kind == TokenKind::keyword && (is_primitive_type(first.text) || first.text == "void")) {
      t.text = first.text;
      ++pos_;
    } else if (first.kind == TokenKind::identifier) {
      // Only the last segment of a qualified name is a type; package segments are dropped.
      std::string last;
      std::vector<std::string> arg_names;
      for (;;) {
        const std::string seg = identifier();
        if (!t.text.empty()) t.text += ".";
        t.text += seg;
        last = seg;
        TypeRef args;
        if (!try_type_args(args)) return false;
        t.text += args.text;
        arg_names.insert(arg_names.end(), args.names.begin(), args.names.end());
        if (peek().is_op(".") && peek(1).kind == TokenKind::identifier) {
          ++pos_;
          continue;
        }
        break;
      }
      t.names.push_back(last);
      t.names.insert(t.names.end(), arg_names.begin(), arg_names.end());
    } else {
      return false;
    }
    while (peek().is_op("[") && peek(1).is_op("]")) {
      pos_ += 2;
      t.text += "[]";
    }
    if (peek().is_op("...")) {
      ++pos_;
      t.text += "[]";
    }
    return true;
  }

  std::vector<TypeRef> type_list() {
    std::vector<TypeRef> out;
    do {
      if (!out.empty()) ++pos_;
      TypeRef t;
      if (!try_type(t)) throw ParseError(where("expected type"));
      out.push_back(std::move(t));
    } while (peek().is_op(","));
    return out;
  }

  TypeDecl type_decl(std::size_t start) {
    TypeDecl decl;
    decl.first_token = start;
    if (peek().is_op("@")) {
      pos_ += 2;
      decl.kind = TypeKind::annotation_type;
    } else if (peek().is_kw("class")) {
      ++pos_;
    } else if (peek().is_kw("interface")) {
      ++pos_;
      decl.kind = TypeKind::interface_type;
    } else if (peek().is_kw("enum")) {
      ++pos_;
      decl.kind = TypeKind::enum_type;
    } else {
      ++pos_;  // record
      decl.kind = TypeKind::record_type;
    }
    decl.name = identifier();
    if (peek().is_op("<")) skip_balanced("<", ">");
    if (decl.kind == TypeKind::record_type) {
      expect_op("(");
      while (!peek().is_op(")")) {
        skip_annotations();
        TypeRef t;
        if (!try_type(t)) throw ParseError(where("bad record component"));
        decl.fields.push_back(FieldDecl{t, {identifier()}});
        if (peek().is_op(",")) ++pos_;
      }
      ++pos_;
    }
    for (;;) {
      if (peek().is_kw("extends")) {
        ++pos_;
        auto ts = type_list();
        decl.extends.insert(decl.extends.end(), ts.begin(), ts.end());
      } else if (peek().is_kw("implements")) {
        ++pos_;
        auto ts = type_list();
        decl.implements.insert(decl.implements.end(), ts.begin(), ts.end());
      } else if (peek().kind == TokenKind::identifier && peek().text == "permits") {
        ++pos_;
        type_list();
      } else {
        break;
      }
    }
    // In an interface, `extends` lists super-interfaces.
    if (decl.kind == TypeKind::interface_type) {
      decl.implements.insert(decl.implements.begin(), decl.extends.begin(), decl.extends.end());
      decl.extends.clear();
    }
    expect_op("{");
    if (decl.kind == TypeKind::enum_type) enum_constants(decl);
    class_body(decl);
    decl.last_token = pos_;
    expect_op("}");
    return decl;
  }

  void enum_constants(TypeDecl& decl) {
    while (!peek().is_op(";") && !peek().is_op("}")) {
      skip_annotations();
      if (peek().kind != TokenKind::identifier) throw ParseError(where("bad enum constant"));
      ++pos_;
      if (peek().is_op("(")) {
        const std::size_t b = pos_ + 1;
        const std::size_t e = skip_balanced("(", ")");
        decl.code.push_back({b, e});
      }
      if (peek().is_op("{")) {
        // Constant-specific body: treated like an anonymous class, i.e. as code.
        const std::size_t b = pos_ + 1;
        const std::size_t e = skip_balanced("{", "}");
        decl.code.push_back({b, e});
      }
      if (peek().is_op(",")) ++pos_;
    }
    if (peek().is_op(";")) ++pos_;
  }

  void class_body(TypeDecl& decl) {
    const bool interface_like =
        decl.kind == TypeKind::interface_type || decl.kind == TypeKind::annotation_type;
    while (!peek().is_op("}")) {
      if (at_end()) throw ParseError("unexpected end of file in body of " + decl.name);
      if (peek().is_op(";")) {
        ++pos_;
        continue;
      }
      const std::size_t member_start = pos_;
      std::string vis;
      skip_modifiers(vis);
      if (vis.empty()) vis = interface_like ? "public" : "package";
      if (peek().is_op("{")) {
        const std::size_t b = pos_ + 1;
        const std::size_t e = skip_balanced("{", "}");
        decl.code.push_back({b, e});
        continue;
      }
      if (starts_type_decl()) {
        decl.nested.push_back(type_decl(member_start));
        continue;
      }
      if (!member(decl, vis)) recover();
    }
  }

  /// Skips to the end of a malformed member: the next ';' or balanced block at depth 0.
  void recover() {
    while (!at_end() && !peek().is_op("}")) {
      if (peek().is_op(";")) {
        ++pos_;
        return;
      }
      if (peek().is_op("{")) {
        skip_balanced("{", "}");
        return;
      }
      if (peek().is_op("(")) {
        skip_balanced("(", ")");
        continue;
      }
      ++pos_;
    }
  }

  bool member(TypeDecl& decl, const std::string& vis) {
    if (peek().is_op("<")) skip_balanced("<", ">");
    MethodDecl m;
    m.visibility = vis;
    if (peek().kind == TokenKind::identifier && peek().text == decl.name && peek(1).is_op("(")) {
      m.name = identifier();
      m.ret = TypeRef{decl.name, {decl.name}};
      m.is_constructor = true;
    } else if (decl.kind == TypeKind::record_type && peek().kind == TokenKind::identifier &&
               peek().text == decl.name && peek(1).is_op("{")) {
      // compact canonical constructor
      ++pos_;
      const std::size_t b = pos_ + 1;
      const std::size_t e = skip_balanced("{", "}");
      decl.code.push_back({b, e});
      return true;
    } else {
      TypeRef type;
      if (!try_type(type)) return false;
      if (peek().kind != TokenKind::identifier) return false;
      if (!peek(1).is_op("(")) return field(decl, std::move(type));
      m.name = identifier();
      m.ret = std::move(type);
    }
    expect_op("(");
    while (!peek().is_op(")")) {
      skip_annotations();
      while (peek().is_kw("final")) {
        ++pos_;
        skip_annotations();
      }
      Param p;
      if (!try_type(p.type)) return false;
      if (peek().is_kw("this")) {  // receiver parameter
        ++pos_;
      } else {
        p.name = identifier();
        while (peek().is_op("[") && peek(1).is_op("]")) {
          pos_ += 2;
          p.type.text += "[]";
        }
        m.params.push_back(std::move(p));
      }
      if (peek().is_op(",")) {
        ++pos_;
      } else if (!peek().is_op(")")) {
        return false;
      }
    }
    ++pos_;
    while (peek().is_op("[") && peek(1).is_op("]")) pos_ += 2;
    if (peek().is_kw("throws")) {
      ++pos_;
      type_list();
    }
    if (peek().is_op("{")) {
      m.has_body = true;
      m.body.begin = pos_ + 1;
      m.body.end = skip_balanced("{", "}");
    } else if (peek().is_kw("default")) {
      while (!at_end() && !peek().is_op(";")) ++pos_;
      expect_op(";");
    } else {
      expect_op(";");
    }
    decl.methods.push_back(std::move(m));
    return true;
  }

  bool field(TypeDecl& decl, TypeRef type) {
    FieldDecl f;
    f.type = std::move(type);
    for (;;) {
      f.names.push_back(identifier());
      while (peek().is_op("[") && peek(1).is_op("]")) pos_ += 2;
      if (peek().is_op("=")) {
        ++pos_;
        const std::size_t b = pos_;
        int depth = 0;
        while (!at_end()) {
          const Token& t = peek();
          if (t.is_op("(") || t.is_op("{") || t.is_op("[")) ++depth;
          if (t.is_op(")") || t.is_op("}") || t.is_op("]")) {
            if (depth == 0) return false;
            --depth;
          }
          if (depth == 0 && (t.is_op(",") || t.is_op(";"))) break;
          ++pos_;
        }
        decl.code.push_back({b, pos_});
      }
      if (peek().is_op(",")) {
        ++pos_;
        continue;
      }
      break;
    }
    if (!peek().is_op(";")) return false;
    ++pos_;
    decl.fields.push_back(std::move(f));
    return true;
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

/// Tokenizes and parses one compilation unit. Throws LexError or ParseError.
inline CompilationUnit parse_java(std::string_view source) {
  std::vector<Token> tokens = tokenize(source);
  CompilationUnit unit = Parser(tokens).parse_unit();
  unit.tokens = std::move(tokens);
  return unit;
}

}  // namespace monoembed::java
