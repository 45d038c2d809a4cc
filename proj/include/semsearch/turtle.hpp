// Turtle subset reader and writer.
//
// Reads: @prefix/@base (and SPARQL-style PREFIX/BASE), <iri>, prefixed names,
// 'a', ';' and ',' lists, quoted literals with language tags or datatypes,
// _:labels, [ ... ] property lists, and ( ... ) collections. Numeric and
// boolean shorthand literals are rejected. Blank nodes are relabeled b0, b1,
// ... in order of first appearance.
//
// Writes one subject block per subject, sorted, with explicit blank node
// labels and list triples (no [] or () sugar).
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semsearch/rdf.hpp"
#include "semsearch/syntax.hpp"

namespace semsearch {

class PrefixMap {
 public:
  // Standard prefixes plus the application namespace.
  static PrefixMap standard() {
    PrefixMap m;
    m.set("rdf", std::string(ns::kRdf));
    m.set("rdfs", std::string(ns::kRdfs));
    m.set("owl", std::string(ns::kOwl));
    m.set("xsd", std::string(ns::kXsd));
    m.set("ex", std::string(ns::kEx));
    return m;
  }

  // Re-declaring a label overwrites it in place.
  void set(std::string label, std::string iri) {
    for (auto& [l, ns] : entries_) {
      if (l == label) {
        ns = std::move(iri);
        return;
      }
    }
    entries_.emplace_back(std::move(label), std::move(iri));
  }

  const std::string* find(std::string_view label) const {
    for (const auto& [l, ns] : entries_) {
      if (l == label) return &ns;
    }
    return nullptr;
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // "label:local" using the longest matching namespace whose remainder is a
  // plain local name; nullopt when no prefix applies.
  std::optional<std::string> compress(std::string_view iri) const {
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& entry : entries_) {
      const auto& ns = entry.second;
      if (ns.empty() || iri.size() < ns.size() || iri.substr(0, ns.size()) != ns) continue;
      if (!plain_local(iri.substr(ns.size())) || !plain_label(entry.first)) continue;
      if (!best || ns.size() > best->second.size()) best = &entry;
    }
    if (!best) return std::nullopt;
    return best->first + ":" + std::string(iri.substr(best->second.size()));
  }

  std::optional<std::string> base;

  friend bool operator==(const PrefixMap&, const PrefixMap&) = default;

 private:
  static bool plain_local(std::string_view local) {
    if (!local.empty() && local.front() == '-') return false;
    return std::all_of(local.begin(), local.end(), [](char c) {
      return syntax::is_alpha(c) || syntax::is_digit(c) || c == '_' || c == '-';
    });
  }
  static bool plain_label(std::string_view label) {
    if (label.empty()) return true;
    if (!syntax::is_alpha(label.front())) return false;
    return std::all_of(label.begin(), label.end(), [](char c) {
      return syntax::is_alpha(c) || syntax::is_digit(c) || c == '_' || c == '-';
    });
  }

  std::vector<std::pair<std::string, std::string>> entries_;
};

struct TurtleDocument {
  Graph graph;
  PrefixMap prefixes;
};

namespace turtle_detail {

inline std::string resolve(const std::optional<std::string>& base, const std::string& ref) {
  if (detail::has_scheme(ref)) return ref;
  if (!base) return ref;
  if (ref.empty()) return *base;
  if (ref[0] == '#') {
    auto hash = base->find('#');
    return base->substr(0, hash) + ref;
  }
  if (ref[0] == '/') {
    // Keep scheme and authority.
    auto scheme_end = base->find("://");
    if (scheme_end == std::string::npos) return *base + ref;
    auto path_start = base->find('/', scheme_end + 3);
    return base->substr(0, path_start) + ref;
  }
  auto slash = base->rfind('/');
  return base->substr(0, slash == std::string::npos ? base->size() : slash + 1) + ref;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : in_(text) {}

  TurtleDocument run() {
    while (true) {
      in_.skip_ws();
      if (in_.at_end()) break;
      statement();
    }
    return {builder_.freeze(), prefixes_};
  }

 private:
  void statement() {
    if (in_.peek() == '@') {
      std::size_t at = in_.pos();
      in_.get();
      std::string word;
      while (syntax::is_alpha(in_.peek())) word += in_.get();
      if (word == "prefix") {
        prefix_body();
      } else if (word == "base") {
        base_body();
      } else {
        in_.fail_at(at, "unknown directive '@" + word + "'");
      }
      in_.skip_ws();
      in_.expect('.');
      return;
    }
    if (sparql_directive("PREFIX")) {
      prefix_body();
      return;
    }
    if (sparql_directive("BASE")) {
      base_body();
      return;
    }
    triples();
    in_.skip_ws();
    in_.expect('.');
  }

  bool sparql_directive(std::string_view keyword) {
    std::size_t start = in_.pos();
    std::string word;
    while (syntax::is_alpha(in_.peek())) word += in_.get();
    if (syntax::iequals(word, keyword) && in_.peek() != ':' && !syntax::is_name_char(in_.peek())) return true;
    in_.reset(start);
    return false;
  }

  void prefix_body() {
    in_.skip_ws();
    std::size_t at = in_.pos();
    std::string label = in_.read_prefix_label();
    if (!in_.consume(':')) in_.fail_at(at, "expected prefix label followed by ':'");
    in_.skip_ws();
    std::string iri = iri_ref();
    prefixes_.set(std::move(label), std::move(iri));
  }

  void base_body() {
    in_.skip_ws();
    prefixes_.base = iri_ref();
  }

  std::string iri_ref() {
    std::size_t at = in_.pos();
    std::string ref = in_.read_iriref();
    std::string iri = resolve(prefixes_.base, ref);
    if (!detail::has_scheme(iri)) in_.fail_at(at, "bad IRI: relative reference <" + ref + "> without @base");
    return iri;
  }

  void triples() {
    in_.skip_ws();
    if (in_.peek() == '[') {
      Term subject = blank_property_list();
      in_.skip_ws();
      if (in_.peek() != '.') predicate_object_list(subject);
      return;
    }
    Term subject = subject_term();
    predicate_object_list(subject);
  }

  Term subject_term() {
    char c = in_.peek();
    if (c == '(') return collection();
    if (c == '_' && in_.peek(1) == ':') return blank_label();
    if (c == '"' || c == '\'') in_.fail("literal in subject position");
    return iri();
  }

  void predicate_object_list(const Term& subject) {
    while (true) {
      in_.skip_ws();
      Term predicate = verb();
      object_list(subject, predicate);
      in_.skip_ws();
      if (!in_.consume(';')) return;
      // Repeated or trailing ';' are allowed.
      while (true) {
        in_.skip_ws();
        if (!in_.consume(';')) break;
      }
      in_.skip_ws();
      char c = in_.peek();
      if (c == '.' || c == ']' || in_.at_end()) return;
    }
  }

  Term verb() {
    if (in_.peek() == 'a') {
      char next = in_.peek(1);
      if (!syntax::is_name_char(next) && next != ':' && next != '.') {
        in_.get();
        return vocab::type;
      }
    }
    if (in_.peek() == '_' && in_.peek(1) == ':') in_.fail("blank node in predicate position");
    if (in_.peek() == '"' || in_.peek() == '\'') in_.fail("literal in predicate position");
    return iri();
  }

  void object_list(const Term& subject, const Term& predicate) {
    while (true) {
      in_.skip_ws();
      Term object = object_term();
      builder_.insert(Triple(subject, predicate, std::move(object)));
      in_.skip_ws();
      if (!in_.consume(',')) return;
    }
  }

  Term object_term() {
    char c = in_.peek();
    if (c == '[') return blank_property_list();
    if (c == '(') return collection();
    if (c == '_' && in_.peek(1) == ':') return blank_label();
    if (c == '"' || c == '\'') return literal();
    return iri();
  }

  Term literal() {
    std::string lexical = in_.read_string();
    if (in_.peek() == '@') {
      in_.get();
      return Term::lang_literal(std::move(lexical), in_.read_lang_tag());
    }
    if (in_.peek() == '^' && in_.peek(1) == '^') {
      in_.get();
      in_.get();
      Term dt = iri();
      if (dt.value() == Term::lang_string()) in_.fail("rdf:langString literal without language tag");
      return Term::literal(std::move(lexical), dt.value());
    }
    return Term::literal(std::move(lexical));
  }

  Term iri() {
    std::size_t at = in_.pos();
    char c = in_.peek();
    if (c == '<') return Term::iri(iri_ref());
    if (syntax::is_digit(c) || c == '+' || c == '-' || (c == '.' && syntax::is_digit(in_.peek(1)))) {
      in_.fail("numeric literals are not supported; quote the value");
    }
    std::string label = in_.read_prefix_label();
    if (!in_.consume(':')) {
      if (label == "true" || label == "false") in_.fail_at(at, "boolean literals are not supported; quote the value");
      if (in_.at_end()) in_.fail_at(at, "unexpected end of input");
      in_.fail_at(at, label.empty() ? "unexpected token" + in_.found() : "unexpected token '" + label + "'");
    }
    const std::string* ns = prefixes_.find(label);
    if (!ns) in_.fail_at(at, "undeclared prefix '" + label + ":'");
    std::string local = in_.read_local_name();
    std::string full = *ns + local;
    if (!detail::has_scheme(full)) in_.fail_at(at, "bad IRI: " + full);
    try {
      return Term::iri(std::move(full));
    } catch (const StructureError& e) {
      in_.fail_at(at, std::string("bad IRI: ") + e.what());
    }
  }

  Term blank_label() {
    in_.get();
    in_.get();
    std::string label;
    while (syntax::is_name_char(in_.peek()) || (in_.peek() == '.' && syntax::is_name_char(in_.peek(1)))) {
      label += in_.get();
    }
    if (label.empty()) in_.fail("empty blank node label");
    auto it = labels_.find(label);
    if (it != labels_.end()) return it->second;
    Term fresh = fresh_blank();
    labels_.emplace(std::move(label), fresh);
    return fresh;
  }

  Term fresh_blank() { return Term::blank("b" + std::to_string(next_blank_++)); }

  Term blank_property_list() {
    in_.expect('[');
    Term node = fresh_blank();
    in_.skip_ws();
    if (in_.consume(']')) return node;
    predicate_object_list(node);
    in_.skip_ws();
    in_.expect(']');
    return node;
  }

  Term collection() {
    in_.expect('(');
    std::vector<Term> items;
    while (true) {
      in_.skip_ws();
      if (in_.at_end()) in_.fail("unterminated collection");
      if (in_.consume(')')) break;
      items.push_back(object_term());
    }
    if (items.empty()) return vocab::nil;
    std::vector<Term> cells;
    for (std::size_t i = 0; i < items.size(); ++i) cells.push_back(fresh_blank());
    for (std::size_t i = 0; i < items.size(); ++i) {
      builder_.insert(Triple(cells[i], vocab::first, items[i]));
      builder_.insert(Triple(cells[i], vocab::rest, i + 1 < items.size() ? cells[i + 1] : vocab::nil));
    }
    return cells.front();
  }

  syntax::Scanner in_;
  GraphBuilder builder_;
  PrefixMap prefixes_;
  std::unordered_map<std::string, Term> labels_;
  std::size_t next_blank_ = 0;
};

}  // namespace turtle_detail

// Throws ParseError with the position of the offending token.
inline TurtleDocument parse_turtle(std::string_view text) {
  return turtle_detail::Parser(text).run();
}

// Renders one term the way the serializer does.
inline std::string render_term(const Term& t, const PrefixMap& prefixes) {
  switch (t.kind()) {
    case TermKind::kIri: {
      if (auto pname = prefixes.compress(t.value())) return *pname;
      return "<" + t.value() + ">";
    }
    case TermKind::kBlank:
      return "_:" + t.value();
    case TermKind::kLiteral: {
      std::string out = "\"" + syntax::escape_string(t.value()) + "\"";
      if (!t.lang().empty()) return out + "@" + t.lang();
      if (t.datatype() != Term::xsd_string()) {
        auto dt = prefixes.compress(t.datatype());
        out += "^^" + (dt ? *dt : "<" + t.datatype() + ">");
      }
      return out;
    }
  }
  return {};
}

inline std::string serialize_turtle(const Graph& g, const PrefixMap& prefixes) {
  std::string out;
  for (const auto& [label, iri] : prefixes.entries()) {
    out += "@prefix " + label + ": <" + iri + "> .\n";
  }

  std::vector<std::tuple<std::string, std::string, std::string>> rows;
  rows.reserve(g.size());
  for (const auto& t : g) {
    std::string p = t.predicate == vocab::type ? "a" : render_term(t.predicate, prefixes);
    rows.emplace_back(render_term(t.subject, prefixes), std::move(p), render_term(t.object, prefixes));
  }
  std::sort(rows.begin(), rows.end());

  if (!rows.empty() && !prefixes.empty()) out += "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [s, p, o] = rows[i];
    bool same_subject_as_prev = i > 0 && std::get<0>(rows[i - 1]) == s;
    bool same_subject_as_next = i + 1 < rows.size() && std::get<0>(rows[i + 1]) == s;
    if (!same_subject_as_prev) {
      out += s + " " + p + " " + o;
    } else {
      out += "    " + p + " " + o;
    }
    out += same_subject_as_next ? " ;\n" : " .\n";
  }
  return out;
}

}  // namespace semsearch
