// SELECT-only SPARQL subset: basic graph patterns, FILTER with = != && || !
// CONTAINS REGEX LCASE STR, ORDER BY on one variable, LIMIT.
#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "semsearch/rdf.hpp"
#include "semsearch/syntax.hpp"
#include "semsearch/turtle.hpp"

namespace semsearch {

struct Variable {
  std::string name;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Term, Variable>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
};

struct FilterExpr {
  enum class Op { kVariable, kConstant, kEqual, kNotEqual, kAnd, kOr, kNot, kContains, kRegex, kLcase, kStr };

  Op op;
  std::string variable;           // kVariable
  std::optional<Term> constant;   // kConstant
  std::vector<FilterExpr> args;   // operands and function arguments

  static FilterExpr var(std::string name) { return {Op::kVariable, std::move(name), std::nullopt, {}}; }
  static FilterExpr lit(Term t) { return {Op::kConstant, {}, std::move(t), {}}; }
  static FilterExpr call(Op op, std::vector<FilterExpr> args) { return {op, {}, std::nullopt, std::move(args)}; }

  void collect_variables(std::set<std::string>& out) const {
    if (op == Op::kVariable) out.insert(variable);
    for (const auto& a : args) a.collect_variables(out);
  }
};

enum class SortOrder : std::uint8_t { kAscending, kDescending };

struct OrderBy {
  std::string variable;
  SortOrder order = SortOrder::kAscending;
};

struct Query {
  PrefixMap prefixes;
  bool select_all = false;
  bool distinct = false;
  std::vector<std::string> projection;  // empty when select_all
  std::vector<TriplePattern> where;
  std::vector<FilterExpr> filters;
  std::optional<OrderBy> order_by;
  std::optional<std::size_t> limit;

  // Pattern variables in order of first appearance.
  std::vector<std::string> pattern_variables() const {
    std::vector<std::string> out;
    auto note = [&](const PatternTerm& pt) {
      if (const auto* v = std::get_if<Variable>(&pt)) {
        if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
      }
    };
    for (const auto& tp : where) {
      note(tp.subject);
      note(tp.predicate);
      note(tp.object);
    }
    return out;
  }

  std::vector<std::string> header() const { return select_all ? pattern_variables() : projection; }
};

struct SolutionTable {
  std::vector<std::string> header;
  // Each row binds exactly the header variables, in header order.
  std::vector<std::vector<Term>> rows;

  std::size_t column(std::string_view name) const {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? header.size() : static_cast<std::size_t>(it - header.begin());
  }
};

namespace sparql_detail {

class QueryParser {
 public:
  QueryParser(std::string_view text, PrefixMap initial) : in_(text) { query_.prefixes = std::move(initial); }

  Query run() {
    prologue();
    expect_keyword("SELECT");
    ws();
    if (keyword("DISTINCT")) query_.distinct = true;
    ws();
    std::size_t projection_at = in_.pos();
    if (in_.consume('*')) {
      query_.select_all = true;
    } else {
      while (true) {
        ws();
        if (in_.peek() != '?' && in_.peek() != '$') break;
        query_.projection.push_back(variable().name);
      }
      if (query_.projection.empty()) in_.fail("expected projection variables or '*'" + in_.found());
    }
    ws();
    keyword("WHERE");
    ws();
    group();
    ws();
    std::size_t order_at = in_.pos();
    if (keyword("ORDER")) {
      ws();
      expect_keyword("BY");
      ws();
      OrderBy ob;
      bool ascending = keyword("ASC");
      bool descending = !ascending && keyword("DESC");
      if (descending) ob.order = SortOrder::kDescending;
      if (ascending || descending) {
        ws();
        in_.expect('(');
        ws();
        ob.variable = variable().name;
        ws();
        in_.expect(')');
      } else {
        ob.variable = variable().name;
      }
      query_.order_by = ob;
    }
    ws();
    if (keyword("LIMIT")) {
      ws();
      std::string digits;
      while (syntax::is_digit(in_.peek())) digits += in_.get();
      if (digits.empty()) in_.fail("expected non-negative integer after LIMIT" + in_.found());
      try {
        query_.limit = static_cast<std::size_t>(std::stoull(digits));
      } catch (const std::out_of_range&) {
        in_.fail("LIMIT out of range");
      }
    }
    ws();
    if (!in_.at_end()) in_.fail("unexpected trailing input" + in_.found());

    auto vars = query_.pattern_variables();
    auto known = [&](const std::string& v) { return std::find(vars.begin(), vars.end(), v) != vars.end(); };
    for (const auto& v : query_.projection) {
      if (!known(v)) in_.fail_at(projection_at, "projected variable ?" + v + " does not occur in the WHERE clause");
    }
    for (std::size_t i = 0; i < query_.filters.size(); ++i) {
      std::set<std::string> used;
      query_.filters[i].collect_variables(used);
      for (const auto& v : used) {
        if (!known(v)) in_.fail_at(filter_positions_[i], "filter variable ?" + v + " does not occur in any pattern");
      }
    }
    if (query_.order_by && !known(query_.order_by->variable)) {
      in_.fail_at(order_at, "ORDER BY variable ?" + query_.order_by->variable + " does not occur in any pattern");
    }
    return std::move(query_);
  }

 private:
  void ws() { in_.skip_ws(); }

  // Case-insensitive keyword followed by a non-name character.
  bool keyword(std::string_view kw) {
    std::size_t start = in_.pos();
    std::string word;
    while (syntax::is_alpha(in_.peek())) word += in_.get();
    if (syntax::iequals(word, kw) && !syntax::is_name_char(in_.peek()) && in_.peek() != ':') return true;
    in_.reset(start);
    return false;
  }

  void expect_keyword(std::string_view kw) {
    ws();
    if (!keyword(kw)) in_.fail("expected " + std::string(kw) + in_.found());
  }

  void prologue() {
    while (true) {
      ws();
      if (keyword("PREFIX")) {
        ws();
        std::size_t at = in_.pos();
        std::string label = in_.read_prefix_label();
        if (!in_.consume(':')) in_.fail_at(at, "expected prefix label followed by ':'");
        ws();
        query_.prefixes.set(std::move(label), iri_ref());
      } else if (keyword("BASE")) {
        ws();
        query_.prefixes.base = iri_ref();
      } else {
        return;
      }
    }
  }

  std::string iri_ref() {
    std::size_t at = in_.pos();
    std::string iri = turtle_detail::resolve(query_.prefixes.base, in_.read_iriref());
    if (!detail::has_scheme(iri)) in_.fail_at(at, "bad IRI: relative reference without BASE");
    return iri;
  }

  Variable variable() {
    if (!in_.consume('?') && !in_.consume('$')) in_.fail("expected variable" + in_.found());
    std::string name;
    while (syntax::is_alpha(in_.peek()) || syntax::is_digit(in_.peek()) || in_.peek() == '_') name += in_.get();
    if (name.empty()) in_.fail("empty variable name");
    return {name};
  }

  void group() {
    in_.expect('{');
    while (true) {
      ws();
      if (in_.consume('}')) return;
      if (in_.at_end()) in_.fail("unterminated group, expected '}'");
      if (in_.consume('.')) continue;
      std::size_t at = in_.pos();
      if (keyword("FILTER")) {
        ws();
        filter_positions_.push_back(at);
        if (in_.peek() == '(') {
          in_.get();
          query_.filters.push_back(expression());
          ws();
          in_.expect(')');
        } else {
          query_.filters.push_back(primary());
        }
        continue;
      }
      triples_same_subject();
    }
  }

  void triples_same_subject() {
    PatternTerm subject = pattern_term(Slot::kSubject);
    while (true) {
      ws();
      PatternTerm predicate = pattern_term(Slot::kPredicate);
      while (true) {
        ws();
        PatternTerm object = pattern_term(Slot::kObject);
        query_.where.push_back({subject, predicate, std::move(object)});
        ws();
        if (!in_.consume(',')) break;
      }
      ws();
      if (!in_.consume(';')) return;
      ws();
      char c = in_.peek();
      if (c == '.' || c == '}') return;
    }
  }

  enum class Slot { kSubject, kPredicate, kObject };

  PatternTerm pattern_term(Slot slot) {
    ws();
    char c = in_.peek();
    if (c == '?' || c == '$') return variable();
    if (c == '_' && in_.peek(1) == ':') in_.fail("blank nodes are not supported in queries; use a variable");
    if (c == '[' || c == '(') in_.fail("blank nodes are not supported in queries; use a variable");
    if (c == '"' || c == '\'') {
      if (slot != Slot::kObject) in_.fail("literal is only allowed in object position");
      return literal();
    }
    if (slot == Slot::kPredicate && c == 'a' && !syntax::is_name_char(in_.peek(1)) && in_.peek(1) != ':') {
      in_.get();
      return vocab::type;
    }
    if (c == '}' || c == '.' || c == ';' || c == ',' || in_.at_end()) {
      in_.fail(std::string(slot == Slot::kPredicate ? "expected predicate" : "expected term") + in_.found());
    }
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
    if (in_.peek() == '<') return Term::iri(iri_ref());
    std::string label = in_.read_prefix_label();
    if (!in_.consume(':')) {
      in_.fail_at(at, label.empty() ? "unexpected token" + in_.found() : "unexpected token '" + label + "'");
    }
    const std::string* ns = query_.prefixes.find(label);
    if (!ns) in_.fail_at(at, "undeclared prefix '" + label + ":'");
    std::string full = *ns + in_.read_local_name();
    try {
      return Term::iri(std::move(full));
    } catch (const StructureError& e) {
      in_.fail_at(at, std::string("bad IRI: ") + e.what());
    }
  }

  // expression := and ( '||' and )*
  FilterExpr expression() {
    FilterExpr lhs = conjunction();
    while (true) {
      ws();
      if (!in_.starts_with("||")) return lhs;
      in_.get();
      in_.get();
      lhs = FilterExpr::call(FilterExpr::Op::kOr, {std::move(lhs), conjunction()});
    }
  }

  FilterExpr conjunction() {
    FilterExpr lhs = relational();
    while (true) {
      ws();
      if (!in_.starts_with("&&")) return lhs;
      in_.get();
      in_.get();
      lhs = FilterExpr::call(FilterExpr::Op::kAnd, {std::move(lhs), relational()});
    }
  }

  FilterExpr relational() {
    FilterExpr lhs = unary();
    ws();
    if (in_.starts_with("!=")) {
      in_.get();
      in_.get();
      return FilterExpr::call(FilterExpr::Op::kNotEqual, {std::move(lhs), unary()});
    }
    if (in_.consume('=')) return FilterExpr::call(FilterExpr::Op::kEqual, {std::move(lhs), unary()});
    return lhs;
  }

  FilterExpr unary() {
    ws();
    if (in_.peek() == '!' && in_.peek(1) != '=') {
      in_.get();
      return FilterExpr::call(FilterExpr::Op::kNot, {unary()});
    }
    return primary();
  }

  FilterExpr primary() {
    ws();
    char c = in_.peek();
    if (c == '(') {
      in_.get();
      FilterExpr inner = expression();
      ws();
      in_.expect(')');
      return inner;
    }
    if (c == '?' || c == '$') return FilterExpr::var(variable().name);
    if (c == '"' || c == '\'') return FilterExpr::lit(literal());
    if (c == '<') return FilterExpr::lit(iri());
    std::size_t at = in_.pos();
    std::string name;
    while (syntax::is_alpha(in_.peek()) || syntax::is_digit(in_.peek()) || in_.peek() == '_') name += in_.get();
    ws();
    if (!name.empty() && in_.peek() == '(') {
      struct Fn {
        std::string_view name;
        FilterExpr::Op op;
        std::size_t min_args, max_args;
      };
      static constexpr Fn kFunctions[] = {
          {"CONTAINS", FilterExpr::Op::kContains, 2, 2},
          {"REGEX", FilterExpr::Op::kRegex, 2, 3},
          {"LCASE", FilterExpr::Op::kLcase, 1, 1},
          {"STR", FilterExpr::Op::kStr, 1, 1},
      };
      const Fn* fn = nullptr;
      for (const auto& f : kFunctions) {
        if (syntax::iequals(f.name, name)) fn = &f;
      }
      if (!fn) in_.fail_at(at, "unknown function " + name);
      in_.get();
      std::vector<FilterExpr> args;
      ws();
      if (!in_.consume(')')) {
        while (true) {
          args.push_back(expression());
          ws();
          if (in_.consume(')')) break;
          in_.expect(',');
        }
      }
      if (args.size() < fn->min_args || args.size() > fn->max_args) {
        in_.fail_at(at, "wrong number of arguments to " + std::string(fn->name));
      }
      return FilterExpr::call(fn->op, std::move(args));
    }
    in_.reset(at);
    if (!name.empty() || c == ':') return FilterExpr::lit(iri());
    in_.fail("expected expression" + in_.found());
  }

  syntax::Scanner in_;
  Query query_;
  std::vector<std::size_t> filter_positions_;
};

// Result of evaluating a filter sub-expression; nullopt is an error.
using Value = std::variant<bool, Term>;

inline bool is_string_literal(const Term& t) {
  return t.is_literal() && (t.datatype() == Term::xsd_string() || t.datatype() == Term::lang_string());
}

class Evaluator {
 public:
  std::optional<Value> eval(const FilterExpr& e, const std::map<std::string, Term>& row) {
    using Op = FilterExpr::Op;
    switch (e.op) {
      case Op::kVariable: {
        auto it = row.find(e.variable);
        if (it == row.end()) return std::nullopt;
        return Value(it->second);
      }
      case Op::kConstant:
        return Value(*e.constant);
      case Op::kEqual:
      case Op::kNotEqual: {
        auto a = eval(e.args[0], row);
        auto b = eval(e.args[1], row);
        if (!a || !b || a->index() != b->index()) return std::nullopt;
        bool eq = *a == *b;
        return Value(e.op == Op::kEqual ? eq : !eq);
      }
      case Op::kAnd:
      case Op::kOr: {
        auto a = boolean(e.args[0], row);
        auto b = boolean(e.args[1], row);
        // SPARQL three-valued logic: a definite answer beats an error.
        if (e.op == Op::kAnd) {
          if ((a && !*a) || (b && !*b)) return Value(false);
          if (!a || !b) return std::nullopt;
          return Value(true);
        }
        if ((a && *a) || (b && *b)) return Value(true);
        if (!a || !b) return std::nullopt;
        return Value(false);
      }
      case Op::kNot: {
        auto a = boolean(e.args[0], row);
        if (!a) return std::nullopt;
        return Value(!*a);
      }
      case Op::kContains: {
        auto a = string_arg(e.args[0], row);
        auto b = string_arg(e.args[1], row);
        if (!a || !b) return std::nullopt;
        return Value(a->value().find(b->value()) != std::string::npos);
      }
      case Op::kRegex: {
        auto text = string_arg(e.args[0], row);
        auto pattern = string_arg(e.args[1], row);
        std::string flags;
        if (e.args.size() == 3) {
          auto f = string_arg(e.args[2], row);
          if (!f) return std::nullopt;
          flags = f->value();
        }
        if (!text || !pattern || (flags != "" && flags != "i")) return std::nullopt;
        const std::regex* re = compile(pattern->value(), flags == "i");
        if (!re) return std::nullopt;
        return Value(std::regex_search(text->value(), *re));
      }
      case Op::kLcase: {
        auto a = string_arg(e.args[0], row);
        if (!a) return std::nullopt;
        std::string lower = a->value();
        for (auto& c : lower) c = syntax::to_lower(c);
        if (!a->lang().empty()) return Value(Term::lang_literal(std::move(lower), a->lang()));
        return Value(Term::literal(std::move(lower)));
      }
      case Op::kStr: {
        auto a = eval(e.args[0], row);
        if (!a) return std::nullopt;
        const Term* t = std::get_if<Term>(&*a);
        if (!t || t->is_blank()) return std::nullopt;
        return Value(Term::literal(t->value()));
      }
    }
    return std::nullopt;
  }

  std::optional<bool> boolean(const FilterExpr& e, const std::map<std::string, Term>& row) {
    auto v = eval(e, row);
    if (!v) return std::nullopt;
    if (const bool* b = std::get_if<bool>(&*v)) return *b;
    return std::nullopt;
  }

 private:
  std::optional<Term> string_arg(const FilterExpr& e, const std::map<std::string, Term>& row) {
    auto v = eval(e, row);
    if (!v) return std::nullopt;
    const Term* t = std::get_if<Term>(&*v);
    if (!t || !is_string_literal(*t)) return std::nullopt;
    return *t;
  }

  // Patterns with backreferences are rejected.
  const std::regex* compile(const std::string& pattern, bool icase) {
    auto key = std::make_pair(pattern, icase);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second.get();
    std::unique_ptr<std::regex> re;
    bool backref = false;
    for (std::size_t i = 0; i + 1 < pattern.size(); ++i) {
      if (pattern[i] == '\\') {
        if (syntax::is_digit(pattern[i + 1]) && pattern[i + 1] != '0') backref = true;
        ++i;
      }
    }
    if (!backref) {
      try {
        auto flags = std::regex::ECMAScript;
        if (icase) flags |= std::regex::icase;
        re = std::make_unique<std::regex>(pattern, flags);
      } catch (const std::regex_error&) {
        re.reset();
      }
    }
    return cache_.emplace(key, std::move(re)).first->second.get();
  }

  std::map<std::pair<std::string, bool>, std::unique_ptr<std::regex>> cache_;
};

// Nested-loop join with most-bound-pattern-first ordering.
class Join {
 public:
  Join(const Graph& g, const std::vector<TriplePattern>& patterns, const std::vector<std::string>& vars)
      : g_(g), patterns_(patterns), vars_(vars), binding_(vars.size()), used_(patterns.size(), false) {}

  std::vector<std::vector<Term>> run() {
    solve(0);
    return std::move(out_);
  }

 private:
  std::size_t slot(const std::string& name) const {
    return static_cast<std::size_t>(std::find(vars_.begin(), vars_.end(), name) - vars_.begin());
  }

  TermPattern resolve(const PatternTerm& pt) const {
    if (const auto* t = std::get_if<Term>(&pt)) return *t;
    return binding_[slot(std::get<Variable>(pt).name)];
  }

  void solve(std::size_t depth) {
    if (depth == patterns_.size()) {
      std::vector<Term> row;
      row.reserve(vars_.size());
      for (const auto& b : binding_) row.push_back(*b);
      out_.push_back(std::move(row));
      return;
    }
    std::size_t best = patterns_.size();
    int best_bound = -1;
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      if (used_[i]) continue;
      const auto& tp = patterns_[i];
      int bound = (resolve(tp.subject) ? 1 : 0) + (resolve(tp.predicate) ? 1 : 0) + (resolve(tp.object) ? 1 : 0);
      if (bound > best_bound) {
        best = i;
        best_bound = bound;
      }
    }
    const auto& tp = patterns_[best];
    used_[best] = true;
    auto s = resolve(tp.subject);
    auto p = resolve(tp.predicate);
    auto o = resolve(tp.object);
    if ((!p || p->is_iri()) && (!s || !s->is_literal())) {
      for (const auto& t : g_.match(s, p, o)) {
        std::vector<std::size_t> newly_bound;
        bool ok = bind(tp.subject, t.subject, newly_bound) && bind(tp.predicate, t.predicate, newly_bound) &&
                  bind(tp.object, t.object, newly_bound);
        if (ok) solve(depth + 1);
        for (auto idx : newly_bound) binding_[idx].reset();
      }
    }
    used_[best] = false;
  }

  bool bind(const PatternTerm& pt, const Term& value, std::vector<std::size_t>& newly_bound) {
    const auto* v = std::get_if<Variable>(&pt);
    if (!v) return true;
    auto idx = slot(v->name);
    if (binding_[idx]) return *binding_[idx] == value;
    binding_[idx] = value;
    newly_bound.push_back(idx);
    return true;
  }

  const Graph& g_;
  const std::vector<TriplePattern>& patterns_;
  const std::vector<std::string>& vars_;
  std::vector<std::optional<Term>> binding_;
  std::vector<bool> used_;
  std::vector<std::vector<Term>> out_;
};

}  // namespace sparql_detail

// Throws ParseError. `prefixes` seeds the prefix table before the query's own
// PREFIX declarations.
inline Query parse_query(std::string_view text, PrefixMap prefixes = {}) {
  return sparql_detail::QueryParser(text, std::move(prefixes)).run();
}

inline SolutionTable execute(const Query& q, const Graph& g) {
  auto vars = q.pattern_variables();
  auto solutions = sparql_detail::Join(g, q.where, vars).run();

  if (!q.filters.empty()) {
    sparql_detail::Evaluator eval;
    std::erase_if(solutions, [&](const std::vector<Term>& row) {
      std::map<std::string, Term> named;
      for (std::size_t i = 0; i < vars.size(); ++i) named.emplace(vars[i], row[i]);
      for (const auto& f : q.filters) {
        auto ok = eval.boolean(f, named);
        if (!ok || !*ok) return true;
      }
      return false;
    });
  }

  if (q.order_by) {
    auto key = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), q.order_by->variable) - vars.begin());
    bool descending = q.order_by->order == SortOrder::kDescending;
    std::stable_sort(solutions.begin(), solutions.end(), [&](const auto& a, const auto& b) {
      if (a[key] != b[key]) return descending ? b[key] < a[key] : a[key] < b[key];
      return a < b;
    });
  }

  SolutionTable table;
  table.header = q.header();
  std::vector<std::size_t> columns;
  for (const auto& h : table.header) {
    columns.push_back(static_cast<std::size_t>(std::find(vars.begin(), vars.end(), h) - vars.begin()));
  }
  std::set<std::vector<Term>> seen;
  for (const auto& s : solutions) {
    if (q.limit && table.rows.size() >= *q.limit) break;
    std::vector<Term> row;
    row.reserve(columns.size());
    for (auto c : columns) row.push_back(s[c]);
    if (q.distinct && !seen.insert(row).second) continue;
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Plain-text table with prefix-compressed terms.
inline std::string format_table(const SolutionTable& table, const PrefixMap& prefixes) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head;
  for (const auto& h : table.header) head.push_back("?" + h);
  cells.push_back(head);
  for (const auto& row : table.rows) {
    std::vector<std::string> line;
    for (const auto& t : row) line.push_back(render_term(t, prefixes));
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(table.header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      out += cells[r][i];
      if (i + 1 < cells[r].size()) out += std::string(width[i] - cells[r][i].size() + 2, ' ');
    }
    out += "\n";
    if (r == 0) {
      for (std::size_t i = 0; i < width.size(); ++i) {
        out += std::string(width[i], '-');
        if (i + 1 < width.size()) out += "  ";
      }
      out += "\n";
    }
  }
  out += std::to_string(table.rows.size()) + (table.rows.size() == 1 ? " row\n" : " rows\n");
  return out;
}

}  // namespace semsearch
