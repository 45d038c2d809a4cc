// Forward-chaining RDFS/OWL-lite materialization, consistency checking, and
// class hierarchy queries over materialized graphs.
#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "semsearch/rdf.hpp"

namespace semsearch {

enum class Rule : std::uint8_t {
  kEqc,            // A equivalentClass B |- A subClassOf B, B subClassOf A
  kScoTrans,       // subClassOf is transitive
  kScoType,        // x type A, A subClassOf B |- x type B
  kSpoTrans,       // subPropertyOf is transitive
  kSpoInh,         // x p y, p subPropertyOf q |- x q y
  kDom,            // p domain C, x p y |- x type C
  kRng,            // p range C, x p y |- y type C   (y not a literal)
  kDisjSym,        // disjointWith is symmetric
  kDiffSym,        // differentFrom is symmetric
  kAvf,            // C subClassOf (p only D), x type C, x p y |- y type D
  kSvf,            // r = (p some D), x p y, y type D |- x type r
  kAllDiffExpand,  // AllDifferent distinctMembers (m1 .. mn) |- mi differentFrom mj
};

inline constexpr std::array<std::pair<Rule, std::string_view>, 12> kRuleNames = {{
    {Rule::kEqc, "EQC"},
    {Rule::kScoTrans, "SCO-TRANS"},
    {Rule::kScoType, "SCO-TYPE"},
    {Rule::kSpoTrans, "SPO-TRANS"},
    {Rule::kSpoInh, "SPO-INH"},
    {Rule::kDom, "DOM"},
    {Rule::kRng, "RNG"},
    {Rule::kDisjSym, "DISJ-SYM"},
    {Rule::kDiffSym, "DIFF-SYM"},
    {Rule::kAvf, "AVF"},
    {Rule::kSvf, "SVF"},
    {Rule::kAllDiffExpand, "ALLDIFF-EXPAND"},
}};

inline std::string_view rule_name(Rule r) { return kRuleNames[static_cast<std::size_t>(r)].second; }

inline std::optional<Rule> parse_rule(std::string_view name) {
  for (const auto& [rule, id] : kRuleNames) {
    if (id == name) return rule;
  }
  return std::nullopt;
}

class RuleSet {
 public:
  static RuleSet all() {
    RuleSet s;
    s.bits_.set();
    return s;
  }
  static RuleSet none() { return RuleSet(); }

  // Throws std::invalid_argument for identifiers outside the catalog.
  static RuleSet from_names(const std::vector<std::string>& names) {
    RuleSet s;
    for (const auto& n : names) {
      auto r = parse_rule(n);
      if (!r) throw std::invalid_argument("unknown rule identifier: " + n);
      s.enable(*r);
    }
    return s;
  }

  RuleSet& enable(Rule r) {
    bits_.set(static_cast<std::size_t>(r));
    return *this;
  }
  RuleSet& disable(Rule r) {
    bits_.reset(static_cast<std::size_t>(r));
    return *this;
  }
  bool has(Rule r) const { return bits_.test(static_cast<std::size_t>(r)); }

  friend bool operator==(const RuleSet&, const RuleSet&) = default;

 private:
  std::bitset<kRuleNames.size()> bits_;
};

struct MaterializeReport {
  Graph graph;
  // Diagnostics for inputs a rule had to skip (malformed rdf:List).
  std::vector<std::string> warnings;
};

namespace reasoner_detail {

struct PairHash {
  std::size_t operator()(const std::pair<Term, Term>& p) const {
    std::size_t seed = TermHash{}(p.first);
    detail::hash_combine(seed, TermHash{}(p.second));
    return seed;
  }
};

// Semi-naive closure: each newly derived triple is joined once against the
// current store through the indexes below.
class Closure {
 public:
  explicit Closure(const RuleSet& rules) : rules_(rules) {}

  MaterializeReport run(const Graph& input) {
    for (const auto& t : input) add(t);
    while (true) {
      while (!agenda_.empty()) {
        Triple t = std::move(agenda_.front());
        agenda_.pop_front();
        fire(t);
        for (auto& [s, p, o] : pending_) add(s, p, o);
        pending_.clear();
      }
      if (!lists_dirty_ || !rules_.has(Rule::kAllDiffExpand)) break;
      lists_dirty_ = false;
      expand_all_different();
      for (auto& [s, p, o] : pending_) add(s, p, o);
      pending_.clear();
    }
    GraphBuilder b;
    for (const auto& t : all_) b.insert(t);
    return {b.freeze(), std::move(warnings_)};
  }

 private:
  using Terms = std::vector<Term>;

  void add(const Term& s, const Term& p, const Term& o) {
    if (!Triple::well_formed(s, p, o)) return;
    add(Triple(s, p, o));
  }

  void add(const Triple& t) {
    if (!all_.insert(t).second) return;
    by_p_[t.predicate].push_back(t);
    objects_[{t.subject, t.predicate}].push_back(t.object);
    subjects_[{t.predicate, t.object}].push_back(t.subject);
    agenda_.push_back(t);
  }

  void emit(const Term& s, const Term& p, const Term& o) {
    if (Triple::well_formed(s, p, o)) pending_.emplace_back(s, p, o);
  }

  bool has(const Term& s, const Term& p, const Term& o) const {
    return Triple::well_formed(s, p, o) && all_.count(Triple(s, p, o)) > 0;
  }

  const Terms& objs(const Term& s, const Term& p) const {
    auto it = objects_.find({s, p});
    return it == objects_.end() ? empty_ : it->second;
  }
  const Terms& subs(const Term& p, const Term& o) const {
    auto it = subjects_.find({p, o});
    return it == subjects_.end() ? empty_ : it->second;
  }
  const std::vector<Triple>& with_predicate(const Term& p) const {
    static const std::vector<Triple> kNone;
    auto it = by_p_.find(p);
    return it == by_p_.end() ? kNone : it->second;
  }

  bool is_restriction(const Term& r) const { return has(r, vocab::type, vocab::restriction); }

  void fire(const Triple& t) {
    const Term& s = t.subject;
    const Term& p = t.predicate;
    const Term& o = t.object;
    using namespace vocab;

    if (p == equivalent_class && rules_.has(Rule::kEqc)) {
      emit(s, sub_class_of, o);
      emit(o, sub_class_of, s);
    }
    if (p == sub_class_of) {
      if (rules_.has(Rule::kScoTrans)) {
        for (const auto& c : objs(o, sub_class_of)) emit(s, sub_class_of, c);
        for (const auto& a : subs(sub_class_of, s)) emit(a, sub_class_of, o);
      }
      if (rules_.has(Rule::kScoType)) {
        for (const auto& x : subs(type, s)) emit(x, type, o);
      }
      if (rules_.has(Rule::kAvf)) all_values(o, &s, nullptr);
    }
    if (p == type) {
      if (rules_.has(Rule::kScoType)) {
        for (const auto& b : objs(o, sub_class_of)) emit(s, type, b);
      }
      if (rules_.has(Rule::kAvf)) {
        for (const auto& r : objs(o, sub_class_of)) all_values(r, &o, &s);
        if (o == restriction) all_values(s, nullptr, nullptr);
      }
      if (rules_.has(Rule::kSvf)) {
        for (const auto& r : subs(some_values_from, o)) {
          if (!is_restriction(r)) continue;
          for (const auto& prop : objs(r, on_property)) {
            for (const auto& x : subs(prop, s)) emit(x, type, r);
          }
        }
        if (o == restriction) some_values(s);
      }
      if (o == all_different) lists_dirty_ = true;
    }
    if (p == sub_property_of) {
      if (rules_.has(Rule::kSpoTrans)) {
        for (const auto& r : objs(o, sub_property_of)) emit(s, sub_property_of, r);
        for (const auto& q : subs(sub_property_of, s)) emit(q, sub_property_of, o);
      }
      if (rules_.has(Rule::kSpoInh) && o.is_iri()) {
        for (const auto& u : with_predicate(s)) emit(u.subject, o, u.object);
      }
    }
    if (p == domain && rules_.has(Rule::kDom)) {
      for (const auto& u : with_predicate(s)) emit(u.subject, type, o);
    }
    if (p == range && rules_.has(Rule::kRng)) {
      for (const auto& u : with_predicate(s)) {
        if (!u.object.is_literal()) emit(u.object, type, o);
      }
    }
    if (p == disjoint_with && rules_.has(Rule::kDisjSym)) emit(o, disjoint_with, s);
    if (p == different_from && rules_.has(Rule::kDiffSym)) emit(o, different_from, s);
    if (p == on_property) {
      if (rules_.has(Rule::kAvf)) all_values(s, nullptr, nullptr);
      if (rules_.has(Rule::kSvf)) some_values(s);
    }
    if (p == all_values_from && rules_.has(Rule::kAvf)) all_values(s, nullptr, nullptr);
    if (p == some_values_from && rules_.has(Rule::kSvf)) some_values(s);
    if (p == first || p == rest || p == distinct_members) lists_dirty_ = true;

    // Rule bodies whose (x p y) atom matches any predicate.
    if (rules_.has(Rule::kSpoInh)) {
      for (const auto& q : objs(p, sub_property_of)) emit(s, q, o);
    }
    if (rules_.has(Rule::kDom)) {
      for (const auto& c : objs(p, domain)) emit(s, type, c);
    }
    if (rules_.has(Rule::kRng) && !o.is_literal()) {
      for (const auto& c : objs(p, range)) emit(o, type, c);
    }
    if (rules_.has(Rule::kAvf) || rules_.has(Rule::kSvf)) {
      for (const auto& r : subs(on_property, p)) {
        if (!is_restriction(r)) continue;
        if (rules_.has(Rule::kAvf) && !o.is_literal()) {
          for (const auto& d : objs(r, all_values_from)) {
            for (const auto& c : subs(sub_class_of, r)) {
              if (has(s, type, c)) emit(o, type, d);
            }
          }
        }
        if (rules_.has(Rule::kSvf)) {
          for (const auto& d : objs(r, some_values_from)) {
            if (has(o, type, d)) emit(s, type, r);
          }
        }
      }
    }
  }

  // AVF for restriction r, optionally pinned to one class and one member.
  void all_values(const Term& r, const Term* only_class, const Term* only_member) {
    using namespace vocab;
    if (!is_restriction(r)) return;
    for (const auto& prop : objs(r, on_property)) {
      for (const auto& d : objs(r, all_values_from)) {
        auto visit_class = [&](const Term& c) {
          auto visit_member = [&](const Term& x) {
            for (const auto& y : objs(x, prop)) {
              if (!y.is_literal()) emit(y, type, d);
            }
          };
          if (only_member) {
            if (has(*only_member, type, c)) visit_member(*only_member);
          } else {
            for (const auto& x : subs(type, c)) visit_member(x);
          }
        };
        if (only_class) {
          if (has(*only_class, sub_class_of, r)) visit_class(*only_class);
        } else {
          for (const auto& c : subs(sub_class_of, r)) visit_class(c);
        }
      }
    }
  }

  void some_values(const Term& r) {
    using namespace vocab;
    if (!is_restriction(r)) return;
    for (const auto& prop : objs(r, on_property)) {
      for (const auto& d : objs(r, some_values_from)) {
        for (const auto& y : subs(type, d)) {
          for (const auto& x : subs(prop, y)) emit(x, type, r);
        }
      }
    }
  }

  // Re-evaluated whenever list or AllDifferent triples change; warnings
  // reflect the final evaluation only.
  void expand_all_different() {
    using namespace vocab;
    warnings_.clear();
    for (const auto& d : Terms(subs(type, all_different))) {
      for (const auto& head : Terms(objs(d, distinct_members))) {
        std::vector<Term> members;
        std::string problem;
        std::set<Term> seen;
        Term node = head;
        while (node != nil) {
          if (!seen.insert(node).second) {
            problem = "cycle";
            break;
          }
          const auto& firsts = objs(node, first);
          const auto& rests = objs(node, rest);
          if (firsts.size() != 1 || rests.size() != 1) {
            problem = firsts.empty() ? "missing rdf:first" : rests.empty() ? "missing rdf:rest" : "branching list cell";
            break;
          }
          members.push_back(firsts.front());
          node = rests.front();
        }
        if (!problem.empty()) {
          warnings_.push_back("ALLDIFF-EXPAND: skipped list " + head.to_string() + " of " + d.to_string() + " (" +
                              problem + " at " + node.to_string() + ")");
          continue;
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
          for (std::size_t j = 0; j < members.size(); ++j) {
            if (i != j) emit(members[i], different_from, members[j]);
          }
        }
      }
    }
  }

  RuleSet rules_;
  std::unordered_set<Triple, TripleHash> all_;
  std::unordered_map<Term, std::vector<Triple>, TermHash> by_p_;
  std::unordered_map<std::pair<Term, Term>, Terms, PairHash> objects_;
  std::unordered_map<std::pair<Term, Term>, Terms, PairHash> subjects_;
  std::deque<Triple> agenda_;
  std::vector<std::tuple<Term, Term, Term>> pending_;
  std::vector<std::string> warnings_;
  bool lists_dirty_ = false;
  const Terms empty_;
};

}  // namespace reasoner_detail

// Least fixpoint of the enabled rules over g, with diagnostics.
inline MaterializeReport materialize_with_report(const Graph& g, const RuleSet& rules = RuleSet::all()) {
  return reasoner_detail::Closure(rules).run(g);
}

inline Graph materialize(const Graph& g, const RuleSet& rules = RuleSet::all()) {
  return materialize_with_report(g, rules).graph;
}

// ---------------------------------------------------------------------------
// Consistency

enum class ViolationKind : std::uint8_t { kDisjointness, kFunctional, kDifferentFrom };

inline std::string_view violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::kDisjointness: return "disjointness";
    case ViolationKind::kFunctional: return "functional";
    case ViolationKind::kDifferentFrom: return "differentFrom";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  Term focus;
  // disjointness: the two classes; functional: property then the two
  // values; differentFrom: the two terms.
  std::vector<Term> participants;
  std::string detail;

  friend bool operator==(const Violation& a, const Violation& b) {
    return a.kind == b.kind && a.focus == b.focus && a.participants == b.participants;
  }
};

// Expects a materialized graph; applies no rules itself. Sorted by focus,
// kind, then participants.
inline std::vector<Violation> check_consistency(const Graph& g) {
  using namespace vocab;
  std::vector<Violation> out;

  std::set<std::tuple<Term, Term, Term>> disjoint_hits;
  for (const auto& t : g.match(kAny, disjoint_with, kAny)) {
    for (const auto& x : g.subjects(type, t.subject)) {
      if (!g.contains(x, type, t.object)) continue;
      auto [a, b] = std::minmax(t.subject, t.object);
      disjoint_hits.emplace(x, a, b);
    }
  }
  for (const auto& [x, a, b] : disjoint_hits) {
    out.push_back({ViolationKind::kDisjointness, x, {a, b},
                   x.to_string() + " is an instance of disjoint classes " + a.to_string() + " and " + b.to_string()});
  }

  for (const auto& prop : g.subjects(type, functional_property)) {
    if (!prop.is_iri()) continue;
    std::set<Term> subjects;
    for (const auto& t : g.match(kAny, prop, kAny)) subjects.insert(t.subject);
    for (const auto& x : subjects) {
      auto values = g.objects(x, prop);
      for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = i + 1; j < values.size(); ++j) {
          out.push_back({ViolationKind::kFunctional, x, {prop, values[i], values[j]},
                         "functional property " + prop.to_string() + " has values " + values[i].to_string() +
                             " and " + values[j].to_string() + " for " + x.to_string()});
        }
      }
    }
  }

  std::set<std::pair<Term, Term>> diff_hits;
  for (const auto& t : g.match(kAny, different_from, kAny)) {
    const Term& x = t.subject;
    const Term& y = t.object;
    if (x == y) {
      diff_hits.emplace(x, x);
    } else if (g.contains(x, same_as, y) || g.contains(y, same_as, x)) {
      diff_hits.insert(std::minmax(x, y));
    }
  }
  for (const auto& [x, y] : diff_hits) {
    std::string detail = x == y ? x.to_string() + " is declared different from itself"
                                : x.to_string() + " and " + y.to_string() + " are both sameAs and differentFrom";
    out.push_back({ViolationKind::kDifferentFrom, x, {x, y}, std::move(detail)});
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.focus, a.kind, a.participants) < std::tie(b.focus, b.kind, b.participants);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Class hierarchy queries (expect a materialized graph)

enum class QueryMode : std::uint8_t { kDirect, kAll };

namespace reasoner_detail {

inline std::set<Term> hierarchy(const Graph& g, const Term& c, QueryMode mode, bool downward) {
  using vocab::sub_class_of;
  auto neighbours = [&](const Term& t) {
    return downward ? g.subjects(sub_class_of, t) : g.objects(t, sub_class_of);
  };
  std::set<Term> all;
  for (const auto& x : neighbours(c)) {
    if (x != c) all.insert(x);
  }
  if (mode == QueryMode::kAll) return all;
  std::set<Term> direct;
  for (const auto& x : all) {
    bool has_intermediate = false;
    for (const auto& z : all) {
      if (z == x) continue;
      bool between = downward ? g.contains(x, sub_class_of, z) : g.contains(z, sub_class_of, x);
      if (between) {
        has_intermediate = true;
        break;
      }
    }
    if (!has_intermediate) direct.insert(x);
  }
  return direct;
}

}  // namespace reasoner_detail

inline std::set<Term> subclasses(const Graph& g, const Term& c, QueryMode mode) {
  return reasoner_detail::hierarchy(g, c, mode, true);
}

inline std::set<Term> superclasses(const Graph& g, const Term& c, QueryMode mode) {
  return reasoner_detail::hierarchy(g, c, mode, false);
}

inline std::set<Term> instances(const Graph& g, const Term& c, QueryMode mode) {
  auto members = g.subjects(vocab::type, c);
  std::set<Term> out(members.begin(), members.end());
  if (mode == QueryMode::kAll) return out;
  auto below = subclasses(g, c, QueryMode::kAll);
  std::erase_if(out, [&](const Term& x) {
    return std::any_of(below.begin(), below.end(), [&](const Term& d) { return g.contains(x, vocab::type, d); });
  });
  return out;
}

}  // namespace semsearch
