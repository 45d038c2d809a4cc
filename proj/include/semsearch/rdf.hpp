// RDF data model: terms, triples, and an immutable indexed triple store.
#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace semsearch {

// Thrown when a term or triple would violate the RDF data model.
class StructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace ns {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kEx = "http://example.org/semsearch#";
}  // namespace ns

namespace detail {

inline bool is_space_or_control(unsigned char c) {
  return c <= 0x20 || c == 0x7f;
}

inline bool is_forbidden_in_iri(unsigned char c) {
  return std::string_view("<>\"{}|^`\\").find(static_cast<char>(c)) != std::string_view::npos;
}

// scheme ":" with scheme = ALPHA *( ALPHA / DIGIT / "+" / "-" / "." )
inline bool has_scheme(std::string_view iri) {
  auto colon = iri.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  if (!alpha(iri[0])) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = iri[i];
    if (!alpha(c) && !(c >= '0' && c <= '9') && c != '+' && c != '-' && c != '.') return false;
  }
  return true;
}

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace detail

// Ordering of kinds is significant: blank < IRI < literal.
enum class TermKind : std::uint8_t { kBlank = 0, kIri = 1, kLiteral = 2 };

class Term {
 public:
  static Term iri(std::string text) {
    if (text.empty()) throw StructureError("IRI must not be empty");
    for (unsigned char c : text) {
      if (detail::is_space_or_control(c)) throw StructureError("IRI contains whitespace: " + text);
      if (detail::is_forbidden_in_iri(c)) throw StructureError("IRI contains a forbidden character: " + text);
    }
    if (!detail::has_scheme(text)) throw StructureError("IRI is not absolute: " + text);
    return Term(TermKind::kIri, std::move(text), {}, {});
  }

  static Term blank(std::string label) {
    if (label.empty()) throw StructureError("blank node label must not be empty");
    return Term(TermKind::kBlank, std::move(label), {}, {});
  }

  // A literal with an explicit datatype (xsd:string when omitted).
  static Term literal(std::string lexical, std::string datatype = std::string(xsd_string())) {
    if (datatype == lang_string()) {
      throw StructureError("rdf:langString literal requires a language tag");
    }
    Term::iri(datatype);  // validates
    return Term(TermKind::kLiteral, std::move(lexical), std::move(datatype), {});
  }

  static Term lang_literal(std::string lexical, std::string lang) {
    if (lang.empty()) throw StructureError("language tag must not be empty");
    for (auto& c : lang) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
      if (!ok) throw StructureError("bad language tag: " + lang);
    }
    return Term(TermKind::kLiteral, std::move(lexical), std::string(lang_string()), std::move(lang));
  }

  static Term integer(long long v) {
    return Term(TermKind::kLiteral, std::to_string(v), std::string(ns::kXsd) + "integer", {});
  }

  TermKind kind() const { return kind_; }
  bool is_iri() const { return kind_ == TermKind::kIri; }
  bool is_blank() const { return kind_ == TermKind::kBlank; }
  bool is_literal() const { return kind_ == TermKind::kLiteral; }

  // IRI text, blank label, or literal lexical form.
  const std::string& value() const { return value_; }
  const std::string& datatype() const { return datatype_; }
  const std::string& lang() const { return lang_; }

  // N-Triples-like rendering, used for diagnostics and ordering keys.
  std::string to_string() const {
    switch (kind_) {
      case TermKind::kIri:
        return "<" + value_ + ">";
      case TermKind::kBlank:
        return "_:" + value_;
      case TermKind::kLiteral: {
        std::string out = "\"" + value_ + "\"";
        if (!lang_.empty()) return out + "@" + lang_;
        if (datatype_ != xsd_string()) out += "^^<" + datatype_ + ">";
        return out;
      }
    }
    return value_;
  }

  static constexpr std::string_view xsd_string() {
    return "http://www.w3.org/2001/XMLSchema#string";
  }
  static constexpr std::string_view lang_string() {
    return "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
  }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;

 private:
  Term(TermKind kind, std::string value, std::string datatype, std::string lang)
      : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype)), lang_(std::move(lang)) {}

  TermKind kind_;
  std::string value_;
  std::string datatype_;
  std::string lang_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const {
    std::size_t seed = static_cast<std::size_t>(t.kind());
    detail::hash_combine(seed, std::hash<std::string>{}(t.value()));
    if (t.is_literal()) {
      detail::hash_combine(seed, std::hash<std::string>{}(t.datatype()));
      detail::hash_combine(seed, std::hash<std::string>{}(t.lang()));
    }
    return seed;
  }
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  Triple(Term s, Term p, Term o) : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
    if (subject.is_literal()) throw StructureError("literal in subject position: " + subject.to_string());
    if (!predicate.is_iri()) throw StructureError("predicate must be an IRI: " + predicate.to_string());
  }

  // True when (s, p, o) would form a valid triple.
  static bool well_formed(const Term& s, const Term& p, const Term&) {
    return !s.is_literal() && p.is_iri();
  }

  std::string to_string() const {
    return subject.to_string() + " " + predicate.to_string() + " " + object.to_string() + " .";
  }

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    TermHash h;
    std::size_t seed = h(t.subject);
    detail::hash_combine(seed, h(t.predicate));
    detail::hash_combine(seed, h(t.object));
    return seed;
  }
};

// Standard and application vocabulary.
namespace vocab {

inline Term rdf(std::string_view local) { return Term::iri(std::string(ns::kRdf) + std::string(local)); }
inline Term rdfs(std::string_view local) { return Term::iri(std::string(ns::kRdfs) + std::string(local)); }
inline Term owl(std::string_view local) { return Term::iri(std::string(ns::kOwl) + std::string(local)); }
inline Term ex(std::string_view local) { return Term::iri(std::string(ns::kEx) + std::string(local)); }

inline const Term type = rdf("type");
inline const Term first = rdf("first");
inline const Term rest = rdf("rest");
inline const Term nil = rdf("nil");
inline const Term sub_class_of = rdfs("subClassOf");
inline const Term sub_property_of = rdfs("subPropertyOf");
inline const Term domain = rdfs("domain");
inline const Term range = rdfs("range");
inline const Term label = rdfs("label");
inline const Term comment = rdfs("comment");
inline const Term rdfs_class = rdfs("Class");
inline const Term owl_class = owl("Class");
inline const Term thing = owl("Thing");
inline const Term restriction = owl("Restriction");
inline const Term on_property = owl("onProperty");
inline const Term all_values_from = owl("allValuesFrom");
inline const Term some_values_from = owl("someValuesFrom");
inline const Term disjoint_with = owl("disjointWith");
inline const Term equivalent_class = owl("equivalentClass");
inline const Term functional_property = owl("FunctionalProperty");
inline const Term same_as = owl("sameAs");
inline const Term different_from = owl("differentFrom");
inline const Term all_different = owl("AllDifferent");
inline const Term distinct_members = owl("distinctMembers");
inline const Term annotation_property = owl("AnnotationProperty");
inline const Term web_page = ex("WebPage");
inline const Term url = ex("url");
inline const Term visit_count = ex("visitCount");
inline const Term last_visit = ex("lastVisit");
inline const Term keyword = ex("keyword");

inline const std::vector<Term>& all() {
  static const std::vector<Term> terms = {
      type, first, rest, nil, sub_class_of, sub_property_of, domain, range, label, comment,
      rdfs_class, owl_class, thing, restriction, on_property, all_values_from, some_values_from,
      disjoint_with, equivalent_class, functional_property, same_as, different_from, all_different,
      distinct_members, annotation_property, web_page, url, visit_count, last_visit, keyword};
  return terms;
}

}  // namespace vocab

// A slot in a match pattern; std::nullopt is the wildcard.
using TermPattern = std::optional<Term>;
inline constexpr std::nullopt_t kAny = std::nullopt;

// Immutable, index-backed set of triples. Copies share storage.
class Graph {
 public:
  Graph() : store_(std::make_shared<Store>()) {}

  std::size_t size() const { return store_->triples.size(); }
  bool empty() const { return store_->triples.empty(); }

  // Triples in sorted (subject, predicate, object) order.
  const std::vector<Triple>& triples() const { return store_->triples; }
  auto begin() const { return store_->triples.begin(); }
  auto end() const { return store_->triples.end(); }

  bool contains(const Triple& t) const {
    return std::binary_search(store_->triples.begin(), store_->triples.end(), t);
  }
  bool contains(const Term& s, const Term& p, const Term& o) const {
    if (!Triple::well_formed(s, p, o)) return false;
    return contains(Triple(s, p, o));
  }

  std::vector<Triple> match(const TermPattern& s, const TermPattern& p, const TermPattern& o) const {
    std::vector<Triple> out;
    if (s && p && o) {
      if (contains(*s, *p, *o)) out.emplace_back(*s, *p, *o);
      return out;
    }
    const std::vector<std::uint32_t>* candidates = nullptr;
    if (s && p) {
      candidates = lookup(store_->by_sp, std::make_pair(*s, *p));
      if (!candidates) return out;
    } else {
      auto narrow = [&](const TermPattern& slot, const Index& index) -> bool {
        if (!slot) return true;
        const auto* hit = lookup(index, *slot);
        if (!hit) return false;
        if (!candidates || hit->size() < candidates->size()) candidates = hit;
        return true;
      };
      if (!narrow(s, store_->by_s) || !narrow(p, store_->by_p) || !narrow(o, store_->by_o)) return out;
    }
    auto agrees = [&](const Triple& t) {
      return (!s || t.subject == *s) && (!p || t.predicate == *p) && (!o || t.object == *o);
    };
    if (!candidates) {
      out = store_->triples;
      return out;
    }
    for (auto idx : *candidates) {
      const Triple& t = store_->triples[idx];
      if (agrees(t)) out.push_back(t);
    }
    return out;
  }

  // Objects of (s, p, *), in sorted order.
  std::vector<Term> objects(const Term& s, const Term& p) const {
    std::vector<Term> out;
    if (const auto* hit = lookup(store_->by_sp, std::make_pair(s, p))) {
      for (auto idx : *hit) out.push_back(store_->triples[idx].object);
    }
    return out;
  }

  // Subjects of (*, p, o), in sorted order.
  std::vector<Term> subjects(const Term& p, const Term& o) const {
    std::vector<Term> out;
    for (const auto& t : match(kAny, p, o)) out.push_back(t.subject);
    return out;
  }

  std::optional<Term> first_object(const Term& s, const Term& p) const {
    if (const auto* hit = lookup(store_->by_sp, std::make_pair(s, p))) {
      return store_->triples[hit->front()].object;
    }
    return std::nullopt;
  }

  std::set<Term> terms() const {
    std::set<Term> out;
    for (const auto& t : store_->triples) {
      out.insert(t.subject);
      out.insert(t.predicate);
      out.insert(t.object);
    }
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.store_ == b.store_ || a.store_->triples == b.store_->triples;
  }

 private:
  friend class GraphBuilder;

  struct PairHash {
    std::size_t operator()(const std::pair<Term, Term>& p) const {
      std::size_t seed = TermHash{}(p.first);
      detail::hash_combine(seed, TermHash{}(p.second));
      return seed;
    }
  };
  using Index = std::unordered_map<Term, std::vector<std::uint32_t>, TermHash>;
  using PairIndex = std::unordered_map<std::pair<Term, Term>, std::vector<std::uint32_t>, PairHash>;

  struct Store {
    std::vector<Triple> triples;
    Index by_s;
    Index by_p;
    Index by_o;
    PairIndex by_sp;
  };

  template <typename Map, typename Key>
  static const std::vector<std::uint32_t>* lookup(const Map& map, const Key& key) {
    auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
  }

  explicit Graph(std::vector<Triple> sorted) {
    auto store = std::make_shared<Store>();
    store->triples = std::move(sorted);
    for (std::uint32_t i = 0; i < store->triples.size(); ++i) {
      const Triple& t = store->triples[i];
      store->by_s[t.subject].push_back(i);
      store->by_p[t.predicate].push_back(i);
      store->by_o[t.object].push_back(i);
      store->by_sp[{t.subject, t.predicate}].push_back(i);
    }
    store_ = std::move(store);
  }

  std::shared_ptr<const Store> store_;
};

// Mutable accumulator; single writer.
class GraphBuilder {
 public:
  GraphBuilder() = default;
  explicit GraphBuilder(const Graph& seed) { insert_all(seed); }

  // Returns true iff the triple was not already present.
  bool insert(Triple t) { return triples_.insert(std::move(t)).second; }

  // Validates the slots first; throws StructureError on a malformed triple.
  bool insert(Term s, Term p, Term o) { return insert(Triple(std::move(s), std::move(p), std::move(o))); }

  std::size_t insert_all(const Graph& g) {
    std::size_t added = 0;
    for (const auto& t : g) added += insert(t) ? 1 : 0;
    return added;
  }

  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  std::size_t size() const { return triples_.size(); }

  Graph freeze() const {
    std::vector<Triple> sorted(triples_.begin(), triples_.end());
    std::sort(sorted.begin(), sorted.end());
    return Graph(std::move(sorted));
  }

 private:
  std::unordered_set<Triple, TripleHash> triples_;
};

}  // namespace semsearch
