// Ontology-expanded keyword search over a materialized knowledge base.
//
// Query tokens select classes (by label token or ex:keyword) and their
// descendants; instances of those classes plus pages whose label/comment
// share a token with the query are scored as
//
//   score = w_class * c + w_overlap * o + w_visits * ln(1 + visits)
//
// where c is 1 for instances of a matched class and o is the fraction of
// distinct query tokens found in the page text.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "semsearch/ingest.hpp"
#include "semsearch/rdf.hpp"
#include "semsearch/reasoner.hpp"
#include "semsearch/sparql.hpp"

namespace semsearch {

struct RankingWeights {
  double w_class = 2.0;
  double w_overlap = 1.0;
  double w_visits = 0.5;

  void validate() const {
    for (double w : {w_class, w_overlap, w_visits}) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("ranking weights must be finite and >= 0");
    }
  }
};

struct SearchResult {
  std::string url;
  std::optional<std::string> title;
  std::optional<std::string> snippet;
  std::optional<std::string> class_iri;
  double score = 0.0;
};

// How candidates and their features are fetched. Both paths must agree.
enum class Retrieval : std::uint8_t { kGraphScan, kSparql };

inline constexpr std::size_t kSnippetLength = 200;

// Cuts at the last word boundary within kSnippetLength characters.
inline std::string make_snippet(std::string_view text) {
  std::vector<std::size_t> offsets;  // byte offset of each code point
  for (std::size_t i = 0; i < text.size();) {
    offsets.push_back(i);
    ingest_detail::next_code_point(text, i);
  }
  if (offsets.size() <= kSnippetLength) return std::string(text);
  std::size_t cut = offsets[kSnippetLength];
  if (text[cut] != ' ') {
    auto space = text.substr(0, cut).rfind(' ');
    if (space != std::string_view::npos && space > 0) cut = space;
  }
  std::string out(text.substr(0, cut));
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

// Named (IRI) classes: declared classes, subClassOf participants, and
// subjects carrying ex:keyword.
inline std::set<Term> named_classes(const Graph& kb) {
  std::set<Term> out;
  auto note = [&](const Term& t) {
    if (t.is_iri()) out.insert(t);
  };
  for (const auto& t : kb.match(kAny, vocab::type, vocab::owl_class)) note(t.subject);
  for (const auto& t : kb.match(kAny, vocab::type, vocab::rdfs_class)) note(t.subject);
  for (const auto& t : kb.match(kAny, vocab::sub_class_of, kAny)) {
    note(t.subject);
    note(t.object);
  }
  for (const auto& t : kb.match(kAny, vocab::keyword, kAny)) note(t.subject);
  return out;
}

inline std::set<Term> match_classes(const std::vector<std::string>& query_tokens, const Graph& kb,
                                    const Tokenizer& tokenizer) {
  std::set<Term> matched;
  if (query_tokens.empty()) return matched;
  std::set<std::string> wanted;
  for (const auto& t : query_tokens) wanted.insert(ingest_detail::ascii_lower(t));

  for (const auto& cls : named_classes(kb)) {
    bool hit = false;
    for (const auto& label : kb.objects(cls, vocab::label)) {
      if (!label.is_literal()) continue;
      for (const auto& tok : tokenizer.tokenize(label.value())) hit = hit || wanted.count(tok) > 0;
    }
    for (const auto& kw : kb.objects(cls, vocab::keyword)) {
      if (kw.is_literal()) hit = hit || wanted.count(ingest_detail::ascii_lower(kw.value())) > 0;
    }
    if (hit) matched.insert(cls);
  }
  std::set<Term> out = matched;
  for (const auto& cls : matched) {
    auto below = subclasses(kb, cls, QueryMode::kAll);
    out.insert(below.begin(), below.end());
  }
  return out;
}

// Most specific asserted-or-inferred class of an individual, ignoring
// ex:WebPage and owl:Thing.
inline std::optional<Term> display_class(const Graph& kb, const Term& individual) {
  std::vector<Term> types;
  for (const auto& t : kb.objects(individual, vocab::type)) {
    if (t.is_iri() && t != vocab::web_page && t != vocab::thing) types.push_back(t);
  }
  for (const auto& t : types) {
    bool has_more_specific = std::any_of(types.begin(), types.end(), [&](const Term& s) {
      return s != t && kb.contains(s, vocab::sub_class_of, t) && !kb.contains(t, vocab::sub_class_of, s);
    });
    if (!has_more_specific) return t;
  }
  return std::nullopt;
}

namespace search_detail {

struct PageFeatures {
  std::vector<std::string> labels;
  std::vector<std::string> comments;
  long long visits = 0;
};

inline long long parse_count(const std::string& lexical) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(lexical, &used);
    return used == lexical.size() ? std::max(0LL, v) : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

inline std::vector<std::string> literal_values(const std::vector<Term>& terms) {
  std::vector<std::string> out;
  for (const auto& t : terms) {
    if (t.is_literal()) out.push_back(t.value());
  }
  return out;
}

class Source {
 public:
  virtual ~Source() = default;
  virtual std::set<Term> instances_of(const Term& cls) const = 0;
  // Pages (ex:WebPage members) with their label and comment texts.
  virtual std::map<Term, PageFeatures> pages() const = 0;
  virtual PageFeatures features(const Term& x) const = 0;
};

class ScanSource : public Source {
 public:
  explicit ScanSource(const Graph& kb) : kb_(kb) {}

  std::set<Term> instances_of(const Term& cls) const override { return instances(kb_, cls, QueryMode::kAll); }

  std::map<Term, PageFeatures> pages() const override {
    std::map<Term, PageFeatures> out;
    for (const auto& x : kb_.subjects(vocab::type, vocab::web_page)) out.emplace(x, features(x));
    return out;
  }

  PageFeatures features(const Term& x) const override {
    PageFeatures f;
    f.labels = literal_values(kb_.objects(x, vocab::label));
    f.comments = literal_values(kb_.objects(x, vocab::comment));
    for (const auto& v : kb_.objects(x, vocab::visit_count)) {
      if (v.is_literal()) f.visits = std::max(f.visits, parse_count(v.value()));
    }
    return f;
  }

 private:
  const Graph& kb_;
};

class SparqlSource : public Source {
 public:
  explicit SparqlSource(const Graph& kb) : kb_(kb) {}

  std::set<Term> instances_of(const Term& cls) const override {
    auto table = run("SELECT DISTINCT ?x WHERE { ?x rdf:type " + cls.to_string() + " }");
    std::set<Term> out;
    for (auto& row : table.rows) out.insert(row[0]);
    return out;
  }

  std::map<Term, PageFeatures> pages() const override {
    std::map<Term, PageFeatures> out;
    for (auto& row : run("SELECT DISTINCT ?x WHERE { ?x rdf:type ex:WebPage }").rows) {
      out.emplace(row[0], features(row[0]));
    }
    return out;
  }

  PageFeatures features(const Term& x) const override {
    PageFeatures f;
    auto column = [&](const std::string& predicate) {
      std::vector<Term> values;
      if (x.is_blank()) return values;
      for (auto& row : run("SELECT ?v WHERE { " + x.to_string() + " " + predicate + " ?v }").rows) {
        values.push_back(row[0]);
      }
      std::sort(values.begin(), values.end());
      return values;
    };
    f.labels = literal_values(column("rdfs:label"));
    f.comments = literal_values(column("rdfs:comment"));
    for (const auto& v : column("ex:visitCount")) {
      if (v.is_literal()) f.visits = std::max(f.visits, parse_count(v.value()));
    }
    return f;
  }

 private:
  SolutionTable run(const std::string& text) const { return execute(parse_query(text, PrefixMap::standard()), kb_); }

  const Graph& kb_;
};

}  // namespace search_detail

// Throws std::invalid_argument when k < 1 or a weight is negative.
inline std::vector<SearchResult> search(const Graph& kb, std::string_view query_text, std::size_t k,
                                        const RankingWeights& w, const Tokenizer& tokenizer,
                                        Retrieval retrieval = Retrieval::kGraphScan) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  w.validate();
  auto query_tokens = tokenizer.tokenize(query_text);
  std::set<std::string> q(query_tokens.begin(), query_tokens.end());
  if (q.empty()) return {};

  search_detail::ScanSource scan(kb);
  search_detail::SparqlSource sparql(kb);
  const search_detail::Source& source =
      retrieval == Retrieval::kSparql ? static_cast<const search_detail::Source&>(sparql) : scan;

  std::set<Term> class_members;
  for (const auto& cls : match_classes(query_tokens, kb, tokenizer)) {
    auto members = source.instances_of(cls);
    class_members.insert(members.begin(), members.end());
  }

  auto overlap_with = [&](const search_detail::PageFeatures& f) {
    std::set<std::string> text_tokens;
    for (const auto* group : {&f.labels, &f.comments}) {
      for (const auto& s : *group) {
        auto toks = tokenizer.tokenize(s);
        text_tokens.insert(toks.begin(), toks.end());
      }
    }
    std::size_t shared = 0;
    for (const auto& t : q) shared += text_tokens.count(t);
    return shared;
  };

  std::map<Term, search_detail::PageFeatures> candidates;
  for (const auto& x : class_members) candidates.emplace(x, source.features(x));
  for (auto& [x, f] : source.pages()) {
    if (!candidates.count(x) && overlap_with(f) > 0) candidates.emplace(x, std::move(f));
  }

  std::vector<SearchResult> results;
  for (const auto& [x, f] : candidates) {
    if (!x.is_iri()) continue;
    double c = class_members.count(x) ? 1.0 : 0.0;
    double o = static_cast<double>(overlap_with(f)) / static_cast<double>(q.size());
    double score = w.w_class * c + w.w_overlap * o + w.w_visits * std::log1p(static_cast<double>(f.visits));
    if (!(score > 0.0)) continue;
    SearchResult r;
    r.url = x.value();
    if (!f.labels.empty()) r.title = f.labels.front();
    if (!f.comments.empty()) r.snippet = make_snippet(f.comments.front());
    if (auto cls = display_class(kb, x)) r.class_iri = cls->value();
    r.score = score;
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(), [](const SearchResult& a, const SearchResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.url < b.url;
  });
  if (results.size() > k) results.resize(k);
  return results;
}

}  // namespace semsearch
