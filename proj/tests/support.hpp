// Independent oracles and generators shared by the unit and acceptance tests.
// Everything here is deliberately naive: full rescans, brute-force
// enumeration, permutation search.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "semsearch/ingest.hpp"
#include "semsearch/rdf.hpp"

#ifndef SEMSEARCH_DATA_DIR
#define SEMSEARCH_DATA_DIR "data"
#endif

namespace testsupport {

using semsearch::Graph;
using semsearch::GraphBuilder;
using semsearch::Term;
using semsearch::Triple;
namespace vocab = semsearch::vocab;

inline std::filesystem::path data_dir() { return SEMSEARCH_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return data_dir() / "fixture"; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("semsearch-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Term ex(const std::string& local) { return Term::iri("http://ex.org/" + local); }

inline Graph graph_of(const std::vector<Triple>& ts) {
  GraphBuilder b;
  for (const auto& t : ts) b.insert(t);
  return b.freeze();
}

inline std::set<Triple> as_set(const Graph& g) { return {g.begin(), g.end()}; }

// ---------------------------------------------------------------------------
// Naive fixpoint reasoner: rescans every rule body over the whole triple set
// until nothing changes. List expansion runs after the other rules settle,
// because its "skip malformed lists" clause is not monotone.

class NaiveReasoner {
 public:
  explicit NaiveReasoner(std::set<Triple> triples) : t_(std::move(triples)) {}

  std::set<Triple> run() {
    while (true) {
      while (round_monotone()) {
      }
      if (!round_lists()) break;
    }
    return t_;
  }

 private:
  bool has(const Term& s, const Term& p, const Term& o) const {
    return Triple::well_formed(s, p, o) && t_.count(Triple(s, p, o)) > 0;
  }
  void add(std::set<Triple>& out, const Term& s, const Term& p, const Term& o) const {
    if (Triple::well_formed(s, p, o) && !t_.count(Triple(s, p, o))) out.insert(Triple(s, p, o));
  }
  std::vector<Triple> with(const Term& p) const {
    std::vector<Triple> r;
    for (const auto& t : t_) {
      if (t.predicate == p) r.push_back(t);
    }
    return r;
  }

  bool round_monotone() {
    using namespace vocab;
    std::set<Triple> out;
    auto sco = with(sub_class_of);
    auto spo = with(sub_property_of);
    auto types = with(type);

    for (const auto& t : with(equivalent_class)) {
      add(out, t.subject, sub_class_of, t.object);
      add(out, t.object, sub_class_of, t.subject);
    }
    for (const auto& a : sco) {
      for (const auto& b : sco) {
        if (a.object == b.subject) add(out, a.subject, sub_class_of, b.object);
      }
    }
    for (const auto& x : types) {
      for (const auto& a : sco) {
        if (x.object == a.subject) add(out, x.subject, type, a.object);
      }
    }
    for (const auto& a : spo) {
      for (const auto& b : spo) {
        if (a.object == b.subject) add(out, a.subject, sub_property_of, b.object);
      }
    }
    for (const auto& u : t_) {
      for (const auto& a : spo) {
        if (u.predicate == a.subject) add(out, u.subject, a.object, u.object);
      }
      for (const auto& d : with(domain)) {
        if (u.predicate == d.subject) add(out, u.subject, type, d.object);
      }
      for (const auto& r : with(range)) {
        if (u.predicate == r.subject && !u.object.is_literal()) add(out, u.object, type, r.object);
      }
    }
    for (const auto& t : with(disjoint_with)) add(out, t.object, disjoint_with, t.subject);
    for (const auto& t : with(different_from)) add(out, t.object, different_from, t.subject);

    // AVF
    for (const auto& c : sco) {
      const Term& r = c.object;
      if (!has(r, type, restriction)) continue;
      for (const auto& op : with(on_property)) {
        if (op.subject != r) continue;
        for (const auto& av : with(all_values_from)) {
          if (av.subject != r) continue;
          for (const auto& u : t_) {
            if (u.predicate == op.object && has(u.subject, type, c.subject) && !u.object.is_literal()) {
              add(out, u.object, type, av.object);
            }
          }
        }
      }
    }
    // SVF
    for (const auto& rt : types) {
      if (rt.object != restriction) continue;
      const Term& r = rt.subject;
      for (const auto& op : with(on_property)) {
        if (op.subject != r) continue;
        for (const auto& sv : with(some_values_from)) {
          if (sv.subject != r) continue;
          for (const auto& u : t_) {
            if (u.predicate == op.object && has(u.object, type, sv.object)) add(out, u.subject, type, r);
          }
        }
      }
    }
    if (out.empty()) return false;
    t_.insert(out.begin(), out.end());
    return true;
  }

  bool round_lists() {
    using namespace vocab;
    std::set<Triple> out;
    for (const auto& d : with(type)) {
      if (d.object != all_different) continue;
      for (const auto& dm : with(distinct_members)) {
        if (dm.subject != d.subject) continue;
        std::vector<Term> members;
        std::set<Term> visited;
        Term node = dm.object;
        bool ok = true;
        while (node != nil) {
          if (!visited.insert(node).second) {
            ok = false;
            break;
          }
          std::vector<Term> firsts, rests;
          for (const auto& t : t_) {
            if (t.subject == node && t.predicate == first) firsts.push_back(t.object);
            if (t.subject == node && t.predicate == rest) rests.push_back(t.object);
          }
          if (firsts.size() != 1 || rests.size() != 1) {
            ok = false;
            break;
          }
          members.push_back(firsts[0]);
          node = rests[0];
        }
        if (!ok) continue;
        for (std::size_t i = 0; i < members.size(); ++i) {
          for (std::size_t j = 0; j < members.size(); ++j) {
            if (i != j) add(out, members[i], different_from, members[j]);
          }
        }
      }
    }
    if (out.empty()) return false;
    t_.insert(out.begin(), out.end());
    return true;
  }

  std::set<Triple> t_;
};

// ---------------------------------------------------------------------------
// Random graphs over a small universe seeded with rule vocabulary.

struct RuleGraphGen {
  std::mt19937 rng;
  std::vector<Term> predicates;
  std::vector<Term> nodes;     // IRIs and blanks
  std::vector<Term> literals;

  explicit RuleGraphGen(unsigned seed) : rng(seed) {
    using namespace vocab;
    predicates = {type,         sub_class_of,     sub_property_of, domain,         range,
                  equivalent_class, disjoint_with, different_from,  on_property,    all_values_from,
                  some_values_from, distinct_members, first,         rest};
    for (int i = 0; i < 4; ++i) predicates.push_back(ex("p" + std::to_string(i)));
    nodes = {restriction, all_different, nil};
    for (int i = 0; i < 5; ++i) nodes.push_back(ex("c" + std::to_string(i)));
    nodes.push_back(Term::blank("n0"));
    nodes.push_back(Term::blank("n1"));
    literals = {Term::literal("a"), Term::lang_literal("b", "en")};
    // 14 + 4 + 3 + 5 + 2 + 2 = 30 terms
  }

  Term pick(const std::vector<Term>& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; }

  Term any_node() {
    // Predicates can appear as subjects/objects (p subPropertyOf q, r onProperty p).
    std::uniform_int_distribution<int> d(0, 9);
    int k = d(rng);
    if (k < 6) return pick(nodes);
    return pick(predicates);
  }

  Graph graph(std::size_t max_triples) {
    std::uniform_int_distribution<std::size_t> n(1, max_triples);
    std::size_t target = n(rng);
    GraphBuilder b;
    std::uniform_int_distribution<int> lit(0, 9);
    for (std::size_t i = 0; i < target; ++i) {
      Term s = pick(nodes);
      if (lit(rng) == 0) s = pick(predicates);
      Term p = pick(predicates);
      Term o = lit(rng) == 0 ? pick(literals) : any_node();
      if (Triple::well_formed(s, p, o)) b.insert(s, p, o);
    }
    return b.freeze();
  }
};

// ---------------------------------------------------------------------------
// Random graphs for serializer round trips: awkward IRIs, escapes, unicode,
// language tags, datatypes, blank nodes.

inline Graph random_rdf_graph(std::mt19937& rng, std::size_t max_triples = 40, std::size_t max_blanks = 5) {
  auto pick_index = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const std::vector<std::string> iris = {
      "http://example.org/semsearch#AppleInc",
      "http://example.org/semsearch#visitCount",
      "http://www.w3.org/2000/01/rdf-schema#label",
      "http://www.w3.org/1999/02/22-rdf-syntax-ns#type",
      "http://www.w3.org/2002/07/owl#Class",
      "http://ex.org/a",
      "http://ex.org/path/with~tilde",
      "http://ex.org/q?x=1&y=%20",
      "http://ex.org/caf\xc3\xa9",
      "urn:isbn:0451450523",
      "http://example.org/semsearch#-dash",
      "http://example.org/semsearch#dot.",
      "http://example.org/semsearch#",
  };
  const std::vector<std::string> texts = {
      "", "plain", "with \"quotes\"", "back\\slash", "line\nbreak", "tab\there", "carriage\rreturn",
      "caf\xc3\xa9 \xc2\xa3" "17", "\xf0\x9f\x8d\x8e emoji", "'single'", "\"\"\"triple\"\"\"", "bell\x07" "char", "# not a comment",
  };
  const std::vector<std::string> datatypes = {
      std::string(semsearch::ns::kXsd) + "integer", std::string(semsearch::ns::kXsd) + "string",
      "http://ex.org/dt", std::string(semsearch::ns::kXsd) + "dateTime"};
  const std::vector<std::string> langs = {"en", "en-gb", "fr", "zh-hant"};

  std::size_t blank_count = pick_index(max_blanks + 1);
  auto subject = [&]() -> Term {
    if (blank_count > 0 && pick_index(3) == 0) return Term::blank("x" + std::to_string(pick_index(blank_count)));
    return Term::iri(iris[pick_index(iris.size())]);
  };
  auto object = [&]() -> Term {
    switch (pick_index(5)) {
      case 0: return Term::literal(texts[pick_index(texts.size())]);
      case 1: return Term::lang_literal(texts[pick_index(texts.size())], langs[pick_index(langs.size())]);
      case 2: return Term::literal(std::to_string(pick_index(1000)), datatypes[pick_index(datatypes.size())]);
      default: return subject();
    }
  };
  GraphBuilder b;
  std::size_t n = 1 + pick_index(max_triples);
  for (std::size_t i = 0; i < n; ++i) {
    Term p = Term::iri(iris[pick_index(iris.size())]);
    b.insert(subject(), p, object());
  }
  return b.freeze();
}

// ---------------------------------------------------------------------------
// Brute-force BGP evaluation: try every assignment of the variables to terms
// of the graph.

struct OraclePattern {
  // Either a term or a variable index.
  std::variant<Term, int> s, p, o;
};

inline std::set<std::vector<Term>> brute_force_bgp(const Graph& g, const std::vector<OraclePattern>& patterns,
                                                   int variable_count) {
  std::vector<Term> universe;
  {
    std::set<Term> u;
    for (const auto& t : g) {
      u.insert(t.subject);
      u.insert(t.predicate);
      u.insert(t.object);
    }
    universe.assign(u.begin(), u.end());
  }
  std::set<std::vector<Term>> rows;
  if (universe.empty() && variable_count > 0) return rows;
  std::vector<std::size_t> idx(variable_count, 0);
  while (true) {
    std::vector<Term> assignment;
    for (int v = 0; v < variable_count; ++v) assignment.push_back(universe[idx[v]]);
    auto resolve = [&](const std::variant<Term, int>& x) {
      return std::holds_alternative<Term>(x) ? std::get<Term>(x) : assignment[std::get<int>(x)];
    };
    bool ok = true;
    for (const auto& pat : patterns) {
      Term s = resolve(pat.s), p = resolve(pat.p), o = resolve(pat.o);
      if (!Triple::well_formed(s, p, o) || !g.contains(s, p, o)) {
        ok = false;
        break;
      }
    }
    if (ok) rows.insert(assignment);
    int v = 0;
    while (v < variable_count && ++idx[v] == universe.size()) idx[v++] = 0;
    if (v == variable_count) break;
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Canonical form under blank-node relabeling: the lexicographically smallest
// sorted N-Triples rendering over all bijections to _:c0.._:cN. Exponential,
// fine for the handful of blanks the generators produce.

// A random graph plus a random BGP over it, rendered as SPARQL text.
struct BgpCase {
  Graph graph;
  std::vector<OraclePattern> patterns;  // variables renumbered 0..n-1
  std::string where;
  std::vector<std::string> names;  // SPARQL name of variable i
};

inline BgpCase random_bgp_case(std::mt19937& rng) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::vector<Term> nodes = {ex("e0"), ex("e1"), ex("e2"), ex("e3"), ex("e4"), Term::blank("k")};
  std::vector<Term> preds = {ex("p0"), ex("p1"), ex("p2")};
  std::vector<Term> lits = {Term::literal("v"), Term::integer(1), Term::lang_literal("v", "en")};

  BgpCase c;
  GraphBuilder b;
  std::size_t n = 1 + pick(100);
  for (std::size_t i = 0; i < n; ++i) {
    Term o = pick(4) == 0 ? lits[pick(lits.size())] : nodes[pick(nodes.size())];
    b.insert(nodes[pick(nodes.size())], preds[pick(preds.size())], o);
  }
  c.graph = b.freeze();

  int vars = 1 + static_cast<int>(pick(3));
  std::size_t pattern_count = 1 + pick(3);
  auto slot = [&](int position) -> std::variant<Term, int> {
    if (pick(2) == 0) return static_cast<int>(pick(static_cast<std::size_t>(vars)));
    if (position == 1) return preds[pick(preds.size())];
    if (position == 0) return nodes[pick(nodes.size() - 1)];
    return pick(3) == 0 ? lits[pick(lits.size())] : nodes[pick(nodes.size() - 1)];
  };
  auto render = [](const std::variant<Term, int>& v) {
    return std::holds_alternative<int>(v) ? "?v" + std::to_string(std::get<int>(v)) : std::get<Term>(v).to_string();
  };
  for (std::size_t i = 0; i < pattern_count; ++i) {
    OraclePattern p{slot(0), slot(1), slot(2)};
    c.where += render(p.s) + " " + render(p.p) + " " + render(p.o) + " . ";
    c.patterns.push_back(p);
  }
  std::map<int, int> renumber;
  for (auto& p : c.patterns) {
    for (auto* s : {&p.s, &p.p, &p.o}) {
      if (std::holds_alternative<int>(*s)) {
        auto [it, fresh] = renumber.emplace(std::get<int>(*s), static_cast<int>(renumber.size()));
        *s = it->second;
      }
    }
  }
  c.names.resize(renumber.size());
  for (auto [orig, idx] : renumber) c.names[static_cast<std::size_t>(idx)] = "v" + std::to_string(orig);
  return c;
}

inline std::string canonical_form(const Graph& g) {
  std::set<Term> blank_set;
  for (const auto& t : g) {
    if (t.subject.is_blank()) blank_set.insert(t.subject);
    if (t.object.is_blank()) blank_set.insert(t.object);
  }
  std::vector<Term> blanks(blank_set.begin(), blank_set.end());
  std::vector<std::size_t> perm(blanks.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::string best;
  bool first = true;
  do {
    std::map<Term, Term> rename;
    for (std::size_t i = 0; i < blanks.size(); ++i) rename.emplace(blanks[i], Term::blank("c" + std::to_string(perm[i])));
    auto map = [&](const Term& t) { return t.is_blank() ? rename.at(t) : t; };
    std::vector<std::string> lines;
    for (const auto& t : g) lines.push_back(Triple(map(t.subject), t.predicate, map(t.object)).to_string());
    std::sort(lines.begin(), lines.end());
    std::string joined;
    for (auto& l : lines) joined += l + "\n";
    if (first || joined < best) best = std::move(joined);
    first = false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ---------------------------------------------------------------------------
// Fixture scan helpers: read the raw inputs without going through the
// library's classification or search code.

struct RawPage {
  std::string url;
  std::string title;
  std::string description;
  long long visits = 0;
};

// Parses history.jsonl with nlohmann directly and pulls title/description
// from the cached html with a crude regex scan.
inline std::vector<RawPage> raw_fixture_pages() {
  std::vector<RawPage> pages;
  std::ifstream in(fixture_dir() / "history.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    RawPage p;
    p.url = j.at("url").get<std::string>();
    if (j.contains("title")) p.title = j["title"].get<std::string>();
    if (j.contains("description")) p.description = j["description"].get<std::string>();
    p.visits = j.value("visit_count", 0LL);
    auto cached = fixture_dir() / "html" / (semsearch::url_digest(p.url) + ".html");
    if (std::filesystem::exists(cached)) {
      std::string html = read_file(cached);
      std::smatch m;
      if (p.title.empty() && std::regex_search(html, m, std::regex("<title>([^<]*)</title>"))) p.title = m[1];
      if (p.description.empty() &&
          std::regex_search(html, m, std::regex("<meta content=\"([^\"]*)\" name=\"Description\">"))) {
        p.description = m[1];
      }
    }
    pages.push_back(p);
  }
  return pages;
}

inline std::set<std::string> lowercase_words(const std::string& text) {
  std::set<std::string> out;
  std::string cur;
  for (char c : text + " ") {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      if (!cur.empty()) out.insert(cur);
      cur.clear();
    }
  }
  return out;
}

inline const std::set<std::string>& inc_lexicon() {
  static const std::set<std::string> s = {"iphone", "ipad", "macbook", "ios",     "itunes", "ipod",
                                          "imac",   "itv",  "iwatch",  "samsung", "foxconn"};
  return s;
}
inline const std::set<std::string>& fruit_lexicon() {
  static const std::set<std::string> s = {"fruit", "nutrition", "health", "benefits", "vitamin", "diet"};
  return s;
}

inline std::size_t hits(const std::set<std::string>& words, const std::set<std::string>& lexicon) {
  std::size_t n = 0;
  for (const auto& w : lexicon) n += words.count(w);
  return n;
}

// Recomputes every candidate's score from raw triples.
inline std::map<std::string, double> oracle_scores(const Graph& kb, const std::string& query, double w_class,
                                                   double w_overlap, double w_visits) {
  semsearch::Tokenizer tok;
  auto q = tok.token_set(query);
  std::map<std::string, double> out;
  if (q.empty()) return out;
  std::set<Term> named;
  for (const auto& t : kb) {
    bool declares = t.predicate == vocab::type && (t.object == vocab::owl_class || t.object == vocab::rdfs_class);
    if (declares || t.predicate == vocab::keyword) named.insert(t.subject);
    if (t.predicate == vocab::sub_class_of) {
      named.insert(t.subject);
      named.insert(t.object);
    }
  }
  std::set<Term> matched;
  for (const auto& t : kb) {
    if (!named.count(t.subject) || !t.subject.is_iri() || !t.object.is_literal()) continue;
    if (t.predicate == vocab::label) {
      for (const auto& word : tok.tokenize(t.object.value())) {
        if (q.count(word)) matched.insert(t.subject);
      }
    }
    if (t.predicate == vocab::keyword && q.count(semsearch::ingest_detail::ascii_lower(t.object.value()))) {
      matched.insert(t.subject);
    }
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& t : kb.match(semsearch::kAny, vocab::sub_class_of, semsearch::kAny)) {
      if (matched.count(t.object) && t.subject.is_iri() && matched.insert(t.subject).second) grew = true;
    }
  }
  std::set<Term> members;
  for (const auto& t : kb.match(semsearch::kAny, vocab::type, semsearch::kAny)) {
    if (matched.count(t.object)) members.insert(t.subject);
  }
  std::set<Term> candidates = members;
  auto text_tokens = [&](const Term& x) {
    std::set<std::string> words;
    for (const auto& p : {vocab::label, vocab::comment}) {
      for (const auto& v : kb.objects(x, p)) {
        auto more = tok.tokenize(v.value());
        words.insert(more.begin(), more.end());
      }
    }
    return words;
  };
  for (const auto& x : kb.subjects(vocab::type, vocab::web_page)) {
    for (const auto& word : text_tokens(x)) {
      if (q.count(word)) candidates.insert(x);
    }
  }
  for (const auto& x : candidates) {
    if (!x.is_iri()) continue;
    double c = members.count(x) ? 1.0 : 0.0;
    auto words = text_tokens(x);
    double shared = 0;
    for (const auto& t : q) shared += words.count(t);
    double v = 0;
    for (const auto& lit : kb.objects(x, vocab::visit_count)) v = std::max(v, std::stod(lit.value()));
    double score = w_class * c + w_overlap * shared / static_cast<double>(q.size()) + w_visits * std::log(1 + v);
    if (score > 0) out[x.value()] = score;
  }
  return out;
}

}  // namespace testsupport
