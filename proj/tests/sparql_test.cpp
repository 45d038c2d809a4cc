#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "semsearch/ingest.hpp"
#include "semsearch/sparql.hpp"
#include "semsearch/turtle.hpp"
#include "support.hpp"

using namespace semsearch;
using testsupport::ex;
using testsupport::graph_of;

namespace {

std::string prologue() {
  return "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\n"
         "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n"
         "PREFIX ex: <http://ex.org/>\n";
}

SolutionTable run(const std::string& q, const Graph& g) { return execute(parse_query(prologue() + q), g); }

Graph small_graph() {
  return graph_of({{ex("a"), ex("p"), ex("b")},
                   {ex("a"), ex("p"), ex("c")},
                   {ex("b"), ex("p"), ex("c")},
                   {ex("a"), vocab::label, Term::literal("Apple iPhone")},
                   {ex("b"), vocab::label, Term::literal("Apple Fruit")},
                   {ex("c"), vocab::label, Term::lang_literal("Pomme", "fr")},
                   {ex("c"), ex("n"), Term::integer(3)}});
}

std::string text_of(const PatternTerm& pt) {
  if (const auto* v = std::get_if<Variable>(&pt)) return "?" + v->name;
  return std::get<Term>(pt).to_string();
}

}  // namespace

TEST(SparqlParse, SinglePattern) {
  auto q = parse_query("SELECT ?s WHERE { ?s ?p ?o }");
  EXPECT_EQ(q.where.size(), 1u);
  EXPECT_EQ(q.projection, (std::vector<std::string>{"s"}));
  EXPECT_FALSE(q.distinct);
}

TEST(SparqlParse, FixtureStyleQuery) {
  auto q = parse_query(
      "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> "
      "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> "
      "PREFIX ex: <http://example.org/semsearch#> "
      "SELECT ?page WHERE { ?page rdf:type ex:AppleInc ; rdfs:label ?l . FILTER(CONTAINS(LCASE(?l), \"iphone\")) }");
  EXPECT_EQ(q.where.size(), 2u);
  EXPECT_EQ(q.filters.size(), 1u);
  EXPECT_EQ(text_of(q.where[0].object), "<http://example.org/semsearch#AppleInc>");
}

TEST(SparqlParse, Errors) {
  EXPECT_THROW(parse_query("SELECT ?x WHERE { ?x }"), ParseError);
  EXPECT_THROW(parse_query("SELECT ?y WHERE { ?x ?p ?o }"), ParseError);
  EXPECT_THROW(parse_query("SELECT ?x WHERE { ?x ?p ?o FILTER(FOO(?x)) }"), ParseError);
  EXPECT_THROW(parse_query("SELECT ?x WHERE { ?x ?p ?o FILTER(?z = ?x) }"), ParseError);
  EXPECT_THROW(parse_query("SELECT ?x WHERE { ?x ?p ?o } ORDER BY ?z"), ParseError);
  EXPECT_THROW(parse_query("SELECT ?x WHERE { ?x ex:p ?o }"), ParseError);
  EXPECT_THROW(parse_query("SELECT ?x WHERE { _:b ?p ?x }"), ParseError);
  EXPECT_THROW(parse_query("SELECT ?x WHERE { ?x \"lit\" ?o }"), ParseError);
  EXPECT_THROW(parse_query("SELECT ?x WHERE { ?x ?p ?o } LIMIT -1"), ParseError);
  EXPECT_THROW(parse_query("SELECT ?x WHERE { ?x ?p ?o FILTER(CONTAINS(?x)) }"), ParseError);
  try {
    parse_query("SELECT ?x\nWHERE { ?x ?p ?o .\n  ?x }");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(SparqlExecute, EmptyGraph) { EXPECT_TRUE(run("SELECT ?s WHERE { ?s ?p ?o }", Graph()).rows.empty()); }

TEST(SparqlExecute, JoinAndProjection) {
  auto t = run("SELECT ?x ?z WHERE { ?x ex:p ?y . ?y ex:p ?z }", small_graph());
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "z"}));
  EXPECT_EQ(t.rows[0], (std::vector<Term>{ex("a"), ex("c")}));
}

TEST(SparqlExecute, SelectStarUsesPatternOrder) {
  auto t = run("SELECT * WHERE { ?x ex:p ?y }", small_graph());
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(t.rows.size(), 3u);
}

TEST(SparqlExecute, DistinctLimitOrder) {
  Graph g = small_graph();
  EXPECT_EQ(run("SELECT ?x WHERE { ?x ex:p ?y }", g).rows.size(), 3u);
  EXPECT_EQ(run("SELECT DISTINCT ?x WHERE { ?x ex:p ?y }", g).rows.size(), 2u);
  EXPECT_EQ(run("SELECT ?x WHERE { ?x ex:p ?y } LIMIT 1", g).rows.size(), 1u);
  EXPECT_EQ(run("SELECT ?x WHERE { ?x ex:p ?y } LIMIT 0", g).rows.size(), 0u);

  auto asc = run("SELECT ?l WHERE { ?x rdfs:label ?l } ORDER BY ?l", g);
  ASSERT_EQ(asc.rows.size(), 3u);
  EXPECT_EQ(asc.rows[0][0], Term::literal("Apple Fruit"));
  EXPECT_EQ(asc.rows[1][0], Term::literal("Apple iPhone"));
  auto desc = run("SELECT ?l WHERE { ?x rdfs:label ?l } ORDER BY DESC(?l)", g);
  EXPECT_EQ(desc.rows.front()[0], asc.rows.back()[0]);
  auto mixed = run("SELECT ?o WHERE { ?x ?p ?o } ORDER BY ASC(?o)", g);
  for (std::size_t i = 1; i < mixed.rows.size(); ++i) EXPECT_LE(mixed.rows[i - 1][0], mixed.rows[i][0]);
  EXPECT_EQ(run("SELECT ?o WHERE { ?x ?p ?o } ORDER BY ?o", g).rows, mixed.rows);
}

TEST(SparqlExecute, Filters) {
  Graph g = small_graph();
  EXPECT_EQ(run("SELECT ?x WHERE { ?x rdfs:label ?l FILTER(CONTAINS(LCASE(?l), \"iphone\")) }", g).rows.size(), 1u);
  EXPECT_EQ(run("SELECT ?x WHERE { ?x rdfs:label ?l FILTER REGEX(?l, \"^apple\", \"i\") }", g).rows.size(), 2u);
  EXPECT_EQ(run("SELECT ?x WHERE { ?x rdfs:label ?l FILTER(REGEX(?l, \"^apple\")) }", g).rows.size(), 0u);
  EXPECT_EQ(run("SELECT ?x WHERE { ?x ex:p ?y FILTER(?y != ex:b) }", g).rows.size(), 2u);
  EXPECT_EQ(run("SELECT ?x WHERE { ?x ex:p ?y FILTER(?y = ex:b || ?x = ex:b) }", g).rows.size(), 2u);
  EXPECT_EQ(run("SELECT ?x WHERE { ?x ex:p ?y FILTER(!(?y = ex:b) && ?x = ex:a) }", g).rows.size(), 1u);
  EXPECT_EQ(run("SELECT ?x WHERE { ?x ex:p ?y FILTER(STR(?y) = \"http://ex.org/c\") }", g).rows.size(), 2u);
  // Language-tagged labels still count as text for CONTAINS.
  EXPECT_EQ(run("SELECT ?x WHERE { ?x rdfs:label ?l FILTER(CONTAINS(?l, \"Pom\")) }", g).rows.size(), 1u);
  // CONTAINS on an IRI is an error, which drops the row.
  EXPECT_EQ(run("SELECT ?x WHERE { ?x ex:p ?y FILTER(CONTAINS(?y, \"ex\")) }", g).rows.size(), 0u);
  // Backreferences and unknown flags are evaluation errors.
  EXPECT_EQ(run("SELECT ?x WHERE { ?x rdfs:label ?l FILTER(REGEX(?l, \"(p)\\\\1\")) }", g).rows.size(), 0u);
  EXPECT_EQ(run("SELECT ?x WHERE { ?x rdfs:label ?l FILTER(REGEX(?l, \"A\", \"m\")) }", g).rows.size(), 0u);
  EXPECT_EQ(run("SELECT ?x WHERE { ?x rdfs:label ?l FILTER(REGEX(?l, \"(p)p\")) }", g).rows.size(), 2u);
}

TEST(SparqlExecute, RemovingFilterNeverRemovesRows) {
  Graph g = small_graph();
  auto with = run("SELECT ?x ?l WHERE { ?x rdfs:label ?l FILTER(CONTAINS(?l, \"Apple\")) }", g);
  auto without = run("SELECT ?x ?l WHERE { ?x rdfs:label ?l }", g);
  std::set<std::vector<Term>> all(without.rows.begin(), without.rows.end());
  for (const auto& r : with.rows) EXPECT_TRUE(all.count(r));
  EXPECT_LE(with.rows.size(), without.rows.size());
}

TEST(SparqlExecute, PatternOrderDoesNotMatter) {
  Graph g = small_graph();
  auto a = run("SELECT ?x ?y ?l WHERE { ?x ex:p ?y . ?y rdfs:label ?l } ORDER BY ?l", g);
  auto b = run("SELECT ?x ?y ?l WHERE { ?y rdfs:label ?l . ?x ex:p ?y } ORDER BY ?l", g);
  EXPECT_EQ(std::set<std::vector<Term>>(a.rows.begin(), a.rows.end()),
            std::set<std::vector<Term>>(b.rows.begin(), b.rows.end()));
}

TEST(SparqlExecute, BruteForceOracleOnRandomCases) {
  std::mt19937 rng(99);
  int cases = 0;
  while (cases < 50) {
    auto c = testsupport::random_bgp_case(rng);
    if (c.names.empty()) continue;
    ++cases;
    const Graph& g = c.graph;
    const auto& where = c.where;
    const auto& names = c.names;
    const auto& patterns = c.patterns;

    auto start = std::chrono::steady_clock::now();
    auto table = execute(parse_query("SELECT * WHERE { " + where + "}"), g);
    EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));

    auto oracle = testsupport::brute_force_bgp(g, patterns, static_cast<int>(names.size()));
    std::set<std::vector<Term>> got;
    for (const auto& row : table.rows) {
      std::vector<Term> ordered;
      for (const auto& name : names) ordered.push_back(row[table.column(name)]);
      got.insert(ordered);
    }
    EXPECT_EQ(got.size(), table.rows.size()) << "duplicate solutions for " << where;
    EXPECT_EQ(got, oracle) << where;
  }
}

TEST(SparqlFormat, TableEndsWithRowCount) {
  auto t = run("SELECT ?x WHERE { ?x ex:p ex:c }", small_graph());
  auto text = format_table(t, PrefixMap());
  EXPECT_NE(text.find("?x"), std::string::npos);
  EXPECT_NE(text.find("<http://ex.org/a>"), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 7), "2 rows\n");
}
