#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "semsearch/rdf.hpp"
#include "support.hpp"

using namespace semsearch;
using testsupport::ex;

TEST(Term, IriRejectsWhitespaceAndEmpty) {
  EXPECT_THROW(Term::iri(""), StructureError);
  EXPECT_THROW(Term::iri("http://ex.org/a b"), StructureError);
  EXPECT_THROW(Term::iri("http://ex.org/a\tb"), StructureError);
  EXPECT_NO_THROW(Term::iri("http://ex.org/a"));
}

TEST(Term, LanguageTagImpliesLangStringDatatype) {
  auto t = Term::lang_literal("Apple", "EN-gb");
  EXPECT_EQ(t.lang(), "en-gb");
  EXPECT_EQ(t.datatype(), Term::lang_string());
  EXPECT_THROW(Term::literal("x", std::string(Term::lang_string())), StructureError);
  EXPECT_TRUE(Term::literal("x").lang().empty());
}

TEST(Term, EqualityIsLexical) {
  EXPECT_NE(Term::literal("1", std::string(ns::kXsd) + "integer"),
            Term::literal("01", std::string(ns::kXsd) + "integer"));
  EXPECT_NE(Term::literal("a"), Term::lang_literal("a", "en"));
  EXPECT_NE(Term::iri("http://ex.org/a"), Term::blank("http://ex.org/a"));
  EXPECT_EQ(Term::integer(7), Term::literal("7", std::string(ns::kXsd) + "integer"));
}

TEST(Term, OrderingBlankBeforeIriBeforeLiteral) {
  EXPECT_LT(Term::blank("z"), Term::iri("http://a"));
  EXPECT_LT(Term::iri("http://z"), Term::literal("a"));
}

TEST(Triple, RejectsMalformedPositions) {
  EXPECT_THROW(Triple(Term::literal("x"), ex("p"), ex("o")), StructureError);
  EXPECT_THROW(Triple(ex("s"), Term::blank("b"), ex("o")), StructureError);
  EXPECT_THROW(Triple(ex("s"), Term::literal("p"), ex("o")), StructureError);
  EXPECT_NO_THROW(Triple(Term::blank("b"), ex("p"), Term::literal("o")));
}

TEST(Vocabulary, ConstantsAreDistinctAbsoluteIris) {
  const auto& all = vocab::all();
  std::set<Term> distinct(all.begin(), all.end());
  EXPECT_EQ(distinct.size(), all.size());
  for (const auto& t : all) {
    EXPECT_TRUE(t.is_iri());
    EXPECT_NE(t.value().find(':'), std::string::npos);
  }
  for (const auto* name : {"type", "first", "rest", "nil"}) {
    EXPECT_TRUE(distinct.count(Term::iri(std::string(ns::kRdf) + name))) << name;
  }
  for (const auto* name : {"Restriction", "onProperty", "allValuesFrom", "someValuesFrom", "disjointWith",
                           "equivalentClass", "FunctionalProperty", "sameAs", "differentFrom", "AllDifferent",
                           "distinctMembers"}) {
    EXPECT_TRUE(distinct.count(Term::iri(std::string(ns::kOwl) + name))) << name;
  }
  for (const auto* name : {"WebPage", "url", "visitCount", "lastVisit", "keyword"}) {
    EXPECT_TRUE(distinct.count(Term::iri(std::string(ns::kEx) + name))) << name;
  }
}

TEST(GraphBuilder, InsertReportsNovelty) {
  GraphBuilder b;
  Triple t(ex("AppleInc"), vocab::sub_class_of, ex("Apple"));
  EXPECT_TRUE(b.insert(t));
  EXPECT_FALSE(b.insert(t));
  EXPECT_EQ(b.size(), 1u);
}

TEST(GraphBuilder, InsertValidatesThroughTriple) {
  GraphBuilder b;
  EXPECT_THROW(b.insert(Term::literal("s"), ex("p"), ex("o")), StructureError);
  EXPECT_EQ(b.size(), 0u);
}

TEST(GraphBuilder, DuplicatesCollapseAgainstSortDedupeOracle) {
  std::mt19937 rng(7);
  std::vector<Triple> ts;
  for (int i = 0; i < 90; ++i) {
    ts.emplace_back(ex("s" + std::to_string(i)), ex("p" + std::to_string(i % 7)), Term::literal(std::to_string(i)));
  }
  for (int i = 0; i < 10; ++i) ts.push_back(ts[static_cast<std::size_t>(i * 9)]);
  std::shuffle(ts.begin(), ts.end(), rng);
  ASSERT_EQ(ts.size(), 100u);

  auto sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  auto expected = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());

  GraphBuilder b;
  for (const auto& t : ts) b.insert(t);
  EXPECT_EQ(expected, 90u);
  EXPECT_EQ(b.freeze().size(), expected);
}

TEST(GraphBuilder, FreezeIsolatesSnapshot) {
  GraphBuilder b;
  EXPECT_EQ(b.freeze().size(), 0u);
  b.insert(ex("a"), ex("p"), ex("b"));
  b.insert(ex("a"), ex("p"), ex("c"));
  b.insert(ex("b"), ex("p"), ex("c"));
  Graph g = b.freeze();
  EXPECT_EQ(g.size(), 3u);
  b.insert(ex("c"), ex("p"), ex("d"));
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(b.freeze().size(), 4u);
}

TEST(GraphBuilder, FreezeTwiceGivesEqualSets) {
  GraphBuilder b;
  b.insert(ex("a"), ex("p"), ex("b"));
  b.insert(ex("a"), ex("q"), Term::literal("x"));
  EXPECT_EQ(testsupport::as_set(b.freeze()), testsupport::as_set(b.freeze()));
  EXPECT_EQ(b.freeze(), b.freeze());
}

TEST(Graph, InsertionOrderDoesNotMatter) {
  std::mt19937 rng(11);
  std::vector<Triple> ts;
  for (int i = 0; i < 60; ++i) {
    ts.emplace_back(ex("s" + std::to_string(i % 9)), ex("p" + std::to_string(i % 4)), ex("o" + std::to_string(i % 13)));
  }
  Graph first = testsupport::graph_of(ts);
  for (int round = 0; round < 5; ++round) {
    std::shuffle(ts.begin(), ts.end(), rng);
    EXPECT_EQ(testsupport::graph_of(ts), first);
  }
}

TEST(Graph, MatchExamples) {
  Graph empty;
  EXPECT_TRUE(empty.match(kAny, kAny, kAny).empty());

  Graph g = testsupport::graph_of({{ex("a"), ex("p"), ex("b")}, {ex("a"), ex("p"), ex("c")}, {ex("b"), ex("p"), ex("c")}});
  auto m = g.match(ex("a"), ex("p"), kAny);
  std::set<Triple> got(m.begin(), m.end());
  std::set<Triple> want = {{ex("a"), ex("p"), ex("b")}, {ex("a"), ex("p"), ex("c")}};
  EXPECT_EQ(got, want);
  EXPECT_EQ(g.match(ex("a"), ex("p"), ex("b")).size(), 1u);
  EXPECT_EQ(g.match(ex("a"), ex("p"), ex("z")).size(), 0u);
}

TEST(Graph, MatchAgreesWithLinearScan) {
  std::mt19937 rng(2024);
  auto term = [&](int n) { return ex("t" + std::to_string(std::uniform_int_distribution<int>(0, n)(rng))); };
  for (int round = 0; round < 50; ++round) {
    GraphBuilder b;
    std::vector<Triple> raw;
    for (int i = 0; i < 200; ++i) {
      Term o = (i % 5 == 0) ? Term::literal(std::to_string(i % 11)) : term(12);
      raw.emplace_back(term(12), term(4), o);
      b.insert(raw.back());
    }
    Graph g = b.freeze();
    for (int q = 0; q < 20; ++q) {
      const Triple& probe = raw[std::uniform_int_distribution<std::size_t>(0, raw.size() - 1)(rng)];
      unsigned mask = std::uniform_int_distribution<unsigned>(0, 7)(rng);
      TermPattern s = (mask & 1) ? TermPattern(probe.subject) : kAny;
      TermPattern p = (mask & 2) ? TermPattern(probe.predicate) : kAny;
      TermPattern o = (mask & 4) ? TermPattern(term(12)) : kAny;
      std::set<Triple> expected;
      for (const auto& t : raw) {
        if ((!s || t.subject == *s) && (!p || t.predicate == *p) && (!o || t.object == *o)) expected.insert(t);
      }
      auto got = g.match(s, p, o);
      std::set<Triple> got_set(got.begin(), got.end());
      EXPECT_EQ(got.size(), got_set.size()) << "duplicates in match output";
      EXPECT_EQ(got_set, expected);
      if (s && p && o) EXPECT_LE(got.size(), 1u);
    }
  }
}

TEST(Graph, ObjectsAndSubjects) {
  Graph g = testsupport::graph_of({{ex("a"), ex("p"), ex("b")}, {ex("a"), ex("p"), ex("c")}, {ex("d"), ex("p"), ex("c")}});
  EXPECT_EQ(g.objects(ex("a"), ex("p")).size(), 2u);
  EXPECT_EQ(g.subjects(ex("p"), ex("c")).size(), 2u);
  EXPECT_TRUE(g.contains(ex("d"), ex("p"), ex("c")));
  EXPECT_FALSE(g.contains(ex("c"), ex("p"), ex("d")));
}
