#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "adwar/selector.hpp"
#include "support.hpp"

using namespace adwar;
using adwar::testing::FrameBuilder;

namespace {

// Independent compound check working from the raw attribute list.
bool oracle_compound(const DomNode& n, const CompoundSelector& c) {
  if (n.tag == "#text") return false;
  if (!c.tag.empty() && c.tag != n.tag) return false;
  auto value = [&](const std::string& name) -> const std::string* {
    for (const auto& [k, v] : n.attrs) {
      if (k == name) return &v;
    }
    return nullptr;
  };
  for (const auto& id : c.ids) {
    const auto* v = value("id");
    if (!v || *v != id) return false;
  }
  for (const auto& cls : c.classes) {
    const auto* v = value("class");
    if (!v) return false;
    std::istringstream ss(*v);
    std::string tok;
    bool found = false;
    while (ss >> tok) found = found || tok == cls;
    if (!found) return false;
  }
  for (const auto& a : c.attrs) {
    const auto* v = value(a.name);
    if (!v || *v != a.value) return false;
  }
  return true;
}

// Root-to-node path, then a DP over (compound index, path position).
bool oracle_matches(const FrameInfo& f, NodeId id, const SelectorExpr& sel) {
  std::vector<NodeId> path{id};
  for (auto p = f.parent(id); p; p = f.parent(*p)) path.insert(path.begin(), *p);
  const std::size_t m = sel.compounds.size(), L = path.size();
  // ok[k][i]: compounds[0..k] can be placed with compounds[k] at path[i].
  std::vector<std::vector<bool>> ok(m, std::vector<bool>(L, false));
  for (std::size_t i = 0; i < L; ++i) ok[0][i] = oracle_compound(f.node(path[i]), sel.compounds[0]);
  for (std::size_t k = 1; k < m; ++k) {
    for (std::size_t i = 0; i < L; ++i) {
      if (!oracle_compound(f.node(path[i]), sel.compounds[k])) continue;
      if (sel.combinators[k - 1] == Combinator::Child) {
        ok[k][i] = i > 0 && ok[k - 1][i - 1];
      } else {
        for (std::size_t j = 0; j < i && !ok[k][i]; ++j) ok[k][i] = ok[k - 1][j];
      }
    }
  }
  return ok[m - 1][L - 1];
}

}  // namespace

TEST(Selector, NewsfeedAdExample) {
  FrameBuilder b;
  const NodeId html = b.add(std::nullopt, "html");
  const NodeId feed = b.add(html, "div", {{"id", "newsfeed"}});
  const NodeId wrap = b.add(feed, "section");
  const NodeId ad = b.add(wrap, "div", {{"class", "post ad"}});
  b.add(html, "div", {{"class", "ad"}});
  const FrameInfo f = b.build();
  EXPECT_EQ(match_selector(f, parse_selector("div#newsfeed div.ad")), std::set<NodeId>{ad});
  EXPECT_TRUE(match_selector(f, parse_selector("#Ad3Right")).empty());
  EXPECT_TRUE(match_selector(f, parse_selector("div#newsfeed > div.ad")).empty());
}

TEST(Selector, RejectsUnsupportedSyntax) {
  for (const char* s : {"div:hover", "a + b", "a ~ b", "a, b", "", "[x]", "div[", "..a", "a >", "[x=\"a\\\"\"]"}) {
    EXPECT_THROW(parse_selector(s), SelectorError) << s;
  }
}

TEST(Selector, FormatIsCanonicalAndIdempotent) {
  EXPECT_EQ(format_selector(parse_selector("DIV#a.b[data-x='1']>span   .c")), "div#a.b[data-x=\"1\"] > span .c");
  EXPECT_EQ(format_selector(parse_selector("*")), "*");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const std::string s = adwar::testing::random_selector_text(rng);
    const auto once = format_selector(parse_selector(s));
    EXPECT_EQ(format_selector(parse_selector(once)), once) << s;
    EXPECT_EQ(parse_selector(once), parse_selector(s)) << s;
  }
}

TEST(Selector, TextNodesNeverMatch) {
  FrameBuilder b;
  const NodeId html = b.add(std::nullopt, "html");
  b.text(html, "x");
  EXPECT_EQ(match_selector(b.build(), parse_selector("*")), std::set<NodeId>{html});
}

// >= 1000 (tree, selector) pairs against the DP oracle.
TEST(Selector, AgreesWithBruteForceOracle) {
  std::mt19937_64 rng(42);
  int pairs = 0;
  for (int t = 0; t < 60; ++t) {
    const FrameInfo f = adwar::testing::random_frame(rng, 30);
    for (int s = 0; s < 200; ++s, ++pairs) {
      const SelectorExpr sel = parse_selector(adwar::testing::random_selector_text(rng));
      std::set<NodeId> expected;
      for (const auto& n : f.nodes) {
        if (oracle_matches(f, n.id, sel)) expected.insert(n.id);
      }
      ASSERT_EQ(match_selector(f, sel), expected) << format_selector(sel);
    }
  }
  EXPECT_GE(pairs, 1000);
}

// Deleting a leaf never creates a match.
TEST(Selector, MonotoneUnderNodeRemoval) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    FrameInfo f = adwar::testing::random_frame(rng, 25);
    const SelectorExpr sel = parse_selector(adwar::testing::random_selector_text(rng));
    const auto before = match_selector(f, sel);
    std::vector<NodeId> leaves;
    for (const auto& n : f.nodes) {
      if (n.children.empty() && n.id != f.root()) leaves.push_back(n.id);
    }
    if (leaves.empty()) continue;
    const NodeId victim = leaves[rng() % leaves.size()];
    const NodeId parent = *f.parent(victim);
    auto& kids = f.node_mut(parent).children;
    kids.erase(std::find(kids.begin(), kids.end(), victim));
    f.nodes.erase(std::find_if(f.nodes.begin(), f.nodes.end(), [&](const DomNode& n) { return n.id == victim; }));
    f.rebuild_index();
    for (NodeId id : match_selector(f, sel)) EXPECT_TRUE(before.count(id));
  }
}
