#include <gtest/gtest.h>

#include <random>

#include "adwar/filter.hpp"
#include "adwar/util.hpp"
#include "support.hpp"

using namespace adwar;
using adwar::testing::FrameBuilder;

namespace {

FilterRule rule_of(const ParsedLine& p) { return std::get<FilterRule>(p); }

}  // namespace

TEST(FilterParse, TableOneShapes) {
  const auto a = rule_of(parse_filter_line("###Ad3Right"));
  EXPECT_EQ(a.kind, RuleKind::ElementHide);
  EXPECT_TRUE(a.domain.empty());
  EXPECT_EQ(format_selector(a.selector), "#Ad3Right");

  const auto b = rule_of(parse_filter_line("liverpoolfc.com###FooterLogos"));
  EXPECT_EQ(b.domain, "liverpoolfc.com");
  EXPECT_EQ(format_selector(b.selector), "#FooterLogos");

  const auto c = rule_of(parse_filter_line("||atdhe.ws/pp.js"));
  EXPECT_EQ(c.kind, RuleKind::ResourceBlock);
  EXPECT_EQ(c.anchor, Anchor::Host);
  EXPECT_EQ(c.pattern, "atdhe.ws/pp.js");

  const auto d = rule_of(parse_filter_line(".com/doubleclick/"));
  EXPECT_EQ(d.anchor, Anchor::Substring);
}

TEST(FilterParse, SkipsWithReasons) {
  const std::pair<const char*, const char*> cases[] = {
      {"ads.example.com##div:hover", "pseudo-class"},
      {"! comment", "comment"},
      {"[Adblock Plus 2.0]", "header"},
      {"@@||example.com^", "exception"},
      {"||ads.com^$third-party", "$-options"},
      {"/banner\\d+/", "regular-expression"},
      {"example.com#@##ad", "exceptions"},
      {"a.com,b.com##.ad", "multi-domain"},
      {"~a.com##.ad", "negated"},
      {"co.uk##.ad", "public suffix"},
      {"|http://x.com/", "start-anchored"},
  };
  for (const auto& [line, reason] : cases) {
    const auto p = parse_filter_line(line);
    ASSERT_TRUE(std::holds_alternative<SkipMarker>(p)) << line;
    EXPECT_NE(std::get<SkipMarker>(p).reason.find(reason), std::string::npos)
        << line << " -> " << std::get<SkipMarker>(p).reason;
  }
}

TEST(FilterParse, ParsingIsTotal) {
  std::mt19937_64 rng(1);
  const std::string alphabet = "#|^*$@!.,~:/ab-[]=\"'()>+ \t";
  for (int i = 0; i < 5000; ++i) {
    std::string line;
    const int len = static_cast<int>(rng() % 20);
    for (int k = 0; k < len; ++k) line += alphabet[rng() % alphabet.size()];
    EXPECT_NO_THROW(parse_filter_line(line)) << line;
  }
  const auto list = parse_filter_list("! c\n\n||a.com^\n##div:hover\r\n###x\n");
  EXPECT_EQ(list.rules.size(), 2u);
  ASSERT_EQ(list.skipped.size(), 2u);
  EXPECT_EQ(list.skipped[1].line_number, 4u);
}

TEST(MatchUrl, TableOneExamples) {
  const auto list = parse_filter_list("||atdhe.ws/pp.js\n.com/doubleclick/\n");
  auto v = match_url(list, "https://atdhe.ws/pp.js");
  EXPECT_TRUE(v.blocked);
  EXPECT_EQ(v.rule_index, 0u);
  v = match_url(list, "https://x.com/doubleclick/ad.js");
  EXPECT_TRUE(v.blocked);
  EXPECT_EQ(v.rule_index, 1u);
  EXPECT_FALSE(match_url(list, "https://notatdhe.ws/pp.js").blocked);
  EXPECT_TRUE(match_url(list, "http://cdn.atdhe.ws/pp.js").blocked);
  EXPECT_TRUE(match_url(list, "http://ATDHE.ws/pp.js").blocked);
  EXPECT_THROW(match_url(list, "ftp://atdhe.ws/pp.js"), UrlError);
  EXPECT_THROW(match_url(list, "not a url"), UrlError);
}

TEST(MatchUrl, WildcardsAndSeparators) {
  const auto list = parse_filter_list("||ads.example.com^\n/banner/*/img^\nswf|\n");
  EXPECT_TRUE(match_url(list, "https://ads.example.com/x").blocked);
  EXPECT_TRUE(match_url(list, "https://ads.example.com").blocked);
  EXPECT_FALSE(match_url(list, "https://ads.example.community/").blocked);
  EXPECT_TRUE(match_url(list, "http://e.com/banner/foo/img?x").blocked);
  EXPECT_FALSE(match_url(list, "http://e.com/banner/foo/imgx").blocked);
  EXPECT_TRUE(match_url(list, "http://e.com/a.swf").blocked);
  EXPECT_FALSE(match_url(list, "http://e.com/a.swf?x").blocked);
}

TEST(MatchUrl, EarliestRuleWins) {
  const auto list = parse_filter_list("/ads/\n||example.com/ads/\n");
  EXPECT_EQ(match_url(list, "https://example.com/ads/1").rule_index, 0u);
  const auto reversed = parse_filter_list("||example.com/ads/\n/ads/\n");
  EXPECT_EQ(match_url(reversed, "https://example.com/ads/1").rule_index, 0u);
  const auto single = parse_filter_list("/zzz/\n||example.com/ads/\n");
  const auto single_rev = parse_filter_list("||example.com/ads/\n/zzz/\n");
  EXPECT_EQ(single.rules[*match_url(single, "https://example.com/ads/1").rule_index].raw,
            single_rev.rules[*match_url(single_rev, "https://example.com/ads/1").rule_index].raw);
}

// Oracle for literal host-anchored rules: try every start position of the
// scheme-stripped URL and keep those at a host-label boundary.
TEST(MatchUrl, HostAnchorBoundaryOracle) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> labels{"a", "b", "ab", "ba", "x"};
  auto host = [&](int n) {
    std::string h;
    for (int i = 0; i < n; ++i) h += (i ? "." : "") + labels[rng() % labels.size()];
    return h;
  };
  for (int i = 0; i < 3000; ++i) {
    const std::string url_host = host(1 + static_cast<int>(rng() % 4)) + ".com";
    const std::string path = rng() % 2 ? "/p.js" : "/q/p.js";
    const std::string url = "https://" + url_host + path;
    std::string pat = host(1 + static_cast<int>(rng() % 3));
    if (rng() % 2) pat += ".com";
    if (rng() % 3 == 0) pat += "/p.js";
    const auto list = parse_filter_list("||" + pat);
    ASSERT_EQ(list.rules.size(), 1u);
    const std::string rest = url_host + path;
    bool expected = false;
    for (std::size_t pos = 0; pos < url_host.size(); ++pos) {
      if (pos > 0 && rest[pos - 1] != '.') continue;
      if (rest.compare(pos, pat.size(), pat) == 0) expected = true;
    }
    EXPECT_EQ(match_url(list, url).blocked, expected) << pat << " vs " << url;
  }
}

TEST(MatchElements, DomainScope) {
  const auto list = parse_filter_list("liverpoolfc.com###FooterLogos\n");
  FrameBuilder b("https://www.liverpoolfc.com/news");
  const NodeId html = b.add(std::nullopt, "html");
  const NodeId logos = b.add(html, "div", {{"id", "FooterLogos"}});
  const auto hidden = match_elements(list, adwar::testing::single_frame(b.build()));
  EXPECT_EQ(hidden[0], std::set<NodeId>{logos});

  FrameBuilder other("https://example.com/");
  const NodeId h2 = other.add(std::nullopt, "html");
  other.add(h2, "div", {{"id", "FooterLogos"}});
  EXPECT_TRUE(match_elements(list, adwar::testing::single_frame(other.build()))[0].empty());

  FrameBuilder lookalike("https://notliverpoolfc.com/");
  const NodeId h3 = lookalike.add(std::nullopt, "html");
  lookalike.add(h3, "div", {{"id", "FooterLogos"}});
  EXPECT_TRUE(match_elements(list, adwar::testing::single_frame(lookalike.build()))[0].empty());
}

TEST(MatchElements, NeverHidesRoot) {
  const auto list = parse_filter_list("##html\n##*\n");
  FrameBuilder b;
  const NodeId html = b.add(std::nullopt, "html");
  const NodeId body = b.add(html, "body");
  EXPECT_EQ(match_elements(list, adwar::testing::single_frame(b.build()))[0], std::set<NodeId>{body});
}

// Oracle: double loop over rules x nodes with an explicit scope check.
TEST(MatchElements, AgreesWithDoubleLoop) {
  std::mt19937_64 rng(23);
  const std::vector<std::string> hosts{"www.example.com", "example.com", "shop.example.com", "other.org"};
  const std::vector<std::string> scopes{"", "example.com", "shop.example.com", "other.org", "nothere.net"};
  for (int round = 0; round < 100; ++round) {
    std::string text;
    for (int r = 0; r < 6; ++r) {
      text += scopes[rng() % scopes.size()] + "##" + adwar::testing::random_selector_text(rng) + "\n";
    }
    const auto list = parse_filter_list(text);
    FrameInfo f = adwar::testing::random_frame(rng, 30);
    const std::string host = hosts[rng() % hosts.size()];
    f.url = "https://" + host + "/";
    const auto snap = adwar::testing::single_frame(std::move(f));
    std::set<NodeId> expected;
    for (const auto& rule : list.rules) {
      const bool scoped = rule.domain.empty() || host == rule.domain ||
                          (host.size() > rule.domain.size() &&
                           host.compare(host.size() - rule.domain.size(), rule.domain.size(), rule.domain) == 0 &&
                           host[host.size() - rule.domain.size() - 1] == '.');
      if (!scoped) continue;
      for (const auto& n : snap.frames[0].nodes) {
        if (n.id != snap.frames[0].root() && matches(snap.frames[0], n.id, rule.selector)) expected.insert(n.id);
      }
    }
    EXPECT_EQ(match_elements(list, snap)[0], expected) << text;
  }
}

TEST(Domains, RegistrableDomain) {
  EXPECT_EQ(registrable_domain("www.liverpoolfc.com"), "liverpoolfc.com");
  EXPECT_EQ(registrable_domain("a.b.example.co.uk"), "example.co.uk");
  EXPECT_TRUE(is_public_suffix("co.uk"));
  EXPECT_FALSE(is_public_suffix("example.com"));
  EXPECT_TRUE(host_matches_domain("a.example.com", "example.com"));
  EXPECT_FALSE(host_matches_domain("badexample.com", "example.com"));
}
