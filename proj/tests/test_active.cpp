#include <gtest/gtest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/read.hpp>
#include <boost/asio/write.hpp>
#include <random>

#include "adwar/active.hpp"
#include "adwar/proxy.hpp"
#include "adwar/util.hpp"
#include "fixture_server.hpp"
#include "json.hpp"

using namespace adwar;
using adwar::testing::FixtureServer;

namespace {

struct CorpusScript {
  std::string file, host, source, expected;
  std::vector<std::string> categories;
};

std::vector<CorpusScript> corpus() {
  std::vector<CorpusScript> out;
  const auto index = nlohmann::json::parse(read_file(asset_path("detectors/index.json")));
  for (const auto& e : index) {
    CorpusScript s;
    s.file = e.at("file");
    s.host = e.at("host");
    s.source = read_file(asset_path("detectors/" + s.file));
    s.expected = read_file(asset_path("detectors/expected/" + s.file));
    s.categories = e.at("categories").get<std::vector<std::string>>();
    out.push_back(std::move(s));
  }
  return out;
}

const std::vector<Signature>& bundled() {
  static const auto sigs = load_signatures(asset_path("signatures.json"));
  return sigs;
}

Signature sig(std::string id, std::string pattern, ActionKind kind, std::string replacement = "",
              std::string site = "*") {
  Signature s;
  s.id = std::move(id);
  s.site = std::move(site);
  s.pattern = std::move(pattern);
  s.action.kind = kind;
  if (kind == ActionKind::RemoveBait) {
    s.action.selector = replacement;
  } else {
    s.action.replacement = replacement;
  }
  compile_signature(s);
  return s;
}

// Raw exchange with the proxy; returns everything read until close.
std::string raw_exchange(unsigned short port, const std::string& request) {
  namespace asio = boost::asio;
  asio::io_context ioc;
  asio::ip::tcp::socket sock(ioc);
  sock.connect({asio::ip::make_address("127.0.0.1"), port});
  asio::write(sock, asio::buffer(request));
  std::string out;
  boost::system::error_code ec;
  asio::read(sock, asio::dynamic_buffer(out), ec);
  return out;
}

}  // namespace

TEST(Signatures, ParseOne) {
  const auto sigs = parse_signatures(
      R"js([{"id":"a","site":"x.test","pattern":"function f\\(\\)","action":{"kind":"force-return","replacement":"false"}}])js");
  ASSERT_EQ(sigs.size(), 1u);
  EXPECT_EQ(sigs[0].action.kind, ActionKind::ForceReturn);
  EXPECT_EQ(sigs[0].action.replacement, "false");
  EXPECT_TRUE(sigs[0].compiled);
}

TEST(Signatures, Rejections) {
  const std::string one = R"({"id":"dup","pattern":"x","action":{"kind":"nop-function"}})";
  try {
    parse_signatures("[" + one + "," + one + "]");
    FAIL();
  } catch (const SignatureError& e) {
    EXPECT_EQ(e.id(), "dup");
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
  try {
    parse_signatures(R"([{"id":"re","pattern":"(unclosed","action":{"kind":"nop-function"}}])");
    FAIL();
  } catch (const SignatureError& e) {
    EXPECT_EQ(e.id(), "re");
    EXPECT_NE(std::string(e.what()).find("bad regex"), std::string::npos);
  }
  EXPECT_THROW(parse_signatures(R"([{"id":"e","pattern":"x","action":{"kind":"force-return"}}])"), SignatureError);
  EXPECT_THROW(parse_signatures(R"([{"id":"e","pattern":"x","action":{"kind":"replace-span","replacement":""}}])"),
               SignatureError);
  EXPECT_THROW(parse_signatures(R"([{"id":"k","pattern":"x","action":{"kind":"explode"}}])"), SignatureError);
  EXPECT_THROW(parse_signatures(R"([{"id":"b","pattern":"x","action":{"kind":"remove-bait","selector":"a:b"}}])"),
               SignatureError);
  EXPECT_THROW(parse_signatures("{}"), SignatureError);
}

TEST(Signatures, BundledFileRoundTrips) {
  const auto& sigs = bundled();
  ASSERT_GE(sigs.size(), 10u);
  const auto again = parse_signatures(signatures_to_json(sigs));
  ASSERT_EQ(again.size(), sigs.size());
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    EXPECT_EQ(again[i].id, sigs[i].id);
    EXPECT_EQ(again[i].site, sigs[i].site);
    EXPECT_EQ(again[i].pattern, sigs[i].pattern);
    EXPECT_EQ(again[i].action, sigs[i].action);
    EXPECT_EQ(again[i].notes, sigs[i].notes);
  }
}

TEST(Signatures, SiteScope) {
  auto s = sig("s", "x", ActionKind::NopFunction, "", "news.test");
  EXPECT_TRUE(s.applies_to("news.test"));
  EXPECT_TRUE(s.applies_to("cdn.NEWS.test"));
  EXPECT_FALSE(s.applies_to("badnews.test"));
  s.site = "*.news.test";
  EXPECT_TRUE(s.applies_to("www.news.test"));
  EXPECT_FALSE(s.applies_to("news.test"));
  s.site = "*";
  EXPECT_TRUE(s.applies_to("anything"));
}

TEST(ScanAndPatch, ForceReturnExample) {
  const std::string src = R"(function abDetected(){return !document.getElementById("bait");})";
  const auto r = scan_and_patch(src, "any.test", {sig("fr", R"(function\s+abDetected\s*\(\))", ActionKind::ForceReturn, "false")});
  EXPECT_EQ(r.source, "function abDetected(){return false;}");
  ASSERT_EQ(r.actions.size(), 1u);
  EXPECT_EQ(r.actions[0].begin, 0u);
  EXPECT_EQ(r.actions[0].end, src.size());
  EXPECT_EQ(r.check, DelimiterCheck::Balanced);
}

TEST(ScanAndPatch, NoMatchIsIdentity) {
  const std::string src = "var x = 1;\n";
  const auto r = scan_and_patch(src, "a.test", bundled());
  EXPECT_EQ(r.source, src);
  EXPECT_TRUE(r.actions.empty());
  EXPECT_TRUE(r.directives.empty());
}

TEST(ScanAndPatch, UnbalancedPatchRollsBack) {
  const std::string src = "function f() { if (x) { g(); } }";
  const auto r = scan_and_patch(src, "a.test", {sig("bad", R"(if \(x\) \{)", ActionKind::ReplaceSpan, "if (x) {{")});
  EXPECT_EQ(r.source, src);
  EXPECT_TRUE(r.actions.empty());
  ASSERT_EQ(r.rolled_back.size(), 1u);
  EXPECT_EQ(r.rolled_back[0].signature, "bad");
  EXPECT_EQ(r.check, DelimiterCheck::RolledBack);
}

TEST(ScanAndPatch, LeftmostNonOverlapping) {
  const std::string src = "aaa bbb aaa";
  const auto r = scan_and_patch(src, "h", {sig("ab", "aaa bbb", ActionKind::ReplaceSpan, "X"),
                                           sig("b", "bbb aaa", ActionKind::ReplaceSpan, "Y"),
                                           sig("a", "aaa", ActionKind::ReplaceSpan, "Z")});
  EXPECT_EQ(r.source, "X Z");
  ASSERT_EQ(r.actions.size(), 2u);
  EXPECT_LT(r.actions[0].end, r.actions[1].begin + 1);
}

TEST(ScanAndPatch, NopAndDirective) {
  const std::string src = "function nag(a) { alert(a); }\nvar b = make('adsbox');";
  const auto r = scan_and_patch(src, "h", {sig("n", R"(function nag\(\w*\))", ActionKind::NopFunction),
                                           sig("d", "adsbox", ActionKind::RemoveBait, "div.adsbox")});
  EXPECT_EQ(r.source, "function nag(a) {}\nvar b = make('adsbox');");
  ASSERT_EQ(r.directives.size(), 1u);
  EXPECT_EQ(r.directives[0].selector, "div.adsbox");
}

TEST(ScanAndPatch, MissingBodyIsReported) {
  const auto r = scan_and_patch("function f()", "h", {sig("f", R"(function f\(\))", ActionKind::ForceReturn, "0")});
  EXPECT_EQ(r.source, "function f()");
  EXPECT_EQ(r.rolled_back.size(), 1u);
}

TEST(Delimiters, SkipsStringsAndComments) {
  EXPECT_TRUE(delimiters_balanced(R"(f("(", '[', `{`); // )
/* ] */ g[0]{})"));
  EXPECT_FALSE(delimiters_balanced("f(]"));
  EXPECT_FALSE(delimiters_balanced("{"));
  std::size_t open = 0;
  const std::string s = R"(x = function () { var s = "}"; if (a) { b(); } return 1; } + 2)";
  const auto end = find_body_end(s, 0, &open);
  EXPECT_EQ(s[open], '{');
  EXPECT_EQ(s.substr(end + 1), " + 2");
}

TEST(DetectorCorpus, MatchesExpectedAndIsIdempotent) {
  const auto scripts = corpus();
  ASSERT_GE(scripts.size(), 10u);
  for (const auto& s : scripts) {
    const auto r = scan_and_patch(s.source, s.host, bundled(), s.file);
    EXPECT_TRUE(r.changed()) << s.file;
    EXPECT_EQ(r.source, s.expected) << s.file;
    EXPECT_EQ(r.check, DelimiterCheck::Balanced) << s.file;
    const auto again = scan_and_patch(r.source, s.host, bundled(), s.file);
    EXPECT_EQ(again.source, r.source) << s.file;
    EXPECT_TRUE(again.actions.empty()) << s.file;
  }
}

// Oracle: splicing the recorded actions by hand reproduces the output, and
// everything between spans is byte-identical to the input.
TEST(DetectorCorpus, BytesOutsideSpansUnchanged) {
  for (const auto& s : corpus()) {
    const auto r = scan_and_patch(s.source, s.host, bundled(), s.file);
    std::string rebuilt;
    std::size_t pos = 0;
    for (const auto& a : r.actions) {
      ASSERT_LE(pos, a.begin) << s.file;
      rebuilt += s.source.substr(pos, a.begin - pos) + a.replacement;
      pos = a.end;
    }
    rebuilt += s.source.substr(pos);
    EXPECT_EQ(rebuilt, r.source) << s.file;
  }
}

TEST(DetectorCorpus, ScopedSignaturesStayOnTheirSite) {
  const auto scripts = corpus();
  std::vector<std::string> hosts{"unrelated.example"};
  for (const auto& s : scripts) hosts.push_back(s.host);
  for (const auto& s : scripts) {
    for (const auto& host : hosts) {
      const auto r = scan_and_patch(s.source, host, bundled());
      for (const auto& a : r.actions) {
        const auto it = std::find_if(bundled().begin(), bundled().end(),
                                     [&](const Signature& x) { return x.id == a.signature; });
        EXPECT_TRUE(it->applies_to(host)) << a.signature << " on " << host;
      }
      if (host == "unrelated.example") {
        EXPECT_TRUE(r.actions.empty());
        EXPECT_TRUE(r.directives.empty());
      }
    }
  }
}

TEST(DetectorCorpus, Classification) {
  bool stacked = false;
  for (const auto& s : corpus()) {
    std::vector<std::string> got;
    for (const auto& c : classify_detector(s.source)) {
      got.push_back(to_string(c.category));
      EXPECT_LT(c.begin, c.end);
      EXPECT_LE(c.end, s.source.size());
    }
    EXPECT_EQ(got, s.categories) << s.file;
    stacked = stacked || got.size() == 3;
  }
  EXPECT_TRUE(stacked);
  EXPECT_TRUE(classify_detector("").empty());
  const auto bait = classify_detector(
      "var d = document.createElement('div'); d.className = 'adsbox'; if (d.offsetHeight === 0) hit();");
  ASSERT_EQ(bait.size(), 1u);
  EXPECT_EQ(bait[0].category, DetectorCategory::BaitAd);
  const auto res = classify_detector("if (!window.googletag) nag();");
  ASSERT_EQ(res.size(), 1u);
  EXPECT_EQ(res[0].category, DetectorCategory::AbsentKnownResource);
}

TEST(Proxy, Helpers) {
  EXPECT_EQ(parse_listen("127.0.0.1:8080"), (std::pair<std::string, unsigned short>{"127.0.0.1", 8080}));
  EXPECT_THROW(parse_listen("8080"), std::invalid_argument);
  EXPECT_THROW(parse_listen("h:99999"), std::invalid_argument);
  EXPECT_TRUE(is_script_response("application/javascript; charset=utf-8", "/a"));
  EXPECT_TRUE(is_script_response("text/ecmascript", "/a"));
  EXPECT_TRUE(is_script_response("", "/lib/app.js?v=2"));
  EXPECT_FALSE(is_script_response("image/png", "/x.js"));
  EXPECT_FALSE(is_script_response("text/html", "/index"));
}

class ProxyTest : public ::testing::Test {
 protected:
  FixtureServer origin;
  std::vector<std::string> logs;
  std::mutex log_mu;

  std::unique_ptr<ProxyServer> make(bool block = false, std::size_t cap = 1 << 20) {
    ProxyConfig cfg;
    cfg.signatures_path = asset_path("signatures.json");
    cfg.filters_path = asset_path("filters.txt");
    cfg.block_resources = block;
    cfg.max_script_bytes = cap;
    for (const auto& s : corpus()) cfg.resolve[s.host] = "127.0.0.1";
    cfg.resolve["static.test"] = "127.0.0.1";
    cfg.resolve["ad.doubleclick.net"] = "127.0.0.1";
    cfg.log = [this](const std::string& line) {
      std::lock_guard lock(log_mu);
      logs.push_back(line);
    };
    auto p = std::make_unique<ProxyServer>(cfg);
    p->start();
    return p;
  }

  httplib::Client client(const ProxyServer& p, const std::string& host) {
    httplib::Client c(host, origin.port());
    c.set_proxy("127.0.0.1", p.port());
    return c;
  }

  void SetUp() override {
    for (const auto& s : corpus()) {
      origin.server().Get("/js/" + s.file, [src = s.source](const httplib::Request&, httplib::Response& res) {
        res.set_content(src, "application/javascript");
      });
    }
    origin.server().Get(R"(/bin/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
      std::mt19937 rng(std::stoi(req.matches[1]));
      std::string body(100 + rng() % 5000, '\0');
      for (auto& c : body) c = static_cast<char>(rng());
      res.set_content(body, rng() % 2 ? "image/png" : "application/octet-stream");
    });
  }
};

TEST_F(ProxyTest, RewritesScriptsAndRelaysOthers) {
  auto p = make();
  for (const auto& s : corpus()) {
    auto c = client(*p, s.host);
    auto res = c.Get("/js/" + s.file);
    ASSERT_TRUE(res) << s.file;
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->body, scan_and_patch(s.source, s.host, bundled()).source) << s.file;
  }
  // Non-script bodies: byte-identical over a 100-response mix.
  auto direct = httplib::Client("127.0.0.1", origin.port());
  auto via = client(*p, "static.test");
  for (int i = 0; i < 100; ++i) {
    const std::string path = "/bin/" + std::to_string(i);
    auto a = direct.Get(path);
    auto b = via.Get(path);
    ASSERT_TRUE(a && b);
    EXPECT_EQ(std::hash<std::string>{}(a->body), std::hash<std::string>{}(b->body));
    EXPECT_EQ(a->body, b->body);
  }
  std::lock_guard lock(log_mu);
  ASSERT_FALSE(logs.empty());
  const auto first = nlohmann::json::parse(logs.front());
  EXPECT_TRUE(first.contains("host"));
  EXPECT_TRUE(first.contains("path"));
  EXPECT_TRUE(first["signatures"].is_array());
}

TEST_F(ProxyTest, ConnectIsNotImplemented) {
  auto p = make();
  const auto reply = raw_exchange(p->port(), "CONNECT news-a.test:443 HTTP/1.1\r\nHost: news-a.test:443\r\n\r\n");
  EXPECT_EQ(reply.rfind("HTTP/1.1 501", 0), 0u) << reply;
  EXPECT_NE(reply.find("TLS"), std::string::npos);
}

TEST_F(ProxyTest, UpstreamFailureIs502) {
  auto p = make();
  httplib::Client c("127.0.0.1", 1);
  c.set_proxy("127.0.0.1", p->port());
  auto res = c.Get("/x.js");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 502);
}

TEST_F(ProxyTest, OriginFormRequestIs400) {
  auto p = make();
  const auto reply = raw_exchange(p->port(), "GET /x HTTP/1.1\r\nHost: a\r\nConnection: close\r\n\r\n");
  EXPECT_EQ(reply.rfind("HTTP/1.1 400", 0), 0u) << reply;
}

TEST_F(ProxyTest, FilterListHitsAre403WhenEnabled) {
  origin.server().Get("/pixel.gif", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("GIF", "image/gif");
  });
  {
    auto p = make(false);
    auto res = client(*p, "ad.doubleclick.net").Get("/pixel.gif");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
  }
  auto p = make(true);
  auto res = client(*p, "ad.doubleclick.net").Get("/pixel.gif");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 403);
}

TEST_F(ProxyTest, OversizedScriptPassesUnmodified) {
  auto p = make(false, 16);
  const auto s = corpus().front();
  auto res = client(*p, s.host).Get("/js/" + s.file);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->body, s.source);
  std::lock_guard lock(log_mu);
  ASSERT_EQ(logs.size(), 1u);
  EXPECT_NE(logs[0].find("max-script-bytes"), std::string::npos);
}

TEST_F(ProxyTest, SignatureSwapAppliesToNewConnections) {
  auto p = make();
  const auto s = corpus().front();
  p->set_signatures({});
  {
    auto res = client(*p, s.host).Get("/js/" + s.file);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->body, s.source);
  }
  p->reload_signatures();
  auto res = client(*p, s.host).Get("/js/" + s.file);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->body, s.expected);
}
