#include <gtest/gtest.h>
#include <httplib.h>

#include <limits>
#include <random>
#include <thread>

#include "adwar/click.hpp"
#include "adwar/containers.hpp"
#include "adwar/template_match.hpp"
#include "adwar/text_recognition.hpp"
#include "fixture_server.hpp"
#include "support.hpp"

using namespace adwar;
using adwar::testing::FixtureServer;
using adwar::testing::FrameBuilder;

namespace {

GrayImage random_gray(std::mt19937_64& rng, int w, int h) {
  GrayImage g(w, h);
  for (auto& p : g.px) p = static_cast<std::uint8_t>(rng() & 255);
  return g;
}

void paste(GrayImage& dst, const GrayImage& src, int x, int y) {
  for (int r = 0; r < src.height; ++r) {
    for (int c = 0; c < src.width; ++c) dst.at(x + c, y + r) = src.at(c, r);
  }
}

struct OracleHit {
  int x, y;
  std::size_t scale_index;
  std::uint64_t ssd;
  double score;
};

// Full scan without pruning. SSD is expanded as sum(H^2) - 2 sum(HT) + sum(T^2)
// with sum(H^2) taken from an integral image, so it shares no arithmetic
// with the library's direct difference loop.
std::optional<OracleHit> oracle_scan(const GrayImage& hay, const ImageTemplate& tmpl) {
  const int W = hay.width, H = hay.height;
  std::vector<std::uint64_t> sq(static_cast<std::size_t>((W + 1) * (H + 1)), 0);
  auto I = [&](int x, int y) -> std::uint64_t& { return sq[static_cast<std::size_t>(y * (W + 1) + x)]; };
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const std::uint64_t v = hay.at(x, y);
      I(x + 1, y + 1) = v * v + I(x, y + 1) + I(x + 1, y) - I(x, y);
    }
  }
  std::optional<OracleHit> best;
  for (std::size_t si = 0; si < tmpl.scales.size(); ++si) {
    const GrayImage t = scale_gray(tmpl.gray, tmpl.scales[si]);
    if (t.width > W || t.height > H) continue;
    std::uint64_t tt = 0;
    for (auto p : t.px) tt += std::uint64_t(p) * p;
    for (int y = 0; y + t.height <= H; ++y) {
      for (int x = 0; x + t.width <= W; ++x) {
        const std::uint64_t hh = I(x + t.width, y + t.height) - I(x, y + t.height) - I(x + t.width, y) + I(x, y);
        std::uint64_t ht = 0;
        for (int r = 0; r < t.height; ++r) {
          for (int c = 0; c < t.width; ++c) ht += std::uint64_t(hay.at(x + c, y + r)) * t.at(c, r);
        }
        const std::uint64_t ssd = hh + tt - 2 * ht;
        const double score = nrmse_from_ssd(ssd, t.px.size());
        if (score > tmpl.max_nrmse) continue;
        // (score, scale index, y, x) lexicographic; iteration order already
        // covers everything after the score.
        if (!best || score < best->score) best = OracleHit{x, y, si, ssd, score};
      }
    }
  }
  return best;
}

}  // namespace

TEST(MatchImage, ExactEmbed) {
  std::mt19937_64 rng(1);
  GrayImage hay = random_gray(rng, 40, 30);
  const GrayImage t = random_gray(rng, 9, 7);
  paste(hay, t, 7, 3);
  ImageTemplate tmpl(t);
  const auto m = match_image(hay, tmpl);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->x, 7);
  EXPECT_EQ(m->y, 3);
  EXPECT_EQ(m->score, 0.0);
  EXPECT_EQ(m->scale, 1.0);
}

// Uniform noise of amplitude a per pixel bounds the RMSE at the embed by a/255.
TEST(MatchImage, NoisyEmbedWithinAnalyticBound) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    GrayImage hay = random_gray(rng, 60, 50);
    GrayImage t = random_gray(rng, 12, 12);
    for (auto& p : t.px) p = static_cast<std::uint8_t>(std::clamp<int>(p, 10, 245));
    GrayImage noisy = t;
    std::uniform_int_distribution<int> noise(-10, 10);
    for (auto& p : noisy.px) p = static_cast<std::uint8_t>(p + noise(rng));
    paste(hay, noisy, 20 + trial, 9);
    const auto m = match_image(hay, ImageTemplate(t));
    ASSERT_TRUE(m);
    EXPECT_EQ(m->x, 20 + trial);
    EXPECT_EQ(m->y, 9);
    EXPECT_LE(m->score, 10.0 / 255.0);
  }
}

TEST(MatchImage, AgreesWithBruteForceOn32x32) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    GrayImage hay = random_gray(rng, 32, 32);
    const int tw = 4 + static_cast<int>(rng() % 9), th = 4 + static_cast<int>(rng() % 9);
    GrayImage t = random_gray(rng, tw, th);
    if (trial % 3 == 0) {
      GrayImage noisy = t;
      for (auto& p : noisy.px) p = static_cast<std::uint8_t>(std::clamp<int>(p + int(rng() % 41) - 20, 0, 255));
      paste(hay, noisy, static_cast<int>(rng() % (33 - tw)), static_cast<int>(rng() % (33 - th)));
    }
    ImageTemplate tmpl(t);
    tmpl.max_nrmse = trial % 2 ? 1.0 : 0.15;
    const auto got = match_image(hay, tmpl);
    const auto want = oracle_scan(hay, tmpl);
    ASSERT_EQ(got.has_value(), want.has_value()) << trial;
    if (!got) continue;
    EXPECT_EQ(got->x, want->x) << trial;
    EXPECT_EQ(got->y, want->y) << trial;
    EXPECT_EQ(got->scale_index, want->scale_index) << trial;
    EXPECT_EQ(got->score, want->score) << trial;
  }
}

TEST(MatchImage, ScoreZeroIffExactEmbed) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    GrayImage hay = random_gray(rng, 24, 24);
    const GrayImage t = random_gray(rng, 6, 6);
    const bool embed = trial % 2 == 0;
    if (embed) paste(hay, t, static_cast<int>(rng() % 18), static_cast<int>(rng() % 18));
    ImageTemplate tmpl(t);
    tmpl.max_nrmse = 1.0;
    const auto m = match_image(hay, tmpl);
    ASSERT_TRUE(m);
    EXPECT_EQ(m->score == 0.0, embed);
  }
}

TEST(MatchImage, Preconditions) {
  ImageTemplate big(GrayImage(50, 50, 0));
  big.scales = {1.0, 2.0};
  EXPECT_THROW(match_image(GrayImage(20, 20), big), TemplateTooLarge);
  ImageTemplate bad(GrayImage(2, 2));
  bad.max_nrmse = 1.5;
  EXPECT_THROW(match_image(GrayImage(20, 20), bad), std::invalid_argument);
  bad.max_nrmse = 0.1;
  bad.scales = {0};
  EXPECT_THROW(match_image(GrayImage(20, 20), bad), std::invalid_argument);
  // Only some scales fit: the others are skipped.
  ImageTemplate partial(GrayImage(12, 12, 0));
  EXPECT_FALSE(match_image(GrayImage(10, 10, 255), partial));
}

TEST(ScaleGray, IdentityAndSize) {
  std::mt19937_64 rng(5);
  const GrayImage g = random_gray(rng, 17, 9);
  EXPECT_EQ(scale_gray(g, 1.0), g);
  const GrayImage h = scale_gray(g, 0.5);
  EXPECT_EQ(h.width, 9);
  EXPECT_EQ(h.height, 5);
  const GrayImage flat = scale_gray(GrayImage(8, 8, 77), 1.25);
  for (auto p : flat.px) EXPECT_EQ(p, 77);
}

TEST(Luma, CompositesOverWhite) {
  EXPECT_EQ(luma({0, 0, 0, 255}), 0);
  EXPECT_EQ(luma({0, 0, 0, 0}), 255);
  EXPECT_EQ(luma({255, 0, 0, 255}), 76);
}

// ---- text recognition ----

namespace {

struct OracleWord {
  int x, y, size;
  std::size_t distance;
  std::string read;
};

// Every placement, every cell, every glyph; no pruning.
std::optional<OracleWord> oracle_word(const ImageBitmap& region, const std::string& word, std::size_t bound,
                                      const std::vector<int>& sizes, double thr) {
  const BitmapFont& font = default_font();
  const GrayImage g = stretch_contrast(to_gray(region));
  auto ssd = [&](int x, int y, int s, char c) {
    std::uint64_t acc = 0;
    for (int yy = 0; yy < 7 * s; ++yy) {
      for (int xx = 0; xx < 5 * s; ++xx) {
        const int e = font.pixel(c, xx / s, yy / s) ? 0 : 255;
        const int d = g.at(x + xx, y + yy) - e;
        acc += std::uint64_t(d * d);
      }
    }
    return acc;
  };
  std::optional<OracleWord> best;
  std::uint64_t best_total = 0;
  for (int s : sizes) {
    const int span = static_cast<int>(word.size() - 1) * 6 * s + 5 * s;
    const double n = 35.0 * s * s;
    for (int y = 0; y + 7 * s <= g.height; ++y) {
      for (int x = 0; x + span <= g.width; ++x) {
        std::string read;
        std::size_t dist = 0;
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < word.size(); ++i) {
          const int cx = x + static_cast<int>(i) * 6 * s;
          std::uint64_t mn = std::numeric_limits<std::uint64_t>::max();
          char arg = '_';
          for (char c : font.chars()) {
            const auto v = ssd(cx, y, s, c);
            if (v < mn) {
              mn = v;
              arg = c;
            }
          }
          if (std::sqrt(mn / n) / 255.0 > thr) arg = '_';
          read += arg;
          dist += arg != word[i];
          total += ssd(cx, y, s, word[i]);
        }
        if (dist > bound) continue;
        if (!best || dist < best->distance || (dist == best->distance && total < best_total)) {
          best = OracleWord{x, y, s, dist, read};
          best_total = total;
        }
      }
    }
  }
  return best;
}

MarkerLexicon only(const std::string& w, std::size_t bound) { return {{{w, bound}}}; }

}  // namespace

TEST(Font, BundledFontCoversLexicon) {
  const BitmapFont& f = default_font();
  for (char c : std::string("SponsoredAdChoicesClose 0123456789")) EXPECT_TRUE(f.has(c)) << c;
  EXPECT_THROW(render_text(f, "\x01", 1), std::invalid_argument);
  EXPECT_THROW(BitmapFont::parse("glyph A\n.....\n"), std::invalid_argument);
}

TEST(RecognizeText, SelfRenderedSponsored) {
  ImageBitmap region(90, 20);
  draw_text(region, default_font(), 11, 6, "Sponsored", 1);
  const auto words = recognize_text(region, only("Sponsored", 1));
  ASSERT_EQ(words.size(), 1u);
  EXPECT_EQ(words[0].word, "Sponsored");
  EXPECT_EQ(words[0].x, 11);
  EXPECT_EQ(words[0].y, 6);
  EXPECT_EQ(words[0].distance, 0u);
}

TEST(RecognizeText, BlankRegionIsEmpty) {
  EXPECT_TRUE(recognize_text(ImageBitmap(120, 40), MarkerLexicon::defaults()).empty());
  EXPECT_TRUE(recognize_text(ImageBitmap(), MarkerLexicon::defaults()).empty());
}

TEST(RecognizeText, LexiconBoundsValidated) {
  EXPECT_THROW(recognize_text(ImageBitmap(10, 10), only("Ad", 2)), std::invalid_argument);
}

TEST(RecognizeText, TypoWithinBoundAgreesWithGlyphScan) {
  ImageBitmap region(120, 22);
  draw_text(region, default_font(), 5, 3, "Sp0nsored", 1);
  const auto words = recognize_text(region, only("Sponsored", 1));
  ASSERT_EQ(words.size(), 1u);
  EXPECT_LE(words[0].distance, 1u);
  const auto want = oracle_word(region, "Sponsored", 1, {1, 2}, 0.25);
  ASSERT_TRUE(want);
  EXPECT_EQ(words[0].x, want->x);
  EXPECT_EQ(words[0].y, want->y);
  EXPECT_EQ(words[0].size, want->size);
  EXPECT_EQ(words[0].distance, want->distance);
  EXPECT_EQ(words[0].read, want->read);
  EXPECT_EQ(words[0].read, "Sp0nsored");
  // Bound 0 rejects the typo.
  EXPECT_TRUE(recognize_text(region, only("Sponsored", 0)).empty());
}

TEST(RecognizeText, RandomFixturesAgreeWithGlyphScan) {
  std::mt19937_64 rng(8);
  const std::string alphabet = "SponsredAChicl 0";
  for (int trial = 0; trial < 12; ++trial) {
    ImageBitmap region(100, 24);
    std::string text;
    for (int i = 0; i < 6 + trial % 4; ++i) text += alphabet[rng() % alphabet.size()];
    const int size = trial % 3 == 0 ? 2 : 1;
    if (size == 2) text = text.substr(0, 7);
    draw_text(region, default_font(), static_cast<int>(rng() % 4), static_cast<int>(rng() % 4), text, size);
    for (auto& px : region.rgba) {
      if (rng() % 50 == 0) px = static_cast<std::uint8_t>(255 - px);
    }
    for (const auto& [word, bound] : std::vector<std::pair<std::string, std::size_t>>{{"Sponsored", 1}, {"Ad", 0}, {"Close Ad", 1}}) {
      const auto got = recognize_text(region, only(word, bound));
      const auto want = oracle_word(region, word, bound, {1, 2}, 0.25);
      ASSERT_EQ(got.empty(), !want.has_value()) << text << " / " << word;
      if (!want) continue;
      EXPECT_EQ(got[0].x, want->x);
      EXPECT_EQ(got[0].y, want->y);
      EXPECT_EQ(got[0].distance, want->distance);
      EXPECT_EQ(got[0].read, want->read);
    }
  }
}

TEST(RecognizeText, LargerSize) {
  ImageBitmap region(140, 30);
  draw_text(region, default_font(), 4, 8, "AdChoices", 2);
  const auto words = recognize_text(region, only("AdChoices", 1));
  ASSERT_EQ(words.size(), 1u);
  EXPECT_EQ(words[0].size, 2);
  EXPECT_EQ(words[0].distance, 0u);
}

// ---- container search ----

namespace {

PageSnapshot feed_page() {
  FrameBuilder b;
  const NodeId html = b.add(std::nullopt, "html", {}, {0, 0, 1280, 2000, true});
  const NodeId body = b.add(html, "body", {}, {0, 0, 1280, 2000, true});
  const NodeId feed = b.add(body, "div", {{"id", "feed"}}, {200, 0, 520, 2000, true});
  const NodeId item = b.add(feed, "div", {{"class", "item"}}, {210, 10, 500, 300, true});
  b.node(item).style.border_left_width = 1;
  b.node(item).style.border_right_width = 1;
  const NodeId plain = b.add(feed, "div", {}, {210, 320, 500, 300, true});
  (void)plain;
  const NodeId side = b.add(body, "div", {{"id", "side"}}, {960, 0, 320, 2000, true});
  b.add(side, "div", {{"class", "unit"}}, {970, 10, 300, 250, true});
  return adwar::testing::single_frame(b.build());
}

}  // namespace

TEST(FindContainers, BorderedFeedItem) {
  const auto snap = feed_page();
  VisualQuery q;
  q.width = SizeRange{450, 550};
  q.requires_left_and_right_borders = true;
  const auto hits = find_containers(snap, q);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].node, 4);
}

TEST(FindContainers, SidebarItem) {
  const auto snap = feed_page();
  VisualQuery q;
  q.width = SizeRange{225, 325};
  q.region = RegionPredicate{RegionKind::Sidebar, {}};
  const auto hits = find_containers(snap, q);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].node, 7);
  EXPECT_TRUE(is_sidebar_box(snap, 0, snap.frames[0].node(6)));
  EXPECT_FALSE(is_sidebar_box(snap, 0, snap.frames[0].node(3)));
}

TEST(FindContainers, EmptyBody) {
  FrameBuilder b;
  b.add(b.add(std::nullopt, "html"), "body", {}, {0, 0, 0, 0, true});
  VisualQuery q;
  q.width = SizeRange{450, 550};
  EXPECT_TRUE(find_containers(adwar::testing::single_frame(b.build()), q).empty());
}

TEST(FindContainers, RejectsInvertedRange) {
  VisualQuery q;
  q.width = SizeRange{5, 1};
  EXPECT_THROW(find_containers(feed_page(), q), std::invalid_argument);
}

TEST(FindContainers, KindsAndStyle) {
  FrameBuilder b;
  const NodeId html = b.add(std::nullopt, "html");
  const NodeId a = b.add(html, "a", {{"href", "/x"}});
  const NodeId btn = b.add(html, "input", {{"type", "submit"}});
  const NodeId p = b.add(html, "p");
  b.text(p, "hi");
  const NodeId img = b.add(html, "img");
  const NodeId box = b.add(html, "div");
  b.add(box, "span");
  b.node(box).style.set("background-color", "#fff");
  const auto f = b.build();
  EXPECT_EQ(classify_kind(f, f.node(a)), ElementKind::Link);
  EXPECT_EQ(classify_kind(f, f.node(btn)), ElementKind::Button);
  EXPECT_EQ(classify_kind(f, f.node(p)), ElementKind::Text);
  EXPECT_EQ(classify_kind(f, f.node(box)), ElementKind::Container);
  DomNode withimg = f.node(img);
  withimg.image_ref = "i";
  EXPECT_EQ(classify_kind(f, withimg), ElementKind::Image);

  VisualQuery q;
  q.required_style.push_back({"background-color", StyleOp::Equals, "white"});
  const auto snap = adwar::testing::single_frame(f);
  const auto hits = find_containers(snap, q);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].node, box);
}

namespace {

VisualQuery random_query(std::mt19937_64& rng) {
  VisualQuery q;
  const ElementKind kinds[] = {ElementKind::Link, ElementKind::Button, ElementKind::Text, ElementKind::Container,
                               ElementKind::Image};
  if (rng() % 2) {
    for (auto k : kinds) {
      if (rng() % 2) q.kinds.insert(k);
    }
  }
  if (rng() % 2) {
    const double lo = static_cast<double>(rng() % 400);
    q.width = SizeRange{lo, lo + static_cast<double>(rng() % 400)};
  }
  if (rng() % 3 == 0) {
    const double lo = static_cast<double>(rng() % 300);
    q.height = SizeRange{lo, lo + static_cast<double>(rng() % 400)};
  }
  if (rng() % 3 == 0) q.region = RegionPredicate{static_cast<RegionKind>(rng() % 2), {}};
  if (rng() % 4 == 0) q.region = RegionPredicate{RegionKind::Rect, {0, 0, 640, 1000, true}};
  if (rng() % 3 == 0) q.requires_left_and_right_borders = true;
  if (rng() % 4 == 0) q.required_style.push_back({"z-index", StyleOp::GreaterThan, "3"});
  return q;
}

PageSnapshot random_layout_page(std::mt19937_64& rng) {
  FrameInfo f = adwar::testing::random_frame(rng, 40);
  for (auto& n : f.nodes) {
    const bool left = rng() % 2;
    n.layout = {left ? static_cast<double>(rng() % 10) : static_cast<double>(rng() % 1280),
                static_cast<double>(rng() % 2000), static_cast<double>(rng() % 700),
                static_cast<double>(rng() % 2000), rng() % 5 != 0};
    n.style.border_left_width = static_cast<double>(rng() % 2);
    n.style.border_right_width = static_cast<double>(rng() % 2);
    if (rng() % 2) n.style.z_index = static_cast<int>(rng() % 8);
    if (rng() % 6 == 0) n.image_ref = "i";
    if (rng() % 6 == 0) n.handlers["click"] = std::nullopt;
  }
  f.nodes[0].layout = {0, 0, 1280, 2000, true};
  PageSnapshot s;
  s.url = f.url;
  s.viewport = {1280, 800};
  s.frames.push_back(std::move(f));
  s.images["i"] = ImageBitmap(1, 1);
  s.validate();
  return s;
}

// Brute force: every node, every predicate written out longhand.
std::vector<NodeRef> oracle_containers(const PageSnapshot& s, const VisualQuery& q) {
  std::vector<NodeRef> out;
  const auto& f = s.frames[0];
  const double vw = s.viewport.width, fh = s.frame_height(0);
  for (NodeId id : traverse(f)) {
    const auto& n = f.node(id);
    const auto& b = n.layout;
    if (!b.visible) continue;
    if (!q.kinds.empty() && !q.kinds.count(classify_kind(f, n))) continue;
    if (q.width && (b.width < q.width->min || b.width > q.width->max)) continue;
    if (q.height && (b.height < q.height->min || b.height > q.height->max)) continue;
    if (q.requires_left_and_right_borders && (n.style.border_left_width <= 0 || n.style.border_right_width <= 0)) continue;
    bool style_ok = true;
    for (const auto& p : q.required_style) style_ok = style_ok && n.style.z_index && *n.style.z_index > 3 && p.property == "z-index";
    if (!style_ok) continue;
    if (q.region) {
      if (q.region->kind == RegionKind::Sidebar) {
        bool in = false;
        for (auto p = f.parent(id); p; p = f.parent(*p)) {
          const auto& a = f.node(*p);
          const auto& ab = a.layout;
          if (ab.visible && !a.is_text() && ab.width <= 0.4 * vw && ab.height >= 0.5 * fh &&
              (std::abs(ab.x) <= 8 || std::abs(ab.x + ab.width - vw) <= 8)) {
            in = true;
          }
        }
        if (!in) continue;
      } else if (q.region->kind == RegionKind::TopOfFrame) {
        if (b.y > 0.1 * fh) continue;
      } else {
        const auto& r = q.region->rect;
        if (b.x < r.x || b.y < r.y || b.x + b.width > r.x + r.width || b.y + b.height > r.y + r.height) continue;
      }
    }
    out.push_back({0, id});
  }
  return out;
}

}  // namespace

TEST(FindContainers, AgreesWithPredicateFilterOracle) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 400; ++i) {
    const auto snap = random_layout_page(rng);
    const auto q = random_query(rng);
    EXPECT_EQ(find_containers(snap, q), oracle_containers(snap, q)) << i;
  }
}

TEST(FindContainers, AddingPredicatesNeverGrowsResult) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 300; ++i) {
    const auto snap = random_layout_page(rng);
    VisualQuery q = random_query(rng);
    const auto before = find_containers(snap, q);
    q.requires_left_and_right_borders = true;
    q.required_style.push_back({"display", StyleOp::NotEquals, "none"});
    const auto after = find_containers(snap, q);
    for (const auto& h : after) {
      EXPECT_NE(std::find(before.begin(), before.end(), h), before.end());
      EXPECT_TRUE(snap.frames[h.frame].node(h.node).layout.visible);
    }
  }
}

// ---- click resolution ----

namespace {

PageSnapshot link_page(const std::string& href) {
  FrameBuilder b("http://127.0.0.1/");
  const NodeId html = b.add(std::nullopt, "html");
  const NodeId a = b.add(html, "a", {{"href", href}});
  b.add(a, "span");
  return adwar::testing::single_frame(b.build());
}

}  // namespace

TEST(ResolveClick, AgainstLoopbackServer) {
  FixtureServer fx;
  auto& s = fx.server();
  s.Get("/why", [](const httplib::Request&, httplib::Response& r) { r.set_content("ok", "text/plain"); });
  s.Get("/a", [&](const httplib::Request&, httplib::Response& r) { r.set_redirect(fx.url("/b"), 302); });
  s.Get("/b", [&](const httplib::Request&, httplib::Response& r) { r.set_redirect("/c", 302); });
  s.Get("/c", [](const httplib::Request&, httplib::Response& r) { r.set_content("c", "text/plain"); });
  s.Get("/loop", [&](const httplib::Request&, httplib::Response& r) { r.set_redirect(fx.url("/loop"), 302); });
  HttpFetcher fetcher;

  auto res = resolve_click(link_page(fx.url("/why")), 0, 3, fetcher);
  EXPECT_EQ(res.final_url, fx.url("/why"));
  EXPECT_EQ(res.hop_count, 1u);
  EXPECT_EQ(res.via, ResolvedVia::Href);

  res = resolve_click(link_page(fx.url("/a")), 0, 2, fetcher);
  EXPECT_EQ(res.final_url, fx.url("/c"));
  EXPECT_EQ(res.hop_count, 3u);
  EXPECT_EQ(res.hops, (std::vector<std::string>{fx.url("/a"), fx.url("/b"), fx.url("/c")}));

  try {
    resolve_click(link_page(fx.url("/loop")), 0, 2, fetcher);
    FAIL();
  } catch (const RedirectError& e) {
    EXPECT_NE(std::string(e.what()).find("loop"), std::string::npos);
    EXPECT_EQ(e.chain(), (std::vector<std::string>{fx.url("/loop"), fx.url("/loop")}));
  }
}

TEST(ResolveClick, TransportFailure) {
  int port;
  {
    httplib::Server tmp;
    port = tmp.bind_to_any_port("127.0.0.1");
  }
  HttpFetcher fetcher(1);
  EXPECT_THROW(resolve_click(link_page("http://127.0.0.1:" + std::to_string(port) + "/"), 0, 2, fetcher),
               TransportError);
}

TEST(ResolveClick, HandlerHintAndUnresolvable) {
  FrameBuilder b("https://pub.example.com/page");
  const NodeId html = b.add(std::nullopt, "html");
  const NodeId div = b.add(html, "div");
  const NodeId inner = b.add(div, "span");
  b.node(div).handlers["click"] = "/landing";
  const NodeId bare = b.add(html, "div");
  const auto snap = adwar::testing::single_frame(b.build());
  TableFetcher table;
  table.add("https://pub.example.com/landing", 200);
  const auto res = resolve_click(snap, 0, inner, table);
  EXPECT_EQ(res.via, ResolvedVia::RecordedHandler);
  EXPECT_EQ(res.final_url, "https://pub.example.com/landing");
  EXPECT_THROW(resolve_click(snap, 0, bare, table), UnresolvableError);
}

TEST(ResolveClick, HopListIsAChainAndLimited) {
  TableFetcher t;
  for (int i = 0; i < 20; ++i) {
    t.add("https://r.example/" + std::to_string(i), 301, "https://r.example/" + std::to_string(i + 1));
  }
  t.add("https://r.example/20", 200);
  t.add("https://s.example/a", 307, "https://s.example/b").add("https://s.example/b", 200);
  t.add("https://s.example/nolocation", 302);
  const auto chain = follow_redirects("https://s.example/a", t);
  EXPECT_EQ(chain.size(), 2u);
  EXPECT_THROW(follow_redirects("https://r.example/0", t), RedirectError);
  const auto nine = follow_redirects("https://r.example/11", t);
  EXPECT_EQ(nine.size(), 10u);
  EXPECT_LE(nine.size(), static_cast<std::size_t>(kRedirectLimit));
  EXPECT_THROW(follow_redirects("https://s.example/nolocation", t), TransportError);
}
