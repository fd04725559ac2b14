#include "adwar/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "adwar/image.hpp"
#include "adwar/text_recognition.hpp"
#include "adwar/util.hpp"

namespace adwar {

void CorpusSpec::validate() const {
  auto unit = [](double v, const char* what) {
    if (!(v >= 0 && v <= 1)) throw std::invalid_argument(std::string(what) + " must be in [0,1]");
  };
  unit(adchoices_density, "adchoices density");
  unit(feed_density, "feed density");
  unit(marker_dropout, "marker dropout");
  if (count < 0) throw std::invalid_argument("count must be >= 0");
  if (iframes_per_page < 0 || iframes_per_page > 7) throw std::invalid_argument("iframes per page must be in [0,7]");
  if (feed_items_per_page < 0 || feed_items_per_page > 7) {
    throw std::invalid_argument("feed items per page must be in [0,7]");
  }
  if (sidebar_items_per_page < 0 || sidebar_items_per_page > 8) {
    throw std::invalid_argument("sidebar items per page must be in [0,8]");
  }
  if (noise < 0 || noise > 255) throw std::invalid_argument("noise must be in [0,255]");
  if (viewport.width < 1280 || viewport.height < 2000) throw std::invalid_argument("viewport must be at least 1280x2000");
}

namespace {

// Portable draws (std distributions differ between standard libraries).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
int below(std::mt19937_64& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
bool chance(std::mt19937_64& rng, double p) { return unit(rng) < p; }

std::string hex_token(std::mt19937_64& rng, int len) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (int i = 0; i < len; ++i) s += digits[rng() & 15];
  return s;
}

const ImageBitmap& icon_bitmap() {
  static const ImageBitmap icon = load_png(asset_path("adchoices.png"));
  return icon;
}

void add_noise(ImageBitmap& img, int amp, std::mt19937_64& rng) {
  if (amp == 0) return;
  for (std::size_t i = 0; i < img.rgba.size(); ++i) {
    if (i % 4 == 3) continue;
    const int v = int(img.rgba[i]) + below(rng, 2 * amp + 1) - amp;
    img.rgba[i] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
  }
}

Rgba random_color(std::mt19937_64& rng, int lo, int hi) {
  auto c = [&] { return static_cast<std::uint8_t>(lo + below(rng, hi - lo + 1)); };
  return {c(), c(), c(), 255};
}

// Flat background plus a few solid blocks; no blue triangles, no glyphs.
ImageBitmap creative(int w, int h, std::mt19937_64& rng) {
  ImageBitmap img(w, h, random_color(rng, 170, 250));
  const int blocks = 2 + below(rng, 3);
  for (int b = 0; b < blocks; ++b) {
    const int bw = w / 6 + below(rng, w / 3), bh = h / 6 + below(rng, h / 3);
    const int bx = below(rng, w - bw), by = h / 4 + below(rng, h - bh - h / 4);
    const Rgba col = random_color(rng, 40, 230);
    for (int y = by; y < by + bh; ++y) {
      for (int x = bx; x < bx + bw; ++x) img.set(x, y, col);
    }
  }
  return img;
}

class Builder {
 public:
  explicit Builder(std::string url) { f_.url = std::move(url); }

  NodeId add(std::optional<NodeId> parent, std::string tag, LayoutBox box,
             std::vector<std::pair<std::string, std::string>> attrs = {}) {
    DomNode n;
    n.id = next_++;
    n.tag = std::move(tag);
    n.layout = box;
    n.attrs = std::move(attrs);
    n.style.display = n.tag == "span" || n.tag == "a" ? "inline" : "block";
    n.style.visibility = "visible";
    n.style.position = "static";
    if (parent) node(*parent).children.push_back(n.id);
    f_.nodes.push_back(std::move(n));
    return f_.nodes.back().id;
  }
  NodeId text(NodeId parent, std::string content, double x, double y, int size = 1) {
    const double w = static_cast<double>(content.size()) * 7 * size, h = 14 * size;
    const NodeId id = add(parent, "#text", {x, y, w, h, true});
    DomNode& n = node(id);
    n.text = std::move(content);
    n.style = {};
    return id;
  }
  DomNode& node(NodeId id) { return f_.nodes[static_cast<std::size_t>(id - 1)]; }
  FrameInfo take() { return std::move(f_); }

 private:
  FrameInfo f_;
  NodeId next_ = 1;
};

struct PageGen {
  const CorpusSpec& spec;
  std::mt19937_64 rng;
  PageSnapshot snap;
  int image_seq = 0;

  std::string put_image(ImageBitmap img) {
    add_noise(img, spec.noise, rng);
    char id[32];
    std::snprintf(id, sizeof id, "img%03d", image_seq++);
    snap.images[id] = std::move(img);
    return id;
  }

  void ad_iframe(Builder& top, NodeId rail, double x, double y, int slot) {
    const bool is_ad = chance(rng, spec.adchoices_density);
    const bool drop_icon = is_ad && chance(rng, spec.marker_dropout);
    const bool drop_link = is_ad && chance(rng, spec.marker_dropout);
    const int w = 300, h = 250;
    const std::string src = "http://ads" + std::to_string(slot) + ".adserver.test/creative/" + hex_token(rng, 8);

    const NodeId el = top.add(rail, "iframe", {x, y, w, h, true},
                              {{"id", "ad-slot-" + std::to_string(slot)}, {"class", "adchoices-slot"}, {"src", src}});

    Builder b(src);
    const NodeId html = b.add(std::nullopt, "html", {0, 0, w, h, true});
    const NodeId body = b.add(html, "body", {0, 0, w, h, true});
    const NodeId click = b.add(body, "a", {0, 0, w, h, true},
                               {{"href", "http://adclick.test/c?slot=" + std::to_string(slot)}, {"class", "click"}});
    ImageBitmap img = creative(w, h, rng);
    const ImageBitmap& icon = icon_bitmap();
    const int ix = w - icon.width - 2, iy = 2;
    if (is_ad && !drop_icon) {
      composite(img, icon, ix, iy);
    } else if (!is_ad && chance(rng, 0.5)) {
      // Decoy: a red close badge in the same corner.
      for (int yy = 0; yy < 12; ++yy) {
        for (int xx = 0; xx < 12; ++xx) {
          if ((xx - 6) * (xx - 6) + (yy - 6) * (yy - 6) <= 30) img.set(w - 16 + xx, 3 + yy, {210, 30, 30, 255});
        }
      }
    }
    const NodeId pic = b.add(click, "img", {0, 0, w, h, true}, {{"class", "creative"}});
    b.node(pic).image_ref = put_image(std::move(img));
    if (is_ad) {
      const std::string target = drop_link ? "http://brand" + std::to_string(slot) + ".test/landing"
                                           : "http://www.aboutads.info/choices/";
      b.add(body, "a", {double(ix), double(iy), double(icon.width), double(icon.height), true},
            {{"href", target}, {"class", "choices"}});
    } else if (chance(rng, 0.5)) {
      b.add(body, "a", {double(w - 20), 2, 18, 16, true}, {{"href", "http://widget.test/close"}, {"class", "close"}});
    }
    FrameInfo f = b.take();
    f.parent_frame = 0;
    f.owner_node = el;
    f.ad_label = is_ad;
    snap.frames.push_back(std::move(f));
  }

  // Shared by feed and sidebar posts.
  void post(Builder& top, NodeId parent, LayoutBox box, bool bordered, int slot) {
    const bool is_ad = chance(rng, spec.feed_density);
    const bool drop_text = is_ad && chance(rng, spec.marker_dropout);
    const bool drop_link = is_ad && chance(rng, spec.marker_dropout);
    std::vector<std::pair<std::string, std::string>> attrs{{"id", "post-" + std::to_string(slot)},
                                                           {"class", is_ad ? "post sponsored-post" : "post"}};
    const NodeId item = top.add(parent, "div", box, std::move(attrs));
    DomNode& n = top.node(item);
    n.ad_label = is_ad;
    n.style.background_color = Rgba{255, 255, 255, 255};
    if (bordered) {
      n.style.border_left_width = 1;
      n.style.border_right_width = 1;
    }
    const double x = box.x + 10, inner = box.width - 20;
    double y = box.y + 8;

    const NodeId head = top.add(item, "div", {x, y, inner, 44, true}, {{"class", "post-header"}});
    const std::string who = is_ad ? "Brand " + std::to_string(below(rng, 90) + 10)
                                  : "Friend " + std::to_string(below(rng, 90) + 10);
    const NodeId author = top.add(head, "a", {x, y, 120, 16, true},
                                  {{"href", "https://social.test/" + hex_token(rng, 6)}, {"class", "author"}});
    top.text(author, who, x, y);
    const NodeId sub = top.add(head, "div", {x, y + 24, 200, 16, true}, {{"class", "sub"}});
    if (is_ad && !drop_text) {
      if (chance(rng, 0.5)) {
        top.text(sub, "Sponsored", x, y + 24);
      } else {
        // Disclosure rendered into an image.
        const int size = 1 + below(rng, 2);
        ImageBitmap img(text_width("Sponsored", size) + 6, 7 * size + 6, {255, 255, 255, 255});
        draw_text(img, default_font(), 3, 3, "Sponsored", size, {96, 103, 112, 255});
        const NodeId pic = top.add(sub, "img", {x, y + 24, double(img.width), double(img.height), true});
        top.node(pic).image_ref = put_image(std::move(img));
      }
    } else {
      top.text(sub, std::to_string(1 + below(rng, 23)) + " hrs", x, y + 24);
    }
    y += 52;

    const int ch = bordered ? 120 : 100;
    const NodeId pic = top.add(item, "img", {x, y, inner, double(ch), true}, {{"class", "creative"}});
    top.node(pic).image_ref = put_image(creative(static_cast<int>(inner), ch, rng));
    y += ch + 8;

    const NodeId foot = top.add(item, "div", {x, y, inner, 20, true}, {{"class", "post-footer"}});
    if (is_ad && !drop_link) {
      const NodeId a = top.add(foot, "a", {x, y, 180, 16, true},
                               {{"href", "https://www.facebook.com/ads/about/?id=" + hex_token(rng, 6)}});
      top.text(a, "Why am I seeing this?", x, y);
    } else {
      const NodeId a = top.add(foot, "a", {x, y, 120, 16, true},
                               {{"href", "https://news.test/story/" + hex_token(rng, 6)}});
      top.text(a, "Read more", x, y);
    }
  }

  void build(int index) {
    const int vw = spec.viewport.width, vh = spec.viewport.height;
    snap.url = "https://www.site" + std::to_string(index) + ".test/";
    snap.viewport = spec.viewport;
    Builder top(snap.url);
    const NodeId html = top.add(std::nullopt, "html", {0, 0, double(vw), double(vh), true});
    const NodeId body = top.add(html, "body", {0, 0, double(vw), double(vh), true});
    const NodeId header = top.add(body, "div", {0, 0, double(vw), 80, true}, {{"id", "header"}});
    top.text(header, "Site " + std::to_string(index), 20, 30, 2);

    const NodeId rail = top.add(body, "div", {20, 100, 320, 1880, true}, {{"id", "rail"}});
    const NodeId feed = top.add(body, "div", {380, 100, 520, 1880, true}, {{"id", "newsfeed"}});
    const NodeId side = top.add(body, "div", {double(vw - 320), 0, 320, double(vh), true}, {{"id", "rightcol"}});

    // Frames are appended in slot order; frame indices follow the rail.
    FrameInfo placeholder;
    snap.frames.push_back(std::move(placeholder));
    for (int i = 0; i < spec.iframes_per_page; ++i) ad_iframe(top, rail, 30, 110 + i * 262, i);
    for (int i = 0; i < spec.feed_items_per_page; ++i) {
      post(top, feed, {390, 110 + i * 262.0, 500, 250, true}, true, i);
    }
    for (int i = 0; i < spec.sidebar_items_per_page; ++i) {
      post(top, side, {double(vw - 310), 90 + i * 236.0, 300, 226, true}, false, 100 + i);
    }
    snap.frames[0] = top.take();
    snap.requests = {{"https://securepubads.g.doubleclick.net/tag/js/gpt.js", 0, "script"},
                     {snap.url + "static/app.js", 0, "script"},
                     {"https://www.google-analytics.com/analytics.js", 0, "script"}};
    for (std::size_t fi = 1; fi < snap.frames.size(); ++fi) {
      snap.requests.push_back({snap.frames[fi].url, 0, "document"});
    }
    snap.validate();
    if (spec.randomize_markup) randomize_markup(snap, rng);
  }
};

}  // namespace

PageSnapshot generate_page(const CorpusSpec& spec, std::uint64_t seed, int index) {
  spec.validate();
  // One stream per page so pages can be produced independently.
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  PageGen g{spec, std::mt19937_64(seq), {}, 0};
  g.build(index);
  return std::move(g.snap);
}

std::vector<PageSnapshot> generate_corpus(const CorpusSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<PageSnapshot> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) out.push_back(generate_page(spec, seed, i));
  return out;
}

void randomize_markup(PageSnapshot& snap, std::mt19937_64& rng) {
  auto scramble = [&](DomNode& n) {
    for (auto& [k, v] : n.attrs) {
      if (k == "id") {
        v = "r" + hex_token(rng, 8);
      } else if (k == "class") {
        std::string out;
        for (std::size_t i = 0; i < split_ws(v).size(); ++i) out += (i ? " c" : "c") + hex_token(rng, 6);
        v = out;
      }
    }
  };
  for (std::size_t fi = 0; fi < snap.frames.size(); ++fi) {
    FrameInfo& f = snap.frames[fi];
    if (f.ad_label.value_or(false)) {
      for (auto& n : f.nodes) scramble(n);
      continue;
    }
    std::set<NodeId> marked;
    for (const auto& n : f.nodes) {
      if (n.ad_label.value_or(false)) {
        const auto s = subtree(f, n.id);
        marked.insert(s.begin(), s.end());
      }
    }
    for (NodeId id : marked) scramble(f.node_mut(id));
  }
  // Iframe elements hosting ads.
  for (const auto& f : snap.frames) {
    if (f.ad_label.value_or(false) && f.parent_frame && f.owner_node) {
      scramble(snap.frames[static_cast<std::size_t>(*f.parent_frame)].node_mut(*f.owner_node));
    }
  }
}

PlantedCounts planted(const PageSnapshot& snap) {
  PlantedCounts c;
  for (std::size_t fi = 0; fi < snap.frames.size(); ++fi) {
    const auto& f = snap.frames[fi];
    if (fi > 0 && f.ad_label) (*f.ad_label ? c.adchoices : c.adchoices_negative)++;
    if (fi == 0) {
      for (const auto& n : f.nodes) {
        if (n.ad_label) (*n.ad_label ? c.feed : c.feed_negative)++;
      }
    }
  }
  return c;
}

}  // namespace adwar
