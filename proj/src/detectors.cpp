#include "adwar/detectors.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>

#include "adwar/util.hpp"
#include "json.hpp"

namespace adwar {

using Json = nlohmann::ordered_json;

const char* to_string(DisclosureStandard s) {
  switch (s) {
    case DisclosureStandard::AdChoices: return "adchoices";
    case DisclosureStandard::FeedStyle: return "feed-style";
    case DisclosureStandard::Other: return "other";
  }
  return "?";
}

const char* to_string(MarkerKind k) {
  switch (k) {
    case MarkerKind::IconMatch: return "icon-match";
    case MarkerKind::DisclosureText: return "disclosure-text";
    case MarkerKind::DisclosureLink: return "disclosure-link";
  }
  return "?";
}

const char* to_string(MarkerPolicy p) { return p == MarkerPolicy::Any ? "any" : "all"; }

MarkerPolicy parse_marker_policy(std::string_view s) {
  if (iequals(s, "any")) return MarkerPolicy::Any;
  if (iequals(s, "all")) return MarkerPolicy::All;
  throw std::invalid_argument("marker policy must be 'any' or 'all', got '" + std::string(s) + "'");
}

namespace {

DisclosureStandard parse_standard(std::string_view s) {
  if (s == "adchoices") return DisclosureStandard::AdChoices;
  if (s == "feed-style") return DisclosureStandard::FeedStyle;
  if (s == "other") return DisclosureStandard::Other;
  throw std::invalid_argument("unknown standard '" + std::string(s) + "'");
}

MarkerKind parse_marker(std::string_view s) {
  if (s == "icon-match") return MarkerKind::IconMatch;
  if (s == "disclosure-text") return MarkerKind::DisclosureText;
  if (s == "disclosure-link") return MarkerKind::DisclosureLink;
  throw std::invalid_argument("unknown marker '" + std::string(s) + "'");
}

}  // namespace

bool operator==(const MarkerEvidence& a, const MarkerEvidence& b) {
  auto icon_eq = [](const std::optional<TemplateMatch>& x, const std::optional<TemplateMatch>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || (x->x == y->x && x->y == y->y && x->scale == y->scale && x->score == y->score);
  };
  auto word_eq = [](const std::optional<RecognizedWord>& x, const std::optional<RecognizedWord>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || (x->word == y->word && x->read == y->read && x->x == y->x && x->y == y->y &&
                  x->size == y->size && x->distance == y->distance);
  };
  auto link_eq = [](const std::optional<LinkResolution>& x, const std::optional<LinkResolution>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || (x->hops == y->hops && x->via == y->via && x->start == y->start);
  };
  return a.kind == b.kind && a.node == b.node && icon_eq(a.icon, b.icon) && word_eq(a.word, b.word) &&
         a.text == b.text && link_eq(a.link, b.link) && a.url == b.url;
}

// ---- config ----

void DetectorConfig::validate() const {
  icon.validate();
  feed_query.validate();
  sidebar_query.validate();
  lexicon.validate();
  for (const auto& a : allowlist) {
    if (a.empty()) throw std::invalid_argument("empty allowlist entry");
  }
}

DetectorConfig default_detector_config() {
  return load_detector_config(asset_path("detector-config.json"));
}

namespace {

SizeRange read_range(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument(std::string(what) + " must be [min, max]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

VisualQuery read_query(const Json& j) {
  VisualQuery q;
  if (!j.is_object()) throw std::invalid_argument("query must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "kinds") {
      for (const auto& kind : *it) q.kinds.insert(parse_element_kind(kind.get<std::string>()));
    } else if (k == "width") {
      q.width = read_range(*it, "width");
    } else if (k == "height") {
      q.height = read_range(*it, "height");
    } else if (k == "borders") {
      q.requires_left_and_right_borders = it->get<bool>();
    } else if (k == "region") {
      if (it->is_string()) {
        const auto r = it->get<std::string>();
        if (r == "sidebar") {
          q.region = RegionPredicate{RegionKind::Sidebar, {}};
        } else if (r == "top-of-frame") {
          q.region = RegionPredicate{RegionKind::TopOfFrame, {}};
        } else {
          throw std::invalid_argument("unknown region '" + r + "'");
        }
      } else {
        const auto& r = *it;
        q.region = RegionPredicate{RegionKind::Rect,
                                   {r.at("x").get<double>(), r.at("y").get<double>(), r.at("w").get<double>(),
                                    r.at("h").get<double>(), true}};
      }
    } else if (k == "style") {
      for (const auto& p : *it) {
        StylePredicate sp;
        sp.property = to_lower(p.at("property").get<std::string>());
        const auto op = p.value("op", std::string("equals"));
        if (op == "equals") {
          sp.op = StyleOp::Equals;
        } else if (op == "not-equals") {
          sp.op = StyleOp::NotEquals;
        } else if (op == "greater-than") {
          sp.op = StyleOp::GreaterThan;
        } else if (op == "less-than") {
          sp.op = StyleOp::LessThan;
        } else {
          throw std::invalid_argument("unknown style op '" + op + "'");
        }
        sp.value = p.at("value").get<std::string>();
        q.required_style.push_back(std::move(sp));
      }
    } else {
      throw std::invalid_argument("unknown query key '" + k + "'");
    }
  }
  q.validate();
  return q;
}

}  // namespace

DetectorConfig parse_detector_config(std::string_view json_text, const std::string& base_dir) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("detector config: ") + e.what());
  }
  DetectorConfig cfg;
  try {
    std::filesystem::path icon = j.at("icon").get<std::string>();
    if (icon.is_relative()) icon = std::filesystem::path(base_dir) / icon;
    cfg.icon = ImageTemplate::from_png(icon.string());
    if (j.contains("icon_threshold")) cfg.icon.max_nrmse = j["icon_threshold"].get<double>();
    if (j.contains("icon_scales")) cfg.icon.scales = j["icon_scales"].get<std::vector<double>>();
    cfg.quadrant_first = j.value("quadrant_first", true);
    cfg.feed_query = read_query(j.at("feed_query"));
    cfg.sidebar_query = read_query(j.at("sidebar_query"));
    cfg.lexicon.entries.clear();
    for (const auto& e : j.at("lexicon")) {
      cfg.lexicon.entries.push_back({e.at("word").get<std::string>(), e.value("max_distance", std::size_t{0})});
    }
    if (j.contains("feed_words")) cfg.feed_words = j["feed_words"].get<std::vector<std::string>>();
    cfg.allowlist = j.at("allowlist").get<std::vector<std::string>>();
    cfg.policy = parse_marker_policy(j.value("policy", std::string("any")));
    cfg.resolve_links = j.value("resolve_links", false);
    cfg.require_prior_marker = j.value("require_prior_marker", true);
    if (j.contains("text_sizes")) cfg.text.sizes = j["text_sizes"].get<std::vector<int>>();
    cfg.text.cell_threshold = j.value("cell_threshold", cfg.text.cell_threshold);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("detector config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

DetectorConfig load_detector_config(const std::string& path) {
  return parse_detector_config(read_file(path), std::filesystem::path(path).parent_path().string());
}

bool url_on_allowlist(std::string_view url, const std::vector<std::string>& allowlist) {
  const auto u = parse_url(url);
  if (!u) return false;
  for (const auto& entry : allowlist) {
    const auto slash = entry.find('/');
    const std::string domain = to_lower(std::string_view(entry).substr(0, slash));
    if (!host_matches_domain(u->host, domain)) continue;
    if (slash == std::string::npos) return true;
    const std::string_view prefix = std::string_view(entry).substr(slash);
    if (u->target.compare(0, prefix.size(), prefix) == 0) {
      // "/ads" covers "/ads", "/ads/..." and "/ads?..." but not "/adsx".
      const std::size_t end = prefix.size();
      if (u->target.size() == end || prefix.back() == '/' || u->target[end] == '/' || u->target[end] == '?' ||
          u->target[end] == '#') {
        return true;
      }
    }
  }
  return false;
}

// ---- detection ----

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::size_t word_bound(const MarkerLexicon& lex, const std::string& word) {
  for (const auto& e : lex.entries) {
    if (e.word == word) return e.max_distance;
  }
  return 0;
}

bool policy_satisfied(MarkerPolicy p, const std::set<MarkerKind>& found, const std::set<MarkerKind>& applicable) {
  if (found.empty()) return false;
  if (p == MarkerPolicy::Any) return true;
  return std::includes(found.begin(), found.end(), applicable.begin(), applicable.end());
}

// Static link targets first (no network). Clicks only when enabled and, with
// the guard on, after some other marker was already found.
void find_link_marker(const PageSnapshot& snap, std::size_t frame, const std::vector<NodeId>& scope,
                      const DetectorConfig& cfg, Fetcher* fetcher, std::set<MarkerKind>& markers,
                      std::vector<MarkerEvidence>& evidence, std::vector<std::string>* errors) {
  const auto& f = snap.frames[frame];
  std::vector<LinkTarget> targets;
  for (NodeId id : scope) {
    const auto& n = f.node(id);
    const bool has_hint = n.handlers.count("click") && n.handlers.at("click").has_value();
    if (!n.attr("href") && !has_hint) continue;
    if (auto t = find_link_target(snap, frame, id); t && t->node == id) targets.push_back(*t);
  }
  for (const auto& t : targets) {
    if (url_on_allowlist(t.url, cfg.allowlist)) {
      markers.insert(MarkerKind::DisclosureLink);
      MarkerEvidence ev;
      ev.kind = MarkerKind::DisclosureLink;
      ev.node = t.node;
      ev.url = t.url;
      evidence.push_back(std::move(ev));
      return;
    }
  }
  if (!cfg.resolve_links || !fetcher) return;
  if (cfg.require_prior_marker && markers.empty()) return;
  for (const auto& t : targets) {
    try {
      auto res = resolve_click(snap, frame, t.node, *fetcher);
      if (url_on_allowlist(res.final_url, cfg.allowlist)) {
        markers.insert(MarkerKind::DisclosureLink);
        MarkerEvidence ev;
        ev.kind = MarkerKind::DisclosureLink;
        ev.node = t.node;
        ev.url = res.final_url;
        ev.link = std::move(res);
        evidence.push_back(std::move(ev));
        return;
      }
    } catch (const std::exception& e) {
      if (errors) errors->push_back("frame " + std::to_string(frame) + " node " + std::to_string(t.node) + ": " + e.what());
    }
  }
}

std::optional<TemplateMatch> search_icon(const ImageBitmap& img, const DetectorConfig& cfg) {
  const GrayImage g = to_gray(img);
  try {
    if (cfg.quadrant_first) {
      SearchWindow w;
      w.x0 = g.width / 2 - cfg.icon.gray.width / 2;
      w.y1 = g.height / 2 - cfg.icon.gray.height / 2;
      if (auto m = match_image(g, cfg.icon, w)) return m;
    }
    return match_image(g, cfg.icon);
  } catch (const TemplateTooLarge&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<AdDetection> detect_adchoices(const PageSnapshot& snap, const DetectorConfig& cfg, Fetcher* fetcher,
                                          std::vector<FrameVerdict>* verdicts) {
  std::vector<AdDetection> out;
  for (std::size_t fi = 0; fi < snap.frames.size(); ++fi) {
    const auto& f = snap.frames[fi];
    if (!f.parent_frame) continue;
    FrameVerdict verdict{fi, false, {}};
    std::set<MarkerKind> markers;
    std::vector<MarkerEvidence> evidence;
    std::vector<NodeId> order;
    if (!f.nodes.empty()) order = traverse(f);

    for (NodeId id : order) {
      const auto& n = f.node(id);
      if (!n.layout.visible || !n.image_ref) continue;
      const ImageBitmap* img = snap.image(*n.image_ref);
      if (!img || img->empty()) continue;
      if (auto m = search_icon(*img, cfg)) {
        markers.insert(MarkerKind::IconMatch);
        MarkerEvidence ev;
        ev.kind = MarkerKind::IconMatch;
        ev.node = id;
        ev.icon = m;
        evidence.push_back(std::move(ev));
        break;
      }
    }
    find_link_marker(snap, fi, order, cfg, fetcher, markers, evidence, &verdict.errors);

    if (policy_satisfied(cfg.policy, markers, {MarkerKind::IconMatch, MarkerKind::DisclosureLink})) {
      verdict.ad = true;
      out.push_back({fi, f.root(), DisclosureStandard::AdChoices, markers, std::move(evidence)});
    }
    if (verdicts) verdicts->push_back(std::move(verdict));
  }
  return out;
}

std::vector<AdDetection> detect_feed_ads(const PageSnapshot& snap, const DetectorConfig& cfg, Fetcher* fetcher,
                                         std::vector<NodeRef>* candidates_out, std::vector<std::string>* errors) {
  std::vector<AdDetection> out;
  if (snap.frames.empty() || snap.frames[0].nodes.empty()) return out;
  std::vector<NodeRef> hits;
  for (const auto* q : {&cfg.feed_query, &cfg.sidebar_query}) {
    for (const auto& h : find_containers(snap, *q)) {
      if (h.frame == 0) hits.push_back(h);
    }
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  hits = outermost(snap, hits);
  // Document order.
  const auto order = traverse(snap.frames[0]);
  std::map<NodeId, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  std::sort(hits.begin(), hits.end(), [&](const NodeRef& a, const NodeRef& b) { return pos[a.node] < pos[b.node]; });
  if (candidates_out) *candidates_out = hits;

  MarkerLexicon words;
  for (const auto& w : cfg.feed_words) words.entries.push_back({w, word_bound(cfg.lexicon, w)});
  const GlyphRecognizer recognizer(default_font(), cfg.text);
  const auto& f = snap.frames[0];

  for (const auto& c : hits) {
    std::set<MarkerKind> markers;
    std::vector<MarkerEvidence> evidence;
    std::vector<NodeId> scope;
    for (NodeId id : order) {
      if (id == c.node || (pos[id] > pos[c.node] && subtree(f, c.node).count(id))) scope.push_back(id);
    }
    for (NodeId id : scope) {
      const auto& n = f.node(id);
      if (!n.is_text() || !n.layout.visible) continue;
      const std::string text(trim(n.text));
      for (const auto& e : words.entries) {
        if (edit_distance(text, e.word) <= e.max_distance) {
          markers.insert(MarkerKind::DisclosureText);
          MarkerEvidence ev;
          ev.kind = MarkerKind::DisclosureText;
          ev.node = id;
          ev.text = text;
          evidence.push_back(std::move(ev));
          break;
        }
      }
      if (markers.count(MarkerKind::DisclosureText)) break;
    }
    if (!markers.count(MarkerKind::DisclosureText)) {
      for (NodeId id : scope) {
        const auto& n = f.node(id);
        if (!n.layout.visible || !n.image_ref) continue;
        const ImageBitmap* img = snap.image(*n.image_ref);
        if (!img || img->empty()) continue;
        const auto found = recognizer.recognize(*img, words);
        if (!found.empty()) {
          markers.insert(MarkerKind::DisclosureText);
          MarkerEvidence ev;
          ev.kind = MarkerKind::DisclosureText;
          ev.node = id;
          ev.word = found.front();
          evidence.push_back(std::move(ev));
          break;
        }
      }
    }
    find_link_marker(snap, 0, scope, cfg, fetcher, markers, evidence, errors);
    if (policy_satisfied(cfg.policy, markers, {MarkerKind::DisclosureText, MarkerKind::DisclosureLink})) {
      out.push_back({0, c.node, DisclosureStandard::FeedStyle, markers, std::move(evidence)});
    }
  }
  return out;
}

DetectionReport run_detectors(const PageSnapshot& snap, const DetectorConfig& cfg, Fetcher* fetcher) {
  DetectionReport r;
  r.url = snap.url;
  const auto t0 = Clock::now();
  auto t = Clock::now();
  r.detections = detect_adchoices(snap, cfg, fetcher, &r.frames);
  r.timing.push_back({"adchoices", ms_since(t)});
  t = Clock::now();
  std::vector<std::string> feed_errors;
  auto feed = detect_feed_ads(snap, cfg, fetcher, &r.feed_candidates, &feed_errors);
  r.timing.push_back({"feed", ms_since(t)});
  FrameVerdict top{0, !feed.empty(), std::move(feed_errors)};
  r.frames.insert(r.frames.begin(), std::move(top));
  for (auto& d : feed) r.detections.push_back(std::move(d));
  r.timing.push_back({"total", ms_since(t0)});
  return r;
}

void DetectionReport::check_against(const PageSnapshot& snap) const {
  for (const auto& d : detections) {
    if (d.frame >= snap.frames.size() || !snap.frames[d.frame].contains(d.node)) {
      throw std::invalid_argument("report references missing node " + std::to_string(d.node) + " in frame " +
                                  std::to_string(d.frame));
    }
    for (const auto& e : d.evidence) {
      if (!snap.frames[d.frame].contains(e.node)) {
        throw std::invalid_argument("evidence references missing node " + std::to_string(e.node));
      }
    }
  }
}

// ---- report JSON ----

namespace {

Json evidence_json(const MarkerEvidence& e) {
  Json j;
  j["kind"] = to_string(e.kind);
  j["node"] = e.node;
  if (e.icon) {
    j["icon"] = {{"x", e.icon->x}, {"y", e.icon->y}, {"scale", e.icon->scale}, {"score", e.icon->score},
                 {"w", e.icon->width}, {"h", e.icon->height}};
  }
  if (e.word) {
    j["word"] = {{"word", e.word->word}, {"read", e.word->read}, {"x", e.word->x}, {"y", e.word->y},
                 {"size", e.word->size}, {"distance", e.word->distance}};
  }
  if (!e.text.empty()) j["text"] = e.text;
  if (!e.url.empty()) j["url"] = e.url;
  if (e.link) {
    j["resolution"] = {{"start", e.link->start}, {"via", to_string(e.link->via)}, {"hops", e.link->hops},
                       {"hop_count", e.link->hop_count}};
  }
  return j;
}

MarkerEvidence evidence_from(const Json& j, std::size_t frame) {
  MarkerEvidence e;
  e.kind = parse_marker(j.at("kind").get<std::string>());
  e.node = j.at("node").get<NodeId>();
  if (j.contains("icon")) {
    const auto& i = j["icon"];
    TemplateMatch m;
    m.x = i.at("x");
    m.y = i.at("y");
    m.scale = i.at("scale");
    m.score = i.at("score");
    m.width = i.at("w");
    m.height = i.at("h");
    e.icon = m;
  }
  if (j.contains("word")) {
    const auto& w = j["word"];
    e.word = RecognizedWord{w.at("word"), w.at("read"), w.at("x"), w.at("y"), w.at("size"), w.at("distance")};
  }
  e.text = j.value("text", std::string());
  e.url = j.value("url", std::string());
  if (j.contains("resolution")) {
    const auto& r = j["resolution"];
    LinkResolution l;
    l.frame = frame;
    l.start = r.at("start");
    l.via = r.at("via").get<std::string>() == "href" ? ResolvedVia::Href : ResolvedVia::RecordedHandler;
    l.hops = r.at("hops").get<std::vector<std::string>>();
    l.hop_count = r.at("hop_count");
    l.final_url = l.hops.empty() ? "" : l.hops.back();
    e.link = l;
  }
  return e;
}

}  // namespace

std::string report_to_json(const DetectionReport& r, bool pretty) {
  Json j;
  j["url"] = r.url;
  j["detections"] = Json::array();
  for (const auto& d : r.detections) {
    Json dj;
    dj["frame"] = d.frame;
    dj["node"] = d.node;
    dj["standard"] = to_string(d.standard);
    dj["markers"] = Json::array();
    for (auto m : d.markers) dj["markers"].push_back(to_string(m));
    dj["evidence"] = Json::array();
    for (const auto& e : d.evidence) dj["evidence"].push_back(evidence_json(e));
    j["detections"].push_back(std::move(dj));
  }
  j["frames"] = Json::array();
  for (const auto& v : r.frames) j["frames"].push_back({{"frame", v.frame}, {"ad", v.ad}, {"errors", v.errors}});
  j["feed_candidates"] = Json::array();
  for (const auto& c : r.feed_candidates) j["feed_candidates"].push_back({{"frame", c.frame}, {"node", c.node}});
  j["timing_ms"] = Json::object();
  for (const auto& t : r.timing) j["timing_ms"][t.stage] = t.ms;
  return j.dump(pretty ? 2 : -1);
}

DetectionReport report_from_json(std::string_view text) {
  DetectionReport r;
  try {
    const Json j = Json::parse(text);
    r.url = j.at("url").get<std::string>();
    for (const auto& dj : j.at("detections")) {
      AdDetection d;
      d.frame = dj.at("frame");
      d.node = dj.at("node");
      d.standard = parse_standard(dj.at("standard").get<std::string>());
      for (const auto& m : dj.at("markers")) d.markers.insert(parse_marker(m.get<std::string>()));
      for (const auto& e : dj.at("evidence")) d.evidence.push_back(evidence_from(e, d.frame));
      if (d.markers.empty()) throw std::invalid_argument("detection without markers");
      r.detections.push_back(std::move(d));
    }
    for (const auto& v : j.at("frames")) {
      r.frames.push_back({v.at("frame"), v.at("ad"), v.at("errors").get<std::vector<std::string>>()});
    }
    for (const auto& c : j.at("feed_candidates")) r.feed_candidates.push_back({c.at("frame"), c.at("node")});
    for (auto it = j.at("timing_ms").begin(); it != j.at("timing_ms").end(); ++it) {
      r.timing.push_back({it.key(), it->get<double>()});
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
  return r;
}

// ---- evaluation ----

double ConfusionMatrix::precision() const {
  return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double ConfusionMatrix::recall() const {
  return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ConfusionMatrix Evaluation::combined() const {
  ConfusionMatrix m = adchoices;
  m += feed;
  return m;
}

namespace {

void tally(ConfusionMatrix& m, bool truth, bool predicted) {
  if (truth && predicted) ++m.tp;
  if (!truth && predicted) ++m.fp;
  if (!truth && !predicted) ++m.tn;
  if (truth && !predicted) ++m.fn;
}

}  // namespace

Evaluation evaluate_report(const DetectionReport& report, const PageSnapshot& truth) {
  report.check_against(truth);
  Evaluation ev;
  std::vector<std::string> uncovered;

  std::set<std::size_t> ad_frames;
  std::set<NodeRef> feed_hits;
  for (const auto& d : report.detections) {
    if (d.standard == DisclosureStandard::AdChoices) ad_frames.insert(d.frame);
    if (d.standard == DisclosureStandard::FeedStyle) feed_hits.insert({d.frame, d.node});
  }

  for (std::size_t fi = 0; fi < truth.frames.size(); ++fi) {
    const auto& f = truth.frames[fi];
    if (!f.parent_frame) continue;
    if (!f.ad_label) {
      uncovered.push_back("frame " + std::to_string(fi));
      continue;
    }
    tally(ev.adchoices, *f.ad_label, ad_frames.count(fi) > 0);
  }

  std::set<NodeRef> universe(report.feed_candidates.begin(), report.feed_candidates.end());
  universe.insert(feed_hits.begin(), feed_hits.end());
  if (!truth.frames.empty()) {
    for (const auto& n : truth.frames[0].nodes) {
      if (n.ad_label) universe.insert({0, n.id});
    }
  }
  for (const auto& ref : universe) {
    const auto& n = truth.frames[ref.frame].node(ref.node);
    if (!n.ad_label) {
      uncovered.push_back("frame " + std::to_string(ref.frame) + " node " + std::to_string(ref.node));
      continue;
    }
    tally(ev.feed, *n.ad_label, feed_hits.count(ref) > 0);
  }

  if (!uncovered.empty()) {
    std::string msg = "unlabeled candidates:";
    for (const auto& u : uncovered) msg += " [" + u + "]";
    throw LabelMismatch(msg, uncovered);
  }
  return ev;
}

std::string matrix_to_json(const ConfusionMatrix& m) {
  Json j;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["tn"] = m.tn;
  j["fn"] = m.fn;
  j["precision"] = m.precision();
  j["recall"] = m.recall();
  return j.dump();
}

}  // namespace adwar
