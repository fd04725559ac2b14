#include "adwar/stealth.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>

#include "adwar/util.hpp"
#include "json.hpp"

namespace adwar {

using Json = nlohmann::ordered_json;

// ---- overlays ----

namespace {

std::string root_token(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  static const char* hex = "0123456789abcdef";
  std::string t;
  t += hex[10 + rng() % 6];  // selectors need a leading letter
  while (t.size() < 16) t += hex[rng() & 15];
  return t;
}

std::string css_box(const LayoutBox& b) {
  return "position:absolute; left:" + format_px(b.x) + "; top:" + format_px(b.y) + "; width:" + format_px(b.width) +
         "; height:" + format_px(b.height) + ";";
}

}  // namespace

PlanResult plan_overlays(const PageSnapshot& snap, const std::vector<NodeId>& ads, std::uint64_t seed,
                         Rgba overlay_color) {
  if (snap.frames.empty()) throw PlanError("snapshot has no frames");
  const FrameInfo& top = snap.frames[0];
  std::vector<NodeId> unique;
  for (NodeId id : ads) {
    const DomNode* n = top.find(id);
    if (!n) throw PlanError("ad node " + std::to_string(id) + " not found in the top frame");
    if (!n->layout.visible) throw PlanError("ad node " + std::to_string(id) + " is not visible");
    if (id == top.root()) throw PlanError("the document root cannot be an ad");
    if (std::find(unique.begin(), unique.end(), id) == unique.end()) unique.push_back(id);
  }

  PlanResult r;
  OverlayPlan& plan = r.plan;
  plan.fake_root_id = root_token(seed);
  plan.overlay_color = overlay_color;
  r.transformed = snap;
  FrameInfo& f = r.transformed.frames[0];

  plan.fake_html = f.root();
  DomNode& html = f.node_mut(plan.fake_html);
  if (const std::string* id = html.attr("id")) plan.original_html_id = *id;
  html.set_attr("id", plan.fake_root_id);
  const LayoutBox root_box = html.layout;
  for (NodeId c : html.children) {
    if (f.node(c).tag == "body") {
      plan.fake_body = c;
      break;
    }
  }
  if (plan.fake_body) {
    DomNode& body = f.node_mut(*plan.fake_body);
    const std::string* cls = body.attr("class");
    body.set_attr("class", cls && !trim(*cls).empty() ? *cls + " " + plan.fake_body_class() : plan.fake_body_class());
  }

  NodeId next = f.max_id() + 1;
  DomNode root;
  root.id = plan.true_root = next++;
  root.tag = "html";
  root.layout = root_box;
  DomNode overlay_root;
  overlay_root.id = plan.overlay_root = next++;
  overlay_root.tag = "body";
  overlay_root.attrs = {{"id", plan.fake_root_id + "-ov"}};
  overlay_root.layout = root_box;
  overlay_root.style.position = "absolute";
  root.children = {plan.fake_html, plan.overlay_root};

  std::vector<DomNode> overlays;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const DomNode& ad = f.node(unique[i]);
    DomNode o;
    o.id = next++;
    o.tag = "div";
    const std::string oid = plan.fake_root_id + "-ov-" + std::to_string(i);
    o.attrs = {{"id", oid}, {"class", plan.fake_root_id + "-ov"}};
    o.layout = ad.layout;
    o.layout.visible = true;
    o.style.position = "absolute";
    o.style.display = "block";
    o.style.background_color = overlay_color;
    o.style.z_index = 2147483647;
    overlay_root.children.push_back(o.id);
    plan.overlays.push_back({o.id, ad.id, ad.layout});
    plan.overlay_rules.push_back({"#" + oid, css_box(ad.layout) + " background-color:" + format_color(overlay_color) +
                                                 "; z-index:2147483647;"});
    overlays.push_back(std::move(o));
  }
  plan.overlay_rules.insert(plan.overlay_rules.begin(),
                            CssRule{"#" + plan.fake_root_id + "-ov", "position:absolute; left:0; top:0;"});

  // The new root goes first so capture order still lists parents early.
  f.nodes.insert(f.nodes.begin(), std::move(root));
  f.nodes.push_back(std::move(overlay_root));
  for (auto& o : overlays) f.nodes.push_back(std::move(o));
  r.transformed.validate();
  return r;
}

// ---- CSS ----

std::vector<CssRule> parse_stylesheet(std::string_view css) {
  std::vector<CssRule> out;
  std::size_t pos = 0;
  while (pos < css.size()) {
    const auto open = css.find('{', pos);
    if (open == std::string_view::npos) break;
    auto close = css.find('}', open);
    if (close == std::string_view::npos) close = css.size();
    std::string_view sel = css.substr(pos, open - pos);
    // Comments can only sit before a selector list here.
    while (true) {
      const auto c0 = sel.find("/*");
      if (c0 == std::string_view::npos) break;
      const auto c1 = sel.find("*/", c0 + 2);
      sel = c1 == std::string_view::npos ? sel.substr(0, c0) : sel.substr(c1 + 2);
    }
    out.push_back({std::string(trim(sel)), std::string(trim(css.substr(open + 1, close - open - 1)))});
    pos = close + 1;
  }
  return out;
}

std::string format_stylesheet(const std::vector<CssRule>& rules) {
  std::string out;
  for (const auto& r : rules) out += r.selectors + " { " + r.declarations + " }\n";
  return out;
}

CssRewrite rewrite_css(const std::vector<CssRule>& rules, const OverlayPlan& plan) {
  CssRewrite out;
  for (const auto& rule : rules) {
    std::vector<std::string> rewritten;
    bool ok = true;
    for (auto part : split(rule.selectors, ',')) {
      SelectorExpr sel;
      try {
        sel = parse_selector(trim(part));
      } catch (const SelectorError& e) {
        out.warnings.push_back("kept '" + rule.selectors + "' unchanged: " + e.what());
        ok = false;
        break;
      }
      CompoundSelector& head = sel.compounds.front();
      if (head.tag == "html") {
        head.tag.clear();
        head.ids.insert(head.ids.begin(), plan.fake_root_id);
        rewritten.push_back(format_selector(sel));
      } else if (head.tag == "body") {
        head.tag.clear();
        head.classes.insert(head.classes.begin(), plan.fake_body_class());
        rewritten.push_back(format_selector(sel));
      } else {
        SelectorExpr scoped = sel;
        CompoundSelector root;
        root.ids.push_back(plan.fake_root_id);
        scoped.compounds.insert(scoped.compounds.begin(), root);
        scoped.combinators.insert(scoped.combinators.begin(), Combinator::Descendant);
        rewritten.push_back(format_selector(scoped));
        if (head.tag.empty()) {
          // A tagless leading compound could also match the publisher root.
          head.ids.insert(head.ids.begin(), plan.fake_root_id);
          rewritten.push_back(format_selector(sel));
        }
      }
    }
    if (!ok) {
      out.rules.push_back(rule);
      continue;
    }
    std::string joined;
    for (std::size_t i = 0; i < rewritten.size(); ++i) joined += (i ? ", " : "") + rewritten[i];
    out.rules.push_back({joined, rule.declarations});
  }
  return out;
}

// ---- manifest ----

const char* to_string(ApiHost h) {
  switch (h) {
    case ApiHost::Document: return "document";
    case ApiHost::FakeHtml: return "fake-html";
    case ApiHost::Head: return "head";
    case ApiHost::FakeBody: return "fake-body";
    case ApiHost::Prototype: return "prototype";
  }
  return "?";
}
const char* to_string(MemberKind k) { return k == MemberKind::Property ? "property" : "function"; }
const char* to_string(Behavior b) {
  switch (b) {
    case Behavior::RedirectToOriginalRoot: return "redirect-to-original-root";
    case Behavior::FilterOverlaySubtree: return "filter-overlay-subtree";
    case Behavior::ValueSpoof: return "value-spoof";
  }
  return "?";
}
const char* to_string(Tier t) { return t == Tier::ScriptLevel ? "script-level" : "source-modification"; }
const char* to_string(ToStringPatch p) {
  switch (p) {
    case ToStringPatch::None: return "none";
    case ToStringPatch::PerFunction: return "per-function";
    case ToStringPatch::Prototype: return "prototype";
  }
  return "?";
}

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const E (&all)[N], const char* what) {
  for (E e : all) {
    if (s == to_string(e)) return e;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr ApiHost kHosts[] = {ApiHost::Document, ApiHost::FakeHtml, ApiHost::Head, ApiHost::FakeBody,
                              ApiHost::Prototype};
constexpr MemberKind kKinds[] = {MemberKind::Property, MemberKind::Function};
constexpr Behavior kBehaviors[] = {Behavior::RedirectToOriginalRoot, Behavior::FilterOverlaySubtree,
                                   Behavior::ValueSpoof};
constexpr Tier kTiers[] = {Tier::ScriptLevel, Tier::SourceModification};
constexpr ToStringPatch kPatches[] = {ToStringPatch::None, ToStringPatch::PerFunction, ToStringPatch::Prototype};
constexpr ProbeKind kProbes[] = {ProbeKind::ToString,           ProbeKind::ToLocaleString,
                                 ProbeKind::ToSource,           ProbeKind::ToStringTransplant,
                                 ProbeKind::DescriptorInspection, ProbeKind::ProtectedObjectToString};

}  // namespace

std::string ManifestEntry::name() const { return std::string(to_string(host)) + "." + member; }

const ManifestEntry* InterceptionManifest::find(ApiHost host, std::string_view member) const {
  for (const auto& e : entries) {
    if (e.host == host && e.member == member) return &e;
  }
  return nullptr;
}

bool InterceptionManifest::remove(std::string_view name) {
  const auto it = std::find_if(entries.begin(), entries.end(), [&](const ManifestEntry& e) { return e.name() == name; });
  if (it == entries.end()) return false;
  entries.erase(it);
  return true;
}

InterceptionManifest build_interception_manifest(std::string_view profile, const OverlayPlan& plan, Tier tier,
                                                 ToStringPatch tostring) {
  if (profile != "gecko") throw UnknownProfile("unknown API profile '" + std::string(profile) + "'");
  InterceptionManifest m;
  m.profile = "gecko";
  m.fake_root_id = plan.fake_root_id;
  m.tier = tier;
  m.tostring = tostring;
  using P = MemberKind;
  using B = Behavior;
  auto add = [&](ApiHost h, const char* name, P kind, B b, bool experimental = false) {
    m.entries.push_back({h, name, kind, b, tier, experimental});
  };
  for (const char* p : {"childNodes", "children", "documentElement", "firstElementChild", "lastChild",
                        "lastElementChild", "body", "scrollingElement"}) {
    add(ApiHost::Document, p, P::Property, B::RedirectToOriginalRoot);
  }
  add(ApiHost::Document, "all", P::Property, B::FilterOverlaySubtree);
  for (const char* f : {"getElementById", "getElementsByClassName", "getElementsByTagName", "getElementsByTagNameNS",
                        "querySelector", "querySelectorAll"}) {
    add(ApiHost::Document, f, P::Function, B::FilterOverlaySubtree);
  }
  // Needs the experimental elementsFromPoint to find what lies under an overlay.
  add(ApiHost::Document, "elementFromPoint", P::Function, B::FilterOverlaySubtree, true);
  for (const char* p : {"tagName", "nodeName", "localName", "parentNode", "parentElement", "firstChild",
                        "firstElementChild", "childElementCount", "id", "outerHTML", "innerHTML"}) {
    add(ApiHost::FakeHtml, p, P::Property, B::ValueSpoof);
  }
  add(ApiHost::FakeHtml, "insertBefore", P::Function, B::RedirectToOriginalRoot);
  for (const char* p : {"nextElementSibling", "nextSibling", "parentElement", "parentNode"}) {
    add(ApiHost::Head, p, P::Property, B::ValueSpoof);
  }
  for (const char* p : {"tagName", "nodeName", "localName", "previousElementSibling", "previousSibling", "id",
                        "className", "outerHTML"}) {
    add(ApiHost::FakeBody, p, P::Property, B::ValueSpoof);
  }
  return m;
}

// ---- verification ----

namespace {

struct Reach {
  std::map<NodeId, std::string> path;
  std::deque<NodeId> queue;

  void visit(NodeId id, const std::string& how) {
    if (path.emplace(id, how).second) queue.push_back(id);
  }
};

std::string label(const FrameInfo& f, NodeId id) {
  const DomNode& n = f.node(id);
  std::string s = "<" + n.tag;
  if (const std::string* i = n.attr("id")) s += " id=" + *i;
  return s + ">#" + std::to_string(id);
}

bool same_tree(const FrameInfo& a, NodeId x, const FrameInfo& b, NodeId y, std::string& where) {
  const DomNode& p = a.node(x);
  const DomNode& q = b.node(y);
  if (p.id != q.id || p.tag != q.tag || p.attrs != q.attrs || p.text != q.text || p.layout != q.layout ||
      p.children.size() != q.children.size()) {
    where = label(a, x);
    return false;
  }
  for (std::size_t i = 0; i < p.children.size(); ++i) {
    if (!same_tree(a, p.children[i], b, q.children[i], where)) return false;
  }
  return true;
}

}  // namespace

StealthVerdict verify_stealth(const PageSnapshot& original, const PageSnapshot& transformed,
                              const InterceptionManifest& manifest, const OverlayPlan& plan,
                              const std::vector<SelectorExpr>& selectors) {
  StealthVerdict v;
  auto fail = [&](std::string w) {
    v.pass = false;
    v.witness = std::move(w);
    return v;
  };
  if (transformed.frames.empty() || original.frames.empty()) return fail("missing top frame");
  const FrameInfo& t = transformed.frames[0];
  const FrameInfo& o = original.frames[0];
  if (!t.contains(plan.true_root) || t.root() != plan.true_root || !t.contains(plan.overlay_root) ||
      !t.contains(plan.fake_html)) {
    return fail("transformed snapshot does not match the plan");
  }
  auto has = [&](ApiHost h, const char* m) { return manifest.find(h, m) != nullptr; };

  const std::set<NodeId> publisher = subtree(t, plan.fake_html);
  std::set<NodeId> hidden = subtree(t, plan.overlay_root);
  hidden.insert(plan.true_root);
  std::vector<NodeId> elements;
  for (NodeId id : traverse(t)) {
    if (!t.node(id).is_text()) elements.push_back(id);
  }

  // Entry points on document.
  Reach reach;
  for (const char* p : {"childNodes", "children", "documentElement", "firstElementChild", "lastChild",
                        "lastElementChild", "scrollingElement"}) {
    reach.visit(has(ApiHost::Document, p) ? plan.fake_html : plan.true_root, std::string("document.") + p);
  }
  if (has(ApiHost::Document, "body")) {
    if (plan.fake_body) reach.visit(*plan.fake_body, "document.body");
  } else {
    for (NodeId c : t.node(plan.true_root).children) {
      if (t.node(c).tag == "body") {
        reach.visit(c, "document.body");
        break;
      }
    }
  }
  auto query = [&](const char* name, auto&& pred) {
    const bool filtered = has(ApiHost::Document, name);
    for (NodeId id : elements) {
      if (filtered && !publisher.count(id)) continue;
      if (pred(t.node(id))) reach.visit(id, std::string("document.") + name + "(...)");
    }
  };
  query("all", [](const DomNode&) { return true; });
  query("getElementById", [](const DomNode& n) { return n.attr("id") != nullptr; });
  query("getElementsByClassName", [](const DomNode& n) { return n.attr("class") != nullptr; });
  query("getElementsByTagName", [](const DomNode&) { return true; });
  query("getElementsByTagNameNS", [](const DomNode&) { return true; });
  query("querySelector", [](const DomNode&) { return true; });
  query("querySelectorAll", [](const DomNode&) { return true; });
  for (const auto& ov : plan.overlays) {
    const double cx = ov.box.x + ov.box.width / 2, cy = ov.box.y + ov.box.height / 2;
    const bool filtered = has(ApiHost::Document, "elementFromPoint");
    reach.visit(filtered ? ov.ad : ov.overlay,
                "document.elementFromPoint(" + format_px(cx) + ", " + format_px(cy) + ")");
  }

  // Node-level navigation. Sibling and descendant accessors are derived from
  // parent/children, so they see exactly what these primitives expose.
  while (!reach.queue.empty()) {
    const NodeId id = reach.queue.front();
    reach.queue.pop_front();
    const std::string& how = reach.path[id];
    if (hidden.count(id)) return fail(how + " reaches " + label(t, id));
    for (NodeId c : t.node(id).children) reach.visit(c, how + ".childNodes");
    if (const auto p = t.parent(id)) {
      if (id == plan.fake_html) {
        if (!has(ApiHost::FakeHtml, "parentNode")) reach.visit(*p, how + ".parentNode");
        if (!has(ApiHost::FakeHtml, "parentElement")) reach.visit(*p, how + ".parentElement");
      } else {
        reach.visit(*p, how + ".parentNode");
      }
    }
  }

  // Attribute changes the plan made must be spoofed on every accessor that
  // shows them.
  const std::string& html_path = reach.path.count(plan.fake_html) ? reach.path[plan.fake_html] : "document";
  for (const char* m : {"id", "outerHTML"}) {
    if (!has(ApiHost::FakeHtml, m)) return fail(html_path + "." + m + " exposes id=" + plan.fake_root_id);
  }
  if (plan.fake_body) {
    const std::string& body_path = reach.path.count(*plan.fake_body) ? reach.path[*plan.fake_body] : "document.body";
    for (const char* m : {"className", "outerHTML"}) {
      if (!has(ApiHost::FakeBody, m)) return fail(body_path + "." + m + " exposes class " + plan.fake_body_class());
    }
    if (!has(ApiHost::FakeHtml, "innerHTML")) {
      return fail(html_path + ".innerHTML exposes class " + plan.fake_body_class());
    }
  }

  // Publisher-visible tree with spoofed values restored.
  FrameInfo view;
  view.url = t.url;
  for (NodeId id : traverse(t)) {
    if (!publisher.count(id)) continue;
    DomNode n = t.node(id);
    if (id == plan.fake_html) {
      if (plan.original_html_id) {
        n.set_attr("id", *plan.original_html_id);
      } else {
        n.attrs.erase(std::remove_if(n.attrs.begin(), n.attrs.end(), [](const auto& a) { return a.first == "id"; }),
                      n.attrs.end());
      }
    }
    if (plan.fake_body && id == *plan.fake_body) {
      const std::string* before = o.contains(id) ? o.node(id).attr("class") : nullptr;
      if (before) {
        n.set_attr("class", *before);  // the spoofed className is the original string
      } else {
        n.attrs.erase(std::remove_if(n.attrs.begin(), n.attrs.end(), [](const auto& a) { return a.first == "class"; }),
                      n.attrs.end());
      }
    }
    view.nodes.push_back(std::move(n));
  }
  try {
    view.rebuild_index();
  } catch (const ValidationError& e) {
    return fail(std::string("publisher view is not a tree: ") + e.what());
  }
  std::string where;
  if (!o.contains(view.root()) || !same_tree(view, view.root(), o, o.root(), where)) {
    return fail("publisher-visible tree differs from the original at " + (where.empty() ? "root" : where));
  }
  for (const auto& sel : selectors) {
    if (match_selector(view, sel) != match_selector(o, sel)) {
      return fail("document.querySelectorAll('" + format_selector(sel) + "') differs from the original page");
    }
  }
  return v;
}

// ---- detectability ----

const char* to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::ToString: return "toString";
    case ProbeKind::ToLocaleString: return "toLocaleString";
    case ProbeKind::ToSource: return "toSource";
    case ProbeKind::ToStringTransplant: return "toString-transplant";
    case ProbeKind::DescriptorInspection: return "descriptor-inspection";
    case ProbeKind::ProtectedObjectToString: return "protected-object-toString";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Hidden: return "hidden";
    case Outcome::ModifiedUnattributable: return "modified-but-unattributable";
    case Outcome::Revealed: return "revealed";
  }
  return "?";
}

ProbeKind parse_probe_kind(std::string_view s) { return parse_enum(s, kProbes, "probe kind"); }

namespace {

Outcome probe_outcome(const InterceptionManifest& m, const StealthProbe& p) {
  if (p.kind == ProbeKind::ProtectedObjectToString) {
    // A protected, intact toString can be transplanted onto any wrapper.
    if (m.tier == Tier::SourceModification) return Outcome::Hidden;
    return m.protected_members.empty() ? Outcome::Hidden : Outcome::Revealed;
  }
  const ManifestEntry* e = nullptr;
  for (const auto& x : m.entries) {
    if (x.name() == p.target) e = &x;
  }
  if (!e) return Outcome::Hidden;  // untouched member
  if (e->tier == Tier::SourceModification) return Outcome::Hidden;
  switch (p.kind) {
    case ProbeKind::ToString:
    case ProbeKind::ToLocaleString:
    case ProbeKind::ToSource:
    case ProbeKind::ToStringTransplant:
      return m.tostring == ToStringPatch::Prototype ? Outcome::Hidden : Outcome::Revealed;
    case ProbeKind::DescriptorInspection:
      return e->descriptor_visible() ? Outcome::ModifiedUnattributable : Outcome::Hidden;
    case ProbeKind::ProtectedObjectToString:
      break;
  }
  return Outcome::Hidden;
}

}  // namespace

DetectabilityVerdict analyze_detectability(const InterceptionManifest& manifest,
                                           const std::vector<StealthProbe>& probes) {
  DetectabilityVerdict v;
  for (const auto& p : probes) {
    const Outcome o = probe_outcome(manifest, p);
    v.outcomes.push_back(o);
    v.overall = std::max(v.overall, o);
  }
  return v;
}

std::vector<StealthProbe> full_probe_set(const InterceptionManifest& manifest) {
  std::vector<StealthProbe> out;
  for (const auto& e : manifest.entries) {
    for (ProbeKind k : kProbes) out.push_back({k, e.name()});
  }
  return out;
}

// ---- JSON ----

namespace {

Json box_json(const LayoutBox& b) { return {{"x", b.x}, {"y", b.y}, {"w", b.width}, {"h", b.height}}; }

}  // namespace

std::string plan_to_json(const OverlayPlan& plan, bool pretty) {
  Json j;
  j["fake_root_id"] = plan.fake_root_id;
  j["true_root"] = plan.true_root;
  j["fake_html"] = plan.fake_html;
  j["fake_body"] = plan.fake_body ? Json(*plan.fake_body) : Json(nullptr);
  j["overlay_root"] = plan.overlay_root;
  j["overlays"] = Json::array();
  for (const auto& o : plan.overlays) {
    j["overlays"].push_back({{"overlay", o.overlay}, {"ad", o.ad}, {"box", box_json(o.box)}});
  }
  j["stylesheet"] = format_stylesheet(plan.stylesheet);
  j["overlay_rules"] = format_stylesheet(plan.overlay_rules);
  j["dynamic_policy"] = plan.dynamic_policy;
  j["overlay_color"] = format_color(plan.overlay_color);
  return j.dump(pretty ? 2 : -1);
}

std::string manifest_to_json(const InterceptionManifest& m, bool pretty) {
  Json j;
  j["profile"] = m.profile;
  j["fake_root_id"] = m.fake_root_id;
  j["tier"] = to_string(m.tier);
  j["tostring"] = to_string(m.tostring);
  j["protected_members"] = m.protected_members;
  j["entries"] = Json::array();
  for (const auto& e : m.entries) {
    Json je{{"host", to_string(e.host)}, {"member", e.member},         {"kind", to_string(e.kind)},
            {"behavior", to_string(e.behavior)}, {"tier", to_string(e.tier)}};
    if (e.experimental) je["experimental"] = true;
    j["entries"].push_back(std::move(je));
  }
  return j.dump(pretty ? 2 : -1);
}

InterceptionManifest manifest_from_json(std::string_view text) {
  InterceptionManifest m;
  try {
    const Json j = Json::parse(text);
    m.profile = j.at("profile").get<std::string>();
    m.fake_root_id = j.value("fake_root_id", std::string());
    m.tier = parse_enum(j.at("tier").get<std::string>(), kTiers, "tier");
    m.tostring = parse_enum(j.at("tostring").get<std::string>(), kPatches, "toString patch");
    m.protected_members = j.value("protected_members", std::vector<std::string>{});
    for (const auto& e : j.at("entries")) {
      m.entries.push_back({parse_enum(e.at("host").get<std::string>(), kHosts, "host"), e.at("member").get<std::string>(),
                           parse_enum(e.at("kind").get<std::string>(), kKinds, "member kind"),
                           parse_enum(e.at("behavior").get<std::string>(), kBehaviors, "behavior"),
                           parse_enum(e.at("tier").get<std::string>(), kTiers, "tier"), e.value("experimental", false)});
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

}  // namespace adwar
