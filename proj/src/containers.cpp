#include "adwar/containers.hpp"

#include <cmath>
#include <stdexcept>

#include "adwar/util.hpp"

namespace adwar {

const char* to_string(ElementKind k) {
  switch (k) {
    case ElementKind::Link: return "link";
    case ElementKind::Button: return "button";
    case ElementKind::Text: return "text";
    case ElementKind::Container: return "container";
    case ElementKind::Image: return "image";
  }
  return "?";
}

ElementKind parse_element_kind(std::string_view s) {
  if (s == "link") return ElementKind::Link;
  if (s == "button") return ElementKind::Button;
  if (s == "text") return ElementKind::Text;
  if (s == "container") return ElementKind::Container;
  if (s == "image") return ElementKind::Image;
  throw std::invalid_argument("unknown element kind '" + std::string(s) + "'");
}

ElementKind classify_kind(const FrameInfo& frame, const DomNode& node) {
  if (node.is_text()) return ElementKind::Text;
  if (node.attr("href") || node.has_handler("click")) return ElementKind::Link;
  if (node.tag == "button") return ElementKind::Button;
  if (node.tag == "input") {
    const auto* type = node.attr("type");
    if (type && (iequals(*type, "button") || iequals(*type, "submit"))) return ElementKind::Button;
  }
  if (node.image_ref) return ElementKind::Image;
  if (!node.children.empty()) {
    bool all_text = true;
    for (NodeId c : node.children) all_text = all_text && frame.node(c).is_text();
    if (all_text) return ElementKind::Text;
  }
  return ElementKind::Container;
}

namespace {

std::optional<double> parse_length(std::string_view v) {
  v = trim(v);
  if (v.size() > 2 && v.substr(v.size() - 2) == "px") v.remove_suffix(2);
  if (v.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double d = std::stod(std::string(v), &used);
    if (used != v.size()) return std::nullopt;
    return d;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool in_range(double v, const std::optional<SizeRange>& r) { return !r || (v >= r->min && v <= r->max); }

}  // namespace

bool StylePredicate::test(const StyleMap& style) const {
  const auto actual = style.get(property);
  if (op == StyleOp::GreaterThan || op == StyleOp::LessThan) {
    if (!actual) return false;
    const auto a = parse_length(*actual);
    const auto b = parse_length(value);
    if (!a || !b) return false;
    return op == StyleOp::GreaterThan ? *a > *b : *a < *b;
  }
  bool equal = false;
  if (actual) {
    const auto ca = parse_color(*actual);
    const auto cb = parse_color(value);
    if (ca && cb) {
      equal = *ca == *cb;
    } else if (const auto la = parse_length(*actual), lb = parse_length(value); la && lb) {
      equal = *la == *lb;
    } else {
      equal = *actual == value;
    }
  }
  return op == StyleOp::Equals ? equal : !equal;
}

void VisualQuery::validate() const {
  if (width && width->min > width->max) throw std::invalid_argument("width range has min > max");
  if (height && height->min > height->max) throw std::invalid_argument("height range has min > max");
  for (const auto& p : required_style) {
    if (p.property.empty()) throw std::invalid_argument("style predicate without a property");
  }
}

bool is_sidebar_box(const PageSnapshot& snap, std::size_t frame, const DomNode& node) {
  const auto& b = node.layout;
  if (!b.visible || node.is_text()) return false;
  const double vw = snap.viewport.width;
  const double fh = snap.frame_height(frame);
  if (b.width > 0.4 * vw || b.height < 0.5 * fh) return false;
  return std::abs(b.x) <= 8 || std::abs(b.right() - vw) <= 8;
}

bool inside_sidebar(const PageSnapshot& snap, std::size_t frame, NodeId id) {
  const auto& f = snap.frames[frame];
  for (NodeId a : ancestors(f, id)) {
    if (is_sidebar_box(snap, frame, f.node(a))) return true;
  }
  return false;
}

bool at_top_of_frame(const PageSnapshot& snap, std::size_t frame, const DomNode& node) {
  return node.layout.y <= 0.1 * snap.frame_height(frame);
}

bool satisfies(const PageSnapshot& snap, std::size_t frame, NodeId id, const VisualQuery& q) {
  const auto& f = snap.frames[frame];
  const DomNode& n = f.node(id);
  if (!n.layout.visible) return false;
  if (!q.kinds.empty() && !q.kinds.count(classify_kind(f, n))) return false;
  if (!in_range(n.layout.width, q.width) || !in_range(n.layout.height, q.height)) return false;
  if (q.requires_left_and_right_borders &&
      !(n.style.border_left_width > 0 && n.style.border_right_width > 0)) {
    return false;
  }
  for (const auto& p : q.required_style) {
    if (!p.test(n.style)) return false;
  }
  if (q.region) {
    switch (q.region->kind) {
      case RegionKind::Sidebar:
        if (!inside_sidebar(snap, frame, id)) return false;
        break;
      case RegionKind::TopOfFrame:
        if (!at_top_of_frame(snap, frame, n)) return false;
        break;
      case RegionKind::Rect: {
        const auto& r = q.region->rect;
        const auto& b = n.layout;
        if (b.x < r.x || b.y < r.y || b.right() > r.right() || b.bottom() > r.bottom()) return false;
        break;
      }
    }
  }
  return true;
}

std::vector<NodeRef> find_containers(const PageSnapshot& snap, const VisualQuery& q) {
  q.validate();
  std::vector<NodeRef> out;
  for (std::size_t f = 0; f < snap.frames.size(); ++f) {
    if (snap.frames[f].nodes.empty()) continue;
    for (NodeId id : traverse(snap.frames[f], {})) {
      if (satisfies(snap, f, id, q)) out.push_back({f, id});
    }
  }
  return out;
}

std::vector<NodeRef> outermost(const PageSnapshot& snap, const std::vector<NodeRef>& hits) {
  std::set<NodeRef> all(hits.begin(), hits.end());
  std::vector<NodeRef> out;
  for (const auto& h : hits) {
    bool covered = false;
    for (NodeId a : ancestors(snap.frames[h.frame], h.node)) {
      if (all.count({h.frame, a})) {
        covered = true;
        break;
      }
    }
    if (!covered) out.push_back(h);
  }
  return out;
}

}  // namespace adwar
