#include "adwar/snapshot.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "adwar/util.hpp"

namespace adwar {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str()) return std::nullopt;
  std::string_view rest(end);
  if (!rest.empty() && rest != "px") return std::nullopt;
  return v;
}

std::uint8_t clamp_channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

std::optional<Rgba> parse_color(std::string_view text) {
  const std::string s = to_lower(trim(text));
  if (s.empty()) return std::nullopt;
  if (s == "transparent") return Rgba{0, 0, 0, 0};
  if (s == "white") return Rgba{255, 255, 255, 255};
  if (s == "black") return Rgba{0, 0, 0, 255};
  if (s == "red") return Rgba{255, 0, 0, 255};
  if (s == "green") return Rgba{0, 128, 0, 255};
  if (s == "blue") return Rgba{0, 0, 255, 255};
  if (s == "gray" || s == "grey") return Rgba{128, 128, 128, 255};

  if (s[0] == '#') {
    const std::string_view hex = std::string_view(s).substr(1);
    for (char c : hex) {
      if (hex_value(c) < 0) return std::nullopt;
    }
    auto pair = [&](std::size_t i) {
      return static_cast<std::uint8_t>(hex_value(hex[i]) * 16 + hex_value(hex[i + 1]));
    };
    auto single = [&](std::size_t i) { return static_cast<std::uint8_t>(hex_value(hex[i]) * 17); };
    switch (hex.size()) {
      case 3: return Rgba{single(0), single(1), single(2), 255};
      case 4: return Rgba{single(0), single(1), single(2), single(3)};
      case 6: return Rgba{pair(0), pair(2), pair(4), 255};
      case 8: return Rgba{pair(0), pair(2), pair(4), pair(6)};
      default: return std::nullopt;
    }
  }

  const bool has_alpha = s.rfind("rgba(", 0) == 0;
  if (has_alpha || s.rfind("rgb(", 0) == 0) {
    if (s.back() != ')') return std::nullopt;
    const auto open = s.find('(');
    const auto parts = split(std::string_view(s).substr(open + 1, s.size() - open - 2), ',');
    if (parts.size() != (has_alpha ? 4u : 3u)) return std::nullopt;
    double v[4] = {0, 0, 0, 1};
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::string part(trim(parts[i]));
      char* end = nullptr;
      v[i] = std::strtod(part.c_str(), &end);
      if (end == part.c_str() || *end != '\0') return std::nullopt;
    }
    return Rgba{clamp_channel(v[0]), clamp_channel(v[1]), clamp_channel(v[2]), clamp_channel(v[3] * 255.0)};
  }
  return std::nullopt;
}

std::string format_color(const Rgba& c) {
  char buf[10];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x%02x", c.r, c.g, c.b, c.a);
  return buf;
}

std::optional<std::string> StyleMap::get(std::string_view property) const {
  const std::string p = to_lower(property);
  auto nonempty = [](const std::string& v) -> std::optional<std::string> {
    if (v.empty()) return std::nullopt;
    return v;
  };
  if (p == "display") return nonempty(display);
  if (p == "visibility") return nonempty(visibility);
  if (p == "position") return nonempty(position);
  if (p == "background-color") {
    if (!background_color) return std::nullopt;
    return format_color(*background_color);
  }
  if (p == "color") {
    if (!color) return std::nullopt;
    return format_color(*color);
  }
  if (p == "border-left-width") return format_px(border_left_width);
  if (p == "border-right-width") return format_px(border_right_width);
  if (p == "z-index") {
    if (!z_index) return std::nullopt;
    return std::to_string(*z_index);
  }
  auto it = extras.find(p);
  if (it == extras.end()) return std::nullopt;
  return it->second;
}

void StyleMap::set(std::string_view property, std::string_view value) {
  const std::string p = to_lower(property);
  const std::string v(trim(value));
  if (p == "display") {
    display = v;
  } else if (p == "visibility") {
    visibility = v;
  } else if (p == "position") {
    position = v;
  } else if (p == "background-color" || p == "color") {
    auto c = parse_color(v);
    if (!c) throw std::invalid_argument("unparseable color '" + v + "' for " + p);
    (p == "color" ? color : background_color) = *c;
  } else if (p == "border-left-width" || p == "border-right-width") {
    auto n = parse_number(v);
    if (!n || *n < 0) throw std::invalid_argument("bad length '" + v + "' for " + p);
    (p == "border-left-width" ? border_left_width : border_right_width) = *n;
  } else if (p == "z-index") {
    if (v == "auto" || v.empty()) {
      z_index.reset();
    } else {
      int z = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), z);
      if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument("bad z-index '" + v + "'");
      z_index = z;
    }
  } else {
    extras[p] = v;
  }
}

ImageBitmap::ImageBitmap(int w, int h, Rgba fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw std::invalid_argument("negative image size");
  rgba.resize(static_cast<std::size_t>(w) * h * 4);
  for (std::size_t i = 0; i < rgba.size(); i += 4) {
    rgba[i] = fill.r;
    rgba[i + 1] = fill.g;
    rgba[i + 2] = fill.b;
    rgba[i + 3] = fill.a;
  }
}

Rgba ImageBitmap::at(int x, int y) const {
  const std::size_t o = (static_cast<std::size_t>(y) * width + x) * 4;
  return {rgba[o], rgba[o + 1], rgba[o + 2], rgba[o + 3]};
}

void ImageBitmap::set(int x, int y, Rgba c) {
  const std::size_t o = (static_cast<std::size_t>(y) * width + x) * 4;
  rgba[o] = c.r;
  rgba[o + 1] = c.g;
  rgba[o + 2] = c.b;
  rgba[o + 3] = c.a;
}

const std::string* DomNode::attr(std::string_view name) const {
  for (const auto& [k, v] : attrs) {
    if (k == name) return &v;
  }
  return nullptr;
}

void DomNode::set_attr(std::string_view name, std::string value) {
  for (auto& [k, v] : attrs) {
    if (k == name) {
      v = std::move(value);
      return;
    }
  }
  attrs.emplace_back(std::string(name), std::move(value));
}

std::vector<std::string> DomNode::classes() const {
  std::vector<std::string> out;
  if (const auto* c = attr("class")) {
    for (auto tok : split_ws(*c)) out.emplace_back(tok);
  }
  return out;
}

bool DomNode::has_class(std::string_view cls) const {
  const auto* c = attr("class");
  if (!c) return false;
  for (auto tok : split_ws(*c)) {
    if (tok == cls) return true;
  }
  return false;
}

void FrameInfo::rebuild_index() {
  index_.clear();
  parent_.clear();
  if (nodes.empty()) throw ValidationError("frame has no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!index_.emplace(nodes[i].id, i).second) {
      throw ValidationError("duplicate node id " + std::to_string(nodes[i].id));
    }
  }
  for (const auto& n : nodes) {
    for (NodeId c : n.children) {
      if (!index_.count(c)) {
        throw ValidationError("unknown child id " + std::to_string(c) + " of node " + std::to_string(n.id));
      }
      if (c == n.id) throw ValidationError("cycle through node " + std::to_string(c));
      if (!parent_.emplace(c, n.id).second) {
        throw ValidationError("node " + std::to_string(c) + " has multiple parents");
      }
    }
  }
  std::vector<NodeId> roots;
  for (const auto& n : nodes) {
    if (!parent_.count(n.id)) roots.push_back(n.id);
  }
  if (roots.empty()) throw ValidationError("no root: parent links form a cycle");
  if (roots.size() > 1) throw ValidationError("multiple roots (" + std::to_string(roots.size()) + ")");
  root_ = roots.front();

  std::size_t reached = 0;
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    ++reached;
    for (NodeId c : nodes[index_.at(id)].children) stack.push_back(c);
  }
  if (reached != nodes.size()) throw ValidationError("cycle detected: nodes unreachable from root");
}

const DomNode& FrameInfo::node(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("no node " + std::to_string(id));
  return nodes[it->second];
}

DomNode& FrameInfo::node_mut(NodeId id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("no node " + std::to_string(id));
  return nodes[it->second];
}

const DomNode* FrameInfo::find(NodeId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes[it->second];
}

std::optional<NodeId> FrameInfo::parent(NodeId id) const {
  auto it = parent_.find(id);
  if (it == parent_.end()) return std::nullopt;
  return it->second;
}

NodeId FrameInfo::max_id() const {
  NodeId m = 0;
  for (const auto& n : nodes) m = std::max(m, n.id);
  return m;
}

void PageSnapshot::validate() {
  if (frames.empty()) throw ValidationError("frame 0 missing");
  if (viewport.width < 0 || viewport.height < 0) throw ValidationError("negative viewport");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    auto& frame = frames[f];
    const std::string where = "frame " + std::to_string(f) + ": ";
    try {
      frame.rebuild_index();
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    if (f == 0) {
      if (frame.parent_frame) throw ValidationError("top frame must not have a parent frame");
    } else {
      if (!frame.parent_frame || *frame.parent_frame < 0 || static_cast<std::size_t>(*frame.parent_frame) >= f) {
        throw ValidationError(where + "invalid parent frame index");
      }
      if (frame.owner_node && !frames[*frame.parent_frame].contains(*frame.owner_node)) {
        throw ValidationError(where + "owner node " + std::to_string(*frame.owner_node) +
                              " not found in parent frame");
      }
    }
    for (const auto& n : frame.nodes) {
      if (n.layout.width < 0 || n.layout.height < 0) {
        throw ValidationError(where + "negative layout size on node " + std::to_string(n.id));
      }
      if (n.image_ref && !images.count(*n.image_ref)) {
        throw ValidationError("dangling image-ref " + *n.image_ref);
      }
      for (const auto& [k, v] : n.style.extras) {
        if (k != to_lower(k)) throw ValidationError(where + "style key not lowercase: " + k);
      }
    }
  }
  for (const auto& [id, img] : images) {
    if (img.width < 0 || img.height < 0 ||
        img.rgba.size() != static_cast<std::size_t>(img.width) * img.height * 4) {
      throw ValidationError("image " + id + ": pixel buffer length != width*height*4");
    }
  }
  for (const auto& r : requests) {
    if (r.frame < 0 || static_cast<std::size_t>(r.frame) >= frames.size()) {
      throw ValidationError("request " + r.url + " references invalid frame " + std::to_string(r.frame));
    }
  }
}

const ImageBitmap* PageSnapshot::image(const std::string& id) const {
  auto it = images.find(id);
  return it == images.end() ? nullptr : &it->second;
}

double PageSnapshot::frame_width(std::size_t f) const {
  if (f == 0 && viewport.width > 0) return viewport.width;
  const auto& fr = frames.at(f);
  return fr.node(fr.root()).layout.width;
}

double PageSnapshot::frame_height(std::size_t f) const {
  const auto& fr = frames.at(f);
  return fr.node(fr.root()).layout.height;
}

std::vector<NodeId> traverse(const FrameInfo& frame, const std::set<NodeId>& exclusions) {
  for (NodeId x : exclusions) {
    if (!frame.contains(x)) throw std::invalid_argument("exclusion " + std::to_string(x) + " is not in the frame");
  }
  std::vector<NodeId> out;
  if (exclusions.count(frame.root())) return out;
  out.reserve(frame.nodes.size());
  std::vector<NodeId> stack{frame.root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    out.push_back(id);
    const auto& kids = frame.node(id).children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      if (!exclusions.count(*it)) stack.push_back(*it);
    }
  }
  return out;
}

std::set<NodeId> subtree(const FrameInfo& frame, NodeId root) {
  std::set<NodeId> out;
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    out.insert(id);
    for (NodeId c : frame.node(id).children) stack.push_back(c);
  }
  return out;
}

std::vector<NodeId> ancestors(const FrameInfo& frame, NodeId id) {
  std::vector<NodeId> out;
  for (auto p = frame.parent(id); p; p = frame.parent(*p)) out.push_back(*p);
  return out;
}

std::string subtree_text(const FrameInfo& frame, NodeId id) {
  std::string out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    const NodeId cur = stack.back();
    stack.pop_back();
    const auto& node = frame.node(cur);
    if (node.is_text()) {
      if (!out.empty()) out += ' ';
      out += node.text;
    }
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

}  // namespace adwar
