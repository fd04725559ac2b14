#pragma once

// Builders and random generators shared by the unit tests.

#include <random>
#include <string>
#include <vector>

#include "adwar/selector.hpp"
#include "adwar/snapshot.hpp"

namespace adwar::testing {

class FrameBuilder {
 public:
  explicit FrameBuilder(std::string url = "https://www.example.com/") { frame_.url = std::move(url); }

  NodeId add(std::optional<NodeId> parent, std::string tag,
             std::vector<std::pair<std::string, std::string>> attrs = {}, LayoutBox box = {0, 0, 100, 20, true}) {
    DomNode n;
    n.id = next_++;
    n.tag = std::move(tag);
    n.attrs = std::move(attrs);
    n.layout = box;
    if (parent) node(*parent).children.push_back(n.id);
    frame_.nodes.push_back(std::move(n));
    return frame_.nodes.back().id;
  }
  NodeId text(NodeId parent, std::string content, LayoutBox box = {0, 0, 60, 12, true}) {
    const NodeId id = add(parent, "#text", {}, box);
    node(id).text = std::move(content);
    return id;
  }
  DomNode& node(NodeId id) {
    for (auto& n : frame_.nodes) {
      if (n.id == id) return n;
    }
    throw std::out_of_range("no node");
  }
  FrameInfo build() {
    FrameInfo f = frame_;
    f.rebuild_index();
    return f;
  }

 private:
  FrameInfo frame_;
  NodeId next_ = 1;
};

inline PageSnapshot single_frame(FrameInfo f, int vw = 1280, int vh = 2000) {
  PageSnapshot s;
  s.url = f.url;
  s.viewport = {vw, vh};
  s.frames.push_back(std::move(f));
  s.validate();
  return s;
}

inline const std::vector<std::string>& tag_pool() {
  static const std::vector<std::string> v{"div", "span", "a", "p", "ul", "li"};
  return v;
}
inline const std::vector<std::string>& id_pool() {
  static const std::vector<std::string> v{"newsfeed", "Ad3Right", "main", "x1"};
  return v;
}
inline const std::vector<std::string>& class_pool() {
  static const std::vector<std::string> v{"ad", "post", "side", "big", "c-1"};
  return v;
}

/// Random tree with `n` nodes; parents are chosen among earlier nodes.
inline FrameInfo random_frame(std::mt19937_64& rng, int n) {
  FrameBuilder b;
  std::vector<NodeId> ids;
  auto pick = [&](const std::vector<std::string>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  };
  std::uniform_int_distribution<int> pct(0, 99);
  for (int i = 0; i < n; ++i) {
    std::optional<NodeId> parent;
    if (!ids.empty()) parent = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
    if (parent && pct(rng) < 10) {
      b.text(*parent, "t");
      continue;
    }
    std::vector<std::pair<std::string, std::string>> attrs;
    if (pct(rng) < 30) attrs.emplace_back("id", pick(id_pool()));
    if (pct(rng) < 50) {
      std::string cls = pick(class_pool());
      if (pct(rng) < 40) cls += " " + pick(class_pool());
      attrs.emplace_back("class", cls);
    }
    if (pct(rng) < 20) attrs.emplace_back("data-x", pct(rng) < 50 ? "1" : "2");
    ids.push_back(b.add(parent, pick(tag_pool()), attrs));
  }
  return b.build();
}

inline std::string random_selector_text(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pct(0, 99);
  auto pick = [&](const std::vector<std::string>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  };
  const int parts = 1 + std::uniform_int_distribution<int>(0, 2)(rng);
  std::string out;
  for (int i = 0; i < parts; ++i) {
    if (i > 0) out += pct(rng) < 50 ? " > " : " ";
    std::string c;
    if (pct(rng) < 50) c += pick(tag_pool());
    if (pct(rng) < 30) c += "#" + pick(id_pool());
    if (pct(rng) < 40) c += "." + pick(class_pool());
    if (pct(rng) < 15) c += std::string("[data-x=\"") + (pct(rng) < 50 ? "1" : "2") + "\"]";
    if (c.empty()) c = pct(rng) < 50 ? "*" : pick(tag_pool());
    out += c;
  }
  return out;
}

}  // namespace adwar::testing
