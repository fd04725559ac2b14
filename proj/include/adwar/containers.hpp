#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adwar/snapshot.hpp"

namespace adwar {

enum class ElementKind { Link, Button, Text, Container, Image };

const char* to_string(ElementKind k);
ElementKind parse_element_kind(std::string_view s);

/// link: href or click handler; button: <button>, <input type=button|submit>;
/// image: has an image; text: text node or element whose children are all
/// text; container: anything else. Checked in that order.
ElementKind classify_kind(const FrameInfo& frame, const DomNode& node);

struct SizeRange {
  double min = 0;
  double max = 0;
};

enum class RegionKind { Sidebar, TopOfFrame, Rect };

struct RegionPredicate {
  RegionKind kind = RegionKind::Sidebar;
  LayoutBox rect;  // RegionKind::Rect: the node box must lie inside it
};

enum class StyleOp { Equals, NotEquals, GreaterThan, LessThan };

struct StylePredicate {
  std::string property;
  StyleOp op = StyleOp::Equals;
  std::string value;

  /// Colors compare after normalization, lengths numerically.
  bool test(const StyleMap& style) const;
};

struct VisualQuery {
  std::set<ElementKind> kinds;  // empty = any kind
  std::optional<SizeRange> width;
  std::optional<SizeRange> height;
  std::optional<RegionPredicate> region;
  std::vector<StylePredicate> required_style;
  bool requires_left_and_right_borders = false;

  /// Throws std::invalid_argument when a range has min > max.
  void validate() const;
};

struct NodeRef {
  std::size_t frame = 0;
  NodeId node = 0;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

/// Sidebar: visible, width <= 40% of the viewport, height >= 50% of the
/// frame, hugging the left or right viewport edge within 8px.
bool is_sidebar_box(const PageSnapshot& snap, std::size_t frame, const DomNode& node);
/// True when a strict ancestor of `id` is a sidebar.
bool inside_sidebar(const PageSnapshot& snap, std::size_t frame, NodeId id);
/// Top edge within the first 10% of the frame height.
bool at_top_of_frame(const PageSnapshot& snap, std::size_t frame, const DomNode& node);

bool satisfies(const PageSnapshot& snap, std::size_t frame, NodeId id, const VisualQuery& q);

/// Visible nodes satisfying every predicate, in frame then document order.
std::vector<NodeRef> find_containers(const PageSnapshot& snap, const VisualQuery& q);

/// Drops hits that have another hit as an ancestor in the same frame.
std::vector<NodeRef> outermost(const PageSnapshot& snap, const std::vector<NodeRef>& hits);

}  // namespace adwar
