#pragma once

// Page snapshot data model: a captured, already-rendered page (DOM tree,
// layout boxes, computed-style subset, images, scripts, request log).
// Everything here is immutable after parse; layout is captured, never computed.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace adwar {

using NodeId = std::int64_t;

inline constexpr int kSnapshotFormatVersion = 1;

/// Malformed snapshot syntax. `path` names the offending field, e.g.
/// `frames[0].nodes[3].layout.w`; `line` is set for JSON syntax errors.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& what, int line = 0)
      : std::runtime_error(what), path_(std::move(path)), line_(line) {}
  const std::string& path() const noexcept { return path_; }
  int line() const noexcept { return line_; }

 private:
  std::string path_;
  int line_;
};

/// A structurally well-formed snapshot that violates a model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rgba {
  std::uint8_t r = 0, g = 0, b = 0, a = 255;
  friend bool operator==(const Rgba&, const Rgba&) = default;
};

/// Accepts `#rgb`, `#rrggbb`, `#rrggbbaa`, `rgb(r,g,b)`, `rgba(r,g,b,a)` with a
/// in [0,1], `[r,g,b,a]`-style is handled by the JSON reader, plus a handful of
/// keywords (`white`, `black`, `transparent`, ...).
std::optional<Rgba> parse_color(std::string_view text);
std::string format_color(const Rgba& c);

struct LayoutBox {
  double x = 0, y = 0, width = 0, height = 0;
  bool visible = true;

  double right() const { return x + width; }
  double bottom() const { return y + height; }
  bool contains(double px, double py) const {
    return px >= x && px < right() && py >= y && py < bottom();
  }
  friend bool operator==(const LayoutBox&, const LayoutBox&) = default;
};

/// Computed-style subset. Colors are held normalized; everything not modelled
/// explicitly lands in `extras` keyed by lowercase property name.
struct StyleMap {
  std::string display;
  std::string visibility;
  std::string position;
  std::optional<Rgba> background_color;
  std::optional<Rgba> color;
  double border_left_width = 0;
  double border_right_width = 0;
  std::optional<int> z_index;
  std::map<std::string, std::string> extras;

  /// Textual value of any property (modelled or extra); nullopt when unset.
  std::optional<std::string> get(std::string_view property) const;
  /// Sets a property from its textual CSS value, normalizing colors.
  void set(std::string_view property, std::string_view value);

  friend bool operator==(const StyleMap&, const StyleMap&) = default;
};

struct ImageBitmap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;  // row-major, 4 bytes per pixel

  ImageBitmap() = default;
  ImageBitmap(int w, int h, Rgba fill = {255, 255, 255, 255});

  bool empty() const { return width == 0 || height == 0; }
  Rgba at(int x, int y) const;
  void set(int x, int y, Rgba c);
  friend bool operator==(const ImageBitmap&, const ImageBitmap&) = default;
};

struct DomNode {
  NodeId id = 0;
  std::string tag;  // lowercase element name, or "#text"
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;
  std::vector<NodeId> children;
  LayoutBox layout;
  StyleMap style;
  std::optional<std::string> image_ref;
  // Recorded event kind -> capture-time navigation target hint (if any).
  std::map<std::string, std::optional<std::string>> handlers;
  // Ground-truth label for evaluation corpora; ignored by every detector.
  std::optional<bool> ad_label;

  bool is_text() const { return tag == "#text"; }
  const std::string* attr(std::string_view name) const;
  void set_attr(std::string_view name, std::string value);
  bool has_class(std::string_view cls) const;
  std::vector<std::string> classes() const;
  bool has_handler(std::string_view kind) const { return handlers.count(std::string(kind)) != 0; }

  friend bool operator==(const DomNode&, const DomNode&) = default;
};

/// One frame's node tree. `nodes` is the owning storage in capture order;
/// call `rebuild_index()` after mutating it (parse does this for you).
struct FrameInfo {
  std::string url;
  std::optional<int> parent_frame;   // absent for the top frame
  std::optional<NodeId> owner_node;  // iframe element in the parent frame
  std::optional<bool> ad_label;      // evaluation ground truth
  std::vector<DomNode> nodes;

  /// Recomputes id/parent lookups and checks the tree invariants (unique ids,
  /// exactly one root, every child resolvable, one parent per node, acyclic).
  /// Throws ValidationError naming the violated rule.
  void rebuild_index();

  NodeId root() const { return root_; }
  bool contains(NodeId id) const { return index_.count(id) != 0; }
  const DomNode& node(NodeId id) const;
  DomNode& node_mut(NodeId id);
  const DomNode* find(NodeId id) const;
  std::optional<NodeId> parent(NodeId id) const;
  NodeId max_id() const;

  friend bool operator==(const FrameInfo& a, const FrameInfo& b) {
    return a.url == b.url && a.parent_frame == b.parent_frame && a.owner_node == b.owner_node &&
           a.ad_label == b.ad_label && a.nodes == b.nodes;
  }

 private:
  NodeId root_ = 0;
  std::unordered_map<NodeId, std::size_t> index_;
  std::unordered_map<NodeId, NodeId> parent_;
};

struct Viewport {
  int width = 0;
  int height = 0;
  friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct ScriptRecord {
  std::string id;
  std::string source;  // URL, or "inline"
  std::string text;
  friend bool operator==(const ScriptRecord&, const ScriptRecord&) = default;
};

struct RequestRecord {
  std::string url;
  int frame = 0;
  std::string kind;  // script, image, xhr, document, ...
  friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

struct PageSnapshot {
  std::string url;
  Viewport viewport;
  std::vector<FrameInfo> frames;
  std::map<std::string, ImageBitmap> images;
  std::vector<ScriptRecord> scripts;
  std::vector<RequestRecord> requests;

  /// Full invariant check; rebuilds every frame index first.
  void validate();

  const ImageBitmap* image(const std::string& id) const;
  /// Width used for right-edge heuristics: viewport for the top frame, the
  /// root box for iframes.
  double frame_width(std::size_t frame) const;
  double frame_height(std::size_t frame) const;

  friend bool operator==(const PageSnapshot&, const PageSnapshot&) = default;
};

PageSnapshot parse_snapshot(std::string_view text);
std::string serialize_snapshot(const PageSnapshot& snap, bool pretty = false);
PageSnapshot load_snapshot(const std::string& path);
void save_snapshot(const PageSnapshot& snap, const std::string& path, bool pretty = false);

/// Depth-first preorder from the root that never enters an excluded subtree.
/// Throws std::invalid_argument when an exclusion is not a node of `frame`.
std::vector<NodeId> traverse(const FrameInfo& frame, const std::set<NodeId>& exclusions = {});

/// `root` and all its descendants.
std::set<NodeId> subtree(const FrameInfo& frame, NodeId root);

/// Nearest-first strict ancestors.
std::vector<NodeId> ancestors(const FrameInfo& frame, NodeId id);

/// Concatenated text of all text nodes under `id`, in document order.
std::string subtree_text(const FrameInfo& frame, NodeId id);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace adwar
