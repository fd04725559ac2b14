// Snapshot file format (version 1) reader/writer.

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adwar/snapshot.hpp"
#include "adwar/util.hpp"
#include "json.hpp"

namespace adwar {

using Json = nlohmann::ordered_json;

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.empty()) return {};
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (c != '\n' && c != '\r' && c != ' ' && c != '\t') clean.push_back(c);
  }
  if (clean.empty()) return {};
  if (clean.size() % 4 != 0) throw std::invalid_argument("base64 length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * clean.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                static_cast<int>(clean.size()));
  if (n < 0) throw std::invalid_argument("invalid base64");
  std::size_t padding = 0;
  if (clean.back() == '=') ++padding;
  if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

namespace {

// Field-path aware accessors so that errors say where they happened.
class Reader {
 public:
  explicit Reader(std::string path) : path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    const std::string p = field.empty() ? path_ : (path_.empty() ? field : path_ + "." + field);
    throw ParseError(p, p + ": " + msg);
  }

  const Json& require(const Json& obj, const std::string& key) const {
    if (!obj.is_object()) fail("", "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(key, "missing required field");
    return *it;
  }

  std::string string_at(const Json& obj, const std::string& key) const {
    const auto& v = require(obj, key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  double number_at(const Json& obj, const std::string& key) const {
    const auto& v = require(obj, key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  std::int64_t integer_at(const Json& obj, const std::string& key) const {
    const auto& v = require(obj, key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<std::int64_t>();
  }

  Reader child(const std::string& seg) const { return Reader(path_.empty() ? seg : path_ + "." + seg); }
  Reader index(const std::string& seg, std::size_t i) const {
    return child(seg + "[" + std::to_string(i) + "]");
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

LayoutBox read_layout(const Reader& r, const Json& j) {
  LayoutBox b;
  b.x = r.number_at(j, "x");
  b.y = r.number_at(j, "y");
  b.width = r.number_at(j, "w");
  b.height = r.number_at(j, "h");
  if (auto it = j.find("visible"); it != j.end()) {
    if (!it->is_boolean()) r.fail("visible", "expected a boolean");
    b.visible = it->get<bool>();
  }
  return b;
}

StyleMap read_style(const Reader& r, const Json& j) {
  if (!j.is_object()) r.fail("", "expected an object");
  StyleMap s;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string value;
    if (it->is_string()) {
      value = it->get<std::string>();
    } else if (it->is_number_integer()) {
      value = std::to_string(it->get<std::int64_t>());
    } else if (it->is_number()) {
      value = std::to_string(it->get<double>());
    } else if (it->is_array() && it->size() == 4) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "#%02x%02x%02x%02x", (*it)[0].get<int>() & 255, (*it)[1].get<int>() & 255,
                    (*it)[2].get<int>() & 255, (*it)[3].get<int>() & 255);
      value = buf;
    } else {
      r.fail(it.key(), "unsupported style value");
    }
    try {
      s.set(it.key(), value);
    } catch (const std::invalid_argument& e) {
      r.fail(it.key(), e.what());
    }
  }
  return s;
}

DomNode read_node(const Reader& r, const Json& j) {
  DomNode n;
  n.id = r.integer_at(j, "id");
  n.tag = r.string_at(j, "tag");
  if (n.tag != "#text") {
    for (char c : n.tag) {
      if (std::isupper(static_cast<unsigned char>(c))) r.fail("tag", "element names must be lowercase");
    }
  }
  if (auto it = j.find("attrs"); it != j.end()) {
    if (it->is_object()) {
      for (auto a = it->begin(); a != it->end(); ++a) {
        if (!a->is_string()) r.child("attrs").fail(a.key(), "expected a string");
        n.attrs.emplace_back(a.key(), a->get<std::string>());
      }
    } else if (it->is_array()) {
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& pair = (*it)[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
          r.index("attrs", i).fail("", "expected [name, value]");
        }
        n.attrs.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
      }
    } else {
      r.fail("attrs", "expected an object");
    }
  }
  if (auto it = j.find("text"); it != j.end()) {
    if (!it->is_string()) r.fail("text", "expected a string");
    n.text = it->get<std::string>();
  }
  if (auto it = j.find("children"); it != j.end()) {
    if (!it->is_array()) r.fail("children", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_number_integer()) r.index("children", i).fail("", "expected an integer node id");
      n.children.push_back((*it)[i].get<NodeId>());
    }
  }
  n.layout = read_layout(r.child("layout"), r.require(j, "layout"));
  if (auto it = j.find("style"); it != j.end()) n.style = read_style(r.child("style"), *it);
  if (auto it = j.find("image_ref"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) r.fail("image_ref", "expected a string");
    n.image_ref = it->get<std::string>();
  }
  if (auto it = j.find("handlers"); it != j.end()) {
    if (it->is_array()) {
      for (std::size_t i = 0; i < it->size(); ++i) {
        if (!(*it)[i].is_string()) r.index("handlers", i).fail("", "expected an event name");
        n.handlers.emplace((*it)[i].get<std::string>(), std::nullopt);
      }
    } else if (it->is_object()) {
      for (auto h = it->begin(); h != it->end(); ++h) {
        if (h->is_null()) {
          n.handlers.emplace(h.key(), std::nullopt);
        } else if (h->is_string()) {
          n.handlers.emplace(h.key(), h->get<std::string>());
        } else {
          r.child("handlers").fail(h.key(), "expected a target URL or null");
        }
      }
    } else {
      r.fail("handlers", "expected an array or object");
    }
  }
  if (auto it = j.find("ad_label"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) r.fail("ad_label", "expected a boolean");
    n.ad_label = it->get<bool>();
  }
  return n;
}

FrameInfo read_frame(const Reader& r, const Json& j) {
  FrameInfo f;
  f.url = r.string_at(j, "url");
  if (auto it = j.find("parent"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) r.fail("parent", "expected an integer");
    f.parent_frame = it->get<int>();
  }
  if (auto it = j.find("owner"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) r.fail("owner", "expected an integer");
    f.owner_node = it->get<NodeId>();
  }
  if (auto it = j.find("is_ad"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) r.fail("is_ad", "expected a boolean");
    f.ad_label = it->get<bool>();
  }
  const auto& nodes = r.require(j, "nodes");
  if (!nodes.is_array()) r.fail("nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) f.nodes.push_back(read_node(r.index("nodes", i), nodes[i]));
  return f;
}

ImageBitmap read_image(const Reader& r, const Json& j) {
  ImageBitmap img;
  const auto w = r.integer_at(j, "w");
  const auto h = r.integer_at(j, "h");
  if (w < 0 || h < 0) r.fail("", "negative image size");
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  try {
    img.rgba = base64_decode(r.string_at(j, "rgba_base64"));
  } catch (const std::invalid_argument& e) {
    r.fail("rgba_base64", e.what());
  }
  return img;
}

int line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

Json write_node(const DomNode& n) {
  Json j;
  j["id"] = n.id;
  j["tag"] = n.tag;
  if (!n.attrs.empty()) {
    Json attrs = Json::object();
    for (const auto& [k, v] : n.attrs) attrs[k] = v;
    j["attrs"] = attrs;
  }
  if (!n.text.empty()) j["text"] = n.text;
  j["children"] = n.children;
  j["layout"] = {{"x", n.layout.x}, {"y", n.layout.y}, {"w", n.layout.width}, {"h", n.layout.height},
                 {"visible", n.layout.visible}};
  Json style = Json::object();
  const StyleMap& s = n.style;
  if (!s.display.empty()) style["display"] = s.display;
  if (!s.visibility.empty()) style["visibility"] = s.visibility;
  if (!s.position.empty()) style["position"] = s.position;
  if (s.background_color) style["background-color"] = format_color(*s.background_color);
  if (s.color) style["color"] = format_color(*s.color);
  if (s.border_left_width != 0) style["border-left-width"] = format_px(s.border_left_width);
  if (s.border_right_width != 0) style["border-right-width"] = format_px(s.border_right_width);
  if (s.z_index) style["z-index"] = std::to_string(*s.z_index);
  for (const auto& [k, v] : s.extras) style[k] = v;
  if (!style.empty()) j["style"] = style;
  if (n.image_ref) j["image_ref"] = *n.image_ref;
  if (!n.handlers.empty()) {
    const bool any_hint = std::any_of(n.handlers.begin(), n.handlers.end(), [](const auto& h) { return h.second; });
    if (any_hint) {
      Json h = Json::object();
      for (const auto& [k, v] : n.handlers) h[k] = v ? Json(*v) : Json(nullptr);
      j["handlers"] = h;
    } else {
      Json h = Json::array();
      for (const auto& [k, v] : n.handlers) h.push_back(k);
      j["handlers"] = h;
    }
  }
  if (n.ad_label) j["ad_label"] = *n.ad_label;
  return j;
}

}  // namespace

PageSnapshot parse_snapshot(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const int line = line_of(text, e.byte);
    throw ParseError("", "line " + std::to_string(line) + ": " + e.what(), line);
  }
  const Reader r("");
  if (!doc.is_object()) r.fail("", "snapshot must be a JSON object");
  const auto version = r.integer_at(doc, "format_version");
  if (version != kSnapshotFormatVersion) {
    r.fail("format_version", "unsupported snapshot format version " + std::to_string(version));
  }
  PageSnapshot snap;
  snap.url = r.string_at(doc, "url");
  const auto& vp = r.require(doc, "viewport");
  snap.viewport.width = static_cast<int>(r.child("viewport").integer_at(vp, "w"));
  snap.viewport.height = static_cast<int>(r.child("viewport").integer_at(vp, "h"));

  const auto& frames = r.require(doc, "frames");
  if (!frames.is_array()) r.fail("frames", "expected an array");
  for (std::size_t i = 0; i < frames.size(); ++i) snap.frames.push_back(read_frame(r.index("frames", i), frames[i]));

  if (auto it = doc.find("images"); it != doc.end()) {
    if (!it->is_object()) r.fail("images", "expected an object");
    for (auto im = it->begin(); im != it->end(); ++im) {
      snap.images.emplace(im.key(), read_image(r.child("images").child(im.key()), *im));
    }
  }
  if (auto it = doc.find("scripts"); it != doc.end()) {
    if (!it->is_array()) r.fail("scripts", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto sr = r.index("scripts", i);
      snap.scripts.push_back({sr.string_at((*it)[i], "id"), sr.string_at((*it)[i], "source"),
                              sr.string_at((*it)[i], "text")});
    }
  }
  if (auto it = doc.find("requests"); it != doc.end()) {
    if (!it->is_array()) r.fail("requests", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto rr = r.index("requests", i);
      snap.requests.push_back({rr.string_at((*it)[i], "url"), static_cast<int>(rr.integer_at((*it)[i], "frame")),
                               rr.string_at((*it)[i], "kind")});
    }
  }
  snap.validate();
  return snap;
}

std::string serialize_snapshot(const PageSnapshot& snap, bool pretty) {
  Json doc;
  doc["format_version"] = kSnapshotFormatVersion;
  doc["url"] = snap.url;
  doc["viewport"] = {{"w", snap.viewport.width}, {"h", snap.viewport.height}};
  Json frames = Json::array();
  for (const auto& f : snap.frames) {
    Json jf;
    jf["url"] = f.url;
    if (f.parent_frame) jf["parent"] = *f.parent_frame;
    if (f.owner_node) jf["owner"] = *f.owner_node;
    if (f.ad_label) jf["is_ad"] = *f.ad_label;
    Json nodes = Json::array();
    for (const auto& n : f.nodes) nodes.push_back(write_node(n));
    jf["nodes"] = std::move(nodes);
    frames.push_back(std::move(jf));
  }
  doc["frames"] = std::move(frames);
  Json images = Json::object();
  for (const auto& [id, img] : snap.images) {
    images[id] = {{"w", img.width}, {"h", img.height}, {"rgba_base64", base64_encode(img.rgba)}};
  }
  doc["images"] = std::move(images);
  Json scripts = Json::array();
  for (const auto& s : snap.scripts) scripts.push_back({{"id", s.id}, {"source", s.source}, {"text", s.text}});
  doc["scripts"] = std::move(scripts);
  Json requests = Json::array();
  for (const auto& r : snap.requests) requests.push_back({{"url", r.url}, {"frame", r.frame}, {"kind", r.kind}});
  doc["requests"] = std::move(requests);
  return pretty ? doc.dump(2) : doc.dump();
}

PageSnapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_snapshot(ss.str());
}

void save_snapshot(const PageSnapshot& snap, const std::string& path, bool pretty) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write snapshot " + path);
  out << serialize_snapshot(snap, pretty) << '\n';
}

}  // namespace adwar
