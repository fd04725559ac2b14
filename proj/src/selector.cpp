#include "adwar/selector.hpp"

#include <cctype>

#include "adwar/util.hpp"

namespace adwar {

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

class SelectorParser {
 public:
  explicit SelectorParser(std::string_view s) : s_(trim(s)) {}

  SelectorExpr parse() {
    if (s_.empty()) fail("empty selector");
    SelectorExpr out;
    out.compounds.push_back(compound());
    while (true) {
      const bool had_space = skip_space();
      if (at_end()) break;
      const char c = s_[pos_];
      if (c == '>') {
        ++pos_;
        skip_space();
        out.combinators.push_back(Combinator::Child);
      } else if (c == '+' || c == '~') {
        fail("sibling combinators are not supported");
      } else if (c == ',') {
        fail("selector lists are not supported here");
      } else if (had_space) {
        out.combinators.push_back(Combinator::Descendant);
      } else {
        fail(std::string("unexpected '") + c + "'");
      }
      out.compounds.push_back(compound());
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw SelectorError(msg + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }
  bool at_end() const { return pos_ >= s_.size(); }
  bool skip_space() {
    const std::size_t start = pos_;
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return pos_ > start;
  }
  std::string ident() {
    const std::size_t start = pos_;
    while (!at_end() && ident_char(s_[pos_])) ++pos_;
    if (pos_ == start) fail("expected identifier");
    return std::string(s_.substr(start, pos_ - start));
  }

  CompoundSelector compound() {
    CompoundSelector c;
    bool any = false;
    if (!at_end() && s_[pos_] == '*') {
      ++pos_;
      any = true;
    } else if (!at_end() && ident_char(s_[pos_])) {
      c.tag = to_lower(ident());
      any = true;
    }
    while (!at_end()) {
      const char ch = s_[pos_];
      if (ch == '#') {
        ++pos_;
        c.ids.push_back(ident());
      } else if (ch == '.') {
        ++pos_;
        c.classes.push_back(ident());
      } else if (ch == '[') {
        ++pos_;
        c.attrs.push_back(attribute());
      } else if (ch == ':') {
        fail("pseudo-classes are not supported");
      } else {
        break;
      }
      any = true;
    }
    if (!any) fail("expected a compound selector");
    return c;
  }

  AttrTerm attribute() {
    skip_space();
    AttrTerm t;
    t.name = to_lower(ident());
    skip_space();
    if (at_end() || s_[pos_] != '=') fail("only [attr=\"value\"] attribute selectors are supported");
    ++pos_;
    skip_space();
    if (at_end()) fail("unterminated attribute selector");
    const char q = s_[pos_];
    if (q == '"' || q == '\'') {
      ++pos_;
      const auto end = s_.find(q, pos_);
      if (end == std::string_view::npos) fail("unterminated string");
      t.value = std::string(s_.substr(pos_, end - pos_));
      if (t.value.find_first_of("\"\\") != std::string::npos) fail("escapes are not supported");
      pos_ = end + 1;
    } else {
      t.value = ident();
    }
    skip_space();
    if (at_end() || s_[pos_] != ']') fail("expected ']'");
    ++pos_;
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

bool match_from(const FrameInfo& frame, NodeId id, const SelectorExpr& sel, std::size_t k) {
  if (!matches_compound(frame.node(id), sel.compounds[k])) return false;
  if (k == 0) return true;
  const Combinator comb = sel.combinators[k - 1];
  auto p = frame.parent(id);
  if (comb == Combinator::Child) return p && match_from(frame, *p, sel, k - 1);
  for (; p; p = frame.parent(*p)) {
    if (match_from(frame, *p, sel, k - 1)) return true;
  }
  return false;
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!ident_char(c)) return false;
  }
  return true;
}

SelectorExpr parse_selector(std::string_view text) { return SelectorParser(text).parse(); }

std::string format_selector(const SelectorExpr& sel) {
  std::string out;
  for (std::size_t i = 0; i < sel.compounds.size(); ++i) {
    if (i > 0) out += sel.combinators[i - 1] == Combinator::Child ? " > " : " ";
    const auto& c = sel.compounds[i];
    if (c.universal()) {
      out += '*';
      continue;
    }
    out += c.tag;
    for (const auto& id : c.ids) out += "#" + id;
    for (const auto& cls : c.classes) out += "." + cls;
    for (const auto& a : c.attrs) out += "[" + a.name + "=\"" + a.value + "\"]";
  }
  return out;
}

bool matches_compound(const DomNode& node, const CompoundSelector& c) {
  if (node.is_text()) return false;
  if (!c.tag.empty() && node.tag != c.tag) return false;
  for (const auto& id : c.ids) {
    const auto* v = node.attr("id");
    if (!v || *v != id) return false;
  }
  for (const auto& cls : c.classes) {
    if (!node.has_class(cls)) return false;
  }
  for (const auto& a : c.attrs) {
    const auto* v = node.attr(a.name);
    if (!v || *v != a.value) return false;
  }
  return true;
}

bool matches(const FrameInfo& frame, NodeId id, const SelectorExpr& sel) {
  if (sel.compounds.empty()) return false;
  return match_from(frame, id, sel, sel.compounds.size() - 1);
}

std::set<NodeId> match_selector(const FrameInfo& frame, const SelectorExpr& sel) {
  std::set<NodeId> out;
  for (const auto& n : frame.nodes) {
    if (matches(frame, n.id, sel)) out.insert(n.id);
  }
  return out;
}

}  // namespace adwar
