#pragma once

// CSS selector subset: compound selectors (tag, #id, .class, [attr="value"])
// joined by descendant or child combinators. Pseudo-classes, sibling
// combinators and selector lists are rejected at parse time.

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adwar/snapshot.hpp"

namespace adwar {

class SelectorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AttrTerm {
  std::string name;
  std::string value;
  friend bool operator==(const AttrTerm&, const AttrTerm&) = default;
};

struct CompoundSelector {
  std::string tag;  // empty: any element
  std::vector<std::string> ids;
  std::vector<std::string> classes;
  std::vector<AttrTerm> attrs;

  bool universal() const { return tag.empty() && ids.empty() && classes.empty() && attrs.empty(); }
  friend bool operator==(const CompoundSelector&, const CompoundSelector&) = default;
};

enum class Combinator { Descendant, Child };

struct SelectorExpr {
  std::vector<CompoundSelector> compounds;  // left to right
  std::vector<Combinator> combinators;      // combinators[i] joins compounds[i] and compounds[i+1]
  friend bool operator==(const SelectorExpr&, const SelectorExpr&) = default;
};

SelectorExpr parse_selector(std::string_view text);
/// Canonical form: `tag#id.class[attr="v"]`, combinators as " " and " > ".
std::string format_selector(const SelectorExpr& sel);

bool is_identifier(std::string_view s);

/// Element (never text) matches the compound's own terms.
bool matches_compound(const DomNode& node, const CompoundSelector& c);
bool matches(const FrameInfo& frame, NodeId id, const SelectorExpr& sel);
std::set<NodeId> match_selector(const FrameInfo& frame, const SelectorExpr& sel);

}  // namespace adwar
