#pragma once

// EasyList subset: resource-blocking rules (`||host/path`, plain substrings,
// with `*` and `^` wildcards) and element-hiding rules (`##sel`,
// `domain##sel`). Everything else is skipped with a reason, never fatal.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "adwar/selector.hpp"
#include "adwar/snapshot.hpp"

namespace adwar {

enum class RuleKind { ResourceBlock, ElementHide };
enum class Anchor { Host, Substring };

struct FilterRule {
  RuleKind kind = RuleKind::ResourceBlock;
  std::string raw;
  // resource-block
  Anchor anchor = Anchor::Substring;
  std::string pattern;
  // element-hide
  std::string domain;  // empty = global
  SelectorExpr selector;
};

struct SkipMarker {
  std::string reason;
};

using ParsedLine = std::variant<FilterRule, SkipMarker>;

ParsedLine parse_filter_line(std::string_view line);

struct SkippedLine {
  std::size_t line_number = 0;
  std::string text;
  std::string reason;
};

struct FilterList {
  std::string source;
  std::vector<FilterRule> rules;
  std::vector<SkippedLine> skipped;  // blank lines are not recorded
};

FilterList parse_filter_list(std::string_view text, std::string source = "inline");
FilterList load_filter_list(const std::string& path);

class UrlError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct UrlVerdict {
  bool blocked = false;
  std::optional<std::size_t> rule_index;  // earliest matching rule
};

/// Throws UrlError unless `url` is an absolute http(s) URL.
UrlVerdict match_url(const FilterList& rules, std::string_view url);
bool resource_rule_matches(const FilterRule& rule, std::string_view url);

/// Whether an element-hiding rule is in scope for a document on `host`.
bool rule_in_scope(const FilterRule& rule, std::string_view host);

/// Per frame, the union of nodes matched by in-scope element-hiding rules.
/// The frame root and text nodes are never returned.
std::vector<std::set<NodeId>> match_elements(const FilterList& rules, const PageSnapshot& snap);

}  // namespace adwar
