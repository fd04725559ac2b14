#include "adwar/filter.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "adwar/util.hpp"

namespace adwar {

namespace {

bool is_separator(char c) {
  return !(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '%');
}

// Matches `pat` (with `*` and `^`, optional trailing `|`) against a prefix of
// text[pos..]. Backtracking only at `*`.
bool glob_prefix(std::string_view text, std::size_t pos, std::string_view pat) {
  const bool end_anchor = !pat.empty() && pat.back() == '|';
  if (end_anchor) pat.remove_suffix(1);
  std::size_t t = pos, p = 0;
  std::size_t star_p = std::string_view::npos, star_t = 0;
  while (true) {
    if (p == pat.size()) {
      if (!end_anchor || t == text.size()) return true;
    } else if (pat[p] == '*') {
      star_p = p++;
      star_t = t;
      continue;
    } else if (pat[p] == '^') {
      if (t == text.size()) {
        ++p;  // end of input satisfies a separator
        continue;
      }
      if (is_separator(text[t])) {
        ++p;
        ++t;
        continue;
      }
    } else if (t < text.size() && text[t] == pat[p]) {
      ++p;
      ++t;
      continue;
    }
    if (star_p == std::string_view::npos || star_t >= text.size()) return false;
    p = star_p + 1;
    t = ++star_t;
  }
}

struct NormalizedUrl {
  std::string rest;       // URL with the scheme stripped and the host lowercased
  std::size_t host_end;   // end of the host within `rest`
};

NormalizedUrl normalize(std::string_view url) {
  if (!parse_url(url)) throw UrlError("malformed URL: " + std::string(url));
  url = trim(url);
  std::string rest(url.substr(url.find("://") + 3));
  const std::size_t auth_end = std::min(rest.find_first_of("/?#"), rest.size());
  std::size_t host_start = 0;
  if (const auto at = rest.substr(0, auth_end).rfind('@'); at != std::string::npos) host_start = at + 1;
  std::size_t host_end = rest.find(':', host_start);
  if (host_end == std::string::npos || host_end > auth_end) host_end = auth_end;
  for (std::size_t i = host_start; i < host_end; ++i) {
    rest[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(rest[i])));
  }
  if (host_start > 0) {
    rest.erase(0, host_start);
    host_end -= host_start;
  }
  return {std::move(rest), host_end};
}

std::string lowercase_host_part(std::string_view pattern) {
  const auto end = std::min(pattern.find_first_of("/^?:*|"), pattern.size());
  return to_lower(pattern.substr(0, end)) + std::string(pattern.substr(end));
}

bool matches_normalized(const FilterRule& rule, const NormalizedUrl& u) {
  if (rule.anchor == Anchor::Host) {
    for (std::size_t pos = 0; pos < u.host_end; ++pos) {
      if (pos != 0 && u.rest[pos - 1] != '.') continue;
      if (glob_prefix(u.rest, pos, rule.pattern)) return true;
    }
    return false;
  }
  for (std::size_t pos = 0; pos < u.rest.size(); ++pos) {
    if (glob_prefix(u.rest, pos, rule.pattern)) return true;
  }
  return false;
}

}  // namespace

ParsedLine parse_filter_line(std::string_view line) {
  const std::string_view text = trim(line);
  if (text.empty()) return SkipMarker{"empty line"};
  if (text.front() == '!') return SkipMarker{"comment"};
  if (text.front() == '[') return SkipMarker{"list header"};
  if (text.rfind("@@", 0) == 0) return SkipMarker{"exception rules are not supported"};
  if (text.find("#@#") != std::string_view::npos) return SkipMarker{"element-hiding exceptions are not supported"};
  if (text.find("#?#") != std::string_view::npos || text.find("#$#") != std::string_view::npos) {
    return SkipMarker{"extended element-hiding syntax is not supported"};
  }

  if (const auto hh = text.find("##"); hh != std::string_view::npos) {
    FilterRule rule;
    rule.kind = RuleKind::ElementHide;
    rule.raw = std::string(text);
    const std::string_view domain = text.substr(0, hh);
    if (domain.find_first_of(",~") != std::string_view::npos) {
      return SkipMarker{"multi-domain and negated scopes are not supported"};
    }
    if (!domain.empty()) {
      rule.domain = to_lower(domain);
      if (!parse_url("http://" + rule.domain)) return SkipMarker{"invalid domain scope"};
      if (is_public_suffix(rule.domain)) return SkipMarker{"domain scope is a public suffix"};
    }
    try {
      rule.selector = parse_selector(text.substr(hh + 2));
    } catch (const SelectorError& e) {
      return SkipMarker{std::string("unsupported selector: ") + e.what()};
    }
    return rule;
  }

  if (text.size() >= 2 && text.front() == '/' && text.back() == '/') {
    return SkipMarker{"regular-expression rules are not supported"};
  }
  if (text.find('$') != std::string_view::npos) return SkipMarker{"$-options are not supported"};

  FilterRule rule;
  rule.kind = RuleKind::ResourceBlock;
  rule.raw = std::string(text);
  std::string_view pattern = text;
  if (pattern.rfind("||", 0) == 0) {
    rule.anchor = Anchor::Host;
    pattern.remove_prefix(2);
  } else if (pattern.front() == '|') {
    return SkipMarker{"start-anchored rules are not supported"};
  }
  if (pattern.empty() || pattern.find_first_not_of("*^|") == std::string_view::npos) {
    return SkipMarker{"empty pattern"};
  }
  if (pattern.find('|') != std::string_view::npos && pattern.find('|') != pattern.size() - 1) {
    return SkipMarker{"'|' is only supported as an end anchor"};
  }
  rule.pattern = rule.anchor == Anchor::Host ? lowercase_host_part(pattern) : std::string(pattern);
  return rule;
}

FilterList parse_filter_list(std::string_view text, std::string source) {
  FilterList list;
  list.source = std::move(source);
  std::size_t number = 0;
  for (std::string_view line : split(text, '\n')) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto parsed = parse_filter_line(line);
    if (auto* rule = std::get_if<FilterRule>(&parsed)) {
      list.rules.push_back(std::move(*rule));
    } else if (!trim(line).empty()) {
      list.skipped.push_back({number, std::string(line), std::get<SkipMarker>(parsed).reason});
    }
  }
  return list;
}

FilterList load_filter_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open filter list " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_filter_list(ss.str(), path);
}

bool resource_rule_matches(const FilterRule& rule, std::string_view url) {
  if (rule.kind != RuleKind::ResourceBlock) return false;
  return matches_normalized(rule, normalize(url));
}

UrlVerdict match_url(const FilterList& rules, std::string_view url) {
  const NormalizedUrl u = normalize(url);
  for (std::size_t i = 0; i < rules.rules.size(); ++i) {
    const auto& r = rules.rules[i];
    if (r.kind == RuleKind::ResourceBlock && matches_normalized(r, u)) return {true, i};
  }
  return {};
}

bool rule_in_scope(const FilterRule& rule, std::string_view host) {
  if (rule.kind != RuleKind::ElementHide) return false;
  return rule.domain.empty() || host_matches_domain(host, rule.domain);
}

std::vector<std::set<NodeId>> match_elements(const FilterList& rules, const PageSnapshot& snap) {
  std::vector<std::set<NodeId>> out(snap.frames.size());
  for (std::size_t f = 0; f < snap.frames.size(); ++f) {
    const auto& frame = snap.frames[f];
    const auto url = parse_url(frame.url);
    const std::string host = url ? url->host : std::string();
    for (const auto& rule : rules.rules) {
      if (rule.kind != RuleKind::ElementHide) continue;
      if (!rule.domain.empty() && (host.empty() || !rule_in_scope(rule, host))) continue;
      for (NodeId id : match_selector(frame, rule.selector)) {
        if (id != frame.root()) out[f].insert(id);
      }
    }
  }
  return out;
}

}  // namespace adwar
