#include "adwar/active.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <boost/regex.hpp>
#include <set>

#include "adwar/selector.hpp"
#include "adwar/util.hpp"
#include "json.hpp"

namespace adwar {

using Json = nlohmann::ordered_json;

struct CompiledPattern {
  boost::regex re;
};

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::ForceReturn: return "force-return";
    case ActionKind::RemoveBait: return "remove-bait";
    case ActionKind::ReplaceSpan: return "replace-span";
    case ActionKind::NopFunction: return "nop-function";
  }
  return "?";
}

const char* to_string(DelimiterCheck c) {
  switch (c) {
    case DelimiterCheck::Balanced: return "balanced";
    case DelimiterCheck::RolledBack: return "rolled-back";
    case DelimiterCheck::InputUnbalanced: return "input-unbalanced";
  }
  return "?";
}

const char* to_string(DetectorCategory c) {
  switch (c) {
    case DetectorCategory::AbsentKnownResource: return "absent-known-resource";
    case DetectorCategory::BaitAd: return "bait-ad";
    case DetectorCategory::SideChannel: return "side-channel";
  }
  return "?";
}

DetectorCategory parse_detector_category(std::string_view s) {
  for (auto c : {DetectorCategory::AbsentKnownResource, DetectorCategory::BaitAd, DetectorCategory::SideChannel}) {
    if (s == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown detector category '" + std::string(s) + "'");
}

bool Signature::applies_to(std::string_view host) const {
  if (site == "*") return true;
  const std::string h = to_lower(host);
  const std::string s = to_lower(site);
  if (s.find_first_of("*?[") != std::string::npos) return fnmatch(s.c_str(), h.c_str(), 0) == 0;
  return host_matches_domain(h, s);
}

// ---- signature files ----

namespace {

ActionKind parse_action_kind(const std::string& id, std::string_view s) {
  for (auto k : {ActionKind::ForceReturn, ActionKind::RemoveBait, ActionKind::ReplaceSpan, ActionKind::NopFunction}) {
    if (s == to_string(k)) return k;
  }
  throw SignatureError(id, "signature '" + id + "': unknown action kind '" + std::string(s) + "'");
}

}  // namespace

void compile_signature(Signature& sig) {
  auto fail = [&](const std::string& why) { throw SignatureError(sig.id, "signature '" + sig.id + "': " + why); };
  if (sig.id.empty()) throw SignatureError("", "signature without an id");
  if (sig.site.empty()) fail("empty site scope");
  if (sig.pattern.empty()) fail("empty pattern");
  switch (sig.action.kind) {
    case ActionKind::ForceReturn:
    case ActionKind::ReplaceSpan:
      if (sig.action.replacement.empty()) fail(std::string(to_string(sig.action.kind)) + " needs replacement text");
      break;
    case ActionKind::RemoveBait:
      if (sig.action.selector.empty()) fail("remove-bait needs a selector");
      try {
        parse_selector(sig.action.selector);
      } catch (const SelectorError& e) {
        fail(std::string("bad bait selector: ") + e.what());
      }
      break;
    case ActionKind::NopFunction:
      break;
  }
  try {
    sig.compiled = std::make_shared<CompiledPattern>(CompiledPattern{boost::regex(sig.pattern, boost::regex::ECMAScript)});
  } catch (const boost::regex_error& e) {
    fail(std::string("bad regex: ") + e.what());
  }
}

std::vector<Signature> parse_signatures(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw SignatureError("", std::string("malformed signature file: ") + e.what());
  }
  if (!j.is_array()) throw SignatureError("", "signature file must be a JSON list");
  std::vector<Signature> out;
  std::set<std::string> seen;
  for (const auto& e : j) {
    Signature s;
    try {
      s.id = e.at("id").get<std::string>();
      s.site = e.value("site", std::string("*"));
      s.pattern = e.at("pattern").get<std::string>();
      const auto& a = e.at("action");
      s.action.kind = parse_action_kind(s.id, a.at("kind").get<std::string>());
      s.action.replacement = a.value("replacement", std::string());
      s.action.selector = a.value("selector", std::string());
      s.notes = e.value("notes", std::string());
    } catch (const Json::exception& ex) {
      throw SignatureError(s.id, "signature '" + s.id + "': " + ex.what());
    }
    if (!seen.insert(s.id).second) throw SignatureError(s.id, "duplicate signature id '" + s.id + "'");
    compile_signature(s);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Signature> load_signatures(const std::string& path) { return parse_signatures(read_file(path)); }

std::string signatures_to_json(const std::vector<Signature>& sigs, bool pretty) {
  Json j = Json::array();
  for (const auto& s : sigs) {
    Json a{{"kind", to_string(s.action.kind)}};
    if (!s.action.replacement.empty()) a["replacement"] = s.action.replacement;
    if (!s.action.selector.empty()) a["selector"] = s.action.selector;
    j.push_back({{"id", s.id}, {"site", s.site}, {"pattern", s.pattern}, {"action", a}, {"notes", s.notes}});
  }
  return j.dump(pretty ? 2 : -1);
}

// ---- lexing ----

namespace {

// Calls fn(index) for every character outside strings and comments.
template <typename Fn>
void for_each_code_char(std::string_view s, std::size_t from, Fn&& fn) {
  std::size_t i = from;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '"' || c == '\'' || c == '`') {
      ++i;
      while (i < s.size() && s[i] != c) i += s[i] == '\\' ? 2 : 1;
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      const auto e = s.find("*/", i + 2);
      i = e == std::string_view::npos ? s.size() : e + 2;
      continue;
    }
    if (!fn(i)) return;
    ++i;
  }
}

}  // namespace

bool delimiters_balanced(std::string_view source) {
  std::string stack;
  bool ok = true;
  for_each_code_char(source, 0, [&](std::size_t i) {
    const char c = source[i];
    if (c == '(' || c == '{' || c == '[') {
      stack += c;
    } else if (c == ')' || c == '}' || c == ']') {
      const char want = c == ')' ? '(' : c == '}' ? '{' : '[';
      if (stack.empty() || stack.back() != want) {
        ok = false;
        return false;
      }
      stack.pop_back();
    }
    return true;
  });
  return ok && stack.empty();
}

std::size_t find_body_end(std::string_view source, std::size_t from, std::size_t* open) {
  std::size_t result = std::string_view::npos;
  int depth = 0;
  for_each_code_char(source, from, [&](std::size_t i) {
    const char c = source[i];
    if (c == '{') {
      if (depth == 0 && open) *open = i;
      ++depth;
    } else if (c == '}' && depth > 0) {
      if (--depth == 0) {
        result = i;
        return false;
      }
    }
    return true;
  });
  return result;
}

// ---- patching ----

namespace {

template <typename It>
bool search_from(It begin, It from, It end, const boost::regex& re, boost::match_results<It>& m) {
  return boost::regex_search(from, end, m, re, from == begin ? boost::match_default : boost::match_prev_avail);
}

struct Candidate {
  std::size_t begin, end;
  std::size_t sig;
  ActionKind kind;
  std::string replacement;
};

std::string splice(std::string_view src, const std::vector<Candidate>& edits) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& e : edits) {
    out.append(src.substr(pos, e.begin - pos));
    out += e.replacement;
    pos = e.end;
  }
  out.append(src.substr(pos));
  return out;
}

}  // namespace

RewriteResult scan_and_patch(std::string_view script, std::string_view host, const std::vector<Signature>& sigs,
                             std::string script_id) {
  RewriteResult r;
  r.script_id = std::move(script_id);
  std::vector<Candidate> cands;
  for (std::size_t si = 0; si < sigs.size(); ++si) {
    const Signature& sig = sigs[si];
    if (!sig.applies_to(host)) continue;
    if (!sig.compiled) throw SignatureError(sig.id, "signature '" + sig.id + "' is not compiled");
    auto it = script.begin();
    boost::match_results<std::string_view::const_iterator> m;
    while (search_from(script.begin(), it, script.end(), sig.compiled->re, m)) {
      const std::size_t b = m[0].first - script.begin();
      const std::size_t e = m[0].second - script.begin();
      if (b == e && m[0].second == script.end()) break;
      it = b == e ? m[0].second + 1 : m[0].second;
      switch (sig.action.kind) {
        case ActionKind::RemoveBait: {
          BaitDirective d{sig.id, sig.action.selector};
          if (std::find(r.directives.begin(), r.directives.end(), d) == r.directives.end()) r.directives.push_back(d);
          break;
        }
        case ActionKind::ReplaceSpan:
          cands.push_back({b, e, si, sig.action.kind, sig.action.replacement});
          break;
        case ActionKind::ForceReturn:
        case ActionKind::NopFunction: {
          std::size_t open = 0;
          const std::size_t close = find_body_end(script, b, &open);
          if (close == std::string_view::npos) {
            r.rolled_back.push_back({sig.id, b, e, sig.action.kind, ""});
            break;
          }
          std::string body = sig.action.kind == ActionKind::ForceReturn ? "return " + sig.action.replacement + ";" : "";
          cands.push_back({b, close + 1, si, sig.action.kind, std::string(script.substr(b, open + 1 - b)) + body + "}"});
          break;
        }
      }
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.sig < b.sig;
  });

  const bool input_ok = delimiters_balanced(script);
  std::vector<Candidate> accepted;
  std::size_t last_end = 0;
  for (auto& c : cands) {
    if (c.begin < last_end) continue;
    if (script.substr(c.begin, c.end - c.begin) == c.replacement) continue;
    accepted.push_back(c);
    if (input_ok && !delimiters_balanced(splice(script, accepted))) {
      accepted.pop_back();
      r.rolled_back.push_back({sigs[c.sig].id, c.begin, c.end, c.kind, c.replacement});
      continue;
    }
    last_end = c.end;
  }
  for (const auto& c : accepted) r.actions.push_back({sigs[c.sig].id, c.begin, c.end, c.kind, c.replacement});
  r.source = splice(script, accepted);
  r.check = !input_ok ? DelimiterCheck::InputUnbalanced
            : r.rolled_back.empty() ? DelimiterCheck::Balanced
                                    : DelimiterCheck::RolledBack;
  return r;
}

// ---- classification ----

namespace {

const boost::regex& resource_re() {
  static const boost::regex re(
      R"(doubleclick\.net|googletag\b|googlesyndication\.com|pagead2\.|adservice\.google|amazon-adsystem\.com|/ads\.js\b|advertisement\.js\b|\bcanRunAds\b)",
      boost::regex::ECMAScript | boost::regex::icase);
  return re;
}

const boost::regex& bait_re() {
  static const boost::regex re(
      R"(\b(adsbox|ad-banner|adBanner|banner_ad|pub_300x250|pub_728x90|text-ad|textAd|text_ads?|ad-placement|ad-slot-bait|adsbygoogle)\b)",
      boost::regex::ECMAScript);
  return re;
}

const boost::regex& check_re() {
  static const boost::regex re(
      R"(offset(Height|Width|Parent)|client(Height|Width)|getComputedStyle|getBoundingClientRect|getElementById\s*\(|\.display\s*[=!]==?|visibility)",
      boost::regex::ECMAScript);
  return re;
}

const boost::regex& timing_re() {
  static const boost::regex re(R"(performance\.now\s*\(\)|Date\.now\s*\(\)|new\s+Date\s*\(\)\.getTime\s*\(\))",
                               boost::regex::ECMAScript);
  return re;
}

}  // namespace

std::vector<DetectorClass> classify_detector(std::string_view script) {
  using It = std::string_view::const_iterator;
  std::vector<DetectorClass> out;
  const It b = script.begin(), e = script.end();
  boost::match_results<It> m;
  auto pos = [&](It it) { return static_cast<std::size_t>(it - b); };

  if (search_from(b, b, e, resource_re(), m)) {
    out.push_back({DetectorCategory::AbsentKnownResource, pos(m[0].first), pos(m[0].second)});
  }

  // A decoy with an ad-like name, then a presence, size or visibility check
  // after it. Decoys may come from the markup rather than createElement.
  if (search_from(b, b, e, bait_re(), m)) {
    const It bait = m[0].first;
    boost::match_results<It> check;
    if (search_from(b, m[0].second, e, check_re(), check)) {
      out.push_back({DetectorCategory::BaitAd, pos(bait), pos(check[0].second)});
    }
  }

  // Two clock reads bracket a measured load.
  if (search_from(b, b, e, timing_re(), m)) {
    const It first = m[0].first;
    boost::match_results<It> second;
    if (search_from(b, m[0].second, e, timing_re(), second)) {
      out.push_back({DetectorCategory::SideChannel, pos(first), pos(second[0].second)});
    }
  }
  return out;
}

std::string rewrite_to_json(const RewriteResult& r, bool pretty) {
  auto action = [](const AppliedAction& a) {
    return Json{{"signature", a.signature}, {"begin", a.begin}, {"end", a.end}, {"kind", to_string(a.kind)},
                {"replacement", a.replacement}};
  };
  Json j;
  j["script"] = r.script_id;
  j["actions"] = Json::array();
  for (const auto& a : r.actions) j["actions"].push_back(action(a));
  j["directives"] = Json::array();
  for (const auto& d : r.directives) j["directives"].push_back({{"signature", d.signature}, {"selector", d.selector}});
  j["rolled_back"] = Json::array();
  for (const auto& a : r.rolled_back) j["rolled_back"].push_back(action(a));
  j["check"] = to_string(r.check);
  return j.dump(pretty ? 2 : -1);
}

}  // namespace adwar
