#pragma once

// Signature-based neutralization of ad-blocking detector scripts: regex
// signatures over script source, a span-wise patcher with a delimiter sanity
// check, and a heuristic classifier for the three detection techniques.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adwar {

enum class ActionKind { ForceReturn, RemoveBait, ReplaceSpan, NopFunction };
const char* to_string(ActionKind k);

struct PatchAction {
  ActionKind kind = ActionKind::ForceReturn;
  std::string replacement;  // force-return literal or replace-span text
  std::string selector;     // remove-bait target
  friend bool operator==(const PatchAction&, const PatchAction&) = default;
};

struct CompiledPattern;

struct Signature {
  std::string id;
  std::string site;  // host suffix ("example.com"), glob ("*.news.test"), or "*"
  std::string pattern;
  PatchAction action;
  std::string notes;
  std::shared_ptr<const CompiledPattern> compiled;

  bool applies_to(std::string_view host) const;
};

class SignatureError : public std::invalid_argument {
 public:
  SignatureError(std::string id, const std::string& what) : std::invalid_argument(what), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// JSON list of {id, site, pattern, action:{kind, replacement|selector}, notes}.
std::vector<Signature> parse_signatures(std::string_view text);
std::vector<Signature> load_signatures(const std::string& path);
std::string signatures_to_json(const std::vector<Signature>& sigs, bool pretty = false);
/// Compiles one signature in place; throws SignatureError.
void compile_signature(Signature& sig);

struct AppliedAction {
  std::string signature;
  std::size_t begin = 0;  // span in the input source
  std::size_t end = 0;
  ActionKind kind = ActionKind::ForceReturn;
  std::string replacement;
  friend bool operator==(const AppliedAction&, const AppliedAction&) = default;
};

struct BaitDirective {
  std::string signature;
  std::string selector;  // element to remove before the detector checks it
  friend bool operator==(const BaitDirective&, const BaitDirective&) = default;
};

enum class DelimiterCheck { Balanced, RolledBack, InputUnbalanced };
const char* to_string(DelimiterCheck c);

struct RewriteResult {
  std::string script_id;
  std::vector<AppliedAction> actions;  // ascending, non-overlapping
  std::vector<BaitDirective> directives;
  std::vector<AppliedAction> rolled_back;
  std::string source;
  DelimiterCheck check = DelimiterCheck::Balanced;

  bool changed() const { return !actions.empty(); }
};

/// Leftmost non-overlapping matches of every signature in scope for `host`,
/// earlier signatures winning ties. An edit that would leave the source with
/// unbalanced (), {} or [] is dropped and listed in `rolled_back`. Edits that
/// would not change the text are not recorded, so a second pass over the
/// output applies nothing.
RewriteResult scan_and_patch(std::string_view script, std::string_view host, const std::vector<Signature>& sigs,
                             std::string script_id = "");

/// Strings, template literals and comments are skipped.
bool delimiters_balanced(std::string_view source);

/// Index of the `}` closing the first `{` at or after `from`, skipping strings
/// and comments; npos when there is none.
std::size_t find_body_end(std::string_view source, std::size_t from, std::size_t* open = nullptr);

enum class DetectorCategory { AbsentKnownResource, BaitAd, SideChannel };
const char* to_string(DetectorCategory c);
DetectorCategory parse_detector_category(std::string_view s);

struct DetectorClass {
  DetectorCategory category = DetectorCategory::AbsentKnownResource;
  std::size_t begin = 0;  // evidence span
  std::size_t end = 0;
};

/// At most one entry per category, in category order.
std::vector<DetectorClass> classify_detector(std::string_view script);

std::string rewrite_to_json(const RewriteResult& r, bool pretty = false);

}  // namespace adwar
