#pragma once

// Rootkit-style stealth as a plan: whitespace overlays in their own subtree
// under a new document root, publisher CSS rescoped to the original tree, and
// the list of host-API members that must be intercepted so page scripts see
// the untouched page. verify_stealth replays that interception over the
// snapshot; analyze_detectability scores the plan against inspection probes.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "adwar/selector.hpp"
#include "adwar/snapshot.hpp"

namespace adwar {

// ---- overlays ----

struct OverlayEntry {
  NodeId overlay = 0;
  NodeId ad = 0;
  LayoutBox box;
};

struct CssRule {
  std::string selectors;     // raw selector list
  std::string declarations;  // text between the braces, untouched
};

struct OverlayPlan {
  std::string fake_root_id;  // 16 hex chars, starts with a letter
  NodeId true_root = 0;      // new document root
  NodeId fake_html = 0;      // the publisher's original root
  std::optional<NodeId> fake_body;
  NodeId overlay_root = 0;
  std::optional<std::string> original_html_id;  // spoofed back by the manifest
  std::vector<OverlayEntry> overlays;
  std::vector<CssRule> stylesheet;     // rewritten publisher rules
  std::vector<CssRule> overlay_rules;  // positioning for the overlays
  std::string dynamic_policy = "replan-on-mutation";
  Rgba overlay_color{255, 255, 255, 255};

  std::string fake_root_ref() const { return "#" + fake_root_id; }
  std::string fake_body_class() const { return fake_root_id + "-body"; }
  std::string fake_body_ref() const { return "." + fake_body_class(); }
};

struct PlanResult {
  OverlayPlan plan;
  PageSnapshot transformed;
};

class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Top-frame ads only. Throws PlanError when an id is missing, not in the top
/// frame, or invisible. The fake-root token is drawn from `seed`.
PlanResult plan_overlays(const PageSnapshot& snap, const std::vector<NodeId>& ads, std::uint64_t seed,
                         Rgba overlay_color = {255, 255, 255, 255});

std::vector<CssRule> parse_stylesheet(std::string_view css);
std::string format_stylesheet(const std::vector<CssRule>& rules);

struct CssRewrite {
  std::vector<CssRule> rules;
  std::vector<std::string> warnings;  // rules passed through verbatim
};

/// Rescopes every selector to the publisher subtree: a leading `html`
/// compound becomes the fake-root reference, a leading `body` compound the
/// fake-body reference, anything else gets the fake-root reference and a
/// descendant combinator in front. Unparseable selectors pass through.
CssRewrite rewrite_css(const std::vector<CssRule>& rules, const OverlayPlan& plan);

// ---- interception manifest ----

enum class ApiHost { Document, FakeHtml, Head, FakeBody, Prototype };
enum class MemberKind { Property, Function };
enum class Behavior { RedirectToOriginalRoot, FilterOverlaySubtree, ValueSpoof };
enum class Tier { ScriptLevel, SourceModification };
enum class ToStringPatch { None, PerFunction, Prototype };

const char* to_string(ApiHost h);
const char* to_string(MemberKind k);
const char* to_string(Behavior b);
const char* to_string(Tier t);
const char* to_string(ToStringPatch p);

struct ManifestEntry {
  ApiHost host = ApiHost::Document;
  std::string member;
  MemberKind kind = MemberKind::Property;
  Behavior behavior = Behavior::ValueSpoof;
  Tier tier = Tier::ScriptLevel;
  bool experimental = false;

  /// Script-level property interception shows up in property descriptors.
  bool descriptor_visible() const { return kind == MemberKind::Property && tier == Tier::ScriptLevel; }
  std::string name() const;  // "document.body"
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct InterceptionManifest {
  std::string profile;
  std::string fake_root_id;
  Tier tier = Tier::ScriptLevel;
  ToStringPatch tostring = ToStringPatch::Prototype;
  std::vector<std::string> protected_members;  // assumed un-overridable
  std::vector<ManifestEntry> entries;

  const ManifestEntry* find(ApiHost host, std::string_view member) const;
  /// Removes one entry by "host.member" name; false when absent.
  bool remove(std::string_view name);
};

class UnknownProfile : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ships with "gecko" (40 entries).
InterceptionManifest build_interception_manifest(std::string_view profile, const OverlayPlan& plan,
                                                 Tier tier = Tier::ScriptLevel,
                                                 ToStringPatch tostring = ToStringPatch::Prototype);

// ---- verification ----

struct StealthVerdict {
  bool pass = true;
  std::string witness;  // access path of the first leak found
};

/// Simulates what page scripts can reach through the manifest: (a) nothing
/// in the overlay subtree or the new root, (b) the visible tree equals the
/// original, (c) each selector matches the same nodes as on `original`.
StealthVerdict verify_stealth(const PageSnapshot& original, const PageSnapshot& transformed,
                              const InterceptionManifest& manifest, const OverlayPlan& plan,
                              const std::vector<SelectorExpr>& selectors = {});

// ---- detectability ----

enum class ProbeKind { ToString, ToLocaleString, ToSource, ToStringTransplant, DescriptorInspection, ProtectedObjectToString };
enum class Outcome { Hidden, ModifiedUnattributable, Revealed };

const char* to_string(ProbeKind k);
const char* to_string(Outcome o);
ProbeKind parse_probe_kind(std::string_view s);  // throws std::invalid_argument

struct StealthProbe {
  ProbeKind kind = ProbeKind::ToString;
  std::string target;  // manifest entry name, e.g. "document.body"
};

struct DetectabilityVerdict {
  std::vector<Outcome> outcomes;  // one per probe
  Outcome overall = Outcome::Hidden;
};

DetectabilityVerdict analyze_detectability(const InterceptionManifest& manifest, const std::vector<StealthProbe>& probes);

/// Every probe kind against every manifest entry.
std::vector<StealthProbe> full_probe_set(const InterceptionManifest& manifest);

std::string plan_to_json(const OverlayPlan& plan, bool pretty = false);
std::string manifest_to_json(const InterceptionManifest& m, bool pretty = false);
InterceptionManifest manifest_from_json(std::string_view text);

}  // namespace adwar
