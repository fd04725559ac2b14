#pragma once

// The four-state ad blocking arms race and the tool systematization table.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adwar {

enum class ArmsState { AdsShown = 1, AdsBlocked = 2, BlockingDetected = 3, DetectorDisabled = 4 };
enum class Actor { User, Publisher };
enum class Technique {
  InstallOrImproveBlocker,
  ObfuscateAds,
  DeployDetection,
  Stealth,
  ActiveBlock,
  ObfuscateDetector,
  PopupNudgeBlock,
};

inline constexpr std::array<ArmsState, 4> kAllStates{ArmsState::AdsShown, ArmsState::AdsBlocked,
                                                     ArmsState::BlockingDetected, ArmsState::DetectorDisabled};
inline constexpr std::array<Technique, 7> kAllTechniques{
    Technique::InstallOrImproveBlocker, Technique::ObfuscateAds, Technique::DeployDetection, Technique::Stealth,
    Technique::ActiveBlock,             Technique::ObfuscateDetector, Technique::PopupNudgeBlock};

const char* to_string(ArmsState s);  // "S1".."S4"
const char* describe(ArmsState s);   // "ads-shown", ...
const char* to_string(Actor a);
const char* to_string(Technique t);
ArmsState parse_state(std::string_view s);  // "S2", "2" or "ads-blocked"
Technique parse_technique(std::string_view s);
Actor actor_of(Technique t);

class IllegalTransition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TransitionEvent {
  Actor actor = Actor::User;
  Technique technique = Technique::InstallOrImproveBlocker;
};

/// Throws IllegalTransition naming the state and technique.
ArmsState apply_transition(ArmsState s, Technique t);
/// Also rejects an event whose actor does not own the technique.
ArmsState apply_transition(ArmsState s, const TransitionEvent& e);
std::optional<ArmsState> try_transition(ArmsState s, Technique t);

struct StateEdge {
  ArmsState from;
  ArmsState to;
  Technique technique;
};

/// The six state-changing edges.
std::vector<StateEdge> state_edges();

/// Replays events from `start`; the trace includes the start state. Throws
/// IllegalTransition at the first illegal step, naming its index.
std::vector<ArmsState> simulate(ArmsState start, const std::vector<Technique>& events);

// ---- tools ----

enum class Mark { Yes, Partial, No, NotApplicable, Maybe };
const char* to_string(Mark m);
Mark parse_mark(std::string_view s);

inline constexpr std::array<const char*, 6> kToolProperties{
    "blocks-tracking",           "blocks-new-by-default", "resilient-to-obfuscation",
    "undetectable-client-side", "undetectable-by-server", "implementable-as-extension"};

struct ToolTransition {
  ArmsState from = ArmsState::AdsShown;
  ArmsState to = ArmsState::AdsBlocked;
  friend bool operator==(const ToolTransition&, const ToolTransition&) = default;
};

enum class ToolStyle { Existing, Proposed, Hypothetical };
const char* to_string(ToolStyle s);

struct ToolProfile {
  std::string name;
  ToolStyle style = ToolStyle::Existing;
  ToolTransition transition;
  std::array<Mark, 6> properties{};  // in kToolProperties order
  std::string effort;                // "F+T", "D", "B", "S", "1"
  friend bool operator==(const ToolProfile&, const ToolProfile&) = default;
};

/// Terms over {F, T, D, S, B, 1} joined by '+'; returns the canonical form
/// (whitespace removed) or throws std::invalid_argument.
std::string normalize_effort(std::string_view expr);

/// Parses "1->2" or "S1->S2".
ToolTransition parse_tool_transition(std::string_view s);
std::string to_string(const ToolTransition& t);

std::vector<ToolProfile> parse_tool_table(std::string_view json);
std::string tool_table_to_json(const std::vector<ToolProfile>& rows, bool pretty = false);
/// The bundled seven-row table.
const std::vector<ToolProfile>& bundled_tool_table();

struct ToolReport {
  std::string name;
  int mini_race = 0;  // 1: S1<->S2, 2: S2<->S3, 3: S3<->S4
  bool in_dataset = false;
  std::vector<std::string> conflicts;  // "blocks-tracking: profile yes, table no"
};

/// Throws IllegalTransition when the transition is not an edge of the graph.
ToolReport classify_tool(const ToolProfile& profile, const std::vector<ToolProfile>& table = bundled_tool_table());

/// Mini arms race (1..3) containing the edge; throws IllegalTransition.
int mini_race_of(ToolTransition t);

}  // namespace adwar
