#include "adwar/arms_race.hpp"

#include <algorithm>

#include "adwar/util.hpp"
#include "json.hpp"

namespace adwar {

using Json = nlohmann::ordered_json;

const char* to_string(ArmsState s) {
  switch (s) {
    case ArmsState::AdsShown: return "S1";
    case ArmsState::AdsBlocked: return "S2";
    case ArmsState::BlockingDetected: return "S3";
    case ArmsState::DetectorDisabled: return "S4";
  }
  return "?";
}

const char* describe(ArmsState s) {
  switch (s) {
    case ArmsState::AdsShown: return "ads-shown";
    case ArmsState::AdsBlocked: return "ads-blocked";
    case ArmsState::BlockingDetected: return "blocking-detected";
    case ArmsState::DetectorDisabled: return "detector-disabled";
  }
  return "?";
}

const char* to_string(Actor a) { return a == Actor::User ? "user" : "publisher"; }

const char* to_string(Technique t) {
  switch (t) {
    case Technique::InstallOrImproveBlocker: return "install-or-improve-blocker";
    case Technique::ObfuscateAds: return "obfuscate-ads";
    case Technique::DeployDetection: return "deploy-detection";
    case Technique::Stealth: return "stealth";
    case Technique::ActiveBlock: return "active-block";
    case Technique::ObfuscateDetector: return "obfuscate-detector";
    case Technique::PopupNudgeBlock: return "popup-nudge-block";
  }
  return "?";
}

ArmsState parse_state(std::string_view s) {
  const std::string v = to_lower(trim(s));
  for (ArmsState st : kAllStates) {
    const std::string num = std::to_string(static_cast<int>(st));
    if (v == to_lower(to_string(st)) || v == num || v == describe(st)) return st;
  }
  throw std::invalid_argument("unknown state '" + std::string(s) + "'");
}

Technique parse_technique(std::string_view s) {
  for (Technique t : kAllTechniques) {
    if (trim(s) == to_string(t)) return t;
  }
  throw std::invalid_argument("unknown technique '" + std::string(s) + "'");
}

Actor actor_of(Technique t) {
  switch (t) {
    case Technique::ObfuscateAds:
    case Technique::DeployDetection:
    case Technique::ObfuscateDetector:
      return Actor::Publisher;
    default:
      return Actor::User;
  }
}

std::vector<StateEdge> state_edges() {
  using S = ArmsState;
  using T = Technique;
  return {{S::AdsShown, S::AdsBlocked, T::InstallOrImproveBlocker},
          {S::AdsBlocked, S::AdsShown, T::ObfuscateAds},
          {S::AdsBlocked, S::BlockingDetected, T::DeployDetection},
          {S::BlockingDetected, S::AdsBlocked, T::Stealth},
          {S::BlockingDetected, S::DetectorDisabled, T::ActiveBlock},
          {S::DetectorDisabled, S::BlockingDetected, T::ObfuscateDetector}};
}

std::optional<ArmsState> try_transition(ArmsState s, Technique t) {
  // Blocking the nag leaves detection intact.
  if (t == Technique::PopupNudgeBlock) return s;
  for (const auto& e : state_edges()) {
    if (e.from == s && e.technique == t) return e.to;
  }
  return std::nullopt;
}

ArmsState apply_transition(ArmsState s, Technique t) {
  if (const auto next = try_transition(s, t)) return *next;
  throw IllegalTransition(std::string("no '") + to_string(t) + "' move from " + to_string(s) + " (" + describe(s) +
                          ")");
}

ArmsState apply_transition(ArmsState s, const TransitionEvent& e) {
  if (actor_of(e.technique) != e.actor) {
    throw IllegalTransition(std::string("'") + to_string(e.technique) + "' is a " + to_string(actor_of(e.technique)) +
                            " move, not a " + to_string(e.actor) + " move");
  }
  return apply_transition(s, e.technique);
}

std::vector<ArmsState> simulate(ArmsState start, const std::vector<Technique>& events) {
  std::vector<ArmsState> trace{start};
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto next = try_transition(trace.back(), events[i]);
    if (!next) {
      throw IllegalTransition("event " + std::to_string(i) + ": no '" + to_string(events[i]) + "' move from " +
                              to_string(trace.back()));
    }
    trace.push_back(*next);
  }
  return trace;
}

// ---- tools ----

const char* to_string(Mark m) {
  switch (m) {
    case Mark::Yes: return "yes";
    case Mark::Partial: return "partial";
    case Mark::No: return "no";
    case Mark::NotApplicable: return "n/a";
    case Mark::Maybe: return "maybe";
  }
  return "?";
}

Mark parse_mark(std::string_view s) {
  for (Mark m : {Mark::Yes, Mark::Partial, Mark::No, Mark::NotApplicable, Mark::Maybe}) {
    if (to_lower(trim(s)) == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown mark '" + std::string(s) + "'");
}

const char* to_string(ToolStyle s) {
  switch (s) {
    case ToolStyle::Existing: return "existing";
    case ToolStyle::Proposed: return "proposed";
    case ToolStyle::Hypothetical: return "hypothetical";
  }
  return "?";
}

std::string normalize_effort(std::string_view expr) {
  std::string out;
  for (auto term : split(expr, '+')) {
    term = trim(term);
    if (term.size() != 1 || std::string_view("FTDSB1").find(term[0]) == std::string_view::npos) {
      throw std::invalid_argument("bad effort term '" + std::string(term) + "' in '" + std::string(expr) + "'");
    }
    out += (out.empty() ? "" : "+") + std::string(term);
  }
  return out;
}

ToolTransition parse_tool_transition(std::string_view s) {
  const auto arrow = s.find("->");
  if (arrow == std::string_view::npos) throw std::invalid_argument("transition needs '->': " + std::string(s));
  return {parse_state(s.substr(0, arrow)), parse_state(s.substr(arrow + 2))};
}

std::string to_string(const ToolTransition& t) {
  return std::to_string(static_cast<int>(t.from)) + "->" + std::to_string(static_cast<int>(t.to));
}

std::vector<ToolProfile> parse_tool_table(std::string_view json) {
  std::vector<ToolProfile> out;
  try {
    const Json j = Json::parse(json);
    for (const auto& r : j.at("rows")) {
      ToolProfile p;
      p.name = r.at("tool").get<std::string>();
      const std::string style = r.value("style", std::string("existing"));
      bool known = false;
      for (auto s : {ToolStyle::Existing, ToolStyle::Proposed, ToolStyle::Hypothetical}) {
        if (style == to_string(s)) {
          p.style = s;
          known = true;
        }
      }
      if (!known) throw std::invalid_argument("unknown style '" + style + "'");
      p.transition = parse_tool_transition(r.at("transition").get<std::string>());
      for (std::size_t i = 0; i < kToolProperties.size(); ++i) {
        p.properties[i] = parse_mark(r.at(kToolProperties[i]).get<std::string>());
      }
      p.effort = normalize_effort(r.at("effort").get<std::string>());
      out.push_back(std::move(p));
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed tool table: ") + e.what());
  }
  return out;
}

std::string tool_table_to_json(const std::vector<ToolProfile>& rows, bool pretty) {
  Json j;
  j["columns"] = Json::array({"tool", "transition"});
  for (const char* p : kToolProperties) j["columns"].push_back(p);
  j["columns"].push_back("effort");
  j["rows"] = Json::array();
  for (const auto& p : rows) {
    Json r{{"tool", p.name}, {"style", to_string(p.style)}, {"transition", to_string(p.transition)}};
    for (std::size_t i = 0; i < kToolProperties.size(); ++i) r[kToolProperties[i]] = to_string(p.properties[i]);
    r["effort"] = p.effort;
    j["rows"].push_back(std::move(r));
  }
  return j.dump(pretty ? 2 : -1);
}

const std::vector<ToolProfile>& bundled_tool_table() {
  static const std::vector<ToolProfile> rows = parse_tool_table(read_file(asset_path("tools.json")));
  return rows;
}

int mini_race_of(ToolTransition t) {
  for (const auto& e : state_edges()) {
    if (e.from == t.from && e.to == t.to) {
      return std::min(static_cast<int>(e.from), static_cast<int>(e.to));
    }
  }
  throw IllegalTransition("no edge " + std::string(to_string(t.from)) + "->" + to_string(t.to));
}

ToolReport classify_tool(const ToolProfile& profile, const std::vector<ToolProfile>& table) {
  ToolReport r;
  r.name = profile.name;
  r.mini_race = mini_race_of(profile.transition);
  for (const auto& row : table) {
    if (to_lower(row.name) != to_lower(profile.name)) continue;
    r.in_dataset = true;
    auto conflict = [&](const std::string& what, const std::string& mine, const std::string& theirs) {
      if (mine != theirs) r.conflicts.push_back(what + ": profile " + mine + ", table " + theirs);
    };
    conflict("transition", to_string(profile.transition), to_string(row.transition));
    for (std::size_t i = 0; i < kToolProperties.size(); ++i) {
      conflict(kToolProperties[i], to_string(profile.properties[i]), to_string(row.properties[i]));
    }
    conflict("effort", profile.effort, row.effort);
    break;
  }
  return r;
}

}  // namespace adwar
