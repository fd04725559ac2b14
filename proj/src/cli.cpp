#include "adwar/cli.hpp"

#include <pthread.h>

#include <algorithm>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <memory>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "adwar/active.hpp"
#include "adwar/arms_race.hpp"
#include "adwar/corpus.hpp"
#include "adwar/detectors.hpp"
#include "adwar/filter.hpp"
#include "adwar/proxy.hpp"
#include "adwar/stealth.hpp"
#include "adwar/util.hpp"
#include "json.hpp"

namespace adwar {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
};

Json timing(const Clock& c, const Json& stages = Json::object()) {
  Json t{{"total", c.ms()}};
  for (const auto& [k, v] : stages.items()) t[k] = v;
  return t;
}

void emit(std::ostream& out, const Json& j, bool pretty) { out << j.dump(pretty ? 2 : -1) << "\n"; }

std::string or_asset(const std::string& path, std::string_view asset) {
  return path.empty() ? asset_path(asset) : path;
}

// ---- shared detector options ----

struct DetectOpts {
  std::string config;
  std::string policy = "any";
  std::string resolve_links = "off";
  int fetch_timeout = 5;
};

void add_detect_opts(CLI::App* cmd, DetectOpts& o) {
  cmd->add_option("--config", o.config, "Detector config JSON (default: bundled)")->check(CLI::ExistingFile);
  cmd->add_option("--policy", o.policy, "Marker combination")->check(CLI::IsMember({"any", "all"}));
  cmd->add_option("--resolve-links", o.resolve_links, "Follow disclosure links over HTTP")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--fetch-timeout", o.fetch_timeout, "Seconds per link fetch")->check(CLI::PositiveNumber);
}

DetectorConfig make_config(const DetectOpts& o) {
  DetectorConfig cfg = o.config.empty() ? default_detector_config() : load_detector_config(o.config);
  cfg.policy = parse_marker_policy(o.policy);
  cfg.resolve_links = o.resolve_links == "on";
  cfg.validate();
  return cfg;
}

std::unique_ptr<Fetcher> make_fetcher(const DetectOpts& o) {
  if (o.resolve_links != "on") return nullptr;
  return std::make_unique<HttpFetcher>(o.fetch_timeout);
}

std::vector<std::string> require_inputs(const std::vector<std::string>& paths, std::string_view ext) {
  auto files = expand_inputs(paths, ext);
  if (files.empty()) throw UsageError("no " + std::string(ext) + " inputs found");
  return files;
}

std::string report_name(const std::string& input) { return fs::path(input).stem().string() + ".report.json"; }

// ---- gen ----

struct GenOpts {
  CorpusSpec spec;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen(const GenOpts& o, bool pretty, std::ostream& out) {
  Clock clock;
  try {
    o.spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  fs::create_directories(o.out);
  const auto corpus = generate_corpus(o.spec, o.seed);
  PlantedCounts total;
  Json files = Json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "page-%04zu.json", i);
    write_file((fs::path(o.out) / name).string(), serialize_snapshot(corpus[i], pretty));
    const auto p = planted(corpus[i]);
    total.adchoices += p.adchoices;
    total.adchoices_negative += p.adchoices_negative;
    total.feed += p.feed;
    total.feed_negative += p.feed_negative;
    files.push_back(name);
  }
  emit(out,
       {{"seed", o.seed},
        {"pages", corpus.size()},
        {"out", o.out},
        {"files", files},
        {"planted",
         {{"adchoices", total.adchoices},
          {"adchoices_negative", total.adchoices_negative},
          {"feed", total.feed},
          {"feed_negative", total.feed_negative}}},
        {"timing_ms", timing(clock)}},
       pretty);
  return kExitOk;
}

// ---- detect ----

struct DetectCmd {
  DetectOpts det;
  std::vector<std::string> inputs;
  std::string out;
};

int cmd_detect(const DetectCmd& o, bool pretty, std::ostream& out, std::ostream& err) {
  Clock clock;
  const auto files = require_inputs(o.inputs, ".json");
  const DetectorConfig cfg = make_config(o.det);
  const auto fetcher = make_fetcher(o.det);
  if (!o.out.empty()) fs::create_directories(o.out);
  Json reports = Json::array();
  Json errors = Json::array();
  for (const auto& f : files) {
    try {
      const PageSnapshot snap = load_snapshot(f);
      const DetectionReport r = run_detectors(snap, cfg, fetcher.get());
      r.check_against(snap);
      if (!o.out.empty()) write_file((fs::path(o.out) / report_name(f)).string(), report_to_json(r, pretty));
      reports.push_back({{"input", f}, {"report", Json::parse(report_to_json(r))}});
    } catch (const std::exception& e) {
      err << "adwar detect: " << f << ": " << e.what() << "\n";
      errors.push_back({{"input", f}, {"error", e.what()}});
    }
  }
  emit(out, {{"reports", reports}, {"errors", errors}, {"timing_ms", timing(clock)}}, pretty);
  return errors.empty() ? kExitOk : kExitFailure;
}

// ---- eval ----

struct EvalCmd {
  DetectOpts det;
  std::vector<std::string> inputs;
  std::string reports;
  bool require_perfect = false;
};

int cmd_eval(const EvalCmd& o, bool pretty, std::ostream& out, std::ostream& err) {
  Clock clock;
  const auto files = require_inputs(o.inputs, ".json");
  std::optional<DetectorConfig> cfg;
  if (o.reports.empty()) cfg = make_config(o.det);
  const auto fetcher = make_fetcher(o.det);
  Evaluation total;
  Json errors = Json::array();
  double detect_ms = 0;
  for (const auto& f : files) {
    try {
      const PageSnapshot snap = load_snapshot(f);
      DetectionReport r;
      if (cfg) {
        Clock dc;
        r = run_detectors(snap, *cfg, fetcher.get());
        detect_ms += dc.ms();
      } else {
        r = report_from_json(read_file((fs::path(o.reports) / report_name(f)).string()));
      }
      const Evaluation e = evaluate_report(r, snap);
      total.adchoices += e.adchoices;
      total.feed += e.feed;
    } catch (const LabelMismatch& e) {
      err << "adwar eval: " << f << ": " << e.what() << "\n";
      errors.push_back({{"input", f}, {"error", e.what()}, {"uncovered", e.uncovered()}});
    } catch (const std::exception& e) {
      err << "adwar eval: " << f << ": " << e.what() << "\n";
      errors.push_back({{"input", f}, {"error", e.what()}});
    }
  }
  const ConfusionMatrix all = total.combined();
  emit(out,
       {{"snapshots", files.size()},
        {"adchoices", Json::parse(matrix_to_json(total.adchoices))},
        {"feed", Json::parse(matrix_to_json(total.feed))},
        {"combined", Json::parse(matrix_to_json(all))},
        {"errors", errors},
        {"timing_ms", timing(clock, {{"detect", detect_ms}})}},
       pretty);
  if (!errors.empty()) return kExitFailure;
  if (o.require_perfect && (all.fp != 0 || all.fn != 0)) {
    err << "adwar eval: " << all.fp << " false positives, " << all.fn << " false negatives\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---- filter ----

struct FilterCmd {
  std::string filters;
  std::vector<std::string> urls;
  std::vector<std::string> inputs;
};

int cmd_filter(const FilterCmd& o, bool pretty, std::ostream& out, std::ostream& err) {
  Clock clock;
  if (o.urls.empty() && o.inputs.empty()) throw UsageError("give --url or snapshot inputs");
  const FilterList fl = load_filter_list(or_asset(o.filters, "filters.txt"));
  bool failed = false;
  auto verdict = [&](const std::string& url) {
    Json j{{"url", url}};
    try {
      const UrlVerdict v = match_url(fl, url);
      j["blocked"] = v.blocked;
      if (v.rule_index) j["rule"] = fl.rules[*v.rule_index].raw;
    } catch (const UrlError& e) {
      j["error"] = e.what();
      failed = true;
    }
    return j;
  };

  Json urls = Json::array();
  for (const auto& u : o.urls) urls.push_back(verdict(u));

  Json snaps = Json::array();
  for (const auto& f : o.inputs.empty() ? std::vector<std::string>{} : require_inputs(o.inputs, ".json")) {
    try {
      const PageSnapshot snap = load_snapshot(f);
      const auto hidden = match_elements(fl, snap);
      Json frames = Json::array();
      for (std::size_t i = 0; i < hidden.size(); ++i) {
        if (!hidden[i].empty()) frames.push_back({{"frame", i}, {"nodes", hidden[i]}});
      }
      Json requests = Json::array();
      for (const auto& r : snap.requests) requests.push_back(verdict(r.url));
      snaps.push_back({{"input", f}, {"hidden", frames}, {"requests", requests}});
    } catch (const std::exception& e) {
      err << "adwar filter: " << f << ": " << e.what() << "\n";
      snaps.push_back({{"input", f}, {"error", e.what()}});
      failed = true;
    }
  }
  emit(out,
       {{"filters", fl.source},
        {"rules", fl.rules.size()},
        {"skipped_lines", fl.skipped.size()},
        {"urls", urls},
        {"snapshots", snaps},
        {"timing_ms", timing(clock)}},
       pretty);
  return failed ? kExitFailure : kExitOk;
}

// ---- stealth-plan ----

struct StealthCmd {
  DetectOpts det;
  std::string input;
  std::vector<NodeId> ads;
  std::uint64_t seed = 1;
  std::string css;
  std::string profile = "gecko";
  std::string tier = "script-level";
  std::string tostring = "prototype";
  std::vector<std::string> drop;
  std::vector<std::string> selectors;
  std::string filters;
  std::string emit_snapshot;
};

std::vector<NodeId> detected_top_frame_ads(const PageSnapshot& snap, const DetectorConfig& cfg, Fetcher* fetcher) {
  std::set<NodeId> ads;
  for (const auto& d : detect_feed_ads(snap, cfg, fetcher)) {
    if (d.frame == 0) ads.insert(d.node);
  }
  // An ad iframe is covered at its outermost owner element in the top frame.
  for (const auto& d : detect_adchoices(snap, cfg, fetcher)) {
    std::size_t f = d.frame;
    while (snap.frames[f].parent_frame && *snap.frames[f].parent_frame != 0) {
      f = static_cast<std::size_t>(*snap.frames[f].parent_frame);
    }
    if (snap.frames[f].owner_node) ads.insert(*snap.frames[f].owner_node);
  }
  return {ads.begin(), ads.end()};
}

template <typename E>
E parse_enum(const std::string& text, std::initializer_list<E> values, const char* what) {
  for (E v : values) {
    if (text == to_string(v)) return v;
  }
  throw UsageError(std::string("unknown ") + what + " '" + text + "'");
}

int cmd_stealth(const StealthCmd& o, bool pretty, std::ostream& out, std::ostream& err) {
  Clock clock;
  const PageSnapshot snap = load_snapshot(o.input);
  const Tier tier = parse_enum(o.tier, {Tier::ScriptLevel, Tier::SourceModification}, "tier");
  const ToStringPatch patch =
      parse_enum(o.tostring, {ToStringPatch::None, ToStringPatch::PerFunction, ToStringPatch::Prototype}, "patch");

  std::vector<SelectorExpr> selectors;
  for (const auto& s : o.selectors) {
    try {
      selectors.push_back(parse_selector(s));
    } catch (const SelectorError& e) {
      throw UsageError("bad --selector '" + s + "': " + e.what());
    }
  }
  if (!o.filters.empty()) {
    const FilterList fl = load_filter_list(o.filters);
    const auto url = parse_url(snap.frames.front().url);
    for (const auto& r : fl.rules) {
      if (r.kind == RuleKind::ElementHide && rule_in_scope(r, url ? url->host : "")) selectors.push_back(r.selector);
    }
  }

  Clock detect_clock;
  std::vector<NodeId> ads = o.ads;
  if (ads.empty()) {
    const auto fetcher = make_fetcher(o.det);
    ads = detected_top_frame_ads(snap, make_config(o.det), fetcher.get());
  }
  const double detect_ms = detect_clock.ms();

  PlanResult pr;
  try {
    pr = plan_overlays(snap, ads, o.seed);
  } catch (const PlanError& e) {
    err << "adwar stealth-plan: " << e.what() << "\n";
    return kExitFailure;
  }
  Json css_warnings = Json::array();
  if (!o.css.empty()) {
    const auto rules = parse_stylesheet(read_file(o.css));
    for (const auto& r : rules) {
      for (auto part : split(r.selectors, ',')) {
        try {
          selectors.push_back(parse_selector(trim(part)));
        } catch (const SelectorError&) {
          // rewrite_css reports these
        }
      }
    }
    CssRewrite rw = rewrite_css(rules, pr.plan);
    pr.plan.stylesheet = std::move(rw.rules);
    for (auto& w : rw.warnings) css_warnings.push_back(std::move(w));
  }

  InterceptionManifest manifest;
  try {
    manifest = build_interception_manifest(o.profile, pr.plan, tier, patch);
  } catch (const UnknownProfile& e) {
    throw UsageError(e.what());
  }
  for (const auto& name : o.drop) {
    if (!manifest.remove(name)) throw UsageError("no manifest entry '" + name + "'");
  }

  Clock verify_clock;
  const StealthVerdict v = verify_stealth(snap, pr.transformed, manifest, pr.plan, selectors);
  const double verify_ms = verify_clock.ms();
  const auto probes = full_probe_set(manifest);
  const DetectabilityVerdict dv = analyze_detectability(manifest, probes);
  Json counts = Json::object();
  for (Outcome oc : {Outcome::Hidden, Outcome::ModifiedUnattributable, Outcome::Revealed}) {
    counts[to_string(oc)] = std::count(dv.outcomes.begin(), dv.outcomes.end(), oc);
  }
  if (!o.emit_snapshot.empty()) write_file(o.emit_snapshot, serialize_snapshot(pr.transformed, pretty));

  Json verdict{{"pass", v.pass}};
  if (!v.pass) verdict["witness"] = v.witness;
  emit(out,
       {{"input", o.input},
        {"ads", ads},
        {"plan", Json::parse(plan_to_json(pr.plan))},
        {"manifest", Json::parse(manifest_to_json(manifest))},
        {"dropped", o.drop},
        {"css_warnings", css_warnings},
        {"selectors_checked", selectors.size()},
        {"verdict", verdict},
        {"detectability", {{"overall", to_string(dv.overall)}, {"probes", probes.size()}, {"outcomes", counts}}},
        {"timing_ms", timing(clock, {{"detect", detect_ms}, {"verify", verify_ms}})}},
       pretty);
  if (!v.pass) {
    err << "adwar stealth-plan: leak: " << v.witness << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---- rewrite ----

struct RewriteCmd {
  std::vector<std::string> inputs;
  std::string signatures;
  std::string host;
  std::string index;
  std::string out;
};

int cmd_rewrite(const RewriteCmd& o, bool pretty, std::ostream& out, std::ostream& err) {
  Clock clock;
  const auto files = require_inputs(o.inputs, ".js");
  const auto sigs = load_signatures(or_asset(o.signatures, "signatures.json"));
  std::map<std::string, std::string> hosts;
  if (!o.index.empty()) {
    for (const auto& e : Json::parse(read_file(o.index))) hosts[e.at("file").get<std::string>()] = e.at("host");
  }
  if (!o.out.empty()) fs::create_directories(o.out);

  Json scripts = Json::array();
  bool rolled_back = false;
  for (const auto& f : files) {
    const std::string name = fs::path(f).filename().string();
    const auto h = hosts.find(name);
    const std::string host = h == hosts.end() ? o.host : h->second;
    const std::string src = read_file(f);
    const RewriteResult r = scan_and_patch(src, host, sigs, name);
    if (!o.out.empty()) write_file((fs::path(o.out) / name).string(), r.source);
    Json cats = Json::array();
    for (const auto& c : classify_detector(src)) cats.push_back(to_string(c.category));
    if (!r.rolled_back.empty()) {
      rolled_back = true;
      err << "adwar rewrite: " << f << ": " << r.rolled_back.size() << " edit(s) rolled back\n";
    }
    scripts.push_back({{"input", f},
                       {"host", host},
                       {"changed", r.changed()},
                       {"categories", cats},
                       {"result", Json::parse(rewrite_to_json(r))}});
  }
  emit(out, {{"signatures", sigs.size()}, {"scripts", scripts}, {"timing_ms", timing(clock)}}, pretty);
  return rolled_back ? kExitFailure : kExitOk;
}

// ---- proxy ----

struct ProxyCmd {
  std::string listen = "127.0.0.1:8080";
  std::string signatures;
  std::string filters;
  std::string block_resources = "off";
  std::size_t max_script_bytes = 4 << 20;
  int upstream_timeout = 10;
  std::vector<std::string> resolve;
};

int cmd_proxy(const ProxyCmd& o, bool pretty, std::ostream& out, std::ostream& err) {
  Clock clock;
  ProxyConfig cfg;
  try {
    std::tie(cfg.listen_host, cfg.listen_port) = parse_listen(o.listen);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.signatures_path = or_asset(o.signatures, "signatures.json");
  cfg.filters_path = o.filters;
  cfg.block_resources = o.block_resources == "on";
  cfg.max_script_bytes = o.max_script_bytes;
  cfg.upstream_timeout_s = o.upstream_timeout;
  for (const auto& r : o.resolve) {
    const auto eq = r.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == r.size()) throw UsageError("--resolve wants host=address");
    cfg.resolve[to_lower(r.substr(0, eq))] = r.substr(eq + 1);
  }
  cfg.log = [&err](const std::string& line) { err << line << std::endl; };

  // Workers inherit the mask, so only this thread sees the signals.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  sigaddset(&set, SIGHUP);
  sigset_t old;
  pthread_sigmask(SIG_BLOCK, &set, &old);

  ProxyServer server(cfg);
  server.start();
  emit(out, {{"listening", cfg.listen_host + ":" + std::to_string(server.port())}}, pretty);
  out.flush();
  for (;;) {
    int sig = 0;
    sigwait(&set, &sig);
    if (sig != SIGHUP) break;
    try {
      server.reload_signatures();
      err << Json{{"event", "signatures-reloaded"}}.dump() << std::endl;
    } catch (const std::exception& e) {
      err << Json{{"event", "reload-failed"}, {"error", e.what()}}.dump() << std::endl;
    }
  }
  server.stop();
  pthread_sigmask(SIG_SETMASK, &old, nullptr);
  emit(out, {{"stopped", true}, {"timing_ms", timing(clock)}}, pretty);
  return kExitOk;
}

// ---- simulate ----

struct SimCmd {
  std::string start = "S1";
  std::vector<std::string> events;
  bool table = false;
  std::string classify;
};

int cmd_simulate(const SimCmd& o, bool pretty, std::ostream& out, std::ostream& err) {
  Clock clock;
  if (o.table) {
    emit(out, {{"tools", Json::parse(tool_table_to_json(bundled_tool_table()))}, {"timing_ms", timing(clock)}},
         pretty);
    return kExitOk;
  }
  if (!o.classify.empty()) {
    Json reports = Json::array();
    for (const auto& p : parse_tool_table(read_file(o.classify))) {
      try {
        const ToolReport r = classify_tool(p);
        reports.push_back({{"tool", r.name},
                           {"mini_race", r.mini_race},
                           {"in_dataset", r.in_dataset},
                           {"conflicts", r.conflicts}});
      } catch (const IllegalTransition& e) {
        err << "adwar simulate: " << p.name << ": " << e.what() << "\n";
        return kExitFailure;
      }
    }
    emit(out, {{"reports", reports}, {"timing_ms", timing(clock)}}, pretty);
    return kExitOk;
  }

  ArmsState s;
  std::vector<TransitionEvent> events;
  try {
    s = parse_state(o.start);
    for (const auto& text : o.events) {
      // "technique" or "actor:technique"
      const auto colon = text.find(':');
      TransitionEvent e;
      e.technique = parse_technique(colon == std::string::npos ? text : text.substr(colon + 1));
      e.actor = actor_of(e.technique);
      if (colon != std::string::npos) {
        const std::string actor = text.substr(0, colon);
        if (actor != "user" && actor != "publisher") throw std::invalid_argument("unknown actor '" + actor + "'");
        e.actor = actor == "user" ? Actor::User : Actor::Publisher;
      }
      events.push_back(e);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Json trace = Json::array({to_string(s)});
  Json evs = Json::array();
  for (std::size_t i = 0; i < events.size(); ++i) {
    try {
      s = apply_transition(s, events[i]);
    } catch (const IllegalTransition& e) {
      err << "adwar simulate: event " << i << ": " << e.what() << "\n";
      return kExitFailure;
    }
    trace.push_back(to_string(s));
    evs.push_back({{"actor", to_string(events[i].actor)}, {"technique", to_string(events[i].technique)}});
  }
  emit(out,
       {{"start", trace.front()},
        {"events", evs},
        {"trace", trace},
        {"final", {{"state", to_string(s)}, {"meaning", describe(s)}}},
        {"timing_ms", timing(clock)}},
       pretty);
  return kExitOk;
}

}  // namespace

std::vector<std::string> expand_inputs(const std::vector<std::string>& paths, std::string_view ext) {
  std::vector<std::string> out;
  auto is_report = [](const std::string& p) {
    return p.size() >= 12 && p.compare(p.size() - 12, 12, ".report.json") == 0;
  };
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      for (const auto& e : fs::directory_iterator(p)) {
        const std::string f = e.path().string();
        if (e.is_regular_file() && e.path().extension() == ext && !is_report(f)) out.push_back(f);
      }
    } else {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perceptual ad detection, stealth planning and anti-adblock neutralization", "adwar"};
  app.require_subcommand(1);
  app.fallthrough();
  bool pretty = false;
  app.add_flag("--pretty", pretty, "Indented JSON output");

  GenOpts gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a labeled synthetic snapshot corpus");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--count", gen.spec.count, "Pages")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--iframes", gen.spec.iframes_per_page, "Iframe slots per page")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--feed-items", gen.spec.feed_items_per_page, "Feed slots per page")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--sidebar-items", gen.spec.sidebar_items_per_page, "Sidebar slots per page")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--adchoices-density", gen.spec.adchoices_density, "Chance an iframe slot is an ad");
  gen_cmd->add_option("--feed-density", gen.spec.feed_density, "Chance a feed slot is an ad");
  gen_cmd->add_option("--noise", gen.spec.noise, "Pixel noise amplitude (0-255)");
  gen_cmd->add_flag("--randomize-markup", gen.spec.randomize_markup, "Rename ids/classes of planted ads");
  gen_cmd->add_option("--dropout", gen.spec.marker_dropout, "Per-marker removal chance");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  DetectCmd detect;
  auto* detect_cmd = app.add_subcommand("detect", "Run both disclosure detectors over snapshots");
  add_detect_opts(detect_cmd, detect.det);
  detect_cmd->add_option("inputs", detect.inputs, "Snapshot files or directories")
      ->required()
      ->check(CLI::ExistingPath);
  detect_cmd->add_option("--out", detect.out, "Write <stem>.report.json files here");

  EvalCmd eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score detections against snapshot labels");
  add_detect_opts(eval_cmd, eval.det);
  eval_cmd->add_option("inputs", eval.inputs, "Labeled snapshot files or directories")
      ->required()
      ->check(CLI::ExistingPath);
  eval_cmd->add_option("--reports", eval.reports, "Use saved reports instead of detecting")
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_flag("--require-perfect", eval.require_perfect, "Exit 1 on any false positive or negative");

  FilterCmd filter;
  auto* filter_cmd = app.add_subcommand("filter", "Apply a filter list to URLs and snapshots");
  filter_cmd->add_option("--filters", filter.filters, "Filter list (default: bundled)")->check(CLI::ExistingFile);
  filter_cmd->add_option("--url", filter.urls, "URL to check (repeatable)")->allow_extra_args(false);
  filter_cmd->add_option("inputs", filter.inputs, "Snapshot files or directories")->check(CLI::ExistingPath);

  StealthCmd stealth;
  auto* stealth_cmd = app.add_subcommand("stealth-plan", "Plan overlays and interception, then verify them");
  add_detect_opts(stealth_cmd, stealth.det);
  stealth_cmd->add_option("input", stealth.input, "Snapshot")->required()->check(CLI::ExistingFile);
  stealth_cmd->add_option("--ads", stealth.ads, "Top-frame node ids to cover, comma separated (default: detected ads)")
      ->delimiter(',')
      ->allow_extra_args(false);
  stealth_cmd->add_option("--seed", stealth.seed, "Seed for the fake-root token");
  stealth_cmd->add_option("--css", stealth.css, "Publisher stylesheet to rescope")->check(CLI::ExistingFile);
  stealth_cmd->add_option("--profile", stealth.profile, "Interception profile");
  stealth_cmd->add_option("--tier", stealth.tier, "script-level or source-modification");
  stealth_cmd->add_option("--tostring", stealth.tostring, "none, per-function or prototype");
  stealth_cmd->add_option("--drop-entry", stealth.drop, "Remove a manifest entry, e.g. document.body (debug)")->allow_extra_args(false);
  stealth_cmd->add_option("--selector", stealth.selectors, "Selector whose match set must be preserved")->allow_extra_args(false);
  stealth_cmd->add_option("--filters", stealth.filters, "Also check these element-hiding selectors")
      ->check(CLI::ExistingFile);
  stealth_cmd->add_option("--emit-snapshot", stealth.emit_snapshot, "Write the transformed snapshot");

  RewriteCmd rewrite;
  auto* rewrite_cmd = app.add_subcommand("rewrite", "Patch detector scripts offline");
  rewrite_cmd->add_option("inputs", rewrite.inputs, "Script files or directories")
      ->required()
      ->check(CLI::ExistingPath);
  rewrite_cmd->add_option("--signatures", rewrite.signatures, "Signature file (default: bundled)")
      ->check(CLI::ExistingFile);
  rewrite_cmd->add_option("--host", rewrite.host, "Page host the scripts run on");
  rewrite_cmd->add_option("--index", rewrite.index, "JSON list of {file, host}")->check(CLI::ExistingFile);
  rewrite_cmd->add_option("--out", rewrite.out, "Write rewritten scripts here");

  ProxyCmd proxy;
  auto* proxy_cmd = app.add_subcommand("proxy", "Run the rewriting HTTP proxy until SIGINT/SIGTERM");
  proxy_cmd->add_option("--listen", proxy.listen, "host:port");
  proxy_cmd->add_option("--signatures", proxy.signatures, "Signature file, re-read on SIGHUP")
      ->check(CLI::ExistingFile);
  proxy_cmd->add_option("--filters", proxy.filters, "Filter list for --block-resources")->check(CLI::ExistingFile);
  proxy_cmd->add_option("--block-resources", proxy.block_resources, "Answer filter-list hits with 403")
      ->check(CLI::IsMember({"on", "off"}));
  proxy_cmd->add_option("--max-script-bytes", proxy.max_script_bytes, "Larger scripts pass through unmodified");
  proxy_cmd->add_option("--upstream-timeout", proxy.upstream_timeout, "Seconds")->check(CLI::PositiveNumber);
  proxy_cmd->add_option("--resolve", proxy.resolve, "host=address to dial instead of DNS (repeatable)")->allow_extra_args(false);

  SimCmd sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Replay arms-race events or query the tool table");
  sim_cmd->add_option("--start", sim.start, "Start state");
  sim_cmd->add_option("events", sim.events, "Techniques, optionally actor:technique");
  sim_cmd->add_flag("--table", sim.table, "Print the tool systematization table");
  sim_cmd->add_option("--classify", sim.classify, "Check tool profiles against the table")
      ->check(CLI::ExistingFile);

  std::vector<const char*> argv{"adwar"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, pretty, out);
    if (detect_cmd->parsed()) return cmd_detect(detect, pretty, out, err);
    if (eval_cmd->parsed()) return cmd_eval(eval, pretty, out, err);
    if (filter_cmd->parsed()) return cmd_filter(filter, pretty, out, err);
    if (stealth_cmd->parsed()) return cmd_stealth(stealth, pretty, out, err);
    if (rewrite_cmd->parsed()) return cmd_rewrite(rewrite, pretty, out, err);
    if (proxy_cmd->parsed()) return cmd_proxy(proxy, pretty, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(sim, pretty, out, err);
  } catch (const UsageError& e) {
    err << "adwar: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "adwar: error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace adwar
