#pragma once

// The two disclosure-based detectors (AdChoices iframes, feed/sidebar
// "Sponsored" posts), their report format and the confusion-matrix scorer.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "adwar/click.hpp"
#include "adwar/containers.hpp"
#include "adwar/snapshot.hpp"
#include "adwar/template_match.hpp"
#include "adwar/text_recognition.hpp"

namespace adwar {

enum class DisclosureStandard { AdChoices, FeedStyle, Other };
enum class MarkerKind { IconMatch, DisclosureText, DisclosureLink };
enum class MarkerPolicy { Any, All };

const char* to_string(DisclosureStandard s);
const char* to_string(MarkerKind k);
const char* to_string(MarkerPolicy p);
MarkerPolicy parse_marker_policy(std::string_view s);

struct DetectorConfig {
  ImageTemplate icon;
  bool quadrant_first = true;
  VisualQuery feed_query;
  VisualQuery sidebar_query;
  MarkerLexicon lexicon;
  std::vector<std::string> feed_words{"Sponsored"};
  std::vector<std::string> allowlist;  // "host" or "host/path-prefix"
  MarkerPolicy policy = MarkerPolicy::Any;
  bool resolve_links = false;
  // Only click a link once another marker was found on the same candidate.
  bool require_prior_marker = true;
  GlyphRecognizerConfig text;

  void validate() const;
};

/// Bundled presets: 450-550px bordered feed items, 225-325px sidebar items.
DetectorConfig default_detector_config();
/// JSON config; relative icon paths resolve against `base_dir`.
DetectorConfig parse_detector_config(std::string_view json_text, const std::string& base_dir);
DetectorConfig load_detector_config(const std::string& path);

bool url_on_allowlist(std::string_view url, const std::vector<std::string>& allowlist);

struct MarkerEvidence {
  MarkerKind kind = MarkerKind::IconMatch;
  NodeId node = 0;  // where the marker was found
  std::optional<TemplateMatch> icon;
  std::optional<RecognizedWord> word;  // from an image
  std::string text;                    // matched DOM text
  std::optional<LinkResolution> link;  // when a click was simulated
  std::string url;                     // static or resolved link target

  friend bool operator==(const MarkerEvidence&, const MarkerEvidence&);
};

struct AdDetection {
  std::size_t frame = 0;
  NodeId node = 0;
  DisclosureStandard standard = DisclosureStandard::Other;
  std::set<MarkerKind> markers;
  std::vector<MarkerEvidence> evidence;
};

struct FrameVerdict {
  std::size_t frame = 0;
  bool ad = false;
  std::vector<std::string> errors;
};

struct StageTiming {
  std::string stage;
  double ms = 0;
};

struct DetectionReport {
  std::string url;
  std::vector<AdDetection> detections;
  std::vector<FrameVerdict> frames;
  std::vector<NodeRef> feed_candidates;  // containers the feed detector examined
  std::vector<StageTiming> timing;

  /// Throws std::invalid_argument if a detection names a missing frame/node.
  void check_against(const PageSnapshot& snap) const;
};

/// Per non-top frame. `fetcher` is used only when link resolution is on.
std::vector<AdDetection> detect_adchoices(const PageSnapshot& snap, const DetectorConfig& cfg,
                                          Fetcher* fetcher = nullptr,
                                          std::vector<FrameVerdict>* verdicts = nullptr);

/// Top-frame containers from the two presets (outermost only).
std::vector<AdDetection> detect_feed_ads(const PageSnapshot& snap, const DetectorConfig& cfg,
                                         Fetcher* fetcher = nullptr, std::vector<NodeRef>* candidates = nullptr,
                                         std::vector<std::string>* errors = nullptr);

DetectionReport run_detectors(const PageSnapshot& snap, const DetectorConfig& cfg, Fetcher* fetcher = nullptr);

std::string report_to_json(const DetectionReport& r, bool pretty = false);
DetectionReport report_from_json(std::string_view text);

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  /// 1.0 when the denominator is zero.
  double precision() const;
  double recall() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct Evaluation {
  ConfusionMatrix adchoices;  // per non-top frame
  ConfusionMatrix feed;       // per labeled or examined top-frame container
  ConfusionMatrix combined() const;
};

class LabelMismatch : public std::runtime_error {
 public:
  LabelMismatch(const std::string& what, std::vector<std::string> uncovered)
      : std::runtime_error(what), uncovered_(std::move(uncovered)) {}
  const std::vector<std::string>& uncovered() const noexcept { return uncovered_; }

 private:
  std::vector<std::string> uncovered_;
};

/// Scores a report against ground-truth labels carried by `truth`. Every
/// non-top frame and every examined feed candidate must be labeled.
Evaluation evaluate_report(const DetectionReport& report, const PageSnapshot& truth);

std::string matrix_to_json(const ConfusionMatrix& m);

}  // namespace adwar
