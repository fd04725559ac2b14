#pragma once

// Seeded synthetic page generator with planted, labeled ads: AdChoices
// iframes (icon composited top-right plus a disclosure link) and feed/sidebar
// posts ("Sponsored" text plus a disclosure link), next to organic decoys.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adwar/snapshot.hpp"

namespace adwar {

struct CorpusSpec {
  int count = 20;
  int iframes_per_page = 6;
  int feed_items_per_page = 6;
  int sidebar_items_per_page = 2;
  double adchoices_density = 0.5;  // chance an iframe slot holds an ad
  double feed_density = 0.5;       // chance a feed/sidebar slot holds an ad
  int noise = 0;                   // uniform per-channel noise amplitude, 0..255
  bool randomize_markup = false;
  double marker_dropout = 0;       // per-marker removal chance on planted ads
  Viewport viewport{1280, 2000};

  /// Throws std::invalid_argument on out-of-range knobs.
  void validate() const;
};

/// Same spec and seed, same corpus (byte-identical once serialized).
std::vector<PageSnapshot> generate_corpus(const CorpusSpec& spec, std::uint64_t seed);
PageSnapshot generate_page(const CorpusSpec& spec, std::uint64_t seed, int index);

/// Renames the id/class attributes of every ad-labeled node (and everything
/// inside ad-labeled frames and containers). Layout, pixels and links stay.
void randomize_markup(PageSnapshot& snap, std::mt19937_64& rng);

/// Counts of planted ads in a corpus page.
struct PlantedCounts {
  int adchoices = 0;
  int adchoices_negative = 0;
  int feed = 0;
  int feed_negative = 0;
};
PlantedCounts planted(const PageSnapshot& snap);

}  // namespace adwar
