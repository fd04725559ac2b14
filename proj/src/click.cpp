#include "adwar/click.hpp"

#include <algorithm>

#include "adwar/util.hpp"

namespace adwar {

const char* to_string(ResolvedVia v) { return v == ResolvedVia::Href ? "href" : "recorded-handler"; }

TableFetcher& TableFetcher::add(std::string url, int status, std::optional<std::string> location) {
  table_[std::move(url)] = {status, std::move(location)};
  return *this;
}

FetchResponse TableFetcher::fetch(const std::string& url) {
  ++calls_;
  const auto it = table_.find(url);
  if (it == table_.end()) throw TransportError("no route to " + url);
  return it->second;
}

std::optional<LinkTarget> find_link_target(const PageSnapshot& snap, std::size_t frame, NodeId node) {
  const auto& f = snap.frames.at(frame);
  if (!f.contains(node)) throw std::invalid_argument("node " + std::to_string(node) + " not in frame");
  std::vector<NodeId> chain{node};
  for (NodeId a : ancestors(f, node)) chain.push_back(a);

  auto absolute = [&](const std::string& ref) -> std::optional<std::string> {
    if (parse_url(ref)) return ref;
    return resolve_url(f.url, ref);
  };
  for (NodeId id : chain) {
    if (const auto* href = f.node(id).attr("href")) {
      if (auto url = absolute(*href)) return LinkTarget{id, *url, ResolvedVia::Href};
    }
  }
  for (NodeId id : chain) {
    const auto& h = f.node(id).handlers;
    if (const auto it = h.find("click"); it != h.end() && it->second) {
      if (auto url = absolute(*it->second)) return LinkTarget{id, *url, ResolvedVia::RecordedHandler};
    }
  }
  return std::nullopt;
}

std::vector<std::string> follow_redirects(const std::string& url, Fetcher& fetcher, int limit) {
  std::vector<std::string> hops{url};
  while (true) {
    const FetchResponse r = fetcher.fetch(hops.back());
    const bool redirect = r.status == 301 || r.status == 302 || r.status == 303 || r.status == 307 || r.status == 308;
    if (!redirect) return hops;
    if (!r.location) throw TransportError("redirect without Location from " + hops.back());
    const auto next = parse_url(*r.location) ? std::optional<std::string>(*r.location)
                                             : resolve_url(hops.back(), *r.location);
    if (!next) throw TransportError("unusable Location '" + *r.location + "' from " + hops.back());
    if (const auto it = std::find(hops.begin(), hops.end(), *next); it != hops.end()) {
      std::vector<std::string> cycle(it, hops.end());
      cycle.push_back(*next);
      std::string names;
      for (const auto& u : cycle) names += (names.empty() ? "" : " -> ") + u;
      throw RedirectError("redirect loop: " + names, cycle);
    }
    if (static_cast<int>(hops.size()) >= limit) {
      throw RedirectError("more than " + std::to_string(limit) + " hops from " + hops.front(), hops);
    }
    hops.push_back(*next);
  }
}

LinkResolution resolve_click(const PageSnapshot& snap, std::size_t frame, NodeId node, Fetcher& fetcher, int limit) {
  const auto target = find_link_target(snap, frame, node);
  if (!target) throw UnresolvableError("node " + std::to_string(node) + " has no link or recorded click target");
  LinkResolution res;
  res.frame = frame;
  res.start = node;
  res.via = target->via;
  res.hops = follow_redirects(target->url, fetcher, limit);
  res.final_url = res.hops.back();
  res.hop_count = res.hops.size();
  return res;
}

}  // namespace adwar
