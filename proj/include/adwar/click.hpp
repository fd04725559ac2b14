#pragma once

// Click simulation: find where a node navigates to and follow HTTP
// redirects to the landing URL.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adwar/snapshot.hpp"

namespace adwar {

inline constexpr int kRedirectLimit = 10;

struct FetchResponse {
  int status = 0;
  std::optional<std::string> location;
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  /// One request, redirects not followed. Throws TransportError.
  virtual FetchResponse fetch(const std::string& url) = 0;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnresolvableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RedirectError : public std::runtime_error {
 public:
  RedirectError(const std::string& what, std::vector<std::string> chain)
      : std::runtime_error(what), chain_(std::move(chain)) {}
  const std::vector<std::string>& chain() const noexcept { return chain_; }

 private:
  std::vector<std::string> chain_;
};

/// Plain HTTP/1.1 GET via cpp-httplib. https URLs raise TransportError.
class HttpFetcher : public Fetcher {
 public:
  explicit HttpFetcher(int timeout_seconds = 5) : timeout_(timeout_seconds) {}
  FetchResponse fetch(const std::string& url) override;

 private:
  int timeout_;
};

/// Offline fetcher answering from a table; unknown URLs are transport errors.
class TableFetcher : public Fetcher {
 public:
  TableFetcher& add(std::string url, int status, std::optional<std::string> location = std::nullopt);
  FetchResponse fetch(const std::string& url) override;
  std::size_t calls() const { return calls_; }

 private:
  std::map<std::string, FetchResponse> table_;
  std::size_t calls_ = 0;
};

enum class ResolvedVia { Href, RecordedHandler };
const char* to_string(ResolvedVia v);

struct LinkTarget {
  NodeId node = 0;  // node carrying the href or handler
  std::string url;  // absolute
  ResolvedVia via = ResolvedVia::Href;
};

/// Nearest href on the node or an ancestor; otherwise a click handler with a
/// recorded target hint on the node or an ancestor. Relative URLs resolve
/// against the frame URL.
std::optional<LinkTarget> find_link_target(const PageSnapshot& snap, std::size_t frame, NodeId node);

struct LinkResolution {
  std::size_t frame = 0;
  NodeId start = 0;
  std::vector<std::string> hops;  // start URL first, final URL last
  std::string final_url;
  std::size_t hop_count = 0;
  ResolvedVia via = ResolvedVia::Href;
};

/// Follows 301/302/303/307/308 Location headers. The hop list (start URL
/// included) never exceeds `limit` entries.
/// Throws UnresolvableError (no target), RedirectError (loop or limit) and
/// TransportError. Callers decide whether a click is warranted.
LinkResolution resolve_click(const PageSnapshot& snap, std::size_t frame, NodeId node, Fetcher& fetcher,
                             int limit = kRedirectLimit);

/// Redirect chain from a URL, same rules as resolve_click.
std::vector<std::string> follow_redirects(const std::string& url, Fetcher& fetcher, int limit = kRedirectLimit);

}  // namespace adwar
