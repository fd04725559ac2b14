#pragma once

// Plain-HTTP forward proxy that rewrites script responses with
// scan_and_patch. No TLS: CONNECT is answered 501.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adwar/active.hpp"
#include "adwar/filter.hpp"

namespace adwar {

struct ProxyConfig {
  std::string listen_host = "127.0.0.1";
  unsigned short listen_port = 0;  // 0 picks a free port
  std::string signatures_path;
  std::string filters_path;        // optional
  bool block_resources = false;    // answer filter-list hits with 403
  std::size_t max_script_bytes = 4 << 20;
  int upstream_timeout_s = 10;
  // Host -> address to dial instead of resolving it (like curl --resolve).
  std::map<std::string, std::string> resolve;
  // One JSON object per line; defaults to stderr.
  std::function<void(const std::string&)> log;
};

/// "host:port"; throws std::invalid_argument.
std::pair<std::string, unsigned short> parse_listen(std::string_view text);

/// Content type `*/javascript`, `*/x-javascript`, `*/ecmascript`, or a path
/// ending in `.js` when the type says nothing more specific.
bool is_script_response(std::string_view content_type, std::string_view path);

class ProxyServer {
 public:
  /// Loads the signature and filter files and binds; throws on failure.
  explicit ProxyServer(ProxyConfig cfg);
  ~ProxyServer();
  ProxyServer(const ProxyServer&) = delete;
  ProxyServer& operator=(const ProxyServer&) = delete;

  unsigned short port() const;
  void start();  // accept loop on a background thread
  void run();    // accept loop on the calling thread until stop()
  void stop();

  /// Re-reads the signature file. Connections opened afterwards see the new
  /// set; requests already in flight keep the one they started with. On a
  /// parse error the old set stays and the error propagates.
  void reload_signatures();
  void set_signatures(std::vector<Signature> sigs);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace adwar
