#include "adwar/proxy.hpp"

#include <atomic>
#include <condition_variable>
#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include "adwar/util.hpp"
#include "json.hpp"

namespace adwar {

namespace beast = boost::beast;
namespace http = beast::http;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using Json = nlohmann::ordered_json;

namespace {

std::string_view sv(beast::string_view s) { return {s.data(), s.size()}; }

}  // namespace

std::pair<std::string, unsigned short> parse_listen(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw std::invalid_argument("listen address must be host:port, got '" + std::string(text) + "'");
  }
  const std::string port(text.substr(colon + 1));
  if (port.empty() || port.find_first_not_of("0123456789") != std::string::npos || port.size() > 5 ||
      std::stoi(port) > 65535) {
    throw std::invalid_argument("bad port in '" + std::string(text) + "'");
  }
  return {std::string(text.substr(0, colon)), static_cast<unsigned short>(std::stoi(port))};
}

bool is_script_response(std::string_view content_type, std::string_view path) {
  const std::string ct = to_lower(trim(content_type.substr(0, content_type.find(';'))));
  const auto slash = ct.find('/');
  const std::string sub = slash == std::string::npos ? "" : ct.substr(slash + 1);
  if (sub == "javascript" || sub == "x-javascript" || sub == "ecmascript" || sub == "x-ecmascript") return true;
  if (!ct.empty() && ct != "text/plain" && ct != "application/octet-stream") return false;
  const std::string_view p = path.substr(0, path.find_first_of("?#"));
  return p.size() >= 3 && p.substr(p.size() - 3) == ".js";
}

struct ProxyServer::Impl {
  ProxyConfig cfg;
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::optional<FilterList> filters;

  std::mutex sig_mu;
  std::shared_ptr<const std::vector<Signature>> sigs;

  std::mutex conn_mu;
  std::condition_variable idle;
  std::set<std::shared_ptr<tcp::socket>> open;
  std::thread acceptor_thread;
  std::atomic<bool> stopping{false};
  std::mutex log_mu;

  std::shared_ptr<const std::vector<Signature>> current() {
    std::lock_guard lock(sig_mu);
    return sigs;
  }

  void log(const Json& j) {
    const std::string line = j.dump();
    std::lock_guard lock(log_mu);
    if (cfg.log) {
      cfg.log(line);
    } else {
      std::cerr << line << "\n";
    }
  }

  void accept_loop() {
    while (!stopping) {
      auto sock = std::make_shared<tcp::socket>(ioc);
      beast::error_code ec;
      acceptor.accept(*sock, ec);
      if (ec) {
        if (stopping) break;
        continue;
      }
      std::lock_guard lock(conn_mu);
      open.insert(sock);
      std::thread([this, sock]() mutable {
        serve(*sock);
        std::lock_guard l(conn_mu);
        open.erase(sock);
        sock.reset();  // the socket must go before stop() can return
        idle.notify_all();
      }).detach();
    }
  }

  template <typename Body>
  static http::response<http::string_body> plain(const http::request<Body>& req, http::status st, std::string msg) {
    http::response<http::string_body> res{st, req.version()};
    res.set(http::field::content_type, "text/plain");
    res.set(http::field::connection, "close");
    res.keep_alive(false);
    res.body() = std::move(msg) + "\n";
    res.prepare_payload();
    return res;
  }

  void serve(tcp::socket& sock) {
    const auto sigset = current();  // one set per connection
    beast::flat_buffer buf;
    beast::error_code ec;
    while (!stopping) {
      http::request_parser<http::string_body> parser;
      parser.body_limit(64u << 20);
      http::read(sock, buf, parser, ec);
      if (ec) break;
      auto req = parser.release();
      http::response<http::string_body> res = handle(req, *sigset);
      const bool keep = res.keep_alive() && req.keep_alive();
      res.keep_alive(keep);
      http::write(sock, res, ec);
      if (ec || !keep) break;
    }
    sock.shutdown(tcp::socket::shutdown_both, ec);
    sock.close(ec);
  }

  http::response<http::string_body> handle(const http::request<http::string_body>& req,
                                           const std::vector<Signature>& sigset) {
    if (req.method() == http::verb::connect) {
      return plain(req, http::status::not_implemented, "CONNECT is not supported: this proxy does not intercept TLS");
    }
    const std::string target(sv(req.target()));
    const auto url = parse_url(target);
    if (!url || url->scheme != "http") {
      return plain(req, http::status::bad_request, "forward proxy requests need an absolute http:// URL");
    }
    if (cfg.block_resources && filters && match_url(*filters, target).blocked) {
      log({{"event", "blocked"}, {"host", url->host}, {"path", url->target}});
      return plain(req, http::status::forbidden, "blocked by filter list");
    }

    http::response<http::string_body> res;
    try {
      res = forward(req, *url);
    } catch (const std::exception& e) {
      log({{"event", "upstream-error"}, {"host", url->host}, {"path", url->target}, {"error", e.what()}});
      return plain(req, http::status::bad_gateway, std::string("upstream request failed: ") + e.what());
    }

    if (req.method() == http::verb::head || !is_script_response(sv(res[http::field::content_type]), url->target)) {
      return res;
    }
    const auto enc = to_lower(trim(sv(res[http::field::content_encoding])));
    if (!enc.empty() && enc != "identity") {
      log({{"event", "script-skipped"}, {"host", url->host}, {"path", url->target}, {"reason", "encoded body"}});
      return res;
    }
    if (res.body().size() > cfg.max_script_bytes) {
      log({{"event", "script-skipped"},
           {"host", url->host},
           {"path", url->target},
           {"reason", "body exceeds max-script-bytes"},
           {"bytes", res.body().size()}});
      return res;
    }
    const RewriteResult r = scan_and_patch(res.body(), url->host, sigset, url->target);
    if (!r.changed() && r.directives.empty() && r.rolled_back.empty()) return res;
    Json ids = Json::array();
    for (const auto& a : r.actions) ids.push_back(a.signature);
    for (const auto& d : r.directives) ids.push_back(d.signature);
    Json line{{"host", url->host}, {"path", url->target}, {"signatures", ids}};
    if (!r.rolled_back.empty()) line["rolled_back"] = r.rolled_back.size();
    log(line);
    if (r.changed()) {
      res.body() = r.source;
      res.chunked(false);
      res.prepare_payload();
    }
    return res;
  }

  http::response<http::string_body> forward(const http::request<http::string_body>& in, const Url& url) {
    tcp::resolver resolver(ioc);
    tcp::socket up(ioc);
    const auto pinned = cfg.resolve.find(url.host);
    asio::connect(up, resolver.resolve(pinned == cfg.resolve.end() ? url.host : pinned->second, std::to_string(url.port)));
    const timeval tv{cfg.upstream_timeout_s, 0};
    setsockopt(up.native_handle(), SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    setsockopt(up.native_handle(), SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);

    http::request<http::string_body> out{in.method(), url.target, 11};
    for (const auto& f : in) {
      const auto name = to_lower(std::string(f.name_string()));
      if (name == "proxy-connection" || name == "connection" || name == "keep-alive" || name == "host") continue;
      out.insert(f.name_string(), f.value());
    }
    const bool default_port = url.port == 80;
    out.set(http::field::host, default_port ? url.host : url.host + ":" + std::to_string(url.port));
    out.set(http::field::connection, "close");
    out.body() = in.body();
    if (!in.body().empty() || in.has_content_length()) out.prepare_payload();
    http::write(up, out);

    beast::flat_buffer buf;
    http::response_parser<http::string_body> parser;
    parser.body_limit(256u << 20);
    if (in.method() == http::verb::head) parser.skip(true);
    http::read(up, buf, parser);
    auto res = parser.release();
    beast::error_code ec;
    up.shutdown(tcp::socket::shutdown_both, ec);
    // The client keeps whatever connection semantics it asked for, so a body
    // delimited by EOF upstream needs an explicit length downstream.
    res.erase(http::field::connection);
    if (!res.chunked() && !res.has_content_length() && !parser.skip()) res.prepare_payload();
    res.keep_alive(in.keep_alive());
    return res;
  }
};

ProxyServer::ProxyServer(ProxyConfig cfg) : impl_(std::make_unique<Impl>()) {
  impl_->cfg = std::move(cfg);
  if (!impl_->cfg.signatures_path.empty()) {
    impl_->sigs = std::make_shared<const std::vector<Signature>>(load_signatures(impl_->cfg.signatures_path));
  } else {
    impl_->sigs = std::make_shared<const std::vector<Signature>>();
  }
  if (!impl_->cfg.filters_path.empty()) impl_->filters = load_filter_list(impl_->cfg.filters_path);
  const tcp::endpoint ep(asio::ip::make_address(impl_->cfg.listen_host), impl_->cfg.listen_port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
}

ProxyServer::~ProxyServer() { stop(); }

unsigned short ProxyServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void ProxyServer::start() {
  impl_->acceptor_thread = std::thread([this] { impl_->accept_loop(); });
}

void ProxyServer::run() { impl_->accept_loop(); }

void ProxyServer::stop() {
  if (impl_->stopping.exchange(true)) return;
  beast::error_code ec;
  impl_->acceptor.cancel(ec);
  // A blocking accept() does not notice close(); shutdown wakes it.
  ::shutdown(impl_->acceptor.native_handle(), SHUT_RDWR);
  impl_->acceptor.close(ec);
  if (impl_->acceptor_thread.joinable()) impl_->acceptor_thread.join();
  std::unique_lock lock(impl_->conn_mu);
  for (const auto& s : impl_->open) s->shutdown(tcp::socket::shutdown_both, ec);
  impl_->idle.wait(lock, [&] { return impl_->open.empty(); });
}

void ProxyServer::reload_signatures() {
  auto fresh = std::make_shared<const std::vector<Signature>>(load_signatures(impl_->cfg.signatures_path));
  std::lock_guard lock(impl_->sig_mu);
  impl_->sigs = std::move(fresh);
}

void ProxyServer::set_signatures(std::vector<Signature> sigs) {
  auto fresh = std::make_shared<const std::vector<Signature>>(std::move(sigs));
  std::lock_guard lock(impl_->sig_mu);
  impl_->sigs = std::move(fresh);
}

}  // namespace adwar
