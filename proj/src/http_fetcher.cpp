#include <httplib.h>

#include "adwar/click.hpp"
#include "adwar/util.hpp"

namespace adwar {

FetchResponse HttpFetcher::fetch(const std::string& url) {
  const auto u = parse_url(url);
  if (!u) throw TransportError("not an http(s) URL: " + url);
  if (u->scheme != "http") throw TransportError("only plain HTTP is supported: " + url);
  httplib::Client cli(u->host, u->port);
  cli.set_connection_timeout(timeout_, 0);
  cli.set_read_timeout(timeout_, 0);
  cli.set_follow_location(false);
  auto res = cli.Get(u->target);
  if (!res) throw TransportError("request to " + url + " failed: " + httplib::to_string(res.error()));
  FetchResponse out;
  out.status = res->status;
  if (res->has_header("Location")) out.location = res->get_header_value("Location");
  return out;
}

}  // namespace adwar
