#include "adwar/util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <numeric>

namespace adwar {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string format_px(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s + "px";
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string Url::origin() const {
  const bool default_port = (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
  return scheme + "://" + host + (default_port ? "" : ":" + std::to_string(port));
}

std::string Url::str() const { return origin() + target; }

std::optional<Url> parse_url(std::string_view text) {
  text = trim(text);
  Url u;
  const auto sep = text.find("://");
  if (sep == std::string_view::npos) return std::nullopt;
  u.scheme = to_lower(text.substr(0, sep));
  if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
  std::string_view rest = text.substr(sep + 3);
  const auto end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, end);
  std::string_view tail = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
  if (authority.empty()) return std::nullopt;

  std::string_view host = authority;
  u.port = u.scheme == "https" ? 443 : 80;
  if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    const auto port_text = authority.substr(colon + 1);
    if (port_text.empty() || port_text.size() > 5) return std::nullopt;
    int port = 0;
    for (char c : port_text) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      port = port * 10 + (c - '0');
    }
    if (port == 0 || port > 65535) return std::nullopt;
    u.port = port;
  }
  if (host.empty()) return std::nullopt;
  for (char c : host) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')) return std::nullopt;
  }
  if (host.front() == '.' || host.back() == '.' || host.find("..") != std::string_view::npos) return std::nullopt;
  u.host = to_lower(host);
  if (const auto hash = tail.find('#'); hash != std::string_view::npos) tail = tail.substr(0, hash);
  u.target = tail.empty() ? "/" : std::string(tail);
  if (u.target[0] == '?') u.target = "/" + u.target;
  return u;
}

std::optional<std::string> resolve_url(std::string_view base, std::string_view ref) {
  ref = trim(ref);
  if (ref.empty()) return std::nullopt;
  if (auto abs = parse_url(ref)) return abs->str();
  auto b = parse_url(base);
  if (!b) return std::nullopt;
  if (ref.rfind("//", 0) == 0) {
    auto u = parse_url(b->scheme + ":" + std::string(ref));
    if (!u) return std::nullopt;
    return u->str();
  }
  if (ref.find("://") != std::string_view::npos) return std::nullopt;
  if (ref.front() == '/') return b->origin() + std::string(ref);
  std::string dir = b->target.substr(0, b->target.find('?'));
  dir = dir.substr(0, dir.rfind('/') + 1);
  return b->origin() + dir + std::string(ref);
}

bool host_matches_domain(std::string_view host, std::string_view domain) {
  if (domain.empty() || host.size() < domain.size()) return false;
  if (!iequals(host.substr(host.size() - domain.size()), domain)) return false;
  return host.size() == domain.size() || host[host.size() - domain.size() - 1] == '.';
}

namespace {

constexpr std::array kPublicSuffixes = {
    "com",    "net",    "org",    "edu",    "gov",    "io",     "info",   "biz",   "ws",    "eu",
    "de",     "fr",     "uk",     "us",     "ca",     "au",     "jp",     "cn",    "ru",    "nl",
    "it",     "es",     "se",     "no",     "ch",     "in",     "br",     "example", "test", "localhost",
    "co.uk",  "org.uk", "ac.uk",  "gov.uk", "com.au", "net.au", "org.au", "co.jp", "ne.jp", "com.br",
    "co.in",  "com.cn", "co.nz",
};

}  // namespace

bool is_public_suffix(std::string_view domain) {
  const std::string d = to_lower(domain);
  return std::find(kPublicSuffixes.begin(), kPublicSuffixes.end(), d) != kPublicSuffixes.end();
}

std::string registrable_domain(std::string_view host_in) {
  const std::string host = to_lower(host_in);
  // Longest matching public suffix, then one more label.
  std::size_t best_suffix_len = 0;
  for (std::string_view ps : kPublicSuffixes) {
    if (ps.size() > best_suffix_len && host_matches_domain(host, ps) && host.size() > ps.size()) {
      best_suffix_len = ps.size();
    }
  }
  if (best_suffix_len == 0) {
    // Unknown TLD: fall back to the last two labels.
    const auto last = host.rfind('.');
    if (last == std::string::npos || last == 0) return host;
    const auto prev = host.rfind('.', last - 1);
    return prev == std::string::npos ? host : host.substr(prev + 1);
  }
  const std::size_t suffix_start = host.size() - best_suffix_len;
  const auto label_end = suffix_start - 1;  // the '.' before the suffix
  const auto prev = host.rfind('.', label_end - 1);
  return prev == std::string::npos ? host : host.substr(prev + 1);
}

std::string asset_path(std::string_view name) {
  const char* env = std::getenv("ADWAR_ASSETS");
  std::string dir = env && *env ? env : ADWAR_ASSET_DIR;
  if (!dir.empty() && dir.back() != '/') dir += '/';
  return dir + std::string(name);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace adwar
