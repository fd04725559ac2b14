#pragma once

// Small string and URL helpers shared across modules.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adwar {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_ws(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// "12px", "0.5px"; trailing zeros dropped.
std::string format_px(double v);

/// Classic Levenshtein distance over bytes.
std::size_t edit_distance(std::string_view a, std::string_view b);

struct Url {
  std::string scheme;  // lowercase
  std::string host;    // lowercase
  int port = 0;        // explicit or scheme default
  std::string target;  // path + query, at least "/"

  std::string origin() const;
  std::string str() const;
};

/// Parses an absolute http(s) URL. Returns nullopt for anything else.
std::optional<Url> parse_url(std::string_view text);

/// Resolves `ref` against `base` (absolute, scheme-relative, absolute-path).
/// Relative-path references resolve against the base directory.
std::optional<std::string> resolve_url(std::string_view base, std::string_view ref);

/// True when `host` equals `domain` or is a subdomain of it.
bool host_matches_domain(std::string_view host, std::string_view domain);

/// Registrable domain (eTLD+1) using a small built-in public-suffix subset.
std::string registrable_domain(std::string_view host);
bool is_public_suffix(std::string_view domain);

/// Path of a bundled asset. $ADWAR_ASSETS overrides the build-time directory.
std::string asset_path(std::string_view name);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);

}  // namespace adwar
