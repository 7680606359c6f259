#pragma once

// Deliberately naive reference implementations. They share no code with the
// library and favor obviousness over speed.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

using Bytes = std::vector<std::uint8_t>;

inline std::vector<std::size_t> substring_offsets(const Bytes& hay, const Bytes& needle) {
  std::vector<std::size_t> out;
  if (needle.empty() || needle.size() > hay.size()) return out;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < needle.size() && ok; ++j) ok = hay[i + j] == needle[j];
    if (ok) out.push_back(i);
  }
  return out;
}

inline Bytes reversed(const Bytes& b) {
  Bytes out;
  for (std::size_t i = b.size(); i > 0; --i) out.push_back(b[i - 1]);
  return out;
}

inline int b64_value(std::uint8_t c) {
  const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  const auto pos = alphabet.find(static_cast<char>(c));
  return pos == std::string::npos ? -1 : static_cast<int>(pos);
}

inline Bytes b64_encode(const Bytes& b) {
  const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  Bytes out;
  for (std::size_t i = 0; i < b.size(); i += 3) {
    std::uint32_t v = b[i] << 16;
    if (i + 1 < b.size()) v |= b[i + 1] << 8;
    if (i + 2 < b.size()) v |= b[i + 2];
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(i + 1 < b.size() ? alphabet[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < b.size() ? alphabet[v & 63] : '=');
  }
  return out;
}

// Whole-input decode after dropping CR/LF; nullopt on anything malformed.
inline std::optional<Bytes> b64_decode(const Bytes& text) {
  Bytes t;
  for (auto c : text)
    if (c != '\n' && c != '\r') t.push_back(c);
  if (t.empty() || t.size() % 4 != 0) return std::nullopt;
  Bytes out;
  for (std::size_t i = 0; i < t.size(); i += 4) {
    int v[4];
    int pads = 0;
    for (int k = 0; k < 4; ++k) {
      if (t[i + k] == '=') {
        if (i + 4 != t.size() || k < 2) return std::nullopt;
        v[k] = 0;
        ++pads;
      } else {
        if (pads) return std::nullopt;
        v[k] = b64_value(t[i + k]);
        if (v[k] < 0) return std::nullopt;
      }
    }
    const std::uint32_t n = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back((n >> 16) & 0xFF);
    if (pads < 2) out.push_back((n >> 8) & 0xFF);
    if (pads < 1) out.push_back(n & 0xFF);
  }
  return out;
}

inline Bytes strip_linebreaks(const Bytes& b) {
  Bytes out;
  for (auto c : b)
    if (c != '\n' && c != '\r') out.push_back(c);
  return out;
}

inline Bytes strip_tail(const Bytes& b) {
  Bytes out = b;
  while (!out.empty() && (out.back() == ' ' || out.back() == '\t' || out.back() == '\n' || out.back() == '\r'))
    out.pop_back();
  return out;
}

// Every view reachable by at most `depth` whole-input inverse steps.
inline std::vector<Bytes> enumerate_views(const Bytes& input, int depth) {
  std::vector<Bytes> all{input};
  std::vector<Bytes> frontier{input};
  for (int d = 0; d < depth; ++d) {
    std::vector<Bytes> next;
    for (const auto& v : frontier) {
      next.push_back(reversed(v));
      if (auto dec = b64_decode(v)) next.push_back(*dec);
      next.push_back(strip_linebreaks(v));
      next.push_back(strip_tail(v));
    }
    all.insert(all.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return all;
}

inline double entropy(const Bytes& b) {
  if (b.empty()) return 0.0;
  std::map<std::uint8_t, double> counts;
  for (auto c : b) counts[c] += 1;
  double h = 0;
  for (const auto& [_, n] : counts) h -= n / b.size() * std::log2(n / b.size());
  return h;
}

}  // namespace oracle
