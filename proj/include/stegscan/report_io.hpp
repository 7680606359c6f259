#pragma once

// Report rendering. Reports never carry a live signature: matched bytes are
// represented by their digests and a short leading excerpt only.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <string>

#include <json.hpp>

#include "stegscan/bytes.hpp"
#include "stegscan/scanner.hpp"

namespace stegscan {

#ifndef STEGSCAN_VERSION
#define STEGSCAN_VERSION "0.1.0"
#endif

inline constexpr std::string_view kToolVersion = STEGSCAN_VERSION;

using Json = nlohmann::ordered_json;

enum class Media { json, text };

struct RenderedReport {
  Media media = Media::json;
  Bytes bytes;

  std::string str() const { return to_string(bytes); }
};

struct RenderOptions {
  bool deterministic = true;  // omits the timestamp
};

namespace detail {

// Left-justifies by code points so a multi-byte ellipsis counts as one column.
inline std::string pad_display(const std::string& s, std::size_t width) {
  std::size_t cols = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++cols;
  return cols >= width ? s : s + std::string(width - cols, ' ');
}

}  // namespace detail

inline Json to_json(const DigestSet& d) { return Json{{"md5", d.md5}, {"sha1", d.sha1}, {"sha256", d.sha256}}; }

inline Json to_json(const FormatId& f) {
  return Json{{"kind", std::string(to_string(f.kind))}, {"magic_offset", f.magic_offset}, {"magic_len", f.magic_len}};
}

inline Json to_json(const ByteRegion& r) {
  return Json{{"offset", r.offset}, {"length", r.length}, {"kind", std::string(to_string(r.kind))}, {"label", r.label}};
}

inline Json to_json(const TransformChain& chain) {
  Json steps = Json::array();
  for (const auto& s : chain.steps) steps.push_back(to_string(s));
  return steps;
}

inline Json to_json(const Finding& f) {
  Json j;
  j["signature_id"] = f.signature_id;
  j["scope"] = f.region ? "region" : "whole_file";
  j["region"] = f.region ? to_json(*f.region) : Json(nullptr);
  j["chain"] = to_json(f.chain);
  j["match_offset"] = f.match_offset;
  j["file_offset"] = f.file_offset ? Json(*f.file_offset) : Json(nullptr);
  j["matched"] = Json{{"length", f.matched_length},
                      {"digests", to_json(f.matched_digest)},
                      {"defanged_excerpt", f.defanged_excerpt}};
  return j;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json report_to_json(const ScanReport& r, const RenderOptions& opts = {}) {
  Json j;
  j["target"] = Json{{"path", r.target.path}, {"length", r.target.length}, {"digests", to_json(r.target.digests)}};
  j["format"] = to_json(r.format);
  j["well_formed"] = r.well_formed;
  Json regions = Json::array();
  for (const auto& reg : r.regions) regions.push_back(to_json(reg));
  for (const auto& reg : r.nested_regions) regions.push_back(to_json(reg));
  j["regions"] = std::move(regions);
  Json findings = Json::array();
  for (const auto& f : r.findings) findings.push_back(to_json(f));
  j["findings"] = std::move(findings);
  Json per_region = Json::array();
  for (const auto& re : r.entropy_per_region)
    per_region.push_back(Json{{"offset", re.region.offset}, {"label", re.region.label}, {"bits_per_byte", re.entropy}});
  j["entropy"] = Json{{"whole", r.entropy_whole}, {"regions", std::move(per_region)}};
  Json strings = Json::array();
  for (const auto& s : r.strings)
    strings.push_back(Json{{"offset", s.offset}, {"length", s.length}, {"text", s.excerpt}});
  j["strings"] = std::move(strings);
  j["verdict"] = std::string(to_string(r.verdict));
  j["diagnostics"] = r.diagnostics;
  j["max_depth"] = r.max_depth;
  j["tool_version"] = std::string(kToolVersion);
  if (!opts.deterministic) j["scanned_at"] = utc_timestamp();
  return j;
}

inline std::string report_to_text(const ScanReport& r) {
  std::ostringstream os;
  char buf[256];
  os << "target    " << (r.target.path.empty() ? "-" : r.target.path) << "\n";
  os << "length    " << r.target.length << "\n";
  os << "md5       " << r.target.digests.md5 << "\n";
  os << "sha256    " << r.target.digests.sha256 << "\n";
  os << "format    " << to_string(r.format.kind) << (r.well_formed ? " (well-formed)" : " (malformed)") << "\n";
  std::snprintf(buf, sizeof buf, "entropy   %.4f bits/byte\n", r.entropy_whole);
  os << buf;
  os << "verdict   " << to_string(r.verdict) << "\n";
  os << "findings  " << r.findings.size() << "\n";
  if (!r.findings.empty()) {
    std::snprintf(buf, sizeof buf, "  %-20s %-26s %-10s %-16s %s\n", "signature", "scope", "view-off", "excerpt", "chain");
    os << buf;
    for (const auto& f : r.findings) {
      const std::string scope = f.region ? std::string(to_string(f.region->kind)) + "@" + std::to_string(f.region->offset)
                                         : std::string("whole_file");
      std::snprintf(buf, sizeof buf, "  %-20s %-26s %-10zu ", f.signature_id.c_str(), scope.c_str(), f.match_offset);
      os << buf << detail::pad_display(f.defanged_excerpt, 16) << ' ' << to_string(f.chain) << "\n";
    }
  }
  for (const auto& d : r.diagnostics) os << "note      " << d << "\n";
  return os.str();
}

inline RenderedReport render_report(const ScanReport& report, Media media, const RenderOptions& opts = {}) {
  if (media == Media::json) {
    const auto text = report_to_json(report, opts).dump(2, ' ', false, Json::error_handler_t::replace);
    return {media, to_bytes(text + "\n")};
  }
  return {media, to_bytes(report_to_text(report))};
}

// 0 clean, 1 signature match, 2 suspicious. 3 is reserved for operational
// errors raised by the CLI.
inline int exit_code(const ScanReport& report) {
  switch (report.verdict) {
    case Verdict::clean: return 0;
    case Verdict::signature_match: return 1;
    case Verdict::suspicious: return 2;
  }
  return 3;
}

inline constexpr int kOperationalError = 3;

}  // namespace stegscan
