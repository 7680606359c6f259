#pragma once

// Signature scanner. A scan examines the whole file, every parsed region, and
// the bounded inverse-transform views of the whole file and of every metadata
// and trailer region. A trailer that is itself a known container is parsed
// once more and its regions join the scan.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "stegscan/analytics.hpp"
#include "stegscan/bytes.hpp"
#include "stegscan/digest.hpp"
#include "stegscan/format_parser.hpp"
#include "stegscan/signatures.hpp"
#include "stegscan/transform.hpp"

namespace stegscan {

struct HeuristicThresholds {
  std::size_t trailer_min_bytes = 16;
  double metadata_entropy = 7.2;
  std::size_t base64_magic_run = 512;
};

struct ScanOptions {
  std::size_t max_depth = 2;
  InverseSearchOptions search;
  HeuristicThresholds heuristics;
  std::size_t string_min_len = 8;
  std::size_t max_strings = 64;
  std::size_t string_excerpt_len = 32;
};

struct Finding {
  std::string signature_id;
  std::optional<ByteRegion> region;  // nullopt: the whole file
  TransformChain chain;               // inverse chain that exposed the match
  std::size_t match_offset = 0;       // within the derived view
  std::optional<std::size_t> file_offset;  // set when the chain preserves offsets
  std::size_t matched_length = 0;
  DigestSet matched_digest;
  std::string defanged_excerpt;
};

struct RegionEntropy {
  ByteRegion region;
  double entropy = 0.0;
};

struct StringEntry {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string excerpt;
};

enum class Verdict { clean, suspicious, signature_match };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::clean: return "clean";
    case Verdict::suspicious: return "suspicious";
    case Verdict::signature_match: return "signature_match";
  }
  return "clean";
}

struct ScanTarget {
  std::string path;
  DigestSet digests;
  std::size_t length = 0;
};

struct ScanReport {
  ScanTarget target;
  FormatId format;
  bool well_formed = false;
  std::vector<ByteRegion> regions;
  std::vector<ByteRegion> nested_regions;
  std::vector<Finding> findings;
  double entropy_whole = 0.0;
  std::vector<RegionEntropy> entropy_per_region;
  std::vector<StringEntry> strings;
  Verdict verdict = Verdict::clean;
  std::vector<std::string> diagnostics;
  std::size_t max_depth = 0;
};

namespace detail {

inline bool preserves_offsets(const TransformChain& chain) {
  return std::all_of(chain.steps.begin(), chain.steps.end(), [](const TransformStep& s) {
    return s.kind == StepKind::identity || s.kind == StepKind::strip_trailing_whitespace;
  });
}

// Printable ASCII as-is, everything else as \xNN.
inline std::string printable_excerpt(ByteView bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    if (b >= 0x20 && b <= 0x7E && b != '\\') {
      out.push_back(static_cast<char>(b));
    } else {
      out += {'\\', 'x', digits[b >> 4], digits[b & 15]};
    }
  }
  return out;
}

inline std::size_t excerpt_length(std::size_t pattern_len) { return std::min<std::size_t>(8, pattern_len / 2); }

// Leading excerpt of a match followed by an ellipsis; the remainder is elided.
inline std::string defang_match(ByteView matched) {
  return printable_excerpt(matched.first(excerpt_length(matched.size()))) + "…";
}

// Truncates free text and breaks up any embedded signature pattern.
inline std::string defang_text(std::string text, std::size_t max_len, const SignatureSet& signatures) {
  bool cut = false;
  if (text.size() > max_len) {
    text.resize(max_len);
    cut = true;
  }
  for (const auto& sig : signatures) {
    const std::string pattern(sig.pattern.begin(), sig.pattern.end());
    std::size_t at = 0;
    while ((at = text.find(pattern, at)) != std::string::npos) {
      const std::size_t keep = excerpt_length(pattern.size());
      text.replace(at, pattern.size(), pattern.substr(0, keep) + "…");
      at += keep + 1;
    }
  }
  if (cut) text += "…";
  return text;
}

// For chains built only from the strip steps, a view match whose source bytes
// were already contiguous is the identity match seen again.
inline bool redundant_strip_match(ByteView unit, const TransformChain& chain, std::size_t hit, std::size_t len) {
  bool strips_lines = false;
  for (const auto& s : chain.steps) {
    if (s.kind == StepKind::strip_linebreaks) {
      strips_lines = true;
    } else if (s.kind != StepKind::identity && s.kind != StepKind::strip_trailing_whitespace) {
      return false;
    }
  }
  if (!strips_lines || len == 0) return false;
  std::size_t kept = 0;
  std::size_t first = 0;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    if (base64::is_linebreak(unit[i])) continue;
    if (kept == hit) first = i;
    if (kept == hit + len - 1) return i - first + 1 == len;
    ++kept;
  }
  return false;
}

struct ScanUnit {
  std::optional<ByteRegion> region;
  bool deep = false;
};

}  // namespace detail

// Recomputes the view a finding was reported in.
inline Bytes derive_view(ByteView file, const Finding& finding) {
  const Bytes base = finding.region ? extract_region(file, *finding.region) : Bytes(file.begin(), file.end());
  return stegscan::apply(finding.chain, base);
}

// True when the finding's view, read at match_offset, reproduces the pattern.
inline bool verify_finding(ByteView file, const Finding& finding, const SignatureSet& signatures) {
  const auto sig = std::find_if(signatures.begin(), signatures.end(),
                                [&](const Signature& s) { return s.id == finding.signature_id; });
  if (sig == signatures.end()) return false;
  Bytes view;
  try {
    view = derive_view(file, finding);
  } catch (const Error&) {
    return false;
  }
  if (finding.match_offset > view.size() || sig->pattern.size() > view.size() - finding.match_offset) return false;
  return std::equal(sig->pattern.begin(), sig->pattern.end(),
                    view.begin() + static_cast<std::ptrdiff_t>(finding.match_offset));
}

inline ScanReport scan(ByteView input, const SignatureSet& signatures, const ScanOptions& opts = {},
                       std::string path = {}) {
  if (signatures.empty()) throw SignatureError("scan needs at least one signature");

  ScanReport report;
  report.target = {std::move(path), compute_digests(input), input.size()};
  report.max_depth = opts.max_depth;

  const ParsedContainer parsed = parse_container(input);
  report.format = parsed.format;
  report.well_formed = parsed.well_formed;
  report.regions = parsed.regions;
  report.diagnostics = parsed.diagnostics;

  const ByteRegion* trailer = parsed.trailer();
  if (trailer) {
    const ByteView tail = input.subspan(trailer->offset, trailer->length);
    const ParsedContainer nested = parse_container(tail);
    if (nested.format.kind != FormatKind::unknown) {
      report.diagnostics.push_back("post-EOF trailer at offset " + std::to_string(trailer->offset) + " parses as " +
                                   std::string(to_string(nested.format.kind)) + " (nested container)");
      for (const auto& r : nested.regions)
        report.nested_regions.push_back({r.offset + trailer->offset, r.length, r.kind, "nested/" + r.label});
      if (const ByteRegion* inner = nested.trailer();
          inner && detect_format(tail.subspan(inner->offset, inner->length)).kind != FormatKind::unknown)
        report.diagnostics.push_back("container nesting deeper than one level at offset " +
                                     std::to_string(inner->offset + trailer->offset) + " not followed");
    }
  }

  std::vector<detail::ScanUnit> units{{std::nullopt, true}};
  const auto is_deep = [](RegionKind k) { return k == RegionKind::metadata || k == RegionKind::post_eof_trailer; };
  for (const auto& r : report.regions) units.push_back({r, is_deep(r.kind)});
  for (const auto& r : report.nested_regions) units.push_back({r, is_deep(r.kind)});

  std::vector<Finding> raw;
  for (const auto& unit : units) {
    const ByteView bytes = unit.region ? input.subspan(unit.region->offset, unit.region->length) : input;
    InverseViewSet views;
    if (unit.deep) {
      views = inverse_views(bytes, opts.max_depth, opts.search);
      if (views.truncated)
        report.diagnostics.push_back("search truncated at " + std::to_string(views.views.size()) + " views (" +
                                     (unit.region ? "region at offset " + std::to_string(unit.region->offset)
                                                  : std::string("whole file")) +
                                     ")");
    } else {
      views.views.push_back({{}, Bytes(bytes.begin(), bytes.end())});
    }
    for (const auto& view : views.views) {
      for (const auto& sig : signatures) {
        for (const std::size_t hit : find_all(view.bytes, sig.pattern)) {
          if (detail::redundant_strip_match(bytes, view.chain, hit, sig.pattern.size())) continue;
          Finding f;
          f.signature_id = sig.id;
          f.region = unit.region;
          f.chain = view.chain;
          f.match_offset = hit;
          if (detail::preserves_offsets(view.chain)) f.file_offset = (unit.region ? unit.region->offset : 0) + hit;
          const ByteView matched = ByteView(view.bytes).subspan(hit, sig.pattern.size());
          f.matched_length = matched.size();
          f.matched_digest = compute_digests(matched);
          f.defanged_excerpt = detail::defang_match(matched);
          raw.push_back(std::move(f));
        }
      }
    }
  }

  // Offset-preserving findings collapse onto (signature, file offset); the
  // narrowest region with the shortest chain wins.
  const auto scope_len = [&](const Finding& f) { return f.region ? f.region->length : input.size() + 1; };
  std::map<std::pair<std::string, std::size_t>, std::size_t> resolved;
  std::vector<Finding> kept;
  for (auto& f : raw) {
    if (!f.file_offset) {
      kept.push_back(std::move(f));
      continue;
    }
    const auto key = std::pair{f.signature_id, *f.file_offset};
    const auto it = resolved.find(key);
    if (it == resolved.end()) {
      resolved.emplace(key, kept.size());
      kept.push_back(std::move(f));
      continue;
    }
    Finding& prev = kept[it->second];
    if (std::pair{scope_len(f), f.chain.size()} < std::pair{scope_len(prev), prev.chain.size()}) prev = std::move(f);
  }
  const auto sort_key = [&](const Finding& f) {
    return std::tuple{f.region ? f.region->offset : 0, f.chain.size(), f.signature_id, f.region.has_value(),
                      f.region ? f.region->length : 0, to_string(f.chain), f.match_offset};
  };
  std::sort(kept.begin(), kept.end(), [&](const Finding& a, const Finding& b) { return sort_key(a) < sort_key(b); });
  report.findings = std::move(kept);

  report.entropy_whole = shannon_entropy(input);
  for (const auto& r : report.regions)
    report.entropy_per_region.push_back({r, shannon_entropy(input.subspan(r.offset, r.length))});

  const auto strings = extract_strings(input, opts.string_min_len);
  for (std::size_t i = 0; i < strings.size() && i < opts.max_strings; ++i)
    report.strings.push_back({strings[i].offset, strings[i].text.size(),
                              detail::defang_text(strings[i].text, opts.string_excerpt_len, signatures)});
  if (strings.size() > opts.max_strings)
    report.diagnostics.push_back("strings summary limited to " + std::to_string(opts.max_strings) + " of " +
                                 std::to_string(strings.size()));

  std::vector<std::string> heuristics;
  if (trailer && trailer->length >= opts.heuristics.trailer_min_bytes)
    heuristics.push_back("heuristic: post-EOF trailer of " + std::to_string(trailer->length) + " bytes at offset " +
                         std::to_string(trailer->offset));
  for (const auto& re : report.entropy_per_region) {
    if (re.region.kind == RegionKind::metadata && re.entropy > opts.heuristics.metadata_entropy)
      heuristics.push_back("heuristic: metadata region " + re.region.label + " at offset " +
                           std::to_string(re.region.offset) + " has entropy " + std::to_string(re.entropy));
  }
  for (const auto& run : find_base64_runs(input, opts.heuristics.base64_magic_run)) {
    auto decoded = detail::decode_run(input, run);
    if (decoded && detect_format(decoded->second).kind != FormatKind::unknown)
      heuristics.push_back("heuristic: base64 run at offset " + std::to_string(run.offset) + " decodes to " +
                           std::string(to_string(detect_format(decoded->second).kind)));
  }

  if (!report.findings.empty()) {
    report.verdict = Verdict::signature_match;
  } else if (!heuristics.empty()) {
    report.verdict = Verdict::suspicious;
  }
  report.diagnostics.insert(report.diagnostics.end(), heuristics.begin(), heuristics.end());
  return report;
}

}  // namespace stegscan
