#pragma once

// Manifest-driven attack corpus: generation of crafted carriers plus clean
// controls, and a verifier that scans every file against its expectation.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "stegscan/carriers.hpp"
#include "stegscan/crafter.hpp"
#include "stegscan/io.hpp"
#include "stegscan/report_io.hpp"
#include "stegscan/scanner.hpp"

namespace stegscan {

inline constexpr std::string_view kWholeFileScope = "whole_file";

struct RecipeSpec {
  Protocol protocol = Protocol::append_post_eof;
  std::string carrier = "jpeg";   // name understood by carriers::carrier_by_name
  std::string payload = "eicar";  // "eicar", "hex:..." or "text:..."
  TransformChain chain;
  std::vector<Mutation> mutations;
};

struct Expectation {
  bool detect = true;
  std::string region_kind;  // a RegionKind name or "whole_file"
  std::vector<StepKind> chain;
  std::size_t min_depth = 0;

  bool operator==(const Expectation&) const = default;
};

struct CorpusEntry {
  std::string id;
  RecipeSpec recipe;
  Expectation expected;
};

struct CorpusManifest {
  std::string version = "1";
  std::vector<CorpusEntry> entries;
};

enum class EntryRole { attack, control };

struct IndexEntry {
  std::string id;
  std::string file;  // relative to the index directory
  EntryRole role = EntryRole::attack;
  bool base64_stored = false;
  DigestSet digests;
  Expectation expected;
};

struct CorpusIndex {
  std::string version;
  std::vector<IndexEntry> entries;
};

struct GenerateOptions {
  bool defang_on_disk = false;  // store every file base64-wrapped
};

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

inline std::vector<StepKind> parse_kinds(const nlohmann::json& arr, const std::string& where) {
  std::vector<StepKind> out;
  for (const auto& s : arr) {
    const auto k = step_kind_from_string(s.get<std::string>());
    if (!k) throw Error(where + ": unknown transform '" + s.get<std::string>() + "'");
    out.push_back(*k);
  }
  return out;
}

inline Json kinds_to_json(const std::vector<StepKind>& kinds) {
  Json arr = Json::array();
  for (auto k : kinds) arr.push_back(std::string(to_string(k)));
  return arr;
}

inline Json expectation_to_json(const Expectation& e) {
  return Json{{"detect", e.detect},
              {"region_kind", e.region_kind},
              {"chain", kinds_to_json(e.chain)},
              {"min_depth", e.min_depth}};
}

inline Expectation expectation_from_json(const nlohmann::json& j, const std::string& where) {
  Expectation e;
  e.detect = j.at("detect").get<bool>();
  e.region_kind = j.value("region_kind", std::string{});
  e.chain = parse_kinds(j.value("chain", nlohmann::json::array()), where);
  e.min_depth = j.value("min_depth", std::size_t{0});
  if (e.detect && e.region_kind != kWholeFileScope && !region_kind_from_string(e.region_kind))
    throw Error(where + ": unknown region kind '" + e.region_kind + "'");
  return e;
}

}  // namespace detail

inline Json manifest_to_json(const CorpusManifest& m) {
  Json entries = Json::array();
  for (const auto& e : m.entries) {
    Json muts = Json::array();
    for (auto mu : e.recipe.mutations) muts.push_back(std::string(to_string(mu)));
    entries.push_back(Json{{"id", e.id},
                           {"recipe",
                            Json{{"protocol", std::string(to_string(e.recipe.protocol))},
                                 {"carrier", e.recipe.carrier},
                                 {"payload", e.recipe.payload},
                                 {"chain", detail::kinds_to_json(e.recipe.chain.kinds())},
                                 {"mutations", muts}}},
                           {"expected", detail::expectation_to_json(e.expected)}});
  }
  return Json{{"version", m.version}, {"entries", entries}};
}

inline CorpusManifest manifest_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("manifest is not valid JSON: ") + e.what());
  }
  CorpusManifest m;
  try {
    m.version = j.value("version", std::string("1"));
    std::set<std::string> ids;
    for (const auto& je : j.at("entries")) {
      CorpusEntry e;
      e.id = je.at("id").get<std::string>();
      const std::string where = "entry '" + e.id + "'";
      if (e.id.empty() || e.id.find_first_of("/\\") != std::string::npos || e.id.starts_with("."))
        throw Error(where + ": id must be a plain file stem");
      if (!ids.insert(e.id).second) throw Error("duplicate entry id '" + e.id + "'");
      const auto& jr = je.at("recipe");
      const auto proto = protocol_from_string(jr.at("protocol").get<std::string>());
      if (!proto) throw Error(where + ": unknown protocol");
      e.recipe.protocol = *proto;
      e.recipe.carrier = jr.value("carrier", std::string("jpeg"));
      e.recipe.payload = jr.value("payload", std::string("eicar"));
      for (auto k : detail::parse_kinds(jr.value("chain", nlohmann::json::array()), where))
        e.recipe.chain.steps.push_back({k, std::nullopt});
      for (const auto& mu : jr.value("mutations", nlohmann::json::array())) {
        const auto parsed = mutation_from_string(mu.get<std::string>());
        if (!parsed) throw Error(where + ": unknown mutation '" + mu.get<std::string>() + "'");
        e.recipe.mutations.push_back(*parsed);
      }
      e.expected = detail::expectation_from_json(je.at("expected"), where);
      m.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

inline Json index_to_json(const CorpusIndex& idx) {
  Json entries = Json::array();
  for (const auto& e : idx.entries) {
    entries.push_back(Json{{"id", e.id},
                           {"file", e.file},
                           {"role", e.role == EntryRole::attack ? "attack" : "control"},
                           {"storage", e.base64_stored ? "base64" : "raw"},
                           {"digests", to_json(e.digests)},
                           {"expected", detail::expectation_to_json(e.expected)}});
  }
  return Json{{"version", idx.version}, {"entries", entries}};
}

inline CorpusIndex index_from_json(std::string_view text) {
  CorpusIndex idx;
  try {
    const auto j = nlohmann::json::parse(text);
    idx.version = j.value("version", std::string("1"));
    for (const auto& je : j.at("entries")) {
      IndexEntry e;
      e.id = je.at("id").get<std::string>();
      e.file = je.at("file").get<std::string>();
      e.role = je.at("role").get<std::string>() == "control" ? EntryRole::control : EntryRole::attack;
      e.base64_stored = je.value("storage", std::string("raw")) == "base64";
      const auto& d = je.at("digests");
      e.digests = {d.at("md5").get<std::string>(), d.at("sha1").get<std::string>(), d.at("sha256").get<std::string>()};
      e.expected = detail::expectation_from_json(je.at("expected"), "entry '" + e.id + "'");
      idx.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed corpus index: ") + e.what());
  }
  return idx;
}

// ---------------------------------------------------------------------------
// Default manifest

inline CorpusManifest default_manifest() {
  CorpusManifest m;
  const auto add = [&m](std::string id, RecipeSpec recipe, std::string region, std::vector<StepKind> chain) {
    const std::size_t depth = chain.size();
    m.entries.push_back({std::move(id), std::move(recipe), {true, std::move(region), std::move(chain), depth}});
  };
  const std::string trailer(to_string(RegionKind::post_eof_trailer));
  const std::string metadata(to_string(RegionKind::metadata));
  const std::string whole(kWholeFileScope);
  using S = StepKind;

  for (const std::string c : {"jpeg", "jpeg-gradient", "jpeg-restart"}) {
    add(c + "-append", {Protocol::append_post_eof, c, "eicar", {}, {}}, trailer, {});
    add(c + "-metadata", {Protocol::metadata_embed, c, "eicar", {}, {}}, metadata, {});
    add(c + "-reverse", {Protocol::obfuscated_append, c, "eicar", {S::reverse}, {}}, trailer, {S::reverse});
    add(c + "-b64-reverse", {Protocol::obfuscated_append, c, "eicar", {S::reverse, S::base64_encode}, {}}, trailer,
        {S::base64_decode, S::reverse});
    add(c + "-base64-wrap", {Protocol::base64_wrap, c, "eicar", {}, {}}, whole, {S::base64_decode});
    add(c + "-linebreak", {Protocol::append_post_eof, c, "eicar", {}, {Mutation::insert_linebreak_mid_signature}},
        trailer, {S::strip_linebreaks});
    add(c + "-trailing-space", {Protocol::append_post_eof, c, "eicar", {}, {Mutation::append_trailing_space}}, trailer,
        {});
  }
  add("jpeg-b64-b64", {Protocol::obfuscated_append, "jpeg", "eicar", {S::base64_encode, S::base64_encode}, {}}, trailer,
      {S::base64_decode, S::base64_decode});
  for (const std::string c : {"png", "gif", "bmp"}) {
    add(c + "-append", {Protocol::append_post_eof, c, "eicar", {}, {}}, trailer, {});
    add(c + "-reverse", {Protocol::obfuscated_append, c, "eicar", {S::reverse}, {}}, trailer, {S::reverse});
    add(c + "-b64", {Protocol::obfuscated_append, c, "eicar", {S::base64_encode}, {}}, trailer, {S::base64_decode});
    add(c + "-base64-wrap", {Protocol::base64_wrap, c, "eicar", {}, {}}, whole, {S::base64_decode});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Generation

inline Bytes resolve_payload(const std::string& ref) {
  if (ref == "eicar") return eicar::payload();
  if (ref.starts_with("text:")) return to_bytes(std::string_view(ref).substr(5));
  if (ref.starts_with("hex:")) return detail::decode_hex(std::string_view(ref).substr(4));
  throw CraftError("unknown payload reference '" + ref + "'");
}

inline std::string extension_for(const CorpusEntry& e, ByteView carrier) {
  if (e.recipe.protocol == Protocol::base64_wrap) return "b64";
  switch (detect_format(carrier).kind) {
    case FormatKind::jpeg: return "jpg";
    case FormatKind::png: return "png";
    case FormatKind::gif: return "gif";
    case FormatKind::bmp: return "bmp";
    case FormatKind::unknown: break;
  }
  return "bin";
}

inline Bytes build_entry(const CorpusEntry& e) {
  const auto carrier = carriers::carrier_by_name(e.recipe.carrier);
  if (!carrier) throw CraftError("unknown carrier '" + e.recipe.carrier + "'");
  CraftRecipe recipe;
  recipe.protocol = e.recipe.protocol;
  recipe.carrier = *carrier;
  recipe.payload = e.recipe.payload == "eicar" ? PayloadSpec::eicar() : PayloadSpec::user(resolve_payload(e.recipe.payload));
  recipe.chain = e.recipe.chain;
  recipe.mutations = e.recipe.mutations;
  return craft(recipe);
}

inline CorpusIndex generate_corpus(const CorpusManifest& manifest, const std::filesystem::path& out_dir,
                                   const GenerateOptions& opts = {}) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  struct Job {
    std::string id;
    EntryRole role;
    Expectation expected;
    std::function<std::pair<Bytes, std::string>()> make;
  };
  std::vector<Job> jobs;
  for (const auto& e : manifest.entries) {
    jobs.push_back({e.id, EntryRole::attack, e.expected, [&e] {
                      Bytes bytes = build_entry(e);
                      const auto carrier = carriers::carrier_by_name(e.recipe.carrier);
                      return std::pair{std::move(bytes), extension_for(e, *carrier)};
                    }});
  }
  for (auto& c : carriers::clean_controls()) {
    jobs.push_back({c.name, EntryRole::control, {false, "", {}, 0},
                    [c] { return std::pair{c.bytes, c.extension}; }});
  }

  CorpusIndex index;
  index.version = manifest.version;
  index.entries.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    std::pair<Bytes, std::string> built;
    try {
      built = job.make();
    } catch (const Error& err) {
      throw CraftError("entry '" + job.id + "': " + err.what());
    }
    auto& [bytes, ext] = built;
    std::string file = job.id + "." + ext;
    if (opts.defang_on_disk) {
      bytes = craft_base64_wrap(bytes);
      file += ".b64";
    }
    write_file(out_dir / file, bytes);
    index.entries[i] = {job.id, file, job.role, opts.defang_on_disk, compute_digests(bytes), job.expected};
  });

  write_file(out_dir / "index.json", to_bytes(index_to_json(index).dump(2) + "\n"));
  return index;
}

// ---------------------------------------------------------------------------
// Verification

enum class EntryStatus { pass, fail, expected_miss };

inline std::string_view to_string(EntryStatus s) {
  switch (s) {
    case EntryStatus::pass: return "pass";
    case EntryStatus::fail: return "fail";
    case EntryStatus::expected_miss: return "expected_miss";
  }
  return "fail";
}

struct EntryResult {
  std::string id;
  EntryRole role = EntryRole::attack;
  EntryStatus status = EntryStatus::fail;
  bool detected = false;
  std::size_t findings = 0;
  std::string detail;
};

struct VerificationSummary {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t expected_misses = 0;
  std::size_t attack_total = 0;
  std::size_t attack_detected = 0;
  std::size_t control_total = 0;
  std::size_t control_false_positives = 0;

  double detection_rate() const {
    return attack_total == 0 ? 0.0 : static_cast<double>(attack_detected) / static_cast<double>(attack_total);
  }
  double false_positive_rate() const {
    return control_total == 0 ? 0.0
                              : static_cast<double>(control_false_positives) / static_cast<double>(control_total);
  }
};

struct VerificationResult {
  std::size_t max_depth = 0;
  std::vector<EntryResult> entries;
  VerificationSummary summary;

  bool all_passed() const { return summary.failed == 0; }
};

inline bool finding_matches(const Finding& f, const Expectation& e) {
  const bool scope_ok = f.region ? to_string(f.region->kind) == e.region_kind : e.region_kind == kWholeFileScope;
  return scope_ok && f.chain.kinds() == e.chain && f.chain.size() >= e.min_depth;
}

inline EntryResult verify_entry(const IndexEntry& entry, ByteView stored, std::size_t max_depth,
                                const SignatureSet& signatures) {
  EntryResult r{entry.id, entry.role, EntryStatus::fail, false, 0, {}};
  Bytes bytes(stored.begin(), stored.end());
  if (entry.base64_stored) {
    auto decoded = base64::try_decode(bytes);
    if (!decoded) {
      r.detail = "stored file is not valid base64";
      return r;
    }
    bytes = std::move(*decoded);
  }
  ScanOptions opts;
  opts.max_depth = max_depth;
  const ScanReport report = scan(bytes, signatures, opts, entry.file);
  r.findings = report.findings.size();
  r.detected = !report.findings.empty();
  const Expectation& e = entry.expected;

  if (!e.detect) {
    r.status = r.detected ? EntryStatus::fail : EntryStatus::pass;
    r.detail = r.detected ? "unexpected finding" : "no findings";
    return r;
  }
  if (!r.detected) {
    if (max_depth < e.min_depth) {
      r.status = EntryStatus::expected_miss;
      r.detail = "needs depth " + std::to_string(e.min_depth);
    } else {
      r.detail = "not detected";
    }
    return r;
  }
  const bool matched = std::any_of(report.findings.begin(), report.findings.end(),
                                   [&](const Finding& f) { return finding_matches(f, e); });
  if (matched) {
    r.status = EntryStatus::pass;
    r.detail = "detected";
  } else {
    r.detail = "detected, but no finding in " + e.region_kind + " via expected chain";
  }
  return r;
}

inline VerificationResult verify_corpus(const std::filesystem::path& index_path, std::size_t max_depth,
                                        const SignatureSet& signatures = default_signatures()) {
  const Bytes raw_index = read_file(index_path);
  const CorpusIndex index = index_from_json(to_string(raw_index));
  const auto dir = index_path.parent_path();

  VerificationResult result;
  result.max_depth = max_depth;
  result.entries.resize(index.entries.size());
  parallel_for(index.entries.size(), [&](std::size_t i) {
    const IndexEntry& entry = index.entries[i];
    try {
      result.entries[i] = verify_entry(entry, read_file(dir / entry.file), max_depth, signatures);
    } catch (const Error& err) {
      result.entries[i] = {entry.id, entry.role, EntryStatus::fail, false, 0, err.what()};
    }
  });

  auto& s = result.summary;
  for (const auto& r : result.entries) {
    if (r.status == EntryStatus::pass) ++s.passed;
    if (r.status == EntryStatus::fail) ++s.failed;
    if (r.status == EntryStatus::expected_miss) ++s.expected_misses;
    if (r.role == EntryRole::attack) {
      ++s.attack_total;
      if (r.detected) ++s.attack_detected;
    } else {
      ++s.control_total;
      if (r.detected) ++s.control_false_positives;
    }
  }
  return result;
}

inline Json verification_to_json(const VerificationResult& v) {
  Json entries = Json::array();
  for (const auto& e : v.entries)
    entries.push_back(Json{{"id", e.id},
                           {"role", e.role == EntryRole::attack ? "attack" : "control"},
                           {"status", std::string(to_string(e.status))},
                           {"detected", e.detected},
                           {"findings", e.findings},
                           {"detail", e.detail}});
  const auto& s = v.summary;
  return Json{{"max_depth", v.max_depth},
              {"entries", entries},
              {"summary",
               Json{{"passed", s.passed},
                    {"failed", s.failed},
                    {"expected_misses", s.expected_misses},
                    {"attack_total", s.attack_total},
                    {"attack_detected", s.attack_detected},
                    {"detection_rate", s.detection_rate()},
                    {"control_total", s.control_total},
                    {"control_false_positives", s.control_false_positives},
                    {"false_positive_rate", s.false_positive_rate()}}}};
}

}  // namespace stegscan
