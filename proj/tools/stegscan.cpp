// stegscan: craft, inspect and scan image carriers for embedded test payloads.

#include <cstdio>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stegscan.hpp"

namespace {

using namespace stegscan;

void emit(const std::string& text) {
  std::fwrite(text.data(), 1, text.size(), stdout);
  std::fflush(stdout);
}

void emit_json(const Json& j) { emit(j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n"); }

Bytes parse_marker(const std::string& arg) {
  if (arg.starts_with("hex:")) return detail::decode_hex(std::string_view(arg).substr(4));
  return to_bytes(arg);
}

Bytes load_carrier(const std::string& arg) {
  if (arg.starts_with("builtin:")) {
    const auto name = arg.substr(8);
    if (auto c = carriers::carrier_by_name(name)) return *c;
    throw Error("unknown built-in carrier '" + name + "'");
  }
  return read_file(arg);
}

SignatureSet load_signatures(const std::string& path) {
  if (path.empty()) return default_signatures();
  return parse_signature_file(to_string(read_file(path)));
}

int cmd_inspect(const std::string& file, bool as_json, bool with_hex) {
  const Bytes bytes = read_file(file);
  const ParsedContainer pc = parse_container(bytes);
  if (as_json) {
    Json regions = Json::array();
    for (const auto& r : pc.regions) {
      Json jr = to_json(r);
      jr["entropy"] = shannon_entropy(ByteView(bytes).subspan(r.offset, r.length));
      regions.push_back(std::move(jr));
    }
    emit_json(Json{{"path", file},
                   {"length", bytes.size()},
                   {"format", to_json(pc.format)},
                   {"well_formed", pc.well_formed},
                   {"regions", regions},
                   {"diagnostics", pc.diagnostics}});
    return 0;
  }
  std::string out = file + ": " + std::string(to_string(pc.format.kind)) + ", " + std::to_string(bytes.size()) +
                    " bytes, " + (pc.well_formed ? "well-formed" : "malformed") + "\n";
  char line[160];
  std::snprintf(line, sizeof line, "  %-10s %-10s %-18s %-22s %s\n", "offset", "length", "kind", "label", "entropy");
  out += line;
  for (const auto& r : pc.regions) {
    std::snprintf(line, sizeof line, "  %-10zu %-10zu %-18s %-22s %.3f\n", r.offset, r.length,
                  std::string(to_string(r.kind)).c_str(), r.label.c_str(),
                  shannon_entropy(ByteView(bytes).subspan(r.offset, r.length)));
    out += line;
    if (with_hex && (r.kind == RegionKind::metadata || r.kind == RegionKind::post_eof_trailer))
      out += hexdump(bytes, r.offset, std::min<std::size_t>(r.length, 64));
  }
  for (const auto& d : pc.diagnostics) out += "  note: " + d + "\n";
  emit(out);
  return 0;
}

struct CraftArgs {
  std::string protocol;
  std::string carrier;
  std::string payload = "eicar";
  std::string chain;
  std::vector<std::string> mutations;
  std::string out;
};

int cmd_craft(const CraftArgs& a) {
  CraftRecipe recipe;
  const auto proto = protocol_from_string(a.protocol);
  if (!proto) throw Error("unknown protocol '" + a.protocol + "'");
  recipe.protocol = *proto;
  recipe.carrier = load_carrier(a.carrier);
  if (a.payload == "eicar") {
    recipe.payload = PayloadSpec::eicar();
  } else {
    std::cerr << "notice: embedding user-supplied payload from " << a.payload << "\n";
    recipe.payload = PayloadSpec::user(read_file(a.payload));
  }
  if (!a.chain.empty()) {
    std::string_view rest = a.chain;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto name = rest.substr(0, comma);
      const auto step = parse_step(name);
      if (!step) throw Error("unknown transform '" + std::string(name) + "'");
      recipe.chain.steps.push_back(*step);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }
  for (const auto& m : a.mutations) {
    const auto mu = mutation_from_string(m);
    if (!mu) throw Error("unknown mutation '" + m + "'");
    recipe.mutations.push_back(*mu);
  }
  const Bytes out = craft(recipe);
  write_file(a.out, out);
  std::cerr << "wrote " << out.size() << " bytes to " << a.out << "\n";
  return 0;
}

int cmd_split(const std::string& file, const std::string& marker, std::string out1, std::string out2) {
  const Bytes bytes = read_file(file);
  const auto result = split_at_marker(bytes, parse_marker(marker));
  if (out1.empty()) out1 = file + ".part1";
  if (out2.empty()) out2 = file + ".part2";
  write_file(out1, result.part1);
  write_file(out2, result.part2);
  if (!result.found) {
    std::cerr << "marker not found; " << out2 << " is empty\n";
  }
  emit(out1 + "\t" + std::to_string(result.part1.size()) + "\n" + out2 + "\t" + std::to_string(result.part2.size()) +
       "\n");
  return 0;
}

struct ScanArgs {
  std::vector<std::string> files;
  std::size_t depth = 2;
  bool json = false;
  bool deterministic = false;
  std::string signatures;
};

int cmd_scan(const ScanArgs& a) {
  const SignatureSet sigs = load_signatures(a.signatures);
  ScanOptions opts;
  opts.max_depth = a.depth;
  struct Outcome {
    std::optional<ScanReport> report;
    std::string error;
  };
  std::vector<std::future<Outcome>> jobs;
  for (const auto& f : a.files) {
    jobs.push_back(std::async(std::launch::async, [&sigs, &opts, f]() -> Outcome {
      try {
        return {scan(read_file(f), sigs, opts, f), {}};
      } catch (const std::exception& e) {
        return {std::nullopt, e.what()};
      }
    }));
  }
  // Reports go out whole and in input order.
  int code = 0;
  bool any_error = false;
  bool any_match = false;
  bool any_suspicious = false;
  const bool multi_json = a.json && a.files.size() > 1;
  if (multi_json) emit("[\n");
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    Outcome o = jobs[i].get();
    if (!o.report) {
      std::cerr << a.files[i] << ": " << o.error << "\n";
      any_error = true;
      continue;
    }
    const RenderOptions ropts{a.deterministic};
    std::string text = render_report(*o.report, a.json ? Media::json : Media::text, ropts).str();
    if (multi_json) {
      if (i + 1 < jobs.size()) text.insert(text.size() - 1, ",");
    } else if (!a.json && a.files.size() > 1) {
      text += "\n";
    }
    emit(text);
    any_match |= o.report->verdict == Verdict::signature_match;
    any_suspicious |= o.report->verdict == Verdict::suspicious;
  }
  if (multi_json) emit("]\n");
  if (any_error) {
    code = kOperationalError;
  } else if (any_match) {
    code = 1;
  } else if (any_suspicious) {
    code = 2;
  }
  return code;
}

int cmd_hash(const std::vector<std::string>& files, bool as_json) {
  Json all = Json::array();
  std::string out;
  for (const auto& f : files) {
    const Bytes bytes = read_file(f);
    const DigestSet d = compute_digests(bytes);
    if (as_json) {
      all.push_back(Json{{"path", f}, {"length", bytes.size()}, {"digests", to_json(d)}});
    } else {
      out += "md5     " + d.md5 + "  " + f + "\n";
      out += "sha1    " + d.sha1 + "  " + f + "\n";
      out += "sha256  " + d.sha256 + "  " + f + "\n";
    }
  }
  if (as_json) {
    emit_json(all.size() == 1 ? all[0] : all);
  } else {
    emit(out);
  }
  return 0;
}

int cmd_strings(const std::string& file, std::size_t min_len, bool as_json) {
  const Bytes bytes = read_file(file);
  const auto strings = extract_strings(bytes, min_len);
  if (as_json) {
    Json arr = Json::array();
    for (const auto& s : strings) arr.push_back(Json{{"offset", s.offset}, {"text", s.text}});
    emit_json(Json{{"path", file}, {"min_len", min_len}, {"strings", arr}});
    return 0;
  }
  std::string out;
  char buf[24];
  for (const auto& s : strings) {
    std::snprintf(buf, sizeof buf, "%8zx  ", s.offset);
    out += buf + s.text + "\n";
  }
  emit(out);
  return 0;
}

int cmd_entropy(const std::string& file, bool per_region, bool as_json) {
  const Bytes bytes = read_file(file);
  const double whole = shannon_entropy(bytes);
  const ParsedContainer pc = per_region ? parse_container(bytes) : ParsedContainer{};
  if (as_json) {
    Json j{{"path", file}, {"length", bytes.size()}, {"bits_per_byte", whole}};
    if (per_region) {
      Json regions = Json::array();
      for (const auto& r : pc.regions) {
        Json jr = to_json(r);
        jr["bits_per_byte"] = shannon_entropy(ByteView(bytes).subspan(r.offset, r.length));
        regions.push_back(std::move(jr));
      }
      j["regions"] = regions;
    }
    emit_json(j);
    return 0;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.6f  %s\n", whole, file.c_str());
  std::string out = buf;
  if (per_region) {
    for (const auto& r : pc.regions) {
      std::snprintf(buf, sizeof buf, "  %.6f  %-10zu %-10zu %s\n",
                    shannon_entropy(ByteView(bytes).subspan(r.offset, r.length)), r.offset, r.length, r.label.c_str());
      out += buf;
    }
  }
  emit(out);
  return 0;
}

int cmd_corpus_gen(const std::string& manifest, const std::string& out_dir, bool defang) {
  const CorpusManifest m =
      manifest.empty() || manifest == "default" ? default_manifest() : manifest_from_json(to_string(read_file(manifest)));
  const CorpusIndex idx = generate_corpus(m, out_dir, {defang});
  std::size_t attacks = 0;
  for (const auto& e : idx.entries) attacks += e.role == EntryRole::attack;
  emit("generated " + std::to_string(idx.entries.size()) + " files (" + std::to_string(attacks) + " attack, " +
       std::to_string(idx.entries.size() - attacks) + " control) in " + out_dir + "\n");
  return 0;
}

int cmd_corpus_verify(const std::string& index, std::size_t depth, bool as_json) {
  const VerificationResult v = verify_corpus(index, depth);
  if (as_json) {
    emit_json(verification_to_json(v));
  } else {
    std::string out;
    char buf[200];
    for (const auto& e : v.entries) {
      std::snprintf(buf, sizeof buf, "%-14s %-30s %s\n", std::string(to_string(e.status)).c_str(), e.id.c_str(),
                    e.detail.c_str());
      out += buf;
    }
    const auto& s = v.summary;
    std::snprintf(buf, sizeof buf,
                  "depth %zu: %zu passed, %zu failed, %zu expected misses; detection %.1f%% (%zu/%zu), "
                  "false positives %zu/%zu\n",
                  v.max_depth, s.passed, s.failed, s.expected_misses, 100.0 * s.detection_rate(), s.attack_detected,
                  s.attack_total, s.control_false_positives, s.control_total);
    out += buf;
    emit(out);
  }
  return v.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  // -o1/-o2 are not valid CLI11 short names.
  std::vector<std::string> args(argv, argv + argc);
  for (auto& a : args) {
    if (a == "-o1") a = "--o1";
    if (a == "-o2") a = "--o2";
  }

  CLI::App app{"stegscan: image carrier crafting and payload scanning"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1, 1);

  bool json = false;
  bool hex = false;
  std::string file;

  auto* inspect = app.add_subcommand("inspect", "Print the region table of a container file");
  inspect->add_option("file", file, "Input file")->required();
  inspect->add_flag("--json", json, "Emit JSON");
  inspect->add_flag("--hexdump", hex, "Hex dump the head of metadata and trailer regions");

  CraftArgs craft_args;
  auto* craft_cmd = app.add_subcommand("craft", "Build a carrier using one embedding protocol");
  craft_cmd->add_option("--protocol", craft_args.protocol, "append | metadata | obfuscated | base64")->required();
  craft_cmd->add_option("--carrier", craft_args.carrier, "Carrier image path or builtin:NAME")->required();
  craft_cmd->add_option("--payload", craft_args.payload, "eicar (default) or a payload file");
  craft_cmd->add_option("--chain", craft_args.chain, "Comma-separated forward transforms");
  craft_cmd->add_option("--mutate", craft_args.mutations, "linebreak | trailing_space (repeatable)");
  craft_cmd->add_option("-o,--out", craft_args.out, "Output path")->required();

  std::string marker;
  std::string out1;
  std::string out2;
  auto* split = app.add_subcommand("split", "Split a file at the first occurrence of a marker");
  split->add_option("file", file, "Input file")->required();
  split->add_option("--marker", marker, "Marker text or hex:BYTES")->required();
  split->add_option("--o1", out1, "Output for the bytes before the marker (-o1)");
  split->add_option("--o2", out2, "Output for the marker onward (-o2)");

  ScanArgs scan_args;
  auto* scan_cmd = app.add_subcommand("scan", "Scan files for signatures");
  scan_cmd->add_option("files", scan_args.files, "Input files")->required();
  scan_cmd->add_option("--depth", scan_args.depth, "Inverse transform search depth")->check(CLI::Range(0, 8));
  scan_cmd->add_flag("--json", scan_args.json, "Emit JSON reports");
  scan_cmd->add_option("--signatures", scan_args.signatures, "Signature file");
  scan_cmd->add_flag("--deterministic", scan_args.deterministic, "Omit timestamps");

  std::vector<std::string> hash_files;
  auto* hash = app.add_subcommand("hash", "MD5, SHA-1 and SHA-256 digests");
  hash->add_option("files", hash_files, "Input files")->required();
  hash->add_flag("--json", json, "Emit JSON");

  std::size_t min_len = 4;
  auto* strings = app.add_subcommand("strings", "Printable ASCII strings with offsets");
  strings->add_option("file", file, "Input file")->required();
  strings->add_option("--min", min_len, "Minimum string length")->check(CLI::PositiveNumber);
  strings->add_flag("--json", json, "Emit JSON");

  bool per_region = false;
  auto* entropy = app.add_subcommand("entropy", "Shannon entropy in bits per byte");
  entropy->add_option("file", file, "Input file")->required();
  entropy->add_flag("--per-region", per_region, "Also report each parsed region");
  entropy->add_flag("--json", json, "Emit JSON");

  std::string manifest;
  std::string out_dir;
  bool defang = false;
  auto* gen = app.add_subcommand("corpus-gen", "Generate the attack corpus and clean controls");
  gen->add_option("--manifest", manifest, "Manifest JSON (default: built-in manifest)");
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_flag("--defang", defang, "Store every file base64-wrapped");

  std::string index;
  std::size_t verify_depth = 2;
  auto* verify = app.add_subcommand("corpus-verify", "Scan a generated corpus against its index");
  verify->add_option("--index", index, "index.json path")->required();
  verify->add_option("--depth", verify_depth, "Inverse transform search depth")->check(CLI::Range(0, 8));
  verify->add_flag("--json", json, "Emit JSON");

  std::vector<const char*> cargv;
  for (const auto& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kOperationalError;
  }

  try {
    if (*inspect) return cmd_inspect(file, json, hex);
    if (*craft_cmd) return cmd_craft(craft_args);
    if (*split) return cmd_split(file, marker, out1, out2);
    if (*scan_cmd) return cmd_scan(scan_args);
    if (*hash) return cmd_hash(hash_files, json);
    if (*strings) return cmd_strings(file, min_len, json);
    if (*entropy) return cmd_entropy(file, per_region, json);
    if (*gen) return cmd_corpus_gen(manifest, out_dir, defang);
    if (*verify) return cmd_corpus_verify(index, verify_depth, json);
  } catch (const std::exception& e) {
    std::cerr << "stegscan: " << e.what() << "\n";
    return kOperationalError;
  }
  return kOperationalError;
}
