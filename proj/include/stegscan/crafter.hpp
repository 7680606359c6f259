#pragma once

// Carrier crafting for the four embedding protocols: post-EOF append,
// metadata embed, obfuscated append and whole-file base64 wrap.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stegscan/bytes.hpp"
#include "stegscan/eicar.hpp"
#include "stegscan/format_parser.hpp"
#include "stegscan/transform.hpp"

namespace stegscan {

enum class Protocol { append_post_eof, metadata_embed, obfuscated_append, base64_wrap };

enum class Mutation { insert_linebreak_mid_signature, append_trailing_space };

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::append_post_eof: return "append_post_eof";
    case Protocol::metadata_embed: return "metadata_embed";
    case Protocol::obfuscated_append: return "obfuscated_append";
    case Protocol::base64_wrap: return "base64_wrap";
  }
  return "append_post_eof";
}

inline std::optional<Protocol> protocol_from_string(std::string_view s) {
  for (auto p : {Protocol::append_post_eof, Protocol::metadata_embed, Protocol::obfuscated_append, Protocol::base64_wrap})
    if (to_string(p) == s) return p;
  if (s == "append") return Protocol::append_post_eof;
  if (s == "metadata") return Protocol::metadata_embed;
  if (s == "obfuscated") return Protocol::obfuscated_append;
  if (s == "base64") return Protocol::base64_wrap;
  return std::nullopt;
}

inline std::string_view to_string(Mutation m) {
  switch (m) {
    case Mutation::insert_linebreak_mid_signature: return "insert_linebreak_mid_signature";
    case Mutation::append_trailing_space: return "append_trailing_space";
  }
  return "append_trailing_space";
}

inline std::optional<Mutation> mutation_from_string(std::string_view s) {
  if (s == "insert_linebreak_mid_signature" || s == "linebreak") return Mutation::insert_linebreak_mid_signature;
  if (s == "append_trailing_space" || s == "trailing_space") return Mutation::append_trailing_space;
  return std::nullopt;
}

enum class PayloadSource { builtin_eicar, user_bytes };

struct PayloadSpec {
  PayloadSource source = PayloadSource::builtin_eicar;
  Bytes bytes;

  static PayloadSpec eicar() { return {PayloadSource::builtin_eicar, eicar::payload()}; }
  static PayloadSpec user(Bytes b) { return {PayloadSource::user_bytes, std::move(b)}; }
};

struct CraftRecipe {
  Protocol protocol = Protocol::append_post_eof;
  Bytes carrier;
  PayloadSpec payload = PayloadSpec::eicar();
  TransformChain chain;
  std::vector<Mutation> mutations;
};

// Largest COM payload accepted by craft_metadata.
inline constexpr std::size_t kMaxMetadataPayload = 65531;

inline Bytes craft_append(ByteView carrier, ByteView payload) {
  const auto parsed = parse_container(carrier);
  if (parsed.format.kind == FormatKind::unknown || !parsed.well_formed) {
    std::string why = parsed.diagnostics.empty() ? "not well-formed" : parsed.diagnostics.front();
    throw CraftError("carrier is not a well-formed image: " + why);
  }
  if (parsed.trailer()) throw CraftError("carrier already carries a post-EOF trailer");
  return concat(carrier, payload);
}

inline Bytes craft_metadata(ByteView carrier, ByteView payload) {
  const auto parsed = parse_container(carrier);
  if (parsed.format.kind != FormatKind::jpeg) throw CraftError("metadata embedding supports JPEG carriers only");
  if (!parsed.well_formed) throw CraftError("carrier is not a well-formed JPEG");
  if (payload.size() > kMaxMetadataPayload)
    throw CraftError("payload of " + std::to_string(payload.size()) + " bytes exceeds the " +
                     std::to_string(kMaxMetadataPayload) + "-byte COM limit");

  // After the last APPn in the leading run of segments, or right after SOI.
  std::size_t insert_at = 2;
  for (const auto& r : parsed.regions) {
    if (r.offset == 0) continue;
    if (r.kind == RegionKind::metadata && r.label.starts_with("APP")) {
      insert_at = r.end();
    } else if (r.kind != RegionKind::metadata) {
      break;
    }
  }
  Bytes out(carrier.begin(), carrier.begin() + static_cast<std::ptrdiff_t>(insert_at));
  out.push_back(0xFF);
  out.push_back(0xFE);
  put_be16(out, static_cast<std::uint32_t>(payload.size() + 2));
  out.insert(out.end(), payload.begin(), payload.end());
  out.insert(out.end(), carrier.begin() + static_cast<std::ptrdiff_t>(insert_at), carrier.end());
  return out;
}

inline Bytes craft_obfuscated(ByteView carrier, ByteView payload, const TransformChain& chain) {
  for (const auto& step : chain.steps) {
    if (step.kind != StepKind::identity && step.kind != StepKind::reverse && step.kind != StepKind::base64_encode)
      throw CraftError("obfuscation chain step '" + std::string(to_string(step.kind)) +
                       "' is not an invertible forward transform");
  }
  if (chain.size() > kMaxChainLength) throw CraftError("obfuscation chain longer than " + std::to_string(kMaxChainLength));
  return craft_append(carrier, stegscan::apply(chain, payload));
}

inline Bytes craft_base64_wrap(ByteView carrier_with_payload) { return base64::encode_wrapped(carrier_with_payload, 76); }

struct SplitResult {
  Bytes part1;
  Bytes part2;
  bool found = false;
};

inline SplitResult split_at_marker(ByteView input, ByteView marker) {
  if (marker.empty()) throw Error("split marker must not be empty");
  const auto it = std::search(input.begin(), input.end(), marker.begin(), marker.end());
  if (it == input.end()) return {Bytes(input.begin(), input.end()), {}, false};
  return {Bytes(input.begin(), it), Bytes(it, input.end()), true};
}

inline Bytes mutate_variant(ByteView input, Mutation mutation) {
  Bytes out(input.begin(), input.end());
  switch (mutation) {
    case Mutation::append_trailing_space:
      out.push_back(' ');
      break;
    case Mutation::insert_linebreak_mid_signature: {
      const Bytes sig = eicar::payload();
      const auto it = std::search(input.begin(), input.end(), sig.begin(), sig.end());
      if (it == input.end()) throw CraftError("linebreak mutation needs the canonical signature in the input");
      const auto at = static_cast<std::ptrdiff_t>(it - input.begin()) + static_cast<std::ptrdiff_t>(eicar::kMidpoint);
      out.insert(out.begin() + at, '\n');
      break;
    }
  }
  return out;
}

// Mutations apply to the payload before it is embedded.
inline Bytes craft(const CraftRecipe& recipe) {
  Bytes payload = recipe.payload.bytes;
  for (auto m : recipe.mutations) payload = mutate_variant(payload, m);
  switch (recipe.protocol) {
    case Protocol::append_post_eof: return craft_append(recipe.carrier, payload);
    case Protocol::metadata_embed: return craft_metadata(recipe.carrier, payload);
    case Protocol::obfuscated_append: return craft_obfuscated(recipe.carrier, payload, recipe.chain);
    case Protocol::base64_wrap: return craft_base64_wrap(craft_append(recipe.carrier, payload));
  }
  throw CraftError("unknown protocol");
}

}  // namespace stegscan
