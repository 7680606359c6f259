#pragma once

// Reversible byte transforms. Chains run forward to obfuscate a payload and
// the bounded inverse search (inverse_views) runs them backwards to expose one.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stegscan/bytes.hpp"

namespace stegscan {

enum class StepKind { identity, reverse, base64_encode, base64_decode, strip_linebreaks, strip_trailing_whitespace };

struct ByteSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  bool operator==(const ByteSpan&) const = default;
};

// A base64_decode step produced by the inverse search carries the span of the
// candidate run it decoded; without one it decodes the whole current input.
struct TransformStep {
  StepKind kind = StepKind::identity;
  std::optional<ByteSpan> span;

  bool operator==(const TransformStep&) const = default;
};

inline constexpr std::size_t kMaxChainLength = 8;

struct TransformChain {
  std::vector<TransformStep> steps;

  TransformChain() = default;
  TransformChain(std::initializer_list<StepKind> kinds) {
    for (auto k : kinds) steps.push_back({k, std::nullopt});
  }

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  std::vector<StepKind> kinds() const {
    std::vector<StepKind> out;
    for (const auto& s : steps) out.push_back(s.kind);
    return out;
  }
  bool operator==(const TransformChain&) const = default;
};

inline std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::identity: return "identity";
    case StepKind::reverse: return "reverse";
    case StepKind::base64_encode: return "base64_encode";
    case StepKind::base64_decode: return "base64_decode";
    case StepKind::strip_linebreaks: return "strip_linebreaks";
    case StepKind::strip_trailing_whitespace: return "strip_trailing_whitespace";
  }
  return "identity";
}

inline std::optional<StepKind> step_kind_from_string(std::string_view s) {
  for (auto k : {StepKind::identity, StepKind::reverse, StepKind::base64_encode, StepKind::base64_decode,
                 StepKind::strip_linebreaks, StepKind::strip_trailing_whitespace})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::string to_string(const TransformStep& step) {
  std::string out(to_string(step.kind));
  if (step.span) out += "@" + std::to_string(step.span->offset) + "+" + std::to_string(step.span->length);
  return out;
}

// "identity" for the empty chain, otherwise step names joined by '>'.
inline std::string to_string(const TransformChain& chain) {
  if (chain.empty()) return "identity";
  std::string out;
  for (const auto& s : chain.steps) {
    if (!out.empty()) out += '>';
    out += to_string(s);
  }
  return out;
}

// Accepts "name" or "base64_decode@OFFSET+LENGTH".
inline std::optional<TransformStep> parse_step(std::string_view text) {
  TransformStep step;
  const auto at = text.find('@');
  const auto kind = step_kind_from_string(text.substr(0, at));
  if (!kind) return std::nullopt;
  step.kind = *kind;
  if (at != std::string_view::npos) {
    if (step.kind != StepKind::base64_decode) return std::nullopt;
    const auto rest = std::string(text.substr(at + 1));
    const auto plus = rest.find('+');
    if (plus == std::string::npos) return std::nullopt;
    try {
      step.span = ByteSpan{std::stoull(rest.substr(0, plus)), std::stoull(rest.substr(plus + 1))};
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return step;
}

inline bool is_invertible(StepKind k) {
  return k == StepKind::identity || k == StepKind::reverse || k == StepKind::base64_encode ||
         k == StepKind::base64_decode;
}

// Reversed order, each step inverted. nullopt when any step is lossy.
inline std::optional<TransformChain> inverse(const TransformChain& chain) {
  TransformChain out;
  for (auto it = chain.steps.rbegin(); it != chain.steps.rend(); ++it) {
    if (!is_invertible(it->kind) || it->span) return std::nullopt;
    StepKind k = it->kind;
    if (k == StepKind::base64_encode) {
      k = StepKind::base64_decode;
    } else if (k == StepKind::base64_decode) {
      k = StepKind::base64_encode;
    }
    out.steps.push_back({k, std::nullopt});
  }
  return out;
}

namespace base64 {

inline constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline bool is_alphabet(std::uint8_t c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '/';
}

inline bool is_linebreak(std::uint8_t c) { return c == '\r' || c == '\n'; }

inline int value_of(std::uint8_t c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

inline Bytes encode(ByteView in) {
  Bytes out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= in.size(); i += 3) {
    const std::uint32_t v = (std::uint32_t{in[i]} << 16) | (std::uint32_t{in[i + 1]} << 8) | in[i + 2];
    for (int shift = 18; shift >= 0; shift -= 6) out.push_back(static_cast<std::uint8_t>(kAlphabet[(v >> shift) & 63]));
  }
  const std::size_t rest = in.size() - i;
  if (rest > 0) {
    std::uint32_t v = std::uint32_t{in[i]} << 16;
    if (rest == 2) v |= std::uint32_t{in[i + 1]} << 8;
    out.push_back(static_cast<std::uint8_t>(kAlphabet[(v >> 18) & 63]));
    out.push_back(static_cast<std::uint8_t>(kAlphabet[(v >> 12) & 63]));
    out.push_back(rest == 2 ? static_cast<std::uint8_t>(kAlphabet[(v >> 6) & 63]) : '=');
    out.push_back('=');
  }
  return out;
}

// MIME-style: lines of at most `line_len` characters joined by LF, no final LF.
inline Bytes encode_wrapped(ByteView in, std::size_t line_len = 76) {
  const Bytes flat = encode(in);
  Bytes out;
  out.reserve(flat.size() + flat.size() / line_len);
  for (std::size_t i = 0; i < flat.size(); i += line_len) {
    if (i != 0) out.push_back('\n');
    const std::size_t end = std::min(flat.size(), i + line_len);
    out.insert(out.end(), flat.begin() + static_cast<std::ptrdiff_t>(i), flat.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

// Strict padded base64. CR and LF are skipped anywhere; every other byte
// outside the alphabet, misplaced padding or a partial quantum is an error.
inline std::optional<Bytes> try_decode(ByteView in) {
  Bytes out;
  out.reserve(in.size() / 4 * 3);
  std::uint32_t acc = 0;
  int filled = 0;
  int pads = 0;
  for (const std::uint8_t c : in) {
    if (is_linebreak(c)) continue;
    if (c == '=') {
      if (filled < 2) return std::nullopt;
      ++pads;
      ++filled;
      acc <<= 6;
    } else {
      const int v = value_of(c);
      if (v < 0 || pads > 0) return std::nullopt;
      acc = (acc << 6) | static_cast<std::uint32_t>(v);
      ++filled;
    }
    if (filled == 4) {
      out.push_back(static_cast<std::uint8_t>(acc >> 16));
      if (pads < 2) out.push_back(static_cast<std::uint8_t>(acc >> 8));
      if (pads < 1) out.push_back(static_cast<std::uint8_t>(acc));
      if (pads > 0) {
        filled = -1;  // nothing may follow a padded quantum
        acc = 0;
        continue;
      }
      filled = 0;
      acc = 0;
    }
  }
  if (filled != 0 && filled != -1) return std::nullopt;
  return out;
}

inline Bytes decode(ByteView in) {
  auto out = try_decode(in);
  if (!out) throw DecodeError("input is not valid base64 text");
  return std::move(*out);
}

}  // namespace base64

inline Bytes apply_step(const TransformStep& step, ByteView input) {
  switch (step.kind) {
    case StepKind::identity: return Bytes(input.begin(), input.end());
    case StepKind::reverse: return Bytes(input.rbegin(), input.rend());
    case StepKind::base64_encode: return base64::encode(input);
    case StepKind::base64_decode: {
      ByteView src = input;
      if (step.span) {
        if (step.span->offset > input.size() || step.span->length > input.size() - step.span->offset)
          throw BoundsError("base64 span exceeds input");
        src = input.subspan(step.span->offset, step.span->length);
      }
      return base64::decode(src);
    }
    case StepKind::strip_linebreaks: {
      Bytes out;
      out.reserve(input.size());
      for (auto c : input)
        if (!base64::is_linebreak(c)) out.push_back(c);
      return out;
    }
    case StepKind::strip_trailing_whitespace: {
      std::size_t end = input.size();
      while (end > 0 && (input[end - 1] == ' ' || input[end - 1] == '\t' || base64::is_linebreak(input[end - 1])))
        --end;
      return Bytes(input.begin(), input.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }
  return Bytes(input.begin(), input.end());
}

inline Bytes apply(const TransformChain& chain, ByteView input) {
  Bytes current(input.begin(), input.end());
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    try {
      current = apply_step(chain.steps[i], current);
    } catch (const DecodeError& e) {
      throw DecodeError("step " + std::to_string(i) + " (" + to_string(chain.steps[i]) + "): " + e.what());
    }
  }
  return current;
}

// Maximal runs of the base64 alphabet, optionally closed by up to two '='.
// Line breaks inside a run are tolerated and do not count toward min_len.
inline std::vector<ByteSpan> find_base64_runs(ByteView input, std::size_t min_len) {
  std::vector<ByteSpan> runs;
  const std::size_t n = input.size();
  std::size_t i = 0;
  while (i < n) {
    if (!base64::is_alphabet(input[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    std::size_t end = i;
    std::size_t counted = 0;
    std::size_t counted_at_end = 0;
    std::size_t j = i;
    while (j < n) {
      if (base64::is_alphabet(input[j])) {
        ++counted;
        end = ++j;
        counted_at_end = counted;
      } else if (base64::is_linebreak(input[j])) {
        ++j;
      } else {
        break;
      }
    }
    counted = counted_at_end;
    for (int pad = 0; pad < 2 && end < n && input[end] == '='; ++pad) {
      ++end;
      ++counted;
    }
    if (counted >= min_len) runs.push_back({start, end - start});
    i = std::max(end, start + 1);
  }
  return runs;
}

struct InverseSearchOptions {
  std::size_t min_base64_len = 40;
  std::size_t max_views = 256;
};

struct InverseView {
  TransformChain chain;
  Bytes bytes;
};

struct InverseViewSet {
  std::vector<InverseView> views;
  bool truncated = false;
};

namespace detail {

// Decodes a run; if it has a ragged head (alphabet bytes that happened to sit
// in front of the real encoding) the head is trimmed to a 4-char boundary.
inline std::optional<std::pair<ByteSpan, Bytes>> decode_run(ByteView input, ByteSpan run) {
  auto slice = input.subspan(run.offset, run.length);
  if (auto decoded = base64::try_decode(slice)) return std::pair{run, std::move(*decoded)};
  std::size_t chars = 0;
  for (auto c : slice)
    if (!base64::is_linebreak(c)) ++chars;
  std::size_t skip = chars % 4;
  if (skip == 0) return std::nullopt;
  std::size_t cut = 0;
  while (skip > 0 && cut < slice.size()) {
    if (!base64::is_linebreak(slice[cut])) --skip;
    ++cut;
  }
  ByteSpan trimmed{run.offset + cut, run.length - cut};
  if (auto decoded = base64::try_decode(input.subspan(trimmed.offset, trimmed.length)))
    return std::pair{trimmed, std::move(*decoded)};
  return std::nullopt;
}

}  // namespace detail

// Breadth-first bounded inverse search. Depth 0 is the identity view; each
// further level applies one inverse step (reverse, base64 decode of each
// candidate run, strip_linebreaks, strip_trailing_whitespace) to every view
// of the previous level. Byte-identical views are dropped.
inline InverseViewSet inverse_views(ByteView input, std::size_t max_depth, const InverseSearchOptions& opts = {}) {
  InverseViewSet out;
  std::unordered_multimap<std::size_t, std::size_t> seen;
  const auto hash_of = [](ByteView b) {
    return std::hash<std::string_view>{}(
        std::string_view(reinterpret_cast<const char*>(b.data()), b.size()));
  };

  // Returns false once the view cap is exhausted.
  const auto offer = [&](TransformChain chain, Bytes bytes) {
    const std::size_t h = hash_of(bytes);
    auto [lo, hi] = seen.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (out.views[it->second].bytes == bytes) return true;
    if (out.views.size() >= opts.max_views) {
      out.truncated = true;
      return false;
    }
    seen.emplace(h, out.views.size());
    out.views.push_back({std::move(chain), std::move(bytes)});
    return true;
  };

  offer({}, Bytes(input.begin(), input.end()));
  std::size_t level_begin = 0;
  for (std::size_t depth = 1; depth <= max_depth && !out.truncated; ++depth) {
    const std::size_t level_end = out.views.size();
    for (std::size_t v = level_begin; v < level_end && !out.truncated; ++v) {
      // Copies: `offer` may reallocate out.views.
      const TransformChain parent_chain = out.views[v].chain;
      const Bytes parent = out.views[v].bytes;
      const auto extend = [&](TransformStep step, Bytes bytes) {
        TransformChain chain = parent_chain;
        chain.steps.push_back(step);
        return offer(std::move(chain), std::move(bytes));
      };

      if (!extend({StepKind::reverse, std::nullopt}, Bytes(parent.rbegin(), parent.rend()))) break;
      bool ok = true;
      for (const auto& run : find_base64_runs(parent, opts.min_base64_len)) {
        if (auto decoded = detail::decode_run(parent, run)) {
          if (!extend({StepKind::base64_decode, decoded->first}, std::move(decoded->second))) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) break;
      const TransformStep strip_lb{StepKind::strip_linebreaks, std::nullopt};
      if (!extend(strip_lb, apply_step(strip_lb, parent))) break;
      const TransformStep strip_ws{StepKind::strip_trailing_whitespace, std::nullopt};
      if (!extend(strip_ws, apply_step(strip_ws, parent))) break;
    }
    level_begin = level_end;
  }
  return out;
}

}  // namespace stegscan
