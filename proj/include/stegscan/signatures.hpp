#pragma once

// Signature sets and the line-oriented signature file format:
//
//   # comment
//   id<TAB>encoding<TAB>data        encoding: hex | base64 | reversed-ascii

#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stegscan/bytes.hpp"
#include "stegscan/digest.hpp"
#include "stegscan/eicar.hpp"
#include "stegscan/transform.hpp"

namespace stegscan {

enum class MatchMode { exact_substring };

struct Signature {
  std::string id;
  Bytes pattern;
  MatchMode match_mode = MatchMode::exact_substring;
  DigestSet reference_digests;
};

using SignatureSet = std::vector<Signature>;

inline Signature make_signature(std::string id, Bytes pattern) {
  if (id.empty()) throw SignatureError("signature id must not be empty");
  if (pattern.empty()) throw SignatureError("signature '" + id + "' has an empty pattern");
  Signature sig{std::move(id), std::move(pattern), MatchMode::exact_substring, {}};
  sig.reference_digests = compute_digests(sig.pattern);
  return sig;
}

namespace detail {

inline Bytes decode_hex(std::string_view text) {
  Bytes out;
  int hi = -1;
  for (char c : text) {
    int v = -1;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else if (c == ' ') continue;
    if (v < 0) throw DecodeError(std::string("invalid hex digit '") + c + "'");
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<std::uint8_t>(hi << 4 | v));
      hi = -1;
    }
  }
  if (hi >= 0) throw DecodeError("odd number of hex digits");
  return out;
}

}  // namespace detail

inline Bytes decode_signature_data(std::string_view encoding, std::string_view data) {
  if (encoding == "hex") return detail::decode_hex(data);
  if (encoding == "base64") return base64::decode(to_bytes(data));
  if (encoding == "reversed-ascii") return Bytes(data.rbegin(), data.rend());
  throw SignatureError("unknown signature encoding '" + std::string(encoding) + "'");
}

inline SignatureSet parse_signature_file(std::string_view text) {
  SignatureSet out;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos)
      throw SignatureError("line " + std::to_string(line_no) + ": expected id<TAB>encoding<TAB>data");
    std::string id = line.substr(0, tab1);
    const std::string encoding = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const std::string data = line.substr(tab2 + 1);
    if (!ids.insert(id).second) throw SignatureError("line " + std::to_string(line_no) + ": duplicate id '" + id + "'");
    try {
      out.push_back(make_signature(std::move(id), decode_signature_data(encoding, data)));
    } catch (const SignatureError& e) {
      throw SignatureError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DecodeError& e) {
      throw SignatureError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) throw SignatureError("signature file defines no signatures");
  return out;
}

inline constexpr std::string_view kEicarSignatureId = "EICAR-Test-File";

inline std::string default_signature_file() {
  return "# built-in signature set (patterns stored defanged)\n" + std::string(kEicarSignatureId) +
         "\treversed-ascii\t" + std::string(eicar::kReversed) + "\n";
}

inline const SignatureSet& default_signatures() {
  static const SignatureSet set = parse_signature_file(default_signature_file());
  return set;
}

}  // namespace stegscan
