#pragma once

// Container walkers for JPEG, PNG, GIF and BMP. A parse never fails: it
// decomposes the input into contiguous labeled regions, and anything that does
// not fit the format grammar ends up in a best-effort region with a diagnostic.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "stegscan/bytes.hpp"

namespace stegscan {

enum class FormatKind { jpeg, png, gif, bmp, unknown };

struct FormatId {
  FormatKind kind = FormatKind::unknown;
  std::size_t magic_offset = 0;
  std::size_t magic_len = 0;

  bool operator==(const FormatId&) const = default;
};

enum class RegionKind { header, segment, metadata, image_data, post_eof_trailer };

struct ByteRegion {
  std::size_t offset = 0;
  std::size_t length = 0;
  RegionKind kind = RegionKind::image_data;
  std::string label;

  std::size_t end() const { return offset + length; }
  bool operator==(const ByteRegion&) const = default;
};

struct ParsedContainer {
  FormatId format;
  std::vector<ByteRegion> regions;
  bool well_formed = true;
  std::vector<std::string> diagnostics;

  const ByteRegion* trailer() const {
    if (!regions.empty() && regions.back().kind == RegionKind::post_eof_trailer) return &regions.back();
    return nullptr;
  }
};

inline std::string_view to_string(FormatKind k) {
  switch (k) {
    case FormatKind::jpeg: return "jpeg";
    case FormatKind::png: return "png";
    case FormatKind::gif: return "gif";
    case FormatKind::bmp: return "bmp";
    case FormatKind::unknown: return "unknown";
  }
  return "unknown";
}

inline std::string_view to_string(RegionKind k) {
  switch (k) {
    case RegionKind::header: return "header";
    case RegionKind::segment: return "segment";
    case RegionKind::metadata: return "metadata";
    case RegionKind::image_data: return "image_data";
    case RegionKind::post_eof_trailer: return "post_eof_trailer";
  }
  return "segment";
}

inline std::optional<FormatKind> format_kind_from_string(std::string_view s) {
  for (auto k : {FormatKind::jpeg, FormatKind::png, FormatKind::gif, FormatKind::bmp, FormatKind::unknown})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::optional<RegionKind> region_kind_from_string(std::string_view s) {
  for (auto k : {RegionKind::header, RegionKind::segment, RegionKind::metadata, RegionKind::image_data,
                 RegionKind::post_eof_trailer})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

namespace detail {

inline constexpr std::array<std::uint8_t, 2> kJpegMagic{0xFF, 0xD8};
inline constexpr std::array<std::uint8_t, 8> kPngMagic{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};

inline bool starts_with(ByteView data, ByteView prefix) {
  return data.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), data.begin());
}

inline bool starts_with(ByteView data, std::string_view prefix) {
  return data.size() >= prefix.size() &&
         std::equal(prefix.begin(), prefix.end(), data.begin(),
                    [](char c, std::uint8_t b) { return static_cast<std::uint8_t>(c) == b; });
}

inline std::string hex_byte(std::uint8_t b) {
  static constexpr char digits[] = "0123456789abcdef";
  return {'0', 'x', digits[b >> 4], digits[b & 15]};
}

// Appends regions strictly left to right so the cover invariant holds by
// construction. Lengths are clamped to the input size.
class RegionBuilder {
 public:
  explicit RegionBuilder(ByteView data) : data_(data) {}

  std::size_t cursor() const { return cursor_; }
  std::size_t remaining() const { return data_.size() - cursor_; }
  bool at_end() const { return cursor_ >= data_.size(); }

  void add(std::size_t length, RegionKind kind, std::string label) {
    length = std::min(length, remaining());
    if (length == 0) return;
    regions_.push_back({cursor_, length, kind, std::move(label)});
    cursor_ += length;
  }

  void add_until(std::size_t end, RegionKind kind, std::string label) {
    if (end > cursor_) add(end - cursor_, kind, std::move(label));
  }

  void diagnose(std::string note) { diagnostics_.push_back(std::move(note)); }

  // Malformed structure: record the note and sweep the remaining bytes into
  // one best-effort region.
  void bail(std::string note, RegionKind kind = RegionKind::image_data, std::string label = "unparsed") {
    diagnose(std::move(note));
    add(remaining(), kind, std::move(label));
  }

  ParsedContainer finish(FormatId format) && {
    ParsedContainer out;
    out.format = format;
    out.regions = std::move(regions_);
    out.diagnostics = std::move(diagnostics_);
    out.well_formed = out.diagnostics.empty();
    return out;
  }

 private:
  ByteView data_;
  std::size_t cursor_ = 0;
  std::vector<ByteRegion> regions_;
  std::vector<std::string> diagnostics_;
};

inline std::string jpeg_marker_name(std::uint8_t m) {
  static constexpr char digits[] = "0123456789ABCDEF";
  if (m >= 0xE0 && m <= 0xEF) return "APP" + std::to_string(m - 0xE0);
  if (m >= 0xD0 && m <= 0xD7) return "RST" + std::to_string(m - 0xD0);
  if (m >= 0xC0 && m <= 0xCF && m != 0xC4 && m != 0xC8 && m != 0xCC) return "SOF" + std::to_string(m - 0xC0);
  switch (m) {
    case 0x01: return "TEM";
    case 0xC4: return "DHT";
    case 0xC8: return "JPG";
    case 0xCC: return "DAC";
    case 0xD8: return "SOI";
    case 0xD9: return "EOI";
    case 0xDA: return "SOS";
    case 0xDB: return "DQT";
    case 0xDC: return "DNL";
    case 0xDD: return "DRI";
    case 0xDE: return "DHP";
    case 0xDF: return "EXP";
    case 0xFE: return "COM";
    default: break;
  }
  return std::string("marker-") + digits[m >> 4] + digits[m & 15];
}

inline std::string jpeg_app_label(std::uint8_t marker, ByteView payload) {
  std::string name = jpeg_marker_name(marker);
  if (marker == 0xE0 && starts_with(payload, std::string_view("JFIF\0", 5))) return name + "/JFIF";
  if (marker == 0xE0 && starts_with(payload, std::string_view("JFXX\0", 5))) return name + "/JFXX";
  if (marker == 0xE1 && starts_with(payload, std::string_view("Exif\0", 5))) return name + "/EXIF";
  if (marker == 0xE1 && starts_with(payload, "http://ns.adobe.com/xap/")) return name + "/XMP";
  if (marker == 0xE2 && starts_with(payload, "ICC_PROFILE")) return name + "/ICC";
  if (marker == 0xEE && starts_with(payload, "Adobe")) return name + "/Adobe";
  return name;
}

inline ParsedContainer parse_jpeg(ByteView data, FormatId format) {
  RegionBuilder rb(data);
  const std::size_t n = data.size();
  rb.add(2, RegionKind::header, "SOI");

  bool seen_eoi = false;
  bool seen_scan = false;
  while (!rb.at_end()) {
    const std::size_t pos = rb.cursor();
    if (data[pos] != 0xFF) {
      rb.bail("expected marker at offset " + std::to_string(pos));
      break;
    }
    // Fill bytes (FF FF ...) belong to the marker that follows them.
    std::size_t m = pos;
    while (m + 1 < n && data[m + 1] == 0xFF) ++m;
    if (m + 1 >= n) {
      rb.bail("truncated marker at offset " + std::to_string(pos), RegionKind::segment, "truncated");
      break;
    }
    const std::uint8_t marker = data[m + 1];
    const std::size_t body = m + 2;
    const std::string name = jpeg_marker_name(marker);

    if (marker == 0xD9) {
      rb.add_until(body, RegionKind::segment, name);
      seen_eoi = true;
      break;
    }
    if (marker == 0x00 || marker == 0xD8) {
      rb.bail("unexpected marker " + hex_byte(marker) + " at offset " + std::to_string(pos));
      break;
    }
    if (marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) {
      rb.add_until(body, RegionKind::segment, name);
      continue;
    }
    if (body + 2 > n) {
      rb.bail("truncated segment length at offset " + std::to_string(pos), RegionKind::segment, name);
      break;
    }
    const std::size_t declared = read_be16(data, body);
    if (declared < 2) {
      rb.bail("invalid segment length " + std::to_string(declared) + " at offset " + std::to_string(pos));
      break;
    }
    const std::size_t seg_end = body + declared;
    const bool is_meta = (marker >= 0xE0 && marker <= 0xEF) || marker == 0xFE;
    const std::string label =
        marker == 0xFE ? name : (is_meta ? jpeg_app_label(marker, data.subspan(std::min(body + 2, n))) : name);
    if (seg_end > n) {
      rb.diagnose("segment " + name + " at offset " + std::to_string(pos) + " declares length " +
                  std::to_string(declared) + " past end of file (truncated segment length)");
      rb.add_until(n, is_meta ? RegionKind::metadata : RegionKind::segment, label);
      break;
    }
    rb.add_until(seg_end, is_meta ? RegionKind::metadata : RegionKind::segment, label);

    if (marker == 0xDA) {
      seen_scan = true;
      // Entropy-coded data runs until an FF that is neither stuffing (FF 00)
      // nor a restart marker (FF D0..D7).
      std::size_t q = seg_end;
      while (q < n) {
        if (data[q] != 0xFF) {
          ++q;
          continue;
        }
        if (q + 1 >= n) {
          q = n;
          break;
        }
        const std::uint8_t next = data[q + 1];
        if (next == 0x00 || (next >= 0xD0 && next <= 0xD7)) {
          q += 2;
          continue;
        }
        break;
      }
      rb.add_until(q, RegionKind::image_data, "scan-data");
    }
  }

  if (!seen_scan) rb.diagnose("no scan data");
  if (!seen_eoi) rb.diagnose("missing EOI");
  rb.add(rb.remaining(), RegionKind::post_eof_trailer, "post-EOI");
  return std::move(rb).finish(format);
}

inline ParsedContainer parse_png(ByteView data, FormatId format) {
  RegionBuilder rb(data);
  const std::size_t n = data.size();
  rb.add(8, RegionKind::header, "signature");

  bool seen_iend = false;
  bool first = true;
  while (!rb.at_end()) {
    const std::size_t pos = rb.cursor();
    if (pos + 8 > n) {
      rb.bail("truncated chunk header at offset " + std::to_string(pos), RegionKind::segment, "truncated");
      break;
    }
    const std::uint32_t declared = read_be32(data, pos);
    std::string type(data.begin() + static_cast<std::ptrdiff_t>(pos + 4),
                     data.begin() + static_cast<std::ptrdiff_t>(pos + 8));
    const bool type_ok = std::all_of(type.begin(), type.end(), [](char c) {
      return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
    });
    if (!type_ok) {
      rb.bail("invalid chunk type at offset " + std::to_string(pos));
      break;
    }
    RegionKind kind = RegionKind::segment;
    if (type == "IHDR") {
      kind = RegionKind::header;
    } else if (type == "IDAT") {
      kind = RegionKind::image_data;
    } else if (type[0] >= 'a' && type[0] <= 'z') {
      kind = RegionKind::metadata;
    }
    if (first && type != "IHDR") rb.diagnose("first chunk is " + type + ", expected IHDR");
    first = false;

    const std::uint64_t total = std::uint64_t{declared} + 12;
    if (declared > 0x7FFFFFFFu || pos + total > n) {
      rb.diagnose("chunk " + type + " at offset " + std::to_string(pos) + " runs past end of file");
      rb.add_until(n, kind, type);
      break;
    }
    const auto* crc_input = data.data() + pos + 4;
    const auto crc = static_cast<std::uint32_t>(::crc32(0L, crc_input, static_cast<uInt>(declared + 4)));
    if (crc != read_be32(data, pos + 8 + declared))
      rb.diagnose("CRC mismatch in chunk " + type + " at offset " + std::to_string(pos));
    rb.add(static_cast<std::size_t>(total), kind, type);
    if (type == "IEND") {
      seen_iend = true;
      break;
    }
  }
  if (!seen_iend) rb.diagnose("missing IEND");
  rb.add(rb.remaining(), RegionKind::post_eof_trailer, "post-IEND");
  return std::move(rb).finish(format);
}

// End offset of a GIF sub-block chain starting at `p`, or nullopt when the
// chain runs off the end of the input.
inline std::optional<std::size_t> gif_skip_subblocks(ByteView data, std::size_t p) {
  while (p < data.size()) {
    const std::size_t size = data[p];
    if (size == 0) return p + 1;
    p += 1 + size;
  }
  return std::nullopt;
}

inline ParsedContainer parse_gif(ByteView data, FormatId format) {
  RegionBuilder rb(data);
  const std::size_t n = data.size();
  if (n < 13) {
    rb.bail("truncated logical screen descriptor", RegionKind::header, "header+LSD");
    return std::move(rb).finish(format);
  }
  rb.add(13, RegionKind::header, "header+LSD");
  if (data[10] & 0x80) {
    const std::size_t table = std::size_t{3} << ((data[10] & 0x07) + 1);
    if (13 + table > n) rb.diagnose("global color table runs past end of file");
    rb.add(table, RegionKind::segment, "global-color-table");
  }

  bool seen_trailer = false;
  while (!rb.at_end()) {
    const std::size_t pos = rb.cursor();
    const std::uint8_t intro = data[pos];
    if (intro == 0x3B) {
      rb.add(1, RegionKind::segment, "trailer");
      seen_trailer = true;
      break;
    }
    if (intro == 0x21) {
      if (pos + 2 > n) {
        rb.bail("truncated extension at offset " + std::to_string(pos), RegionKind::segment, "extension");
        break;
      }
      const std::uint8_t label = data[pos + 1];
      RegionKind kind = RegionKind::segment;
      std::string name = "extension-" + hex_byte(label);
      switch (label) {
        case 0xF9: name = "graphic-control-ext"; break;
        case 0xFE: name = "comment-ext"; kind = RegionKind::metadata; break;
        case 0xFF: name = "application-ext"; kind = RegionKind::metadata; break;
        case 0x01: name = "plain-text-ext"; break;
        default: break;
      }
      const auto end = gif_skip_subblocks(data, pos + 2);
      if (!end) {
        rb.diagnose(name + " at offset " + std::to_string(pos) + " runs past end of file");
        rb.add_until(n, kind, name);
        break;
      }
      rb.add_until(*end, kind, name);
      continue;
    }
    if (intro == 0x2C) {
      if (pos + 10 > n) {
        rb.bail("truncated image descriptor at offset " + std::to_string(pos), RegionKind::segment,
                "image-descriptor");
        break;
      }
      std::size_t desc_end = pos + 10;
      if (data[pos + 9] & 0x80) desc_end += std::size_t{3} << ((data[pos + 9] & 0x07) + 1);
      if (desc_end + 1 > n) {
        rb.bail("truncated local color table at offset " + std::to_string(pos), RegionKind::segment,
                "image-descriptor");
        break;
      }
      rb.add_until(desc_end, RegionKind::segment, "image-descriptor");
      const auto end = gif_skip_subblocks(data, desc_end + 1);
      if (!end) {
        rb.diagnose("image data at offset " + std::to_string(desc_end) + " runs past end of file");
        rb.add_until(n, RegionKind::image_data, "image-data");
        break;
      }
      rb.add_until(*end, RegionKind::image_data, "image-data");
      continue;
    }
    rb.bail("unexpected block introducer " + hex_byte(intro) + " at offset " + std::to_string(pos));
    break;
  }
  if (!seen_trailer) rb.diagnose("missing GIF trailer");
  rb.add(rb.remaining(), RegionKind::post_eof_trailer, "post-trailer");
  return std::move(rb).finish(format);
}

inline ParsedContainer parse_bmp(ByteView data, FormatId format) {
  RegionBuilder rb(data);
  const std::size_t n = data.size();
  if (n < 26) {
    rb.bail("truncated BMP header", RegionKind::header, "file-header");
    return std::move(rb).finish(format);
  }
  const std::size_t declared = read_le32(data, 2);
  const std::size_t pixel_offset = read_le32(data, 10);
  const std::size_t dib_size = read_le32(data, 14);

  std::size_t end = declared;
  bool trailer_allowed = true;
  if (declared < 26) {
    rb.diagnose("declared size " + std::to_string(declared) + " is smaller than the headers");
    end = n;
    trailer_allowed = false;
  } else if (declared > n) {
    rb.diagnose("declared size " + std::to_string(declared) + " exceeds file length " + std::to_string(n));
    end = n;
    trailer_allowed = false;
  }

  rb.add(14, RegionKind::header, "file-header");
  const std::size_t dib_end = 14 + dib_size;
  if (dib_size < 12 || dib_end > end) {
    rb.diagnose("invalid DIB header size " + std::to_string(dib_size));
    rb.add_until(end, RegionKind::image_data, "unparsed");
  } else {
    rb.add_until(dib_end, RegionKind::header, "dib-header");
    if (pixel_offset < dib_end || pixel_offset > end) {
      rb.diagnose("pixel data offset " + std::to_string(pixel_offset) + " out of range");
      rb.add_until(end, RegionKind::image_data, "unparsed");
    } else {
      rb.add_until(pixel_offset, RegionKind::segment, "color-table");
      rb.add_until(end, RegionKind::image_data, "pixel-data");
    }
  }
  if (trailer_allowed) rb.add(rb.remaining(), RegionKind::post_eof_trailer, "post-declared-size");
  return std::move(rb).finish(format);
}

}  // namespace detail

inline FormatId detect_format(ByteView bytes) {
  using detail::starts_with;
  if (starts_with(bytes, detail::kPngMagic)) return {FormatKind::png, 0, detail::kPngMagic.size()};
  if (starts_with(bytes, detail::kJpegMagic)) return {FormatKind::jpeg, 0, detail::kJpegMagic.size()};
  if (starts_with(bytes, "GIF87a") || starts_with(bytes, "GIF89a")) return {FormatKind::gif, 0, 6};
  if (starts_with(bytes, "BM")) return {FormatKind::bmp, 0, 2};
  return {};
}

inline ParsedContainer parse_container(ByteView bytes) {
  const FormatId format = detect_format(bytes);
  switch (format.kind) {
    case FormatKind::jpeg: return detail::parse_jpeg(bytes, format);
    case FormatKind::png: return detail::parse_png(bytes, format);
    case FormatKind::gif: return detail::parse_gif(bytes, format);
    case FormatKind::bmp: return detail::parse_bmp(bytes, format);
    case FormatKind::unknown: break;
  }
  detail::RegionBuilder rb(bytes);
  rb.add(bytes.size(), RegionKind::image_data, "unknown");
  ParsedContainer out = std::move(rb).finish(format);
  out.diagnostics.push_back("unrecognized format");
  out.well_formed = false;
  return out;
}

inline Bytes extract_region(ByteView original, const ByteRegion& region) {
  if (region.offset > original.size() || region.length > original.size() - region.offset)
    throw BoundsError("region [" + std::to_string(region.offset) + ", +" + std::to_string(region.length) +
                      ") exceeds input of " + std::to_string(original.size()) + " bytes");
  const auto first = original.begin() + static_cast<std::ptrdiff_t>(region.offset);
  return Bytes(first, first + static_cast<std::ptrdiff_t>(region.length));
}

inline Bytes reassemble(const ParsedContainer& container, ByteView original) {
  Bytes out;
  out.reserve(original.size());
  std::size_t expected = 0;
  for (const auto& r : container.regions) {
    if (r.offset != expected) throw InternalError("region at offset " + std::to_string(r.offset) + " does not abut");
    if (r.offset > original.size() || r.length > original.size() - r.offset)
      throw InternalError("region at offset " + std::to_string(r.offset) + " runs past the input");
    const auto first = original.begin() + static_cast<std::ptrdiff_t>(r.offset);
    out.insert(out.end(), first, first + static_cast<std::ptrdiff_t>(r.length));
    expected = r.end();
  }
  if (expected != original.size())
    throw InternalError("regions cover " + std::to_string(expected) + " of " + std::to_string(original.size()) +
                        " bytes");
  return out;
}

}  // namespace stegscan
