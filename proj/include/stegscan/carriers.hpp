#pragma once

// Deterministic image writers for the built-in carriers and clean controls.
// Output is byte-stable: fixed tables, stored (uncompressed) deflate blocks,
// literal-only LZW, and no timestamps anywhere.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <zlib.h>

#include "stegscan/bytes.hpp"

namespace stegscan::carriers {

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  std::array<std::uint8_t, 3> at(std::size_t x, std::size_t y) const {
    const std::size_t i = 3 * (y * width + x);
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
};

inline RgbImage solid(std::size_t w, std::size_t h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RgbImage img{w, h, {}};
  img.rgb.reserve(w * h * 3);
  for (std::size_t i = 0; i < w * h; ++i) img.rgb.insert(img.rgb.end(), {r, g, b});
  return img;
}

inline RgbImage gradient(std::size_t w, std::size_t h) {
  RgbImage img{w, h, {}};
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      img.rgb.insert(img.rgb.end(), {static_cast<std::uint8_t>(x * 255 / std::max<std::size_t>(1, w - 1)),
                                     static_cast<std::uint8_t>(y * 255 / std::max<std::size_t>(1, h - 1)),
                                     static_cast<std::uint8_t>((x + y) * 4)});
  return img;
}

// mt19937 output is fully specified by the standard, so this is portable.
inline RgbImage noise(std::size_t w, std::size_t h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  RgbImage img{w, h, {}};
  img.rgb.resize(w * h * 3);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng() >> 24);
  return img;
}

// ---------------------------------------------------------------------------
// Baseline JPEG (sequential DCT, Huffman tables from ITU T.81 Annex K, 4:4:4)

struct JpegOptions {
  int quality = 75;
  bool grayscale = false;
  unsigned restart_interval = 0;  // in MCUs; 0 disables DRI/RSTn
  std::optional<Bytes> exif_tiff;  // APP1 "Exif\0\0" body
  std::optional<std::string> comment;
};

namespace jpeg_detail {

inline constexpr std::array<std::uint8_t, 64> kZigzag{
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,  12, 19, 26, 33, 40, 48,
    41, 34, 27, 20, 13, 6,  7,  14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23,
    30, 37, 44, 51, 58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

inline constexpr std::array<int, 64> kLumaQuant{
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

inline constexpr std::array<int, 64> kChromaQuant{
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99,
    99, 99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

struct HuffSpec {
  std::array<std::uint8_t, 16> counts;
  std::vector<std::uint8_t> symbols;
};

inline const HuffSpec& dc_luma() {
  static const HuffSpec s{{0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  return s;
}

inline const HuffSpec& dc_chroma() {
  static const HuffSpec s{{0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  return s;
}

inline const HuffSpec& ac_luma() {
  static const HuffSpec s{
      {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d},
      {0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07, 0x22, 0x71,
       0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72,
       0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x34, 0x35, 0x36, 0x37,
       0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
       0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x83,
       0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3,
       0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3,
       0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2,
       0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa}};
  return s;
}

inline const HuffSpec& ac_chroma() {
  static const HuffSpec s{
      {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77},
      {0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71, 0x13, 0x22,
       0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33, 0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1,
       0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1, 0x17, 0x18, 0x19, 0x1a, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x35, 0x36,
       0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
       0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a,
       0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a,
       0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba,
       0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda,
       0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa}};
  return s;
}

struct HuffCode {
  std::uint16_t code = 0;
  std::uint8_t length = 0;
};

using HuffTable = std::array<HuffCode, 256>;

inline HuffTable build_table(const HuffSpec& spec) {
  HuffTable table{};
  std::uint16_t code = 0;
  std::size_t k = 0;
  for (std::uint8_t len = 1; len <= 16; ++len) {
    for (std::uint8_t i = 0; i < spec.counts[len - 1]; ++i) table[spec.symbols[k++]] = {code++, len};
    code <<= 1;
  }
  return table;
}

class BitWriter {
 public:
  explicit BitWriter(Bytes& out) : out_(out) {}

  void put(std::uint32_t bits, unsigned count) {
    for (unsigned i = count; i-- > 0;) {
      acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((bits >> i) & 1));
      if (++filled_ == 8) emit();
    }
  }

  // Pads the partial byte with 1-bits.
  void flush() {
    while (filled_ != 0) put(1, 1);
  }

 private:
  void emit() {
    out_.push_back(acc_);
    if (acc_ == 0xFF) out_.push_back(0x00);
    acc_ = 0;
    filled_ = 0;
  }

  Bytes& out_;
  std::uint8_t acc_ = 0;
  unsigned filled_ = 0;
};

inline std::array<int, 64> scaled_quant(const std::array<int, 64>& base, int quality) {
  quality = std::clamp(quality, 1, 100);
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<int, 64> q{};
  for (std::size_t i = 0; i < 64; ++i) q[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return q;
}

inline const std::array<double, 64>& cos_table() {
  static const std::array<double, 64> t = [] {
    std::array<double, 64> out{};
    for (int x = 0; x < 8; ++x)
      for (int u = 0; u < 8; ++u) out[x * 8 + u] = std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
    return out;
  }();
  return t;
}

// Forward DCT + quantization; result in zigzag order.
inline std::array<int, 64> transform_block(const std::array<double, 64>& block, const std::array<int, 64>& quant) {
  const auto& c = cos_table();
  std::array<int, 64> out{};
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 8; ++u) {
      double sum = 0.0;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) sum += block[y * 8 + x] * c[x * 8 + u] * c[y * 8 + v];
      const double cu = u == 0 ? std::numbers::sqrt2 / 2 : 1.0;
      const double cv = v == 0 ? std::numbers::sqrt2 / 2 : 1.0;
      const double coef = 0.25 * cu * cv * sum;
      out[v * 8 + u] = static_cast<int>(std::lround(coef / quant[v * 8 + u]));
    }
  }
  std::array<int, 64> zz{};
  for (std::size_t k = 0; k < 64; ++k) zz[k] = out[kZigzag[k]];
  return zz;
}

inline unsigned magnitude_bits(int v) {
  unsigned n = 0;
  for (unsigned a = static_cast<unsigned>(v < 0 ? -v : v); a != 0; a >>= 1) ++n;
  return n;
}

inline void put_value(BitWriter& bw, int v, unsigned bits) {
  if (bits == 0) return;
  const int raw = v < 0 ? v + (1 << bits) - 1 : v;
  bw.put(static_cast<std::uint32_t>(raw), bits);
}

inline void encode_block(BitWriter& bw, const std::array<int, 64>& zz, int& dc_pred, const HuffTable& dc,
                         const HuffTable& ac) {
  const int diff = zz[0] - dc_pred;
  dc_pred = zz[0];
  const unsigned dc_bits = magnitude_bits(diff);
  bw.put(dc[dc_bits].code, dc[dc_bits].length);
  put_value(bw, diff, dc_bits);

  unsigned run = 0;
  for (std::size_t k = 1; k < 64; ++k) {
    if (zz[k] == 0) {
      ++run;
      continue;
    }
    while (run >= 16) {
      bw.put(ac[0xF0].code, ac[0xF0].length);
      run -= 16;
    }
    const unsigned bits = magnitude_bits(zz[k]);
    const auto sym = static_cast<std::uint8_t>((run << 4) | bits);
    bw.put(ac[sym].code, ac[sym].length);
    put_value(bw, zz[k], bits);
    run = 0;
  }
  if (run > 0) bw.put(ac[0x00].code, ac[0x00].length);
}

inline void put_segment(Bytes& out, std::uint8_t marker, ByteView body) {
  out.push_back(0xFF);
  out.push_back(marker);
  put_be16(out, static_cast<std::uint32_t>(body.size() + 2));
  out.insert(out.end(), body.begin(), body.end());
}

inline void put_huffman(Bytes& body, std::uint8_t class_id, const HuffSpec& spec) {
  body.push_back(class_id);
  body.insert(body.end(), spec.counts.begin(), spec.counts.end());
  body.insert(body.end(), spec.symbols.begin(), spec.symbols.end());
}

}  // namespace jpeg_detail

inline Bytes encode_jpeg(const RgbImage& img, const JpegOptions& opts = {}) {
  using namespace jpeg_detail;
  if (img.width == 0 || img.height == 0 || img.width > 65535 || img.height > 65535)
    throw CraftError("JPEG dimensions out of range");
  const std::size_t components = opts.grayscale ? 1 : 3;
  const auto luma_q = scaled_quant(kLumaQuant, opts.quality);
  const auto chroma_q = scaled_quant(kChromaQuant, opts.quality);

  Bytes out{0xFF, 0xD8};
  put_segment(out, 0xE0, Bytes{'J', 'F', 'I', 'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0});
  if (opts.exif_tiff) {
    Bytes body{'E', 'x', 'i', 'f', 0, 0};
    body.insert(body.end(), opts.exif_tiff->begin(), opts.exif_tiff->end());
    put_segment(out, 0xE1, body);
  }
  if (opts.comment) put_segment(out, 0xFE, to_bytes(*opts.comment));

  Bytes dqt;
  dqt.push_back(0x00);
  for (std::size_t k = 0; k < 64; ++k) dqt.push_back(static_cast<std::uint8_t>(luma_q[kZigzag[k]]));
  if (components == 3) {
    dqt.push_back(0x01);
    for (std::size_t k = 0; k < 64; ++k) dqt.push_back(static_cast<std::uint8_t>(chroma_q[kZigzag[k]]));
  }
  put_segment(out, 0xDB, dqt);

  Bytes sof{8};
  put_be16(sof, static_cast<std::uint32_t>(img.height));
  put_be16(sof, static_cast<std::uint32_t>(img.width));
  sof.push_back(static_cast<std::uint8_t>(components));
  for (std::size_t c = 0; c < components; ++c) sof.insert(sof.end(), {static_cast<std::uint8_t>(c + 1), 0x11, c == 0 ? std::uint8_t{0} : std::uint8_t{1}});
  put_segment(out, 0xC0, sof);

  Bytes dht;
  put_huffman(dht, 0x00, dc_luma());
  put_huffman(dht, 0x10, ac_luma());
  if (components == 3) {
    put_huffman(dht, 0x01, dc_chroma());
    put_huffman(dht, 0x11, ac_chroma());
  }
  put_segment(out, 0xC4, dht);

  if (opts.restart_interval > 0) {
    Bytes dri;
    put_be16(dri, opts.restart_interval);
    put_segment(out, 0xDD, dri);
  }

  Bytes sos{static_cast<std::uint8_t>(components)};
  for (std::size_t c = 0; c < components; ++c)
    sos.insert(sos.end(), {static_cast<std::uint8_t>(c + 1), c == 0 ? std::uint8_t{0x00} : std::uint8_t{0x11}});
  sos.insert(sos.end(), {0, 63, 0});
  put_segment(out, 0xDA, sos);

  const HuffTable dc_tables[2] = {build_table(dc_luma()), build_table(dc_chroma())};
  const HuffTable ac_tables[2] = {build_table(ac_luma()), build_table(ac_chroma())};
  BitWriter bw(out);
  std::array<int, 3> dc_pred{};
  const std::size_t mcus_x = (img.width + 7) / 8;
  const std::size_t mcus_y = (img.height + 7) / 8;
  const std::size_t total = mcus_x * mcus_y;
  unsigned restart_index = 0;
  for (std::size_t m = 0; m < total; ++m) {
    const std::size_t bx = (m % mcus_x) * 8;
    const std::size_t by = (m / mcus_x) * 8;
    std::array<std::array<double, 64>, 3> planes{};
    for (std::size_t y = 0; y < 8; ++y) {
      for (std::size_t x = 0; x < 8; ++x) {
        // Edge replication for partial blocks.
        const auto px = img.at(std::min(bx + x, img.width - 1), std::min(by + y, img.height - 1));
        const double r = px[0], g = px[1], b = px[2];
        const std::size_t i = y * 8 + x;
        planes[0][i] = 0.299 * r + 0.587 * g + 0.114 * b - 128.0;
        planes[1][i] = -0.168736 * r - 0.331264 * g + 0.5 * b;
        planes[2][i] = 0.5 * r - 0.418688 * g - 0.081312 * b;
      }
    }
    for (std::size_t c = 0; c < components; ++c) {
      const auto zz = transform_block(planes[c], c == 0 ? luma_q : chroma_q);
      encode_block(bw, zz, dc_pred[c], dc_tables[c == 0 ? 0 : 1], ac_tables[c == 0 ? 0 : 1]);
    }
    if (opts.restart_interval > 0 && (m + 1) % opts.restart_interval == 0 && m + 1 < total) {
      bw.flush();
      out.push_back(0xFF);
      out.push_back(static_cast<std::uint8_t>(0xD0 + (restart_index++ & 7)));
      dc_pred = {};
    }
  }
  bw.flush();
  out.push_back(0xFF);
  out.push_back(0xD9);
  return out;
}

// Minimal little-endian TIFF body for an APP1 Exif segment: one IFD with a
// Make tag.
inline Bytes minimal_exif(std::string_view make) {
  Bytes tiff{'I', 'I', 42, 0};
  put_le32(tiff, 8);
  put_le16(tiff, 1);
  put_le16(tiff, 0x010F);
  put_le16(tiff, 2);  // ASCII
  const auto count = static_cast<std::uint32_t>(make.size() + 1);
  put_le32(tiff, count);
  put_le32(tiff, 8 + 2 + 12 + 4);
  put_le32(tiff, 0);
  tiff.insert(tiff.end(), make.begin(), make.end());
  tiff.push_back(0);
  return tiff;
}

// ---------------------------------------------------------------------------
// PNG (8-bit truecolor, filter 0, stored deflate blocks)

inline void put_png_chunk(Bytes& out, std::string_view type, ByteView data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t crc_from = out.size();
  out.insert(out.end(), type.begin(), type.end());
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = ::crc32(0L, out.data() + crc_from, static_cast<uInt>(out.size() - crc_from));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

inline Bytes encode_png(const RgbImage& img, const std::vector<std::pair<std::string, std::string>>& text = {}) {
  Bytes out{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  Bytes ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(img.width));
  put_be32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});
  put_png_chunk(out, "IHDR", ihdr);
  for (const auto& [key, value] : text) {
    Bytes body = to_bytes(key);
    body.push_back(0);
    body.insert(body.end(), value.begin(), value.end());
    put_png_chunk(out, "tEXt", body);
  }

  Bytes raw;
  for (std::size_t y = 0; y < img.height; ++y) {
    raw.push_back(0);
    const auto row = img.rgb.begin() + static_cast<std::ptrdiff_t>(y * img.width * 3);
    raw.insert(raw.end(), row, row + static_cast<std::ptrdiff_t>(img.width * 3));
  }
  Bytes z{0x78, 0x01};
  std::size_t pos = 0;
  do {
    const std::size_t len = std::min<std::size_t>(65535, raw.size() - pos);
    const bool last = pos + len == raw.size();
    z.push_back(last ? 1 : 0);
    put_le16(z, static_cast<std::uint32_t>(len));
    put_le16(z, static_cast<std::uint32_t>(~len & 0xFFFF));
    z.insert(z.end(), raw.begin() + static_cast<std::ptrdiff_t>(pos), raw.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  } while (pos < raw.size());
  put_be32(z, static_cast<std::uint32_t>(::adler32(1L, raw.data(), static_cast<uInt>(raw.size()))));
  put_png_chunk(out, "IDAT", z);
  put_png_chunk(out, "IEND", {});
  return out;
}

// ---------------------------------------------------------------------------
// GIF89a (global palette, literal-only LZW with 8-bit minimum code size)

inline Bytes encode_gif(std::size_t width, std::size_t height, const std::vector<std::uint8_t>& indices,
                        const std::vector<std::array<std::uint8_t, 3>>& palette,
                        const std::optional<std::string>& comment = std::nullopt) {
  if (palette.empty() || palette.size() > 256 || indices.size() != width * height)
    throw CraftError("invalid GIF palette or index buffer");
  unsigned size_bits = 0;
  while ((std::size_t{2} << size_bits) < palette.size()) ++size_bits;

  Bytes out = to_bytes("GIF89a");
  put_le16(out, static_cast<std::uint32_t>(width));
  put_le16(out, static_cast<std::uint32_t>(height));
  out.insert(out.end(), {static_cast<std::uint8_t>(0x80 | 0x70 | size_bits), 0, 0});
  for (std::size_t i = 0; i < (std::size_t{2} << size_bits); ++i) {
    const auto c = i < palette.size() ? palette[i] : std::array<std::uint8_t, 3>{0, 0, 0};
    out.insert(out.end(), c.begin(), c.end());
  }
  const auto put_subblocks = [&out](ByteView data) {
    for (std::size_t i = 0; i < data.size(); i += 255) {
      const std::size_t n = std::min<std::size_t>(255, data.size() - i);
      out.push_back(static_cast<std::uint8_t>(n));
      out.insert(out.end(), data.begin() + static_cast<std::ptrdiff_t>(i), data.begin() + static_cast<std::ptrdiff_t>(i + n));
    }
    out.push_back(0);
  };
  if (comment) {
    out.insert(out.end(), {0x21, 0xFE});
    put_subblocks(to_bytes(*comment));
  }
  out.push_back(0x2C);
  put_le16(out, 0);
  put_le16(out, 0);
  put_le16(out, static_cast<std::uint32_t>(width));
  put_le16(out, static_cast<std::uint32_t>(height));
  out.push_back(0);

  // 9-bit codes throughout: a clear code every 254 literals keeps the
  // decoder's dictionary from growing past 511 entries.
  constexpr std::uint32_t kClear = 256;
  constexpr std::uint32_t kEnd = 257;
  Bytes lzw;
  std::uint32_t acc = 0;
  unsigned filled = 0;
  const auto put_code = [&](std::uint32_t code) {
    acc |= code << filled;
    filled += 9;
    while (filled >= 8) {
      lzw.push_back(static_cast<std::uint8_t>(acc));
      acc >>= 8;
      filled -= 8;
    }
  };
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i % 254 == 0) put_code(kClear);
    put_code(indices[i]);
  }
  put_code(kEnd);
  if (filled > 0) lzw.push_back(static_cast<std::uint8_t>(acc));
  out.push_back(8);
  put_subblocks(lzw);
  out.push_back(0x3B);
  return out;
}

// ---------------------------------------------------------------------------
// BMP (BITMAPINFOHEADER, bottom-up rows padded to 4 bytes)

namespace bmp_detail {

inline Bytes assemble(std::size_t width, std::size_t height, std::uint16_t bpp, ByteView palette, ByteView pixels) {
  const std::size_t pixel_offset = 14 + 40 + palette.size();
  Bytes out{'B', 'M'};
  put_le32(out, static_cast<std::uint32_t>(pixel_offset + pixels.size()));
  put_le32(out, 0);
  put_le32(out, static_cast<std::uint32_t>(pixel_offset));
  put_le32(out, 40);
  put_le32(out, static_cast<std::uint32_t>(width));
  put_le32(out, static_cast<std::uint32_t>(height));
  put_le16(out, 1);
  put_le16(out, bpp);
  put_le32(out, 0);
  put_le32(out, static_cast<std::uint32_t>(pixels.size()));
  put_le32(out, 2835);
  put_le32(out, 2835);
  put_le32(out, bpp == 8 ? static_cast<std::uint32_t>(palette.size() / 4) : 0);
  put_le32(out, 0);
  out.insert(out.end(), palette.begin(), palette.end());
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

}  // namespace bmp_detail

inline Bytes encode_bmp(const RgbImage& img) {
  const std::size_t stride = (img.width * 3 + 3) / 4 * 4;
  Bytes pixels;
  for (std::size_t row = img.height; row-- > 0;) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const auto px = img.at(x, row);
      pixels.insert(pixels.end(), {px[2], px[1], px[0]});
    }
    pixels.resize(pixels.size() + stride - img.width * 3, 0);
  }
  return bmp_detail::assemble(img.width, img.height, 24, {}, pixels);
}

inline Bytes encode_bmp_indexed(std::size_t width, std::size_t height, const std::vector<std::uint8_t>& indices,
                                const std::vector<std::array<std::uint8_t, 3>>& palette) {
  if (palette.empty() || palette.size() > 256 || indices.size() != width * height)
    throw CraftError("invalid BMP palette or index buffer");
  Bytes table;
  for (const auto& c : palette) table.insert(table.end(), {c[2], c[1], c[0], 0});
  const std::size_t stride = (width + 3) / 4 * 4;
  Bytes pixels;
  for (std::size_t row = height; row-- > 0;) {
    pixels.insert(pixels.end(), indices.begin() + static_cast<std::ptrdiff_t>(row * width),
                  indices.begin() + static_cast<std::ptrdiff_t>((row + 1) * width));
    pixels.resize(pixels.size() + stride - width, 0);
  }
  return bmp_detail::assemble(width, height, 8, table, pixels);
}

// ---------------------------------------------------------------------------
// Named built-ins

inline Bytes white_jpeg() { return encode_jpeg(solid(1, 1, 255, 255, 255)); }
inline Bytes white_png() { return encode_png(solid(1, 1, 255, 255, 255)); }
inline Bytes white_gif() { return encode_gif(1, 1, {0}, {{255, 255, 255}}); }
inline Bytes white_bmp() { return encode_bmp(solid(1, 1, 255, 255, 255)); }

inline const std::vector<std::string>& carrier_names() {
  static const std::vector<std::string> names{"jpeg", "jpeg-gradient", "jpeg-restart", "png", "gif", "bmp"};
  return names;
}

// Carrier referenced by name from a corpus manifest or the CLI.
inline std::optional<Bytes> carrier_by_name(std::string_view name) {
  if (name == "jpeg") return white_jpeg();
  if (name == "jpeg-gradient") return encode_jpeg(gradient(16, 16));
  if (name == "jpeg-restart") {
    JpegOptions opts;
    opts.restart_interval = 1;
    return encode_jpeg(noise(24, 16, 7), opts);
  }
  if (name == "png") return white_png();
  if (name == "gif") return white_gif();
  if (name == "bmp") return white_bmp();
  return std::nullopt;
}

struct NamedSample {
  std::string name;
  std::string extension;
  Bytes bytes;
};

// Clean control images: assorted formats, sizes and metadata, no payload.
inline std::vector<NamedSample> clean_controls() {
  std::vector<NamedSample> out;
  out.push_back({"control-jpeg-white", "jpg", white_jpeg()});
  out.push_back({"control-jpeg-gradient", "jpg", encode_jpeg(gradient(32, 32))});
  {
    JpegOptions opts;
    opts.restart_interval = 2;
    opts.quality = 95;
    out.push_back({"control-jpeg-noise-restart", "jpg", encode_jpeg(noise(40, 24, 11), opts)});
  }
  {
    JpegOptions opts;
    opts.grayscale = true;
    out.push_back({"control-jpeg-gray", "jpg", encode_jpeg(gradient(16, 16), opts)});
  }
  {
    JpegOptions opts;
    opts.exif_tiff = minimal_exif("stegscan");
    out.push_back({"control-jpeg-exif", "jpg", encode_jpeg(gradient(16, 8), opts)});
  }
  {
    JpegOptions opts;
    opts.comment = "holiday snapshot, resized";
    out.push_back({"control-jpeg-comment", "jpg", encode_jpeg(noise(9, 7, 3), opts)});
  }
  out.push_back({"control-png-white", "png", white_png()});
  out.push_back({"control-png-gradient", "png", encode_png(gradient(20, 12), {{"Software", "stegscan"}})});
  out.push_back({"control-gif-white", "gif", white_gif()});
  {
    std::vector<std::uint8_t> idx(30 * 20);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint8_t>((i / 3 + i / 90) % 4);
    out.push_back({"control-gif-pattern", "gif",
                   encode_gif(30, 20, idx, {{0, 0, 0}, {255, 0, 0}, {0, 255, 0}, {0, 0, 255}}, "made with a test tool")});
  }
  out.push_back({"control-bmp-white", "bmp", white_bmp()});
  {
    std::vector<std::uint8_t> idx(5 * 3);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint8_t>(i % 3);
    out.push_back({"control-bmp-indexed", "bmp", encode_bmp_indexed(5, 3, idx, {{10, 20, 30}, {200, 100, 50}, {0, 0, 0}})});
  }
  return out;
}

}  // namespace stegscan::carriers
