#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "stegscan.hpp"

namespace support {

using stegscan::Bytes;

inline std::filesystem::path fixture_dir() { return STEGSCAN_FIXTURE_DIR; }

struct Fixture {
  std::string name;
  Bytes bytes;
};

inline std::vector<Fixture> load_fixtures(const std::string& ext) {
  std::vector<Fixture> out;
  for (const auto& e : std::filesystem::directory_iterator(fixture_dir()))
    if (e.path().extension() == ext) out.push_back({e.path().filename().string(), stegscan::read_file(e.path())});
  std::sort(out.begin(), out.end(), [](const Fixture& a, const Fixture& b) { return a.name < b.name; });
  return out;
}

inline std::vector<Fixture> real_jpegs() { return load_fixtures(".jpg"); }

// Every image the tests know about: third-party encodes plus built-in carriers
// and controls.
inline std::vector<Fixture> all_images() {
  std::vector<Fixture> out;
  for (const char* ext : {".jpg", ".png", ".gif", ".bmp"})
    for (auto& f : load_fixtures(ext)) out.push_back(std::move(f));
  for (const auto& name : stegscan::carriers::carrier_names())
    out.push_back({"builtin:" + name, *stegscan::carriers::carrier_by_name(name)});
  for (auto& c : stegscan::carriers::clean_controls()) out.push_back({c.name, std::move(c.bytes)});
  return out;
}

inline Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes out(n);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& b : out) b = static_cast<std::uint8_t>(byte(rng));
  return out;
}

// Flips, inserts, deletes, truncates or duplicates a slice.
inline Bytes mutate(Bytes b, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> op(0, 5);
  const auto pos = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n)(rng); };
  const int rounds = 1 + static_cast<int>(pos(3));
  for (int r = 0; r < rounds; ++r) {
    switch (op(rng)) {
      case 0:
        if (!b.empty()) b[pos(b.size() - 1)] ^= static_cast<std::uint8_t>(1u << pos(7));
        break;
      case 1:
        if (!b.empty()) b[pos(b.size() - 1)] = static_cast<std::uint8_t>(pos(255));
        break;
      case 2: {
        const Bytes junk = random_bytes(rng, 1 + pos(15));
        b.insert(b.begin() + static_cast<std::ptrdiff_t>(pos(b.size())), junk.begin(), junk.end());
        break;
      }
      case 3:
        if (!b.empty()) {
          const auto at = pos(b.size() - 1);
          const auto len = std::min(b.size() - at, 1 + pos(15));
          b.erase(b.begin() + static_cast<std::ptrdiff_t>(at), b.begin() + static_cast<std::ptrdiff_t>(at + len));
        }
        break;
      case 4:
        b.resize(pos(b.size()));
        break;
      case 5: {
        // Plant a marker-looking pair somewhere.
        static constexpr std::uint8_t markers[] = {0xD8, 0xD9, 0xDA, 0xFE, 0xE1, 0xC0, 0x00, 0xD0};
        const std::uint8_t pair[2] = {0xFF, markers[pos(7)]};
        b.insert(b.begin() + static_cast<std::ptrdiff_t>(pos(b.size())), pair, pair + 2);
        break;
      }
    }
  }
  return b;
}

inline bool regions_cover(const stegscan::ParsedContainer& pc, std::size_t length) {
  std::size_t cursor = 0;
  for (const auto& r : pc.regions) {
    if (r.offset != cursor) return false;
    cursor += r.length;
  }
  return cursor == length;
}

}  // namespace support
