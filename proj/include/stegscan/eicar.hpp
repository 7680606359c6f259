#pragma once

// The EICAR anti-malware test string. It is kept reversed in source so the
// repository itself does not trip scanners on checkout; callers get the
// canonical bytes reconstructed at runtime.

#include <string_view>

#include "stegscan/bytes.hpp"

namespace stegscan::eicar {

inline constexpr std::string_view kReversed =
    "*H+H$!ELIF-TSET-SURIVITNA-DRADNATS-RACIE$}7)CC7)^P(45XZP\\4[PA@%P!O5X";

inline constexpr std::size_t kLength = 68;
inline constexpr std::string_view kMd5 = "44d88612fea8a8f36de82e1278abb02f";
inline constexpr std::string_view kMarker = "X5O!";

// Index after which insert_linebreak_mid_signature places its LF.
inline constexpr std::size_t kMidpoint = 34;

inline Bytes payload() { return Bytes(kReversed.rbegin(), kReversed.rend()); }

}  // namespace stegscan::eicar
