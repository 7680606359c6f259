#pragma once

// Values frozen from tests/oracles/goldens.py (Python hashlib and a plain
// frequency count). Regenerate there, never from the library under test.

namespace golden {

inline constexpr const char* kPayloadMd5 = "44d88612fea8a8f36de82e1278abb02f";
inline constexpr const char* kPayloadSha1 = "3395856ce81f2b7382dee72602f798b642f14140";
inline constexpr const char* kPayloadSha256 = "275a021bbfb6489e54d471899f7db9d1663fc695ec2fe2a2c4538aabf651fd0f";

inline constexpr const char* kSpacedMd5 = "62b97e1a78f740a95997f4b24f59ffd3";
inline constexpr const char* kSpacedSha1 = "f2bd4201a9b8cbfba9183bd5cd5a85fd6af52ecf";
inline constexpr const char* kSpacedSha256 = "5f0aebf409179373903f75f47fe482cf8a54cb6df07669b10d5c7a9d918fa29e";

inline constexpr const char* kLinebreakMd5 = "1a13bed20837d9aacf037c702b76d8eb";
inline constexpr const char* kEmptyMd5 = "d41d8cd98f00b204e9800998ecf8427e";

inline constexpr double kPayloadEntropy = 4.8723276870872425;
inline constexpr std::size_t kPayloadBase64Len = 92;

}  // namespace golden
