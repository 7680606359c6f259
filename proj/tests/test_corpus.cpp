#include <gtest/gtest.h>

#include <unistd.h>

#include <map>

#include "oracles.hpp"
#include "support.hpp"

using namespace stegscan;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("stegscan-corpus-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::map<std::string, std::string> md5_by_id(const CorpusIndex& idx) {
  std::map<std::string, std::string> out;
  for (const auto& e : idx.entries) out[e.id] = e.digests.md5;
  return out;
}

}  // namespace

TEST(Manifest, DefaultCoversProtocolsAndFormats) {
  const CorpusManifest m = default_manifest();
  EXPECT_GE(m.entries.size(), 24u);
  std::set<std::string> ids;
  for (const auto& e : m.entries) {
    ids.insert(e.id);
    EXPECT_TRUE(e.expected.detect) << e.id;
    EXPECT_EQ(e.expected.min_depth, e.expected.chain.size()) << e.id;
  }
  EXPECT_EQ(ids.size(), m.entries.size());
  for (const char* id : {"jpeg-append", "jpeg-metadata", "jpeg-reverse", "jpeg-b64-reverse", "jpeg-base64-wrap",
                         "jpeg-linebreak", "jpeg-trailing-space", "png-append", "gif-append", "bmp-append"})
    EXPECT_TRUE(ids.count(id)) << id;
  EXPECT_GE(carriers::clean_controls().size(), 10u);
}

TEST(Manifest, JsonRoundtripAndShippedCopy) {
  const Json j = manifest_to_json(default_manifest());
  const CorpusManifest back = manifest_from_json(j.dump());
  EXPECT_EQ(manifest_to_json(back), j);
  const Bytes shipped = read_file(fs::path(STEGSCAN_SOURCE_DIR) / "corpus" / "default_manifest.json");
  EXPECT_EQ(Json::parse(to_string(shipped)), j);
  EXPECT_TRUE(oracle::substring_offsets(shipped, eicar::payload()).empty());
}

TEST(Manifest, Validation) {
  EXPECT_THROW(manifest_from_json("{"), Error);
  EXPECT_THROW(manifest_from_json(R"({"entries": [{"id": "a"}]})"), Error);
  const std::string one = R"({"id": "x", "recipe": {"protocol": "append"}, "expected": {"detect": true,
                               "region_kind": "post_eof_trailer", "chain": [], "min_depth": 0}})";
  EXPECT_EQ(manifest_from_json(R"({"entries": [)" + one + "]}").entries.size(), 1u);
  EXPECT_THROW(manifest_from_json(R"({"entries": [)" + one + "," + one + "]}"), Error);
  std::string bad_proto = one;
  bad_proto.replace(bad_proto.find("append"), 6, "splice");
  EXPECT_THROW(manifest_from_json(R"({"entries": [)" + bad_proto + "]}"), Error);
  std::string bad_id = one;
  bad_id.replace(bad_id.find("\"x\""), 3, "\"../x\"");
  EXPECT_THROW(manifest_from_json(R"({"entries": [)" + bad_id + "]}"), Error);
  std::string bad_region = one;
  bad_region.replace(bad_region.find("post_eof_trailer"), 16, "attic");
  EXPECT_THROW(manifest_from_json(R"({"entries": [)" + bad_region + "]}"), Error);
}

TEST(Generate, LayoutIndexAndDeterminism) {
  TempDir a;
  TempDir b;
  const CorpusIndex ia = generate_corpus(default_manifest(), a.path);
  const CorpusIndex ib = generate_corpus(default_manifest(), b.path);
  EXPECT_EQ(ia.entries.size(), default_manifest().entries.size() + carriers::clean_controls().size());
  EXPECT_EQ(md5_by_id(ia), md5_by_id(ib));
  EXPECT_EQ(read_file(a.path / "index.json"), read_file(b.path / "index.json"));
  for (const auto& e : ia.entries) {
    const fs::path f = a.path / e.file;
    ASSERT_TRUE(fs::exists(f)) << e.file;
    EXPECT_EQ(f.stem().string(), e.id);
    EXPECT_EQ(compute_digests(read_file(f)), e.digests) << e.id;
    EXPECT_EQ(read_file(f), read_file(b.path / e.file)) << e.id;
  }
  const CorpusIndex reread = index_from_json(to_string(read_file(a.path / "index.json")));
  EXPECT_EQ(index_to_json(reread), index_to_json(ia));
}

TEST(Generate, EmptyManifestYieldsControlsOnly) {
  TempDir d;
  const CorpusIndex idx = generate_corpus(CorpusManifest{}, d.path);
  EXPECT_EQ(idx.entries.size(), carriers::clean_controls().size());
  for (const auto& e : idx.entries) EXPECT_EQ(e.role, EntryRole::control);
}

TEST(Generate, Errors) {
  TempDir d;
  fs::create_directories(d.path);
  write_file(d.path / "plain", to_bytes("x"));
  EXPECT_THROW(generate_corpus(CorpusManifest{}, d.path / "plain" / "sub"), IoError);

  CorpusManifest m;
  m.entries.push_back({"bad-carrier", {Protocol::append_post_eof, "tiff", "eicar", {}, {}}, {}});
  try {
    generate_corpus(m, d.path / "out");
    FAIL() << "expected CraftError";
  } catch (const CraftError& e) {
    EXPECT_NE(std::string(e.what()).find("bad-carrier"), std::string::npos) << e.what();
  }
}

TEST(Verify, DefaultCorpusAtDepthTwo) {
  TempDir d;
  generate_corpus(default_manifest(), d.path);
  const VerificationResult v = verify_corpus(d.path / "index.json", 2);
  for (const auto& e : v.entries) EXPECT_EQ(e.status, EntryStatus::pass) << e.id << ": " << e.detail;
  EXPECT_TRUE(v.all_passed());
  EXPECT_DOUBLE_EQ(v.summary.detection_rate(), 1.0);
  EXPECT_EQ(v.summary.control_false_positives, 0u);
  EXPECT_GE(v.summary.control_total, 10u);
  EXPECT_EQ(v.summary.attack_total, default_manifest().entries.size());
}

TEST(Verify, DepthZeroFlagsExpectedMisses) {
  TempDir d;
  generate_corpus(default_manifest(), d.path);
  const VerificationResult v = verify_corpus(d.path / "index.json", 0);
  EXPECT_EQ(v.summary.failed, 0u);
  std::map<std::string, EntryStatus> by_id;
  for (const auto& e : v.entries) by_id[e.id] = e.status;
  EXPECT_EQ(by_id["jpeg-append"], EntryStatus::pass);
  EXPECT_EQ(by_id["jpeg-metadata"], EntryStatus::pass);
  EXPECT_EQ(by_id["jpeg-reverse"], EntryStatus::expected_miss);
  EXPECT_EQ(by_id["jpeg-b64-reverse"], EntryStatus::expected_miss);
  EXPECT_EQ(by_id["jpeg-base64-wrap"], EntryStatus::expected_miss);
  EXPECT_EQ(by_id["png-b64"], EntryStatus::expected_miss);
  EXPECT_LT(v.summary.detection_rate(), 1.0);
}

TEST(Verify, MissingFileFailsEntryOnly) {
  TempDir d;
  const CorpusIndex idx = generate_corpus(default_manifest(), d.path);
  fs::remove(d.path / idx.entries[0].file);
  const VerificationResult v = verify_corpus(d.path / "index.json", 2);
  EXPECT_EQ(v.summary.failed, 1u);
  EXPECT_EQ(v.entries[0].status, EntryStatus::fail);
  EXPECT_FALSE(v.entries[0].detail.empty());
  EXPECT_EQ(v.summary.passed, idx.entries.size() - 1);
}

TEST(Verify, WrongExpectationFails) {
  TempDir d;
  CorpusManifest m;
  m.entries.push_back({"mislabeled",
                       {Protocol::obfuscated_append, "jpeg", "eicar", {StepKind::reverse}, {}},
                       {true, "metadata", {StepKind::reverse}, 1}});
  generate_corpus(m, d.path);
  const VerificationResult v = verify_corpus(d.path / "index.json", 2);
  EXPECT_EQ(v.summary.failed, 1u);
  EXPECT_FALSE(v.all_passed());
}

TEST(Verify, CorruptIndexIsAnError) {
  TempDir d;
  EXPECT_THROW(verify_corpus(d.path / "nope.json", 2), IoError);
  fs::create_directories(d.path);
  write_file(d.path / "index.json", to_bytes("[1, 2"));
  EXPECT_THROW(verify_corpus(d.path / "index.json", 2), Error);
}

TEST(Verify, DefangedOnDiskStorage) {
  TempDir d;
  const CorpusIndex idx = generate_corpus(default_manifest(), d.path, {true});
  for (const auto& e : idx.entries) {
    EXPECT_TRUE(e.file.ends_with(".b64")) << e.file;
    EXPECT_TRUE(oracle::substring_offsets(read_file(d.path / e.file), eicar::payload()).empty()) << e.file;
  }
  const VerificationResult v = verify_corpus(d.path / "index.json", 2);
  EXPECT_TRUE(v.all_passed());
  EXPECT_DOUBLE_EQ(v.summary.detection_rate(), 1.0);
  EXPECT_EQ(v.summary.control_false_positives, 0u);
}

TEST(Verify, JsonSummary) {
  TempDir d;
  generate_corpus(default_manifest(), d.path);
  const Json j = verification_to_json(verify_corpus(d.path / "index.json", 2));
  EXPECT_EQ(j["summary"]["detection_rate"], 1.0);
  EXPECT_EQ(j["summary"]["false_positive_rate"], 0.0);
  EXPECT_EQ(j["entries"].size(), default_manifest().entries.size() + carriers::clean_controls().size());
}
