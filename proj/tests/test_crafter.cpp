#include <gtest/gtest.h>

#include "golden.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace stegscan;

namespace {

// Image regions (everything but metadata and trailer) in order.
std::vector<Bytes> image_slices(ByteView file) {
  std::vector<Bytes> out;
  const ParsedContainer pc = parse_container(file);
  for (const auto& r : pc.regions)
    if (r.kind != RegionKind::metadata && r.kind != RegionKind::post_eof_trailer) out.push_back(extract_region(file, r));
  return out;
}

}  // namespace

TEST(Payload, DefangedBuiltinReconstructs) {
  const Bytes p = eicar::payload();
  EXPECT_EQ(p.size(), 68u);
  EXPECT_EQ(compute_digests(p).md5, golden::kPayloadMd5);
  EXPECT_EQ(to_string(ByteView(p).first(4)), eicar::kMarker);
  EXPECT_EQ(PayloadSpec::eicar().bytes, p);
  EXPECT_EQ(PayloadSpec::eicar().source, PayloadSource::builtin_eicar);
}

TEST(CraftAppend, WhiteJpeg) {
  const Bytes carrier = carriers::white_jpeg();
  const Bytes out = craft_append(carrier, eicar::payload());
  EXPECT_EQ(out.size(), carrier.size() + 68);
  const ParsedContainer pc = parse_container(out);
  ASSERT_NE(pc.trailer(), nullptr);
  EXPECT_EQ(extract_region(out, *pc.trailer()), eicar::payload());
  EXPECT_EQ(image_slices(out), image_slices(carrier));
}

TEST(CraftAppend, EmptyPayloadIsIdentity) {
  const Bytes carrier = carriers::encode_jpeg(carriers::gradient(8, 8));
  EXPECT_EQ(craft_append(carrier, {}), carrier);
}

TEST(CraftAppend, PngTrailerMatchesIndependentTail) {
  const Bytes out = craft_append(carriers::white_png(), eicar::payload());
  const ParsedContainer pc = parse_container(out);
  ASSERT_NE(pc.trailer(), nullptr);
  EXPECT_EQ(Bytes(out.end() - 68, out.end()), eicar::payload());
  EXPECT_EQ(extract_region(out, *pc.trailer()), eicar::payload());
}

TEST(CraftAppend, RejectsBadCarriers) {
  EXPECT_THROW(craft_append(to_bytes("plain text"), eicar::payload()), CraftError);
  Bytes truncated = carriers::white_jpeg();
  truncated.resize(truncated.size() - 2);
  EXPECT_THROW(craft_append(truncated, eicar::payload()), CraftError);
  const Bytes once = craft_append(carriers::white_jpeg(), eicar::payload());
  EXPECT_THROW(craft_append(once, eicar::payload()), CraftError);
}

TEST(CraftMetadata, CommentLengthField) {
  const Bytes carrier = carriers::white_jpeg();
  const Bytes out = craft_metadata(carrier, to_bytes("hello"));
  const ParsedContainer pc = parse_container(out);
  ASSERT_TRUE(pc.well_formed);
  const auto com = std::find_if(pc.regions.begin(), pc.regions.end(),
                                [](const ByteRegion& r) { return r.label == "COM"; });
  ASSERT_NE(com, pc.regions.end());
  EXPECT_EQ(com->length, 9u);
  EXPECT_EQ(out[com->offset], 0xFF);
  EXPECT_EQ(out[com->offset + 1], 0xFE);
  EXPECT_EQ(read_be16(out, com->offset + 2), 7u);
  EXPECT_EQ(to_string(ByteView(out).subspan(com->offset + 4, 5)), "hello");
  EXPECT_EQ(image_slices(out), image_slices(carrier));
}

TEST(CraftMetadata, InsertedAfterLastLeadingApp) {
  carriers::JpegOptions opts;
  opts.exif_tiff = carriers::minimal_exif("unit");
  const Bytes carrier = carriers::encode_jpeg(carriers::gradient(8, 8), opts);
  const Bytes out = craft_metadata(carrier, eicar::payload());
  const ParsedContainer pc = parse_container(out);
  ASSERT_GE(pc.regions.size(), 4u);
  EXPECT_EQ(pc.regions[1].label, "APP0/JFIF");
  EXPECT_EQ(pc.regions[2].label, "APP1/EXIF");
  EXPECT_EQ(pc.regions[3].label, "COM");
}

TEST(CraftMetadata, SizeBoundaryAndFormat) {
  const Bytes carrier = carriers::white_jpeg();
  EXPECT_NO_THROW(craft_metadata(carrier, Bytes(kMaxMetadataPayload, 'a')));
  EXPECT_THROW(craft_metadata(carrier, Bytes(65532, 'a')), CraftError);
  EXPECT_THROW(craft_metadata(carriers::white_png(), to_bytes("x")), CraftError);
  const Bytes big = craft_metadata(carrier, Bytes(kMaxMetadataPayload, 'a'));
  EXPECT_TRUE(parse_container(big).well_formed);
}

TEST(CraftObfuscated, Chains) {
  const Bytes carrier = carriers::white_jpeg();
  const Bytes rev = craft_obfuscated(carrier, eicar::payload(), {StepKind::reverse});
  const ParsedContainer pc = parse_container(rev);
  ASSERT_NE(pc.trailer(), nullptr);
  EXPECT_EQ(to_string(extract_region(rev, *pc.trailer())).substr(0, 5), "*H+H$");

  EXPECT_EQ(craft_obfuscated(carrier, eicar::payload(), {}), craft_append(carrier, eicar::payload()));

  const Bytes b64 = craft_obfuscated(carrier, eicar::payload(), {StepKind::reverse, StepKind::base64_encode});
  const Bytes tail(b64.begin() + static_cast<std::ptrdiff_t>(carrier.size()), b64.end());
  EXPECT_TRUE(base64::try_decode(tail));
  const auto views = inverse_views(tail, 2);
  EXPECT_TRUE(std::any_of(views.views.begin(), views.views.end(),
                          [](const InverseView& v) { return v.bytes == eicar::payload(); }));
}

TEST(CraftObfuscated, RejectsLossyOrLongChains) {
  const Bytes carrier = carriers::white_jpeg();
  EXPECT_THROW(craft_obfuscated(carrier, eicar::payload(), {StepKind::strip_linebreaks}), CraftError);
  EXPECT_THROW(craft_obfuscated(carrier, eicar::payload(), {StepKind::base64_decode}), CraftError);
  TransformChain nine;
  for (int i = 0; i < 9; ++i) nine.steps.push_back({StepKind::reverse, {}});
  EXPECT_THROW(craft_obfuscated(carrier, eicar::payload(), nine), CraftError);
}

TEST(CraftBase64Wrap, Examples) {
  EXPECT_TRUE(craft_base64_wrap({}).empty());
  EXPECT_EQ(to_string(craft_base64_wrap(to_bytes("abc"))), "YWJj");
  const Bytes carrier = craft_append(carriers::white_jpeg(), eicar::payload());
  const Bytes text = craft_base64_wrap(carrier);
  EXPECT_EQ(oracle::b64_decode(text), carrier);
}

TEST(Split, AtMarker) {
  const Bytes carrier = craft_append(carriers::white_jpeg(), eicar::payload());
  const auto r = split_at_marker(carrier, to_bytes(eicar::kMarker));
  EXPECT_TRUE(r.found);
  EXPECT_EQ(r.part2, eicar::payload());
  EXPECT_EQ(concat(r.part1, r.part2), carrier);
}

TEST(Split, NotFoundAndEmptyMarker) {
  const Bytes b = to_bytes("nothing to see");
  const auto r = split_at_marker(b, to_bytes("zzz"));
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.part1, b);
  EXPECT_TRUE(r.part2.empty());
  EXPECT_THROW(split_at_marker(b, {}), Error);
}

TEST(Split, FirstOccurrence) {
  const auto r = split_at_marker(to_bytes("aXbXc"), to_bytes("X"));
  EXPECT_EQ(to_string(r.part1), "a");
  EXPECT_EQ(to_string(r.part2), "XbXc");
}

TEST(Split, ConcatenationIdentityProperty) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Bytes b = support::random_bytes(rng, rng() % 100);
    Bytes marker = support::random_bytes(rng, 1 + rng() % 2);
    const auto r = split_at_marker(b, marker);
    ASSERT_EQ(concat(r.part1, r.part2), b);
    const auto hits = oracle::substring_offsets(b, marker);
    ASSERT_EQ(r.found, !hits.empty());
    if (r.found) {
      ASSERT_EQ(r.part1.size(), hits.front());
    }
  }
}

TEST(Mutate, TrailingSpace) {
  const Bytes spaced = mutate_variant(eicar::payload(), Mutation::append_trailing_space);
  EXPECT_EQ(spaced.size(), 69u);
  EXPECT_EQ(spaced.back(), ' ');
  const DigestSet d = compute_digests(spaced);
  EXPECT_NE(d.md5, golden::kPayloadMd5);
  EXPECT_EQ(d.md5, golden::kSpacedMd5);
  EXPECT_EQ(mutate_variant({}, Mutation::append_trailing_space), to_bytes(" "));
}

TEST(Mutate, LinebreakAtMidpoint) {
  const Bytes carrier = craft_append(carriers::white_jpeg(), eicar::payload());
  const Bytes broken = mutate_variant(carrier, Mutation::insert_linebreak_mid_signature);
  ASSERT_EQ(broken.size(), carrier.size() + 1);
  EXPECT_EQ(broken[carrier.size() - 68 + 34], '\n');
  EXPECT_TRUE(oracle::substring_offsets(broken, eicar::payload()).empty());
  EXPECT_EQ(oracle::strip_linebreaks(broken).size(), oracle::strip_linebreaks(carrier).size());
  EXPECT_EQ(compute_digests(mutate_variant(eicar::payload(), Mutation::insert_linebreak_mid_signature)).md5,
            golden::kLinebreakMd5);
  EXPECT_THROW(mutate_variant(carriers::white_jpeg(), Mutation::insert_linebreak_mid_signature), CraftError);
}

TEST(Craft, RecipeDispatch) {
  CraftRecipe r;
  r.carrier = carriers::white_jpeg();
  r.protocol = Protocol::append_post_eof;
  EXPECT_EQ(craft(r), craft_append(r.carrier, eicar::payload()));
  r.protocol = Protocol::base64_wrap;
  r.chain = {StepKind::reverse};  // ignored by the wrap
  EXPECT_EQ(craft(r), craft_base64_wrap(craft_append(r.carrier, eicar::payload())));
  r.protocol = Protocol::append_post_eof;
  r.chain = {};
  r.mutations = {Mutation::append_trailing_space};
  const Bytes spaced = craft(r);
  EXPECT_EQ(spaced.back(), ' ');
  EXPECT_EQ(spaced.size(), r.carrier.size() + 69);
}

TEST(Craft, ProtocolNames) {
  EXPECT_EQ(protocol_from_string("append"), Protocol::append_post_eof);
  EXPECT_EQ(protocol_from_string("metadata_embed"), Protocol::metadata_embed);
  EXPECT_EQ(protocol_from_string("base64"), Protocol::base64_wrap);
  EXPECT_FALSE(protocol_from_string("splice"));
  EXPECT_EQ(mutation_from_string("linebreak"), Mutation::insert_linebreak_mid_signature);
  EXPECT_FALSE(mutation_from_string("tab"));
}

// Carrier integrity over every built-in carrier and both non-wrap protocols.
TEST(CrafterProperties, CarrierIntegrity) {
  for (const auto& name : carriers::carrier_names()) {
    const Bytes carrier = *carriers::carrier_by_name(name);
    const Bytes appended = craft_obfuscated(carrier, eicar::payload(), {StepKind::reverse});
    EXPECT_EQ(image_slices(appended), image_slices(carrier)) << name;
    if (detect_format(carrier).kind == FormatKind::jpeg) {
      EXPECT_EQ(image_slices(craft_metadata(carrier, eicar::payload())), image_slices(carrier)) << name;
    }
  }
}
