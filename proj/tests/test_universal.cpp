#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <vector>

#include "sshift/codec.hpp"
#include "sshift/core.hpp"
#include "sshift/errors.hpp"
#include "sshift/oracle.hpp"
#include "sshift/toeplitz.hpp"
#include "sshift/universal.hpp"

using namespace sshift;

namespace {

SubshiftCode coded(const std::string& builtin) {
  if (builtin.rfind("fullshift:", 0) == 0)
    return fullshift_code(uint32_t(std::stoul(builtin.substr(10))));
  return spec_to_code(builtin_spec(builtin));
}

NatStream list_stream(std::vector<uint64_t> vals) {
  return NatStream([vals](uint64_t i) {
    if (i >= vals.size()) throw Error(ErrorKind::CapExceeded, "past the list");
    return vals[i];
  });
}

std::set<Word> words_over(uint32_t alphabet, uint32_t len) {
  std::set<Word> out;
  uint64_t total = 1;
  for (uint32_t i = 0; i < len; ++i) total *= alphabet;
  for (uint64_t v = 0; v < total; ++v) {
    std::vector<Letter> ls(len);
    uint64_t x = v;
    for (uint32_t j = len; j-- > 0;) {
      ls[j] = Letter(x % alphabet);
      x /= alphabet;
    }
    out.insert(Word(alphabet, std::move(ls)));
  }
  return out;
}

}  // namespace

TEST_CASE("layer assignment walks targets in order of fit") {
  std::vector<SubshiftCode> ts = {coded("golden_mean"), coded("no00no11"),
                                  coded("fullshift:4")};
  Assignment a = assign_layers(ts);
  REQUIRE(a.sizes == std::vector<uint32_t>{2, 2, 4});

  CHECK(a.target_of(1) == 0);
  CHECK(a.target_of(2) == 1);
  CHECK(a.target_of(3) == 2);
  // no target left: deeper layers re-code the last one
  CHECK(a.target_of(4) == 2);
  CHECK(a.target_of(9) == 2);

  CHECK(a.layer_of(0) == 1);
  CHECK(a.layer_of(1) == 2);
  CHECK(a.layer_of(2) == 3);
  CHECK_FALSE(a.layer_of(3).has_value());
}

TEST_CASE("layers too small for the next alphabet stay unassigned") {
  Assignment a = assign_layers({coded("fullshift:8")});
  CHECK_FALSE(a.target_of(1).has_value());
  CHECK_FALSE(a.target_of(2).has_value());
  CHECK(a.target_of(3) == 0);
  CHECK(a.target_of(4) == 0);
  CHECK(a.layer_of(0) == 3);
}

TEST_CASE("a single binary target owns every layer") {
  Assignment a = assign_layers({coded("golden_mean")});
  for (uint32_t n = 1; n <= 6; ++n) CHECK(a.target_of(n) == 0);
  CHECK(a.layer_of(0) == 1);
}

TEST_CASE("build rejects targets needing deeper layers than materialized") {
  CHECK_THROWS_AS(build_universal_1d({coded("fullshift:64")}), Error);
}

TEST_CASE("the built stream interleaves skeleton and layer constraints") {
  UniversalBundle b = build_universal_1d({coded("golden_mean")});
  CHECK(b.spec.alphabet == kSkeletonAlphabet);
  CHECK(b.registry.size() == 1);
  CHECK(b.registry.name_at(0) == "layer-1");

  PatternStream skel = skeleton_forbidden_stream(b.params);
  // the lane sees the coded round trip: completions, last one repeated
  PatternStream lane = transform_forbidden(
      b.params, 1, code_to_spec(coded("golden_mean")).forbidden, 2);
  CHECK(b.spec.forbidden.at(0) == skel.at(0));
  CHECK(b.spec.forbidden.at(1) == lane.at(0));
  CHECK(b.spec.forbidden.at(2) == skel.at(1));
  CHECK(b.spec.forbidden.at(3) == lane.at(1));
}

TEST_CASE("a fullshift target adds no constraints beyond the skeleton") {
  UniversalBundle b = build_universal_1d({coded("fullshift:2")});
  PatternStream skel = skeleton_forbidden_stream(b.params);
  // the lane raises NoPatterns immediately, so only skeleton entries flow
  for (uint64_t i = 0; i < 6; ++i) CHECK(b.spec.forbidden.at(i) == skel.at(i));
  CHECK(decode_layer_language(b, 0, 4, 48) == words_over(2, 4));
}

TEST_CASE("decoded golden-mean language matches the target") {
  UniversalBundle b = build_universal_1d({coded("golden_mean")});
  std::set<Word> got = decode_layer_language(b, 0, 3, 48);
  CHECK(got == sft_language(builtin_spec("golden_mean"), 3));
  CHECK(got.size() == 5);
  CHECK(decode_layer_language(b, 0, 4, 48) ==
        sft_language(builtin_spec("golden_mean"), 4));
}

TEST_CASE("two targets decode independently at their own layers") {
  UniversalBundle b =
      build_universal_1d({coded("golden_mean"), coded("no00no11")});
  CHECK(decode_layer_language(b, 0, 4, 64) ==
        sft_language(builtin_spec("golden_mean"), 4));
  std::set<Word> no00 = decode_layer_language(b, 1, 4, 64);
  CHECK(no00 == sft_language(builtin_spec("no00no11"), 4));
  CHECK(no00 == std::set<Word>{Word::from_digits(2, "0101"),
                               Word::from_digits(2, "1010")});
}

TEST_CASE("tightening one target leaves the other layer's language alone") {
  SubshiftSpec tight{2, 1,
                     PatternStream::from_list(
                         {PartialPattern::from_word(Word::from_digits(2, "11")),
                          PartialPattern::from_word(Word::from_digits(2, "000"))}),
                     2};
  UniversalBundle loose =
      build_universal_1d({coded("golden_mean"), coded("no00no11")});
  UniversalBundle tightened =
      build_universal_1d({spec_to_code(tight), coded("no00no11")});

  CHECK(decode_layer_language(loose, 1, 4, 64) ==
        decode_layer_language(tightened, 1, 4, 64));
  // while the tightened layer itself shrinks
  CHECK(decode_layer_language(tightened, 0, 3, 64) ==
        sft_language(tight, 3));
}

TEST_CASE("free layers decode the full letter budget, constrained or not") {
  UniversalBundle gm = build_universal_1d({coded("golden_mean")});
  UniversalBundle bare = build_universal_1d({});
  CHECK(bare.registry.size() == 0);

  // golden mean sits at layer 1; layer 2 is free in both bundles
  std::set<Word> with_target = decode_free_layer_language(gm, 2, 2, 48);
  std::set<Word> without = decode_free_layer_language(bare, 2, 2, 48);
  CHECK(with_target == without);
  CHECK(with_target == words_over(4, 2));
}

TEST_CASE("packed bit cells follow the layer recurrence") {
  SkeletonParams params(4);
  CHECK(pack_bit_cell(params, 1) == 1);
  CHECK(pack_bit_cell(params, 2) == 18);
  CHECK(pack_bit_cell(params, 3) == 222);
  CHECK(pack_bit_cell(params, 4) == 2670);

  for (uint32_t n = 1; n <= 4; ++n) {
    CellInfo info = cell_role(params, pack_bit_cell(params, n), n);
    CHECK(info.layer == n);
    CHECK(info.role == CellRole::Coding);
    CHECK(info.unit_class == 1);
    CHECK(info.cell_offset == 0);
    CHECK(info.group == 0);
  }
}

TEST_CASE("unpack inverts pack on bit-stream prefixes") {
  SkeletonParams params(4);
  MachinePtr psi = unpack_operator(params);
  std::mt19937 rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<uint64_t> bits(12);
    for (auto& b : bits) b = rng() & 1;
    NatStream x = list_stream(bits);
    NatStream config = encode_config(pack_binary(params, x), kSkeletonAlphabet, 1);
    for (uint64_t i = 0; i < 8; ++i) {
      CHECK(run_operator(*psi, config, i) == bits[i]);
      auto fp = psi->footprint(i);
      REQUIRE(fp.has_value());
      CHECK(fp->size() == 1);  // one cell per bit
    }
  }
}

TEST_CASE("packing a non-bit stream surfaces NotBit") {
  SkeletonParams params(4);
  NatStream x = list_stream({0, 2});
  ConfigGenerator gen = pack_binary(params, x);
  CHECK(gen({1}) == kC0);  // layer 1 reads bit 0
  try {
    gen({18});  // layer 2 cell reads the bad entry
    FAIL("expected NotBit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotBit);
  }
}

TEST_CASE("uniform packings pass the packed spec, mixed layers fail") {
  SkeletonParams params(4);
  ConfigGenerator zeros = pack_binary(params, NatStream([](uint64_t) { return 0; }));

  const int64_t lo = -200, hi = 200;
  std::vector<Letter> letters;
  for (int64_t p = lo; p <= hi; ++p) letters.push_back(zeros({p}));
  Word uniform(kSkeletonAlphabet, letters);

  SubshiftSpec packed = packed_spec(params);
  for (uint64_t i = 0; i < 120; ++i) {
    PartialPattern pat = packed.forbidden.at(i);
    for (int64_t t = -pat.min_coord(); t + pat.max_coord() < int64_t(uniform.size());
         ++t)
      CHECK_FALSE(matches(uniform, pat, t));
  }

  // same structure, but layer 1's block 0 and block 1 disagree
  std::vector<Letter> mixed = letters;
  mixed[size_t(1 - lo)] = kC1;  // layer-1 cell of block 0
  Word broken(kSkeletonAlphabet, mixed);
  bool caught = false;
  for (uint64_t i = 0; i < 200 && !caught; ++i) {
    PartialPattern pat = packed.forbidden.at(i);
    for (int64_t t = -pat.min_coord(); t + pat.max_coord() < int64_t(broken.size());
         ++t)
      if (matches(broken, pat, t)) {
        caught = true;
        break;
      }
  }
  CHECK(caught);
}

TEST_CASE("gamma serialization round trips") {
  // 0 -> "1", 1 -> "010", 2 -> "011"
  NatStream bits0 = gamma_encode_stream(list_stream({0}));
  CHECK(bits0.at(0) == 1);
  NatStream bits2 = gamma_encode_stream(list_stream({2}));
  CHECK(bits2.at(0) == 0);
  CHECK(bits2.at(1) == 1);
  CHECK(bits2.at(2) == 1);

  std::vector<uint64_t> vals = {3, 0, 7, 1, 0, 12, 2, 5};
  NatStream bits = gamma_encode_stream(list_stream(vals));
  MachinePtr reader = gamma_reader();
  for (uint64_t i = 0; i < vals.size(); ++i)
    CHECK(run_operator(*reader, bits, i) == vals[i]);
}

TEST_CASE("gamma reader rejects broken streams") {
  MachinePtr reader = gamma_reader();
  try {
    run_operator(*reader, NatStream([](uint64_t) { return 0; }), 0);
    FAIL("expected MalformedCode");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedCode);
  }
  try {
    run_operator(*reader, NatStream([](uint64_t) { return 2; }), 0);
    FAIL("expected NotBit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotBit);
  }
}

TEST_CASE("the everything-point subshift refutes wrong headers early") {
  KSResult ks = build_KS(builtin_spec("golden_mean"));

  PatternStream skel = skeleton_forbidden_stream(SkeletonParams(4));
  PatternStream uni = uniformity_stream(SkeletonParams(4));
  CHECK(ks.spec.forbidden.at(0) == skel.at(0));
  CHECK(ks.spec.forbidden.at(1) == uni.at(0));

  // first refutable prefix is the single bit 1 (first value must be the
  // alphabet, 2); its pattern pins layer 1's block 0 to C1
  PartialPattern first_bad = ks.spec.forbidden.at(2);
  PartialPattern expect(kSkeletonAlphabet, 1,
                        {{{0}, kLB}, {{1}, kC1}, {{5}, kRB}});
  CHECK(first_bad == expect);
}

TEST_CASE("psi recovers a coded point from its packed serialization") {
  SkeletonParams params(4);
  KSResult ks = build_KS(builtin_spec("golden_mean"), params);

  ConfigGenerator point = [](const std::vector<int64_t>& pos) {
    return Letter(((pos[0] % 2) + 2) % 2);  // ...010101...
  };
  NatStream w = encode_config(point, 2, 1);
  NatStream bits = gamma_encode_stream(w);
  NatStream packed = encode_config(pack_binary(params, bits), kSkeletonAlphabet, 1);

  for (uint64_t i = 0; i < 6; ++i)
    CHECK(run_operator(*ks.psi, packed, i, uint64_t(1) << 22) == w.at(i));
}

TEST_CASE("the prefix cap is bounded by addressable layers") {
  CHECK_THROWS_AS(build_KS(builtin_spec("golden_mean"), SkeletonParams(4), 7),
                  Error);
}

TEST_CASE("the 2-D lift forbids mixed columns and keeps rows independent") {
  UniversalBundle b = build_universal_1d({coded("golden_mean")});
  SubshiftSpec lifted = axis_constant_lift(b.spec, b.params);
  CHECK(lifted.dim == 2);
  CHECK_FALSE(lifted.sft_bound.has_value());

  // ten mixed vertical dominoes up front
  std::set<PartialPattern> head;
  for (uint64_t i = 0; i < 10; ++i) {
    PartialPattern p = lifted.forbidden.at(i);
    REQUIRE(p.cells.size() == 2);
    CHECK(p.cells[0].first == std::vector<int64_t>{0, 0});
    CHECK(p.cells[1].first == std::vector<int64_t>{0, 1});
    head.insert(p);
  }
  CHECK(head.size() == 10);

  // bracket over coding is among them
  PartialPattern lb_over_c0(kSkeletonAlphabet, 2, {{{0, 0}, kC0}, {{0, 1}, kLB}});
  CHECK(head.count(lb_over_c0) == 1);
  // value changes along a column are not
  PartialPattern c1_over_c0(kSkeletonAlphabet, 2, {{{0, 0}, kC0}, {{0, 1}, kC1}});
  CHECK(head.count(c1_over_c0) == 0);

  // entry 10 embeds the first 1-D pattern into a row
  PartialPattern row0 = lifted.forbidden.at(10);
  PartialPattern src = b.spec.forbidden.at(0);
  REQUIRE(row0.cells.size() == src.cells.size());
  for (size_t c = 0; c < src.cells.size(); ++c) {
    CHECK(row0.cells[c].first ==
          std::vector<int64_t>{src.cells[c].first[0], 0});
    CHECK(row0.cells[c].second == src.cells[c].second);
  }

  // same skeleton, different layer-1 bits: admissible as a 2-row window
  SkeletonParams params(4);
  LayerBits bits_a = {{{1, 0, 1, 1}}};
  LayerBits bits_b = {{{0, 1, 0, 0}}};
  Word row_a = skeleton_generate(params, 1, bits_a);
  Word row_b = skeleton_generate(params, 1, bits_b);
  Grid2D g{0, 0, 12, 2, kSkeletonAlphabet, {}};
  g.data.assign(24, 0);
  for (int64_t x = 0; x < 12; ++x) {
    g.set(x, 0, row_a[size_t(x)]);
    g.set(x, 1, row_b[size_t(x)]);
  }
  for (uint64_t i = 0; i < 40; ++i) CHECK_FALSE(occurs_in(g, lifted.forbidden.at(i)));

  // rowwise decoding reads each row's own bits
  CHECK(phi_value(params, 1, row_a) == 1);
  CHECK(phi_value(params, 1, row_b) == 0);

  // a vertically mixed column is caught
  Grid2D bad{0, 0, 1, 2, kSkeletonAlphabet, {}};
  bad.data = {kC0, kLB};
  bool hit = false;
  for (uint64_t i = 0; i < 10; ++i)
    if (occurs_in(bad, lifted.forbidden.at(i))) hit = true;
  CHECK(hit);
}
