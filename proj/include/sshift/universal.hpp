#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "sshift/codec.hpp"
#include "sshift/core.hpp"
#include "sshift/oracle.hpp"
#include "sshift/toeplitz.hpp"

namespace sshift {

// Which target each layer codes. Layer n takes the next unhoused target as
// soon as n bits suffice for its alphabet; until then (and once a finite
// list runs out) it re-codes the previous one. Layers before the first fit
// stay unassigned.
struct Assignment {
  std::vector<uint32_t> sizes;  // target alphabet sizes, in order

  std::optional<uint64_t> target_of(uint32_t layer) const;
  // First layer coding the target; walks layers up to the cap.
  std::optional<uint32_t> layer_of(uint64_t target, uint32_t layer_cap = 200) const;
};

Assignment assign_layers(const std::vector<SubshiftCode>& targets);

// The built universal subshift: its forbidden stream dovetails the
// skeleton constraints with every layer's rewritten target constraints;
// the registry holds one decoder per target (at its first layer).
struct UniversalBundle {
  SkeletonParams params{4};
  uint32_t max_layer = 5;  // deepest layer whose constraints materialize
  std::vector<SubshiftCode> targets;
  Assignment assignment;
  SubshiftSpec spec;
  OperatorRegistry registry;
  std::vector<size_t> registry_index;  // target -> registry slot
};

// Round-robin dovetail: round r emits one skeleton pattern, then one
// pattern from each assigned layer n <= min(r, max_layer), a layer's
// stream joining in the round matching its number. Exhausted streams
// (fullshifts) drop out of the rotation.
UniversalBundle build_universal_1d(std::vector<SubshiftCode> targets,
                                   const SkeletonParams& params = SkeletonParams(4),
                                   uint32_t max_layer = 5);

// Locally-admissible language of one target's decoder over the built
// spec: enumerates alignments and the free layer bits of the windows the
// decoder reads, keeps the windows avoiding the first `depth` forbidden
// patterns, and collects the decoded words. Other layers are filled with
// a constant or alternating choice their own constraints allow.
std::set<Word> decode_layer_language(const UniversalBundle& bundle, size_t target,
                                     uint32_t len, uint64_t depth,
                                     std::vector<int64_t> offsets = {});

// Same enumeration for a layer nobody codes on: the decoded alphabet is
// the layer's full letter budget 2^n. Useful to confirm a layer is left
// alone by the other layers' constraints.
std::set<Word> decode_free_layer_language(const UniversalBundle& bundle,
                                          uint32_t layer, uint32_t len,
                                          uint64_t depth,
                                          std::vector<int64_t> offsets = {});

// Position of the first coding cell of layer n's block 0 (where one
// packed bit lives).
int64_t pack_bit_cell(const SkeletonParams& params, uint32_t n);

// Bit i of the stream becomes the uniform coding value of layer i+1;
// structural cells come from the canonical alignment, unresolved cells
// stay blank. NotBit surfaces lazily when a non-binary entry is read.
ConfigGenerator pack_binary(const SkeletonParams& params, const NatStream& x);

// The unpacking operator: input i reads the first coding cell of layer
// i+1's block 0 and halts with its bit. Fixed footprint of one cell.
MachinePtr unpack_operator(const SkeletonParams& params);

// Patterns forbidding two unequal coding cells of one layer, anchored by
// the bracket units of the block(s) involved; enumerated over layer,
// block distance and the two cell indices. Layers too deep to
// materialize repeat a layer-1 pair instead.
PatternStream uniformity_stream(const SkeletonParams& params);

// Skeleton plus uniformity: the subshift of packed configurations.
SubshiftSpec packed_spec(const SkeletonParams& params);

// Self-delimiting bit serialization of a natural stream (length-prefixed
// binary: value+1 as leading zeros then its binary digits) and the
// machine parsing it back, one natural per input index.
NatStream gamma_encode_stream(const NatStream& w);
MachinePtr gamma_reader();

// Everything-in-one-point coding of an arbitrary subshift: spec accepts
// exactly the packed serializations of S's points (skeleton, uniformity,
// and patterns barring every bit prefix that already proves the decoded
// stream leaves S); psi = gamma parsing composed with unpacking, so
// psi(pack(bits(x))) re-enumerates x's coding stream.
struct KSResult {
  SubshiftSpec spec;
  MachinePtr psi;
};
KSResult build_KS(const SubshiftSpec& S, const SkeletonParams& params = SkeletonParams(4),
                  uint32_t max_prefix = 6);

// 2-D lift: rows obey the 1-D spec, columns keep the structural type
// (bracket kind vs coding) constant while coding values vary per row.
// The stream opens with the ten mixed vertical dominoes, then embeds the
// 1-D patterns horizontally.
SubshiftSpec axis_constant_lift(const SubshiftSpec& spec_1d,
                                const SkeletonParams& params);

}  // namespace sshift
