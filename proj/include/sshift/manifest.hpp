#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sshift/core.hpp"
#include "sshift/codec.hpp"
#include "sshift/universal.hpp"

namespace sshift {

// Insertion-ordered JSON so emitted documents are byte-stable.
using Json = nlohmann::ordered_json;

// A target entry is one of:
//   "builtin:NAME"            a named spec; "builtin:fullshift:N" is the
//                             unconstrained N-letter shift
//   {"alphabet": s, ...}      an inline spec: optional "dimension" (1),
//                             "forbidden" (list of patterns), "sft" (true),
//                             "precision" (only read by precisions_from_targets)
//   {"code": [s, d, c, ...]}  a literal stream prefix; the last pattern code
//                             repeats forever, an empty tail means no patterns
// A pattern is {"word": "011"} or {"cells": [{"at": [x], "letter": v}, ...]}.

PartialPattern pattern_from_json(const Json& j, uint32_t alphabet, uint32_t dim);
Json pattern_to_json(const PartialPattern& p);

SubshiftSpec spec_from_json(const Json& entry);
SubshiftCode code_from_json(const Json& entry);

struct Manifest {
  uint32_t k = 4;
  std::vector<Json> targets;  // entries kept verbatim for re-serialization
};

Manifest manifest_from_json(const Json& doc);
Manifest load_manifest(const std::string& path);

// Reads the whole file as JSON; BadArgument when unreadable.
Json read_json_file(const std::string& path);

// Per-entry "precision" fields, for callers that need one bound per target.
// BadArgument when any entry lacks the field.
std::vector<std::pair<uint64_t, uint64_t>> precisions_from_targets(
    const std::vector<Json>& targets);

// The bundle document stores the target entries verbatim plus a prefix of
// the combined forbidden stream. Loading rebuilds the bundle from the
// entries and replays the prefix against the stored copy; a disagreement
// means the document does not describe the build it claims to and raises
// HeaderMismatch.
Json bundle_to_json(const UniversalBundle& bundle, const std::vector<Json>& targets,
                    uint64_t prefix_len = 12);
UniversalBundle bundle_from_json(const Json& doc);

UniversalBundle load_bundle(const std::string& path);
void save_bundle(const std::string& path, const UniversalBundle& bundle,
                 const std::vector<Json>& targets, uint64_t prefix_len = 12);

}  // namespace sshift
