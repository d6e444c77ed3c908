#include "sshift/manifest.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "sshift/errors.hpp"
#include "sshift/toeplitz.hpp"

namespace sshift {

namespace {

[[noreturn]] void bad(const std::string& detail) {
  throw Error(ErrorKind::BadArgument, detail);
}

uint64_t require_uint(const Json& j, const char* what) {
  if (!j.is_number_unsigned()) bad(std::string(what) + " must be a non-negative integer");
  return j.get<uint64_t>();
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad(path + ": " + e.what());
  }
}

PartialPattern pattern_from_json(const Json& j, uint32_t alphabet, uint32_t dim) {
  if (j.contains("word")) {
    if (dim != 1) bad("\"word\" patterns are one-dimensional");
    if (!j["word"].is_string()) bad("\"word\" must be a digit string");
    return PartialPattern::from_word(Word::from_digits(alphabet, j["word"].get<std::string>()));
  }
  if (j.contains("cells")) {
    if (!j["cells"].is_array() || j["cells"].empty()) bad("\"cells\" must be a non-empty array");
    std::vector<std::pair<std::vector<int64_t>, Letter>> cells;
    for (const auto& c : j["cells"]) {
      if (!c.contains("at") || !c.contains("letter")) bad("a cell needs \"at\" and \"letter\"");
      if (!c["at"].is_array() || c["at"].size() != dim) bad("\"at\" must list one coordinate per axis");
      std::vector<int64_t> at;
      for (const auto& x : c["at"]) {
        if (!x.is_number_integer()) bad("coordinates must be integers");
        at.push_back(x.get<int64_t>());
      }
      uint64_t letter = require_uint(c["letter"], "\"letter\"");
      if (letter >= alphabet) bad("letter out of alphabet range");
      cells.emplace_back(std::move(at), static_cast<Letter>(letter));
    }
    return PartialPattern(alphabet, dim, std::move(cells));
  }
  bad("a pattern needs \"word\" or \"cells\"");
}

Json pattern_to_json(const PartialPattern& p) {
  Json cells = Json::array();
  for (const auto& [at, letter] : p.cells) {
    Json cell;
    cell["at"] = at;
    cell["letter"] = letter;
    cells.push_back(std::move(cell));
  }
  Json out;
  out["cells"] = std::move(cells);
  return out;
}

SubshiftSpec spec_from_json(const Json& entry) {
  if (entry.is_string()) {
    std::string name = entry.get<std::string>();
    if (name.rfind("builtin:", 0) == 0) name = name.substr(8);
    return builtin_spec(name);
  }
  if (!entry.is_object()) bad("a target entry is a builtin name or an object");
  if (entry.contains("code")) return code_to_spec(code_from_json(entry));
  if (!entry.contains("alphabet")) bad("an inline spec needs \"alphabet\"");

  SubshiftSpec spec;
  spec.alphabet = static_cast<uint32_t>(require_uint(entry["alphabet"], "\"alphabet\""));
  if (spec.alphabet == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet 0 has no points");
  spec.dim = entry.contains("dimension")
                 ? static_cast<uint32_t>(require_uint(entry["dimension"], "\"dimension\""))
                 : 1;
  if (spec.dim == 0) bad("dimension must be at least 1");

  std::vector<PartialPattern> pats;
  if (entry.contains("forbidden")) {
    if (!entry["forbidden"].is_array()) bad("\"forbidden\" must be an array");
    for (const auto& p : entry["forbidden"])
      pats.push_back(pattern_from_json(p, spec.alphabet, spec.dim));
  }
  bool sft = entry.contains("sft") ? entry["sft"].get<bool>() : true;
  if (sft) spec.sft_bound = pats.size();
  spec.forbidden = PatternStream::from_list(std::move(pats));
  return spec;
}

SubshiftCode code_from_json(const Json& entry) {
  if (entry.is_string()) {
    std::string name = entry.get<std::string>();
    if (name.rfind("builtin:", 0) == 0) name = name.substr(8);
    if (name.rfind("fullshift:", 0) == 0) {
      uint32_t alpha = 0;
      try {
        alpha = static_cast<uint32_t>(std::stoul(name.substr(10)));
      } catch (const std::exception&) {
        bad("malformed fullshift alphabet in \"" + name + "\"");
      }
      return fullshift_code(alpha);
    }
    return spec_to_code(builtin_spec(name));
  }
  if (!entry.is_object()) bad("a target entry is a builtin name or an object");
  if (!entry.contains("code")) return spec_to_code(spec_from_json(entry));

  const Json& arr = entry["code"];
  if (!arr.is_array() || arr.size() < 2) bad("\"code\" must list at least alphabet and dimension");
  std::vector<uint64_t> values;
  for (const auto& v : arr) values.push_back(require_uint(v, "a code entry"));
  if (values[0] == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet 0 has no points");
  if (values[1] == 0) bad("dimension must be at least 1");

  // Pattern codes repeat the last one forever, matching how finite
  // presentations are serialized; a bare header carries no patterns.
  SubshiftCode code;
  code.stream = NatStream([values](uint64_t i) {
    if (i < values.size()) return values[i];
    if (values.size() == 2)
      throw Error(ErrorKind::NoPatterns, "this code lists no forbidden patterns");
    return values.back();
  });
  return code;
}

Manifest manifest_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("targets") || !doc["targets"].is_array())
    bad("a manifest is an object with a \"targets\" array");
  Manifest m;
  if (doc.contains("k")) {
    m.k = static_cast<uint32_t>(require_uint(doc["k"], "\"k\""));
    if (m.k < 3) bad("k must be at least 3");
  }
  for (const auto& t : doc["targets"]) m.targets.push_back(t);
  return m;
}

Manifest load_manifest(const std::string& path) { return manifest_from_json(read_json_file(path)); }

std::vector<std::pair<uint64_t, uint64_t>> precisions_from_targets(
    const std::vector<Json>& targets) {
  std::vector<std::pair<uint64_t, uint64_t>> out;
  for (size_t i = 0; i < targets.size(); ++i) {
    const Json& t = targets[i];
    if (!t.is_object() || !t.contains("precision"))
      bad("target " + std::to_string(i) + " has no \"precision\" field");
    out.emplace_back(i, require_uint(t["precision"], "\"precision\""));
  }
  return out;
}

Json bundle_to_json(const UniversalBundle& bundle, const std::vector<Json>& targets,
                    uint64_t prefix_len) {
  Json doc;
  doc["k"] = bundle.params.k;
  doc["max_layer"] = bundle.max_layer;
  doc["targets"] = targets;

  Json assignment;
  assignment["sizes"] = bundle.assignment.sizes;
  Json layers = Json::array();
  for (size_t t = 0; t < bundle.targets.size(); ++t) {
    auto layer = bundle.assignment.layer_of(t);
    layers.push_back(layer ? Json(*layer) : Json(nullptr));
  }
  assignment["layers"] = std::move(layers);
  doc["assignment"] = std::move(assignment);

  Json registry = Json::array();
  for (size_t i = 0; i < bundle.registry.size(); ++i) registry.push_back(bundle.registry.name_at(i));
  doc["registry"] = std::move(registry);

  Json prefix = Json::array();
  for (uint64_t i = 0; i < prefix_len; ++i)
    prefix.push_back(pattern_to_json(bundle.spec.forbidden.at(i)));
  doc["forbidden_prefix"] = std::move(prefix);
  return doc;
}

UniversalBundle bundle_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("targets")) bad("a bundle document needs \"targets\"");
  uint32_t k = doc.contains("k") ? static_cast<uint32_t>(require_uint(doc["k"], "\"k\"")) : 4;
  uint32_t max_layer =
      doc.contains("max_layer") ? static_cast<uint32_t>(require_uint(doc["max_layer"], "\"max_layer\"")) : 5;

  std::vector<SubshiftCode> codes;
  for (const auto& t : doc["targets"]) codes.push_back(code_from_json(t));
  UniversalBundle bundle = build_universal_1d(std::move(codes), SkeletonParams(k), max_layer);

  if (doc.contains("assignment") && doc["assignment"].contains("sizes")) {
    std::vector<uint32_t> sizes = doc["assignment"]["sizes"].get<std::vector<uint32_t>>();
    if (sizes != bundle.assignment.sizes)
      throw Error(ErrorKind::HeaderMismatch, "stored layer assignment disagrees with the rebuilt one");
  }
  if (doc.contains("forbidden_prefix")) {
    const Json& prefix = doc["forbidden_prefix"];
    for (size_t i = 0; i < prefix.size(); ++i) {
      PartialPattern stored =
          pattern_from_json(prefix[i], bundle.spec.alphabet, bundle.spec.dim);
      if (stored != bundle.spec.forbidden.at(i))
        throw Error(ErrorKind::HeaderMismatch,
                    "stored forbidden pattern " + std::to_string(i) + " disagrees with the rebuilt stream");
    }
  }
  return bundle;
}

UniversalBundle load_bundle(const std::string& path) { return bundle_from_json(read_json_file(path)); }

void save_bundle(const std::string& path, const UniversalBundle& bundle,
                 const std::vector<Json>& targets, uint64_t prefix_len) {
  std::ofstream out(path);
  if (!out) bad("cannot write " + path);
  out << bundle_to_json(bundle, targets, prefix_len).dump(2) << "\n";
}

}  // namespace sshift
