#include "sshift/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sshift/certify.hpp"
#include "sshift/codec.hpp"
#include "sshift/core.hpp"
#include "sshift/errors.hpp"
#include "sshift/manifest.hpp"
#include "sshift/oracle.hpp"
#include "sshift/toeplitz.hpp"
#include "sshift/universal.hpp"

namespace sshift {

namespace {

// Hex digits, 4 bits each, most significant first; short input is
// zero-padded, excess bits past the budget must all be zero.
std::vector<uint8_t> bits_from_hex(const std::string& hex, uint64_t total) {
  std::vector<uint8_t> flat(total, 0);
  for (size_t h = 0; h < hex.size(); ++h) {
    char c = hex[h];
    int v = 0;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = 10 + (c - 'a');
    else if (c >= 'A' && c <= 'F') v = 10 + (c - 'A');
    else throw Error(ErrorKind::BadArgument, std::string("not a hex digit: ") + c);
    for (int b = 0; b < 4; ++b) {
      uint8_t bit = static_cast<uint8_t>((v >> (3 - b)) & 1);
      uint64_t pos = 4 * h + static_cast<uint64_t>(b);
      if (pos < total) flat[pos] = bit;
      else if (bit) throw Error(ErrorKind::BadArgument, "more bits than the skeleton holds");
    }
  }
  return flat;
}

LayerBits layer_bits_from_flat(const SkeletonParams& params, uint32_t depth,
                               const std::vector<uint8_t>& flat) {
  uint64_t m_top = geometry(params, depth).m;
  LayerBits bits;
  size_t next = 0;
  for (uint32_t n = 1; n <= depth; ++n) {
    LayerGeometry geo = geometry(params, n);
    uint64_t blocks = m_top / geo.m;
    std::vector<std::vector<uint8_t>> layer;
    for (uint64_t g = 0; g < blocks; ++g) {
      std::vector<uint8_t> block(flat.begin() + next, flat.begin() + next + geo.kappa);
      next += geo.kappa;
      layer.push_back(std::move(block));
    }
    bits.push_back(std::move(layer));
  }
  return bits;
}

uint64_t bit_budget(const SkeletonParams& params, uint32_t depth) {
  uint64_t m_top = geometry(params, depth).m;
  uint64_t total = 0;
  for (uint32_t n = 1; n <= depth; ++n) {
    LayerGeometry geo = geometry(params, n);
    total += (m_top / geo.m) * geo.kappa;
  }
  return total;
}

OperatorRegistry standard_registry(const SkeletonParams& params, uint32_t max_layer) {
  OperatorRegistry reg;
  reg.add("identity", identity_machine());
  for (uint32_t n = 1; n <= max_layer; ++n)
    reg.add("layer-" + std::to_string(n), layer_decoder(params, n));
  return reg;
}

struct SkeletonGenOpts {
  uint32_t k = 4;
  uint32_t depth = 1;
  std::string bits;
};

struct SkeletonCheckOpts {
  uint32_t k = 4;
  std::string word;
  int64_t depth = -1;  // -1: matched depth for the word's length
};

struct LangOpts {
  std::string spec;
  uint32_t len = 0;
};

struct CodecEncodeOpts {
  std::string spec;
  uint64_t prefix = 8;
};

struct CodecDecodeOpts {
  std::string code;
  uint64_t prefix = 4;
};

struct ModulusOpts {
  std::string spec;
  std::string op;
  uint64_t r = 0;
  uint64_t max_i = 64;
  uint32_t k = 4;
  uint32_t layers = 5;
};

struct UniversalBuildOpts {
  std::string targets;
  std::string out;
  int64_t k = -1;  // -1: take the manifest's k
  uint32_t max_layer = 5;
  uint64_t prefix = 12;
};

struct UniversalDecodeOpts {
  std::string bundle;
  uint32_t layer = 1;
  uint32_t len = 0;
  uint64_t depth = 48;
};

struct CertifyOpts {
  std::string x;
  std::string registry = "auto";
  std::string g;
  std::string b = "auto";
  uint64_t budget = 64;
  std::string emit = "jsonl";
};

void run_skeleton_gen(const SkeletonGenOpts& o, std::ostream& out) {
  SkeletonParams params(o.k);
  if (o.depth == 0) throw Error(ErrorKind::BadArgument, "depth must be at least 1");
  std::vector<uint8_t> flat = bits_from_hex(o.bits, bit_budget(params, o.depth));
  Word w = skeleton_generate(params, o.depth, layer_bits_from_flat(params, o.depth, flat));
  out << skeleton_word_to_string(w) << "\n";
}

void run_skeleton_check(const SkeletonCheckOpts& o, std::ostream& out) {
  SkeletonParams params(o.k);
  Word w = skeleton_word_from_string(o.word);
  uint32_t depth = o.depth >= 0 ? static_cast<uint32_t>(o.depth)
                                : check_depth_for_length(params, w.size());
  CheckResult r = skeleton_check(params, w, depth);
  Json verdict;
  verdict["valid"] = r.valid;
  if (r.violation) {
    verdict["layer"] = r.violation->layer;
    verdict["position"] = r.violation->position;
    verdict["rule"] = r.violation->rule;
  }
  out << verdict.dump() << "\n";
}

void run_lang(const LangOpts& o, std::ostream& out) {
  SubshiftSpec spec = spec_from_json(read_json_file(o.spec));
  for (const Word& w : sft_language(spec, o.len)) out << w.to_string() << "\n";
}

void run_codec_encode(const CodecEncodeOpts& o, std::ostream& out) {
  SubshiftCode code = code_from_json(read_json_file(o.spec));
  Json values = Json::array();
  for (uint64_t i = 0; i < o.prefix; ++i) values.push_back(code.stream.at(i));
  out << values.dump() << "\n";
}

void run_codec_decode(const CodecDecodeOpts& o, std::ostream& out) {
  SubshiftSpec spec = code_to_spec(code_from_json(read_json_file(o.code)));
  Json patterns = Json::array();
  for (uint64_t i = 0; i < o.prefix; ++i) {
    try {
      patterns.push_back(pattern_to_json(spec.forbidden.at(i)));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoPatterns) break;  // bare header: nothing to list
      throw;
    }
  }
  out << patterns.dump() << "\n";
}

void run_modulus(const ModulusOpts& o, std::ostream& out) {
  SubshiftSpec spec = spec_from_json(read_json_file(o.spec));
  OperatorRegistry reg = standard_registry(SkeletonParams(o.k), o.layers);
  MachinePtr op = reg.by_name(o.op);
  ModulusCaps caps;
  caps.max_i = o.max_i;
  ModulusResult r = modulus_of_continuity(*op, o.r, spec, caps);
  Json doc;
  doc["level"] = r.level;
  doc["vacuous"] = r.vacuous;
  doc["words_tested"] = r.words_tested;
  doc["max_queried"] = r.max_queried;
  out << doc.dump() << "\n";
}

void run_universal_build(const UniversalBuildOpts& o) {
  Manifest m = load_manifest(o.targets);
  uint32_t k = o.k >= 0 ? static_cast<uint32_t>(o.k) : m.k;
  std::vector<SubshiftCode> codes;
  for (const Json& t : m.targets) codes.push_back(code_from_json(t));
  UniversalBundle bundle = build_universal_1d(std::move(codes), SkeletonParams(k), o.max_layer);
  save_bundle(o.out, bundle, m.targets, o.prefix);
}

void run_universal_decode(const UniversalDecodeOpts& o, std::ostream& out) {
  UniversalBundle bundle = load_bundle(o.bundle);
  if (o.layer == 0 || o.layer > bundle.max_layer)
    throw Error(ErrorKind::BadArgument, "layer outside the materialized range");
  std::set<Word> words;
  bool registered = false;
  for (size_t t = 0; t < bundle.targets.size(); ++t) {
    auto layer = bundle.assignment.layer_of(t);
    if (layer && *layer == o.layer) {
      words = decode_layer_language(bundle, t, o.len, o.depth);
      registered = true;
      break;
    }
  }
  if (!registered) words = decode_free_layer_language(bundle, o.layer, o.len, o.depth);
  for (const Word& w : words) out << w.to_string() << "\n";
}

void run_certify(const CertifyOpts& o, std::ostream& out) {
  if (o.emit != "jsonl") throw Error(ErrorKind::BadArgument, "only jsonl output is supported");
  if (o.registry != "auto")
    throw Error(ErrorKind::BadArgument, "only the bundle's own registry is supported");
  UniversalBundle bundle = load_bundle(o.x);
  CertifiableX X{bundle.spec, &bundle};

  Manifest g = load_manifest(o.g);
  std::vector<SubshiftSpec> targets;
  for (const Json& t : g.targets) targets.push_back(spec_from_json(t));

  std::vector<std::pair<uint64_t, uint64_t>> B;
  if (o.b == "auto") B = build_B(targets);
  else if (o.b == "manifest") B = precisions_from_targets(g.targets);
  else throw Error(ErrorKind::BadArgument, "--b must be auto or manifest");

  CertifyBudgets budgets;
  budgets.max_sum = o.budget;
  for (const ClaimRecord& c : enumerate_simulated(X, bundle.registry, targets, B, budgets)) {
    Json line;
    line["target"] = c.target;
    line["op"] = bundle.registry.name_at(c.op);
    line["precision"] = c.precision;
    line["depth"] = c.depth;
    out << line.dump() << "\n";
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toeplitz-backed subshift toolkit"};
  app.set_config("--config", "", "Read options from a key=value file");
  app.require_subcommand(1);

  SkeletonGenOpts sg;
  SkeletonCheckOpts sc;
  LangOpts lg;
  CodecEncodeOpts ce;
  CodecDecodeOpts cd;
  ModulusOpts mo;
  UniversalBuildOpts ub;
  UniversalDecodeOpts ud;
  CertifyOpts cf;

  CLI::App* skeleton = app.add_subcommand("skeleton", "Generate or check skeleton words");
  skeleton->require_subcommand(1);
  CLI::App* gen = skeleton->add_subcommand("gen", "Print one skeleton period with the given coding bits");
  gen->add_option("--k", sg.k, "Coding cells per block")->capture_default_str();
  gen->add_option("--depth", sg.depth, "Layers to fill")->capture_default_str();
  gen->add_option("--bits", sg.bits, "Coding bits as hex, layer-major then block-major");
  gen->callback([&] { run_skeleton_gen(sg, out); });

  CLI::App* check = skeleton->add_subcommand("check", "Validate a word against the layer rules");
  check->add_option("--k", sc.k, "Coding cells per block")->capture_default_str();
  check->add_option("--word", sc.word, "Word over L,R,0,1")->required();
  check->add_option("--depth", sc.depth, "Layers to check (default: matched to length)");
  check->callback([&] { run_skeleton_check(sc, out); });

  CLI::App* lang = app.add_subcommand("lang", "List the admissible words of a finite-type spec");
  lang->add_option("--spec", lg.spec, "Spec JSON file")->required();
  lang->add_option("--len", lg.len, "Word length")->required();
  lang->callback([&] { run_lang(lg, out); });

  CLI::App* codec = app.add_subcommand("codec", "Serialize specs to code streams and back");
  codec->require_subcommand(1);
  CLI::App* enc = codec->add_subcommand("encode", "Print a prefix of the spec's code stream");
  enc->add_option("--spec", ce.spec, "Spec JSON file")->required();
  enc->add_option("--prefix", ce.prefix, "Stream values to print")->capture_default_str();
  enc->callback([&] { run_codec_encode(ce, out); });

  CLI::App* dec = codec->add_subcommand("decode", "Print the patterns a code stream forbids");
  dec->add_option("--code", cd.code, "Code JSON file")->required();
  dec->add_option("--prefix", cd.prefix, "Patterns to print")->capture_default_str();
  dec->callback([&] { run_codec_decode(cd, out); });

  CLI::App* modulus = app.add_subcommand("modulus", "Continuity level of an operator over a spec");
  modulus->add_option("--spec", mo.spec, "Spec JSON file")->required();
  modulus->add_option("--op", mo.op, "Operator name (identity, layer-1, ...)")->required();
  modulus->add_option("--r", mo.r, "Largest input index to cover")->required();
  modulus->add_option("--max-i", mo.max_i, "Level search ceiling")->capture_default_str();
  modulus->add_option("--k", mo.k, "Coding cells per block")->capture_default_str();
  modulus->callback([&] { run_modulus(mo, out); });

  CLI::App* universal = app.add_subcommand("universal", "Build and probe layered host shifts");
  universal->require_subcommand(1);
  CLI::App* build = universal->add_subcommand("build", "Bundle the targets of a manifest into one host");
  build->add_option("--targets", ub.targets, "Manifest JSON file")->required();
  build->add_option("--k", ub.k, "Coding cells per block (default: the manifest's)");
  build->add_option("--max-layer", ub.max_layer, "Deepest materialized layer")->capture_default_str();
  build->add_option("--out", ub.out, "Bundle output file")->required();
  build->add_option("--prefix", ub.prefix, "Forbidden-stream prefix stored for integrity")
      ->capture_default_str();
  build->callback([&] { run_universal_build(ub); });

  CLI::App* decode = universal->add_subcommand("decode", "Decoded language of one layer of a bundle");
  decode->add_option("--bundle", ud.bundle, "Bundle JSON file")->required();
  decode->add_option("--layer", ud.layer, "Layer to decode")->required();
  decode->add_option("--len", ud.len, "Decoded word length")->required();
  decode->add_option("--depth", ud.depth, "Forbidden patterns to respect")->capture_default_str();
  decode->callback([&] { run_universal_decode(ud, out); });

  CLI::App* certify = app.add_subcommand("certify", "Enumerate certified simulations of a bundle");
  certify->add_option("--x", cf.x, "Bundle JSON file for the probed shift")->required();
  certify->add_option("--registry", cf.registry, "Operator registry (auto: the bundle's)")
      ->capture_default_str();
  certify->add_option("--g", cf.g, "Manifest of candidate targets")->required();
  certify->add_option("--b", cf.b, "Precision bounds: auto or manifest")->capture_default_str();
  certify->add_option("--budget", cf.budget, "Horizon on target+op+precision+depth")
      ->capture_default_str();
  certify->add_option("--emit", cf.emit, "Output format")->capture_default_str();
  certify->callback([&] { run_certify(cf, out); });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help and friends
    err << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    Json detail;
    detail["error"] = e.kind_name();
    detail["detail"] = e.what();
    err << detail.dump() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace sshift
