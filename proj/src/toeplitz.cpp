#include "sshift/toeplitz.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

namespace sshift {

namespace {

// 0 = left bracket, 1 = right bracket, 2 = coding; slots carry any mix of
// the three types at deeper layers, but never within one unit.
int letter_type(Letter a) {
  switch (a) {
    case kLB: return 0;
    case kRB: return 1;
    default: return 2;
  }
}

uint64_t checked_pow(uint64_t base, uint32_t exp, const char* what) {
  uint64_t out = 1;
  for (uint32_t i = 0; i < exp; ++i) {
    if (out > UINT64_MAX / base) throw Error(ErrorKind::BadArgument, what);
    out *= base;
  }
  return out;
}

}  // namespace

LayerGeometry geometry(const SkeletonParams& params, uint32_t n) {
  if (n == 0) throw Error(ErrorKind::BadArgument, "layers are numbered from 1");
  LayerGeometry g;
  g.m = checked_pow(2 * (params.k + 2), n, "layer spacing overflows");
  g.kappa = params.k * checked_pow(params.k + 2, n - 1, "coding width overflows");
  g.rho = g.m / 2;
  return g;
}

CellInfo cell_role(const SkeletonParams& params, int64_t p, uint32_t max_layer) {
  const int64_t P = params.period();
  const uint32_t k = params.k;
  CellInfo info;
  int64_t idx = p;
  uint64_t off = 0;
  uint64_t scale = 1;  // real cells per current-level subcell
  for (uint32_t layer = 1; layer <= max_layer; ++layer) {
    int64_t b = idx >= 0 ? idx / P : -((-idx + P - 1) / P);
    int64_t c = idx - b * P;
    if (c <= int64_t(k) + 1) {
      info.layer = layer;
      info.group = b;
      info.unit_class = uint32_t(c);
      info.cell_offset = off;
      info.role = c == 0              ? CellRole::LeftBracket
                  : c == int64_t(k) + 1 ? CellRole::RightBracket
                                        : CellRole::Coding;
      return info;
    }
    off += uint64_t(c - (k + 2)) * scale;
    scale *= k + 2;
    idx = b;
  }
  return info;  // Unresolved: deeper than the probe
}

uint32_t check_depth_for_length(const SkeletonParams& params, uint64_t len) {
  const uint64_t P = params.period();
  uint32_t d = 1;
  uint64_t cap = 1;
  while (cap < len) {
    cap *= P;
    ++d;
  }
  return d;
}

namespace {

// One level of the window during checking: letters plus, per letter, the
// original positions it covers.
struct Level {
  std::vector<Letter> letters;
  std::vector<std::vector<size_t>> origins;
};

struct Recorder {
  LayerParse* parse = nullptr;

  void assign(const std::vector<size_t>& origins, uint32_t layer, CellRole role) {
    if (!parse) return;
    if (parse->units.size() < layer) parse->units.resize(layer);
    parse->units[layer - 1].push_back(origins);
    for (size_t p : origins) parse->cells[p] = {layer, role};
  }
};

struct CheckContext {
  const SkeletonParams& params;
  Recorder rec;
};

CheckResult check_rec(CheckContext& ctx, const Level& level, uint32_t depth,
                      uint32_t layer_offset);

// Classify the window against one alignment of the layer-1 period,
// collapse its slots and recurse. Offset phi means position x sits at
// class (x + phi) mod P of the template.
CheckResult try_phase(CheckContext& ctx, const Level& level, uint32_t depth,
                      uint32_t layer_offset, uint32_t phi, LayerParse* scratch) {
  const uint32_t k = ctx.params.k;
  const uint32_t P = ctx.params.period();
  Level meta;
  int slot_type = -1;
  bool slot_c1 = false;
  std::vector<size_t> slot_origins;
  std::vector<size_t> slot_meta_origins;  // meta-cell origins under construction

  Recorder saved = ctx.rec;
  LayerParse* outer = ctx.rec.parse;
  ctx.rec.parse = scratch;

  auto close_slot = [&]() {
    if (slot_type < 0) return;
    Letter m = slot_type == 0 ? kLB : slot_type == 1 ? kRB : (slot_c1 ? kC1 : kC0);
    meta.letters.push_back(m);
    meta.origins.push_back(std::move(slot_origins));
    slot_origins.clear();
    slot_type = -1;
    slot_c1 = false;
  };
  auto fail = [&](uint32_t layer, size_t pos, const char* rule) {
    ctx.rec = saved;
    return CheckResult{false, CheckViolation{layer, pos, rule}};
  };

  for (size_t x = 0; x < level.letters.size(); ++x) {
    const uint32_t c = (uint32_t(x) + phi) % P;
    const Letter a = level.letters[x];
    if (c == 0 || c == k + 1) {
      close_slot();
      const Letter want = c == 0 ? kLB : kRB;
      if (a != want)
        return fail(layer_offset + 1, level.origins[x].front(), "bracket-cell");
      ctx.rec.assign(level.origins[x], layer_offset + 1,
                     c == 0 ? CellRole::LeftBracket : CellRole::RightBracket);
    } else if (c <= k) {
      close_slot();
      if (a != kC0 && a != kC1)
        return fail(layer_offset + 1, level.origins[x].front(), "coding-cell");
      ctx.rec.assign(level.origins[x], layer_offset + 1, CellRole::Coding);
    } else {
      if (c == k + 2) close_slot();  // a fresh slot begins here
      const int t = letter_type(a);
      if (slot_type < 0) {
        slot_type = t;
      } else if (slot_type != t) {
        return fail(layer_offset + 2, level.origins[x].front(), "slot-mixed");
      }
      if (a == kC1) slot_c1 = true;
      slot_origins.insert(slot_origins.end(), level.origins[x].begin(),
                          level.origins[x].end());
    }
  }
  close_slot();

  CheckResult inner = check_rec(ctx, meta, depth - 1, layer_offset + 1);
  if (!inner.valid) {
    ctx.rec = saved;
    return inner;
  }
  // Commit the recorded assignments of this successful phase upward.
  if (outer && scratch) *outer = *scratch;
  ctx.rec = saved;
  return CheckResult::ok();
}

CheckResult check_rec(CheckContext& ctx, const Level& level, uint32_t depth,
                      uint32_t layer_offset) {
  if (level.letters.empty()) return CheckResult::ok();
  if (depth == 0) {
    // Cells past the checked layers are still blank.
    for (size_t x = 0; x < level.letters.size(); ++x)
      if (level.letters[x] != kC0)
        return {false,
                CheckViolation{layer_offset + 1, level.origins[x].front(),
                               "blank-not-zero"}};
    return CheckResult::ok();
  }
  const uint32_t P = ctx.params.period();
  std::optional<CheckViolation> best;
  for (uint32_t phi = 0; phi < P; ++phi) {
    LayerParse scratch;
    if (ctx.rec.parse) {
      scratch.cells = ctx.rec.parse->cells;
      scratch.units = ctx.rec.parse->units;
    }
    CheckResult r = try_phase(ctx, level, depth, layer_offset, phi,
                              ctx.rec.parse ? &scratch : nullptr);
    if (r.valid) return r;
    if (!best || r.violation->position > best->position) best = r.violation;
  }
  return {false, best};
}

Level level_from_word(const Word& w) {
  Level lvl;
  lvl.letters = w.letters;
  lvl.origins.resize(w.size());
  for (size_t i = 0; i < w.size(); ++i) lvl.origins[i] = {i};
  return lvl;
}

}  // namespace

CheckResult skeleton_check(const SkeletonParams& params, const Word& w,
                           uint32_t depth) {
  if (w.alphabet != kSkeletonAlphabet)
    throw Error(ErrorKind::BadArgument, "skeleton words use a four-letter alphabet");
  for (Letter a : w.letters)
    if (a >= kSkeletonAlphabet)
      throw Error(ErrorKind::BadArgument, "letter outside the skeleton alphabet");
  CheckContext ctx{params, Recorder{nullptr}};
  return check_rec(ctx, level_from_word(w), depth, 0);
}

std::optional<LayerParse> parse_layers(const SkeletonParams& params, const Word& w,
                                       uint32_t depth) {
  if (w.alphabet != kSkeletonAlphabet)
    throw Error(ErrorKind::BadArgument, "skeleton words use a four-letter alphabet");
  LayerParse parse;
  parse.cells.assign(w.size(), {});
  parse.units.resize(depth);
  CheckContext ctx{params, Recorder{&parse}};
  CheckResult r = check_rec(ctx, level_from_word(w), depth, 0);
  if (!r.valid) return std::nullopt;
  if (parse.units.size() < depth) parse.units.resize(depth);
  for (auto& layer : parse.units) std::sort(layer.begin(), layer.end());
  return parse;
}

Word skeleton_generate(const SkeletonParams& params, uint32_t depth,
                       const LayerBits& bits) {
  if (depth == 0) throw Error(ErrorKind::BadArgument, "depth must be positive");
  const uint64_t mN = geometry(params, depth).m;
  if (bits.size() != depth)
    throw Error(ErrorKind::SizeMismatch, "one bit table per layer expected");
  std::vector<LayerGeometry> geo(depth);
  for (uint32_t n = 1; n <= depth; ++n) {
    geo[n - 1] = geometry(params, n);
    const uint64_t groups = mN / geo[n - 1].m;
    if (bits[n - 1].size() != groups)
      throw Error(ErrorKind::SizeMismatch, "wrong number of coding blocks for layer");
    for (const auto& block : bits[n - 1]) {
      if (block.size() != geo[n - 1].kappa)
        throw Error(ErrorKind::SizeMismatch, "wrong bit count for a coding block");
      for (uint8_t b : block)
        if (b > 1) throw Error(ErrorKind::BadArgument, "coding bits are 0 or 1");
    }
  }
  const uint64_t u_shift = params.k + 2;
  Word w(kSkeletonAlphabet, std::vector<Letter>(mN, kC0));
  for (uint64_t p = 0; p < mN; ++p) {
    CellInfo info = cell_role(params, int64_t(p), depth);
    if (info.layer == 0) continue;  // blank territory
    switch (info.role) {
      case CellRole::LeftBracket: w.letters[p] = kLB; break;
      case CellRole::RightBracket: w.letters[p] = kRB; break;
      case CellRole::Coding: {
        uint64_t unit_size = 1;
        for (uint32_t j = 1; j < info.layer; ++j) unit_size *= u_shift;
        const uint64_t bit = (info.unit_class - 1) * unit_size + info.cell_offset;
        w.letters[p] = bits[info.layer - 1][info.group][bit] ? kC1 : kC0;
        break;
      }
      default: break;
    }
  }
  return w;
}

namespace {

struct ForbiddenState {
  SkeletonParams params;
  std::vector<Word> emitted;
  uint64_t len = 2;
  uint64_t counter = 0;
  std::recursive_mutex mu;

  explicit ForbiddenState(const SkeletonParams& p) : params(p) {}

  static bool contains(const Word& w, const Word& piece) {
    if (piece.size() > w.size()) return false;
    for (size_t t = 0; t + piece.size() <= w.size(); ++t) {
      bool hit = true;
      for (size_t j = 0; j < piece.size() && hit; ++j)
        hit = w.letters[t + j] == piece.letters[j];
      if (hit) return true;
    }
    return false;
  }

  void advance() {
    for (;;) {
      uint64_t span = checked_pow(kSkeletonAlphabet, uint32_t(len),
                                  "skeleton enumeration length overflows");
      if (counter == span) {
        ++len;
        counter = 0;
        continue;
      }
      std::vector<Letter> letters(len);
      uint64_t v = counter++;
      for (size_t j = len; j-- > 0;) {
        letters[j] = Letter(v % kSkeletonAlphabet);
        v /= kSkeletonAlphabet;
      }
      Word w(kSkeletonAlphabet, std::move(letters));
      bool redundant = false;
      for (const Word& e : emitted)
        if (contains(w, e)) {
          redundant = true;
          break;
        }
      if (redundant) continue;
      if (!skeleton_check(params, w, check_depth_for_length(params, len)).valid) {
        emitted.push_back(std::move(w));
        return;
      }
    }
  }

  Word at(uint64_t i) {
    std::lock_guard<std::recursive_mutex> lock(mu);
    while (emitted.size() <= i) advance();
    return emitted[i];
  }
};

}  // namespace

PatternStream skeleton_forbidden_stream(const SkeletonParams& params) {
  auto state = std::make_shared<ForbiddenState>(params);
  return PatternStream([state](uint64_t i) {
    return PartialPattern::from_word(state->at(i));
  });
}

SubshiftSpec skeleton_spec(const SkeletonParams& params) {
  return SubshiftSpec{kSkeletonAlphabet, 1, skeleton_forbidden_stream(params),
                      std::nullopt};
}

namespace {

// Collapse one level of a window for decoding. Needs a complete layer-1
// block to fix the alignment; keeps only fully visible slots, remembering
// which original cells each meta letter covers.
struct DecodeLevel {
  std::vector<Letter> letters;
  std::vector<std::vector<size_t>> origins;
};

std::vector<size_t> locate_block(const SkeletonParams& params,
                                 const DecodeLevel& level, uint32_t n) {
  const uint32_t k = params.k;
  const uint32_t P = params.period();
  const size_t len = level.letters.size();

  size_t group = len;
  for (size_t x = 0; x + k + 1 < len; ++x) {
    if (level.letters[x] != kLB || level.letters[x + k + 1] != kRB) continue;
    bool coding = true;
    for (uint32_t j = 1; j <= k && coding; ++j)
      coding = letter_type(level.letters[x + j]) == 2;
    if (coding) {
      group = x;
      break;
    }
  }
  if (group == len)
    throw Error(ErrorKind::NoCompleteCell, "no complete coding block in window");

  if (n == 1) {
    std::vector<size_t> cells;
    for (uint32_t j = 1; j <= k; ++j)
      cells.insert(cells.end(), level.origins[group + j].begin(),
                   level.origins[group + j].end());
    return cells;
  }

  // Alignment: `group` sits at class 0. Collapse complete slots.
  const uint32_t phi = uint32_t((P - (group % P)) % P);
  DecodeLevel meta;
  size_t x = 0;
  while (x < len) {
    const uint32_t c = (uint32_t(x) + phi) % P;
    if (c < k + 2) {
      // structural cell of this level; admissible windows match the
      // located block's alignment, junk is rejected lazily below
      const Letter a = level.letters[x];
      const Letter want = c == 0 ? kLB : c == k + 1 ? kRB : kC0;
      if ((c == 0 || c == k + 1) ? a != want : letter_type(a) != 2)
        throw Error(ErrorKind::NoCompleteCell, "window disagrees with its alignment");
      ++x;
      continue;
    }
    if (c != k + 2) {  // partial slot at the left edge: skip it
      ++x;
      continue;
    }
    if (x + (k + 2) > len) break;  // partial slot at the right edge
    int type = letter_type(level.letters[x]);
    bool c1 = false;
    std::vector<size_t> origin;
    for (uint32_t j = 0; j < k + 2; ++j) {
      if (letter_type(level.letters[x + j]) != type)
        throw Error(ErrorKind::NoCompleteCell, "mixed letters inside one cell");
      if (level.letters[x + j] == kC1) c1 = true;
      origin.insert(origin.end(), level.origins[x + j].begin(),
                    level.origins[x + j].end());
    }
    meta.letters.push_back(type == 0 ? kLB : type == 1 ? kRB : (c1 ? kC1 : kC0));
    meta.origins.push_back(std::move(origin));
    x += k + 2;
  }
  return locate_block(params, meta, n - 1);
}

}  // namespace

std::vector<size_t> phi_bit_cells(const SkeletonParams& params, uint32_t n,
                                  const Word& w) {
  if (n == 0) throw Error(ErrorKind::BadArgument, "layers are numbered from 1");
  if (n >= 32) throw Error(ErrorKind::BadArgument, "layer value would overflow");
  DecodeLevel level;
  level.letters = w.letters;
  level.origins.resize(w.size());
  for (size_t i = 0; i < w.size(); ++i) level.origins[i] = {i};
  return locate_block(params, level, n);
}

Letter phi_value(const SkeletonParams& params, uint32_t n, const Word& w) {
  std::vector<size_t> cells = phi_bit_cells(params, n, w);
  Letter v = 0;
  for (uint32_t j = 0; j < n; ++j) {
    const Letter a = w.letters[cells[j]];
    if (a != kC0 && a != kC1)
      throw Error(ErrorKind::NoCompleteCell, "bracket letter on a coding cell");
    v = (v << 1) | (a == kC1 ? 1 : 0);
  }
  return v;
}

BlockCode phi_block_code(const SkeletonParams& params, uint32_t n) {
  const LayerGeometry geo = geometry(params, n);
  if (geo.m > (uint64_t(1) << 20))
    throw Error(ErrorKind::BadArgument, "decoder radius too large");
  BlockCode code;
  code.in_alphabet = kSkeletonAlphabet;
  code.out_alphabet = uint32_t(1) << n;
  code.radius = uint32_t(geo.m);
  code.rule = [params, n](const std::vector<Letter>& window) -> Letter {
    try {
      return phi_value(params, n, Word(kSkeletonAlphabet, window));
    } catch (const Error&) {
      return 0;
    }
  };
  return code;
}

MachinePtr layer_decoder(const SkeletonParams& params, uint32_t n) {
  const LayerGeometry geo = geometry(params, n);
  return block_subsample_operator(phi_block_code(params, n), geo.m);
}

PatternStream transform_forbidden(const SkeletonParams& params, uint32_t n,
                                  const PatternStream& F, uint32_t s) {
  if (n == 0 || n >= 32) throw Error(ErrorKind::BadArgument, "unusable layer index");
  if (s == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet must be nonempty");
  if (s > (uint32_t(1) << n))
    throw Error(ErrorKind::AlphabetTooLarge, "layer cannot code this alphabet");
  const LayerGeometry geo = geometry(params, n);
  if (geo.m > (uint64_t(1) << 20))
    throw Error(ErrorKind::BadArgument, "layer spacing too large to materialize");

  // Cell layout of block 0 in the canonical alignment: bracket units as
  // anchors, plus the first n coding cells in bit order.
  auto anchors = std::make_shared<std::vector<std::pair<int64_t, Letter>>>();
  auto bit_cells = std::make_shared<std::vector<int64_t>>(n, 0);
  uint64_t unit_size = 1;
  for (uint32_t j = 1; j < n; ++j) unit_size *= params.k + 2;
  for (int64_t p = 0; p < int64_t(geo.m); ++p) {
    CellInfo info = cell_role(params, p, n);
    if (info.layer != n) continue;
    if (info.role == CellRole::LeftBracket) {
      anchors->push_back({p, kLB});
    } else if (info.role == CellRole::RightBracket) {
      anchors->push_back({p, kRB});
    } else {
      const uint64_t bit = (info.unit_class - 1) * unit_size + info.cell_offset;
      if (bit < n) (*bit_cells)[bit] = p;
    }
  }

  const uint32_t guards = (uint32_t(1) << n) - s;
  const uint64_t m = geo.m;
  auto block_cells = [anchors, bit_cells, n, m](uint64_t block, uint32_t value,
                                                std::vector<std::pair<std::vector<int64_t>, Letter>>& out) {
    const int64_t base = int64_t(block * m);
    for (const auto& [p, a] : *anchors) out.push_back({{base + p}, a});
    for (uint32_t j = 0; j < n; ++j) {
      const bool bit = (value >> (n - 1 - j)) & 1;
      out.push_back({{base + (*bit_cells)[j]}, bit ? kC1 : kC0});
    }
  };

  return PatternStream([=](uint64_t i) {
    std::vector<std::pair<std::vector<int64_t>, Letter>> cells;
    if (i < guards) {
      block_cells(0, s + uint32_t(i), cells);
      return PartialPattern(kSkeletonAlphabet, 1, std::move(cells));
    }
    PartialPattern f = F.at(i - guards);
    if (f.dim != 1 || f.empty())
      throw Error(ErrorKind::BadArgument, "expected nonempty 1-D words");
    if (f.span() != int64_t(f.cells.size()))
      throw Error(ErrorKind::BadArgument, "expected contiguous words");
    for (size_t q = 0; q < f.cells.size(); ++q) {
      const Letter a = f.cells[q].second;
      if (a >= s) throw Error(ErrorKind::BadArgument, "word letter outside alphabet");
      block_cells(q, a, cells);
    }
    return PartialPattern(kSkeletonAlphabet, 1, std::move(cells));
  });
}

std::string skeleton_word_to_string(const Word& w) {
  std::string out;
  out.reserve(w.size());
  for (Letter a : w.letters) {
    switch (a) {
      case kLB: out += 'L'; break;
      case kRB: out += 'R'; break;
      case kC0: out += '0'; break;
      case kC1: out += '1'; break;
      default: throw Error(ErrorKind::BadArgument, "letter outside the skeleton alphabet");
    }
  }
  return out;
}

Word skeleton_word_from_string(const std::string& text) {
  std::vector<Letter> letters;
  letters.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case 'L': letters.push_back(kLB); break;
      case 'R': letters.push_back(kRB); break;
      case '0': letters.push_back(kC0); break;
      case '1': letters.push_back(kC1); break;
      default: throw Error(ErrorKind::BadArgument, "skeleton letters are L, R, 0, 1");
    }
  }
  return Word(kSkeletonAlphabet, std::move(letters));
}

}  // namespace sshift
