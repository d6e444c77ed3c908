#include "sshift/universal.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>

#include "sshift/errors.hpp"

namespace sshift {

namespace {

uint64_t pow2_capped(uint32_t n) {
  return n >= 63 ? UINT64_MAX : uint64_t(1) << n;
}

uint64_t unit_size_of(const SkeletonParams& params, uint32_t layer) {
  uint64_t u = 1;
  for (uint32_t j = 1; j < layer; ++j) u *= params.k + 2;
  return u;
}

// Letter of a coding cell whose block carries `value` in its first
// `layer` bits, most significant first; later bits stay blank.
Letter coding_letter(uint32_t layer, uint64_t bit, uint32_t value) {
  return bit < layer && ((value >> (layer - 1 - bit)) & 1) ? kC1 : kC0;
}

// Cell positions of layer n's block 0 in the canonical alignment.
struct BlockLayout {
  std::vector<int64_t> lb, rb;
  std::vector<int64_t> coding;  // all kappa_n cells, in bit order
};

BlockLayout block_layout(const SkeletonParams& params, uint32_t n) {
  const LayerGeometry geo = geometry(params, n);
  if (geo.m > (uint64_t(1) << 22))
    throw Error(ErrorKind::BadArgument, "layer spacing too large to materialize");
  const uint64_t unit = unit_size_of(params, n);
  BlockLayout out;
  out.coding.resize(geo.kappa);
  for (int64_t p = 0; p < int64_t(geo.m); ++p) {
    CellInfo info = cell_role(params, p, n);
    if (info.layer != n || info.group != 0) continue;
    if (info.role == CellRole::LeftBracket) out.lb.push_back(p);
    else if (info.role == CellRole::RightBracket) out.rb.push_back(p);
    else if (info.role == CellRole::Coding)
      out.coding[(info.unit_class - 1) * unit + info.cell_offset] = p;
  }
  return out;
}

}  // namespace

std::optional<uint64_t> Assignment::target_of(uint32_t layer) const {
  std::optional<uint64_t> cur;
  size_t next = 0;
  std::optional<uint64_t> out;
  for (uint32_t m = 1; m <= layer; ++m) {
    if (next < sizes.size() && pow2_capped(m) >= sizes[next]) {
      cur = next;
      ++next;
    }
    if (m == layer) out = cur;
  }
  return out;
}

std::optional<uint32_t> Assignment::layer_of(uint64_t target, uint32_t layer_cap) const {
  if (target >= sizes.size()) return std::nullopt;
  size_t next = 0;
  for (uint32_t m = 1; m <= layer_cap; ++m) {
    if (next < sizes.size() && pow2_capped(m) >= sizes[next]) {
      if (next == target) return m;
      ++next;
    }
  }
  return std::nullopt;
}

Assignment assign_layers(const std::vector<SubshiftCode>& targets) {
  Assignment a;
  a.sizes.reserve(targets.size());
  for (const SubshiftCode& code : targets) {
    if (code.dim() != 1)
      throw Error(ErrorKind::BadArgument, "universal builder houses 1-D targets");
    a.sizes.push_back(code.alphabet());
  }
  return a;
}

namespace {

// Shared state of the built forbidden stream: each round emits one
// skeleton pattern, then one pattern from each layer already in the
// rotation; layer n joins in round n. Exhausted layers drop out.
struct UniversalStreamState {
  SkeletonParams params;
  std::vector<SubshiftCode> targets;
  Assignment assignment;
  uint32_t max_layer;
  PatternStream skeleton;
  uint64_t skeleton_next = 0;

  struct Lane {
    PatternStream stream;
    uint64_t next = 0;
    bool exhausted = false;
  };
  std::vector<std::optional<Lane>> lanes;  // by layer-1
  std::vector<PartialPattern> emitted;
  uint64_t round = 0;
  std::recursive_mutex mu;

  UniversalStreamState(const SkeletonParams& p, std::vector<SubshiftCode> ts,
                       Assignment a, uint32_t ml)
      : params(p), targets(std::move(ts)), assignment(std::move(a)),
        max_layer(ml), skeleton(skeleton_forbidden_stream(p)) {
    lanes.resize(max_layer);
  }

  void run_round() {
    ++round;
    emitted.push_back(skeleton.at(skeleton_next++));
    const uint32_t active = uint32_t(std::min<uint64_t>(round, max_layer));
    for (uint32_t n = 1; n <= active; ++n) {
      auto t = assignment.target_of(n);
      if (!t) continue;
      // constrain only where a target first lands; deeper re-codings of the
      // same target stay free so untouched layers keep their full language
      if (assignment.layer_of(*t) != n) continue;
      if (!lanes[n - 1]) {
        SubshiftSpec target = code_to_spec(targets[*t]);
        lanes[n - 1] =
            Lane{transform_forbidden(params, n, target.forbidden, target.alphabet),
                 0, false};
      }
      Lane& lane = *lanes[n - 1];
      if (lane.exhausted) continue;
      try {
        emitted.push_back(lane.stream.at(lane.next));
        ++lane.next;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoPatterns) throw;
        lane.exhausted = true;
      }
    }
  }

  PartialPattern at(uint64_t i) {
    std::lock_guard<std::recursive_mutex> lock(mu);
    while (emitted.size() <= i) run_round();
    return emitted[i];
  }
};

}  // namespace

UniversalBundle build_universal_1d(std::vector<SubshiftCode> targets,
                                   const SkeletonParams& params,
                                   uint32_t max_layer) {
  UniversalBundle bundle;
  bundle.params = params;
  bundle.max_layer = max_layer;
  bundle.assignment = assign_layers(targets);
  bundle.targets = std::move(targets);

  for (size_t i = 0; i < bundle.targets.size(); ++i) {
    auto layer = bundle.assignment.layer_of(i);
    if (!layer || *layer > max_layer)
      throw Error(ErrorKind::BadArgument,
                  "target alphabet needs deeper layers than the builder materializes");
    bundle.registry_index.push_back(bundle.registry.add(
        "layer-" + std::to_string(*layer), layer_decoder(params, *layer)));
  }

  auto state = std::make_shared<UniversalStreamState>(
      params, bundle.targets, bundle.assignment, max_layer);
  bundle.spec = SubshiftSpec{
      kSkeletonAlphabet, 1,
      PatternStream([state](uint64_t i) { return state->at(i); }), std::nullopt};
  return bundle;
}

namespace {

// A per-block value choice for one layer that its own rewritten
// constraints allow: constant 0, either alternation, or constant 1,
// validated against the layer's pattern stream on a pure-fill window.
std::function<uint32_t(int64_t)> choose_filler(const SkeletonParams& params,
                                               uint32_t layer,
                                               const PatternStream& lane,
                                               uint64_t depth, int64_t blocks) {
  const LayerGeometry geo = geometry(params, layer);
  const int64_t m = int64_t(geo.m);
  blocks = std::max<int64_t>(blocks, 4);
  if (uint64_t(blocks) * geo.m > (uint64_t(1) << 18))
    blocks = int64_t((uint64_t(1) << 18) / geo.m) + 1;
  const int64_t lo = -blocks * m, hi = (blocks + 1) * m;
  const uint64_t unit = unit_size_of(params, layer);

  const std::vector<std::function<uint32_t(int64_t)>> candidates = {
      [](int64_t) { return 0u; },
      [](int64_t g) { return uint32_t(g & 1); },
      [](int64_t g) { return uint32_t(1 - (g & 1)); },
      [](int64_t) { return 1u; }};

  for (const auto& cand : candidates) {
    std::vector<Letter> letters;
    letters.reserve(size_t(hi - lo + 1));
    for (int64_t p = lo; p <= hi; ++p) {
      CellInfo info = cell_role(params, p, layer);
      if (info.role == CellRole::LeftBracket) letters.push_back(kLB);
      else if (info.role == CellRole::RightBracket) letters.push_back(kRB);
      else if (info.layer == layer && info.role == CellRole::Coding)
        letters.push_back(coding_letter(
            layer, (info.unit_class - 1) * unit + info.cell_offset,
            cand(info.group)));
      else
        letters.push_back(kC0);
    }
    Word window(kSkeletonAlphabet, std::move(letters));

    bool ok = true;
    for (uint64_t i = 0; ok && i < depth; ++i) {
      PartialPattern pat;
      try {
        pat = lane.at(i);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoPatterns) break;
        throw;
      }
      for (int64_t t = -pat.min_coord();
           t + pat.max_coord() < int64_t(window.size()); ++t)
        if (matches(window, pat, t)) {
          ok = false;
          break;
        }
    }
    if (ok) return cand;
  }
  throw Error(ErrorKind::BudgetExhausted, "no workable fill for a layer");
}

// One alignment of the depth-capped configuration family the decoder is
// probed on: structure is the skeleton shifted by delta, the focus
// layer's blocks in [b_lo, b_hi] carry free bit variables, every other
// coding cell takes its layer's fill (blank by default).
class WindowModel {
public:
  WindowModel(const SkeletonParams& params, uint32_t cap, uint32_t focus,
              int64_t delta, int64_t b_lo, int64_t b_hi,
              const std::map<uint32_t, std::function<uint32_t(int64_t)>>& fillers)
      : params_(params), cap_(cap), focus_(focus), delta_(delta), b_lo_(b_lo),
        b_hi_(b_hi), fillers_(fillers) {}

  // fixed letter when var < 0, else index of the free bit
  struct CellClass {
    Letter fixed;
    int32_t var;
  };

  CellClass classify(int64_t p) const {
    CellInfo info = cell_role(params_, p + delta_, cap_);
    if (info.role == CellRole::LeftBracket) return {kLB, -1};
    if (info.role == CellRole::RightBracket) return {kRB, -1};
    if (info.role == CellRole::Unresolved) return {kC0, -1};
    const uint64_t bit =
        (info.unit_class - 1) * unit_size_of(params_, info.layer) + info.cell_offset;
    if (info.layer == focus_) {
      if (bit < focus_ && info.group >= b_lo_ && info.group <= b_hi_)
        return {kC0, int32_t(uint64_t(info.group - b_lo_) * focus_ +
                             (focus_ - 1 - bit))};
      return {kC0, -1};
    }
    auto f = fillers_.find(info.layer);
    const uint32_t v = f == fillers_.end() ? 0u : f->second(info.group);
    return {coding_letter(info.layer, bit, v), -1};
  }

  Letter at(int64_t p, uint64_t combo) const {
    CellClass c = classify(p);
    if (c.var < 0) return c.fixed;
    return ((combo >> c.var) & 1) ? kC1 : kC0;
  }

private:
  SkeletonParams params_;
  uint32_t cap_, focus_;
  int64_t delta_, b_lo_, b_hi_;
  const std::map<uint32_t, std::function<uint32_t(int64_t)>>& fillers_;
};

// Both public entry points decode through the layer-n block read: the
// word at output j is phi of the window of radius m_n around j*m_n. The
// enumeration never runs that machine per combo; it resolves each
// window's cells once, locates the bits the block read uses (bit flips
// cannot move the block, see phi_bit_cells), and projects every combo
// through those taps.
std::set<Word> decode_language_impl(const UniversalBundle& bundle, uint32_t n,
                                    uint32_t s, uint32_t len, uint64_t depth,
                                    std::vector<int64_t> offsets) {
  if (len == 0) return {Word(s, {})};
  const LayerGeometry geo = geometry(bundle.params, n);
  const int64_t m = int64_t(geo.m);

  if (offsets.empty()) {
    if (m <= 16)
      for (int64_t d = 0; d < m; ++d) offsets.push_back(d);
    else
      offsets = {0, 1, m / 2, m - 1};
  }

  // blocks the outputs can read plus one spare each side
  const int64_t b_lo = -2, b_hi = int64_t(len) - 1;
  const uint32_t free_bits = uint32_t(b_hi - b_lo + 1) * n;
  if (free_bits > 24)
    throw Error(ErrorKind::BudgetExceeded, "window enumeration too wide");
  const uint64_t combos = uint64_t(1) << free_bits;

  // fill choices for the other layers whose constraints can bite here
  std::map<uint32_t, std::function<uint32_t(int64_t)>> fillers;
  for (uint32_t j = 1; j <= bundle.max_layer; ++j) {
    if (j == n) continue;
    auto t = bundle.assignment.target_of(j);
    if (!t) continue;
    if (bundle.assignment.layer_of(*t) != j) continue;
    const uint64_t mj = geometry(bundle.params, j).m;
    if (mj > uint64_t(len + 4) * geo.m) continue;
    SubshiftSpec target = code_to_spec(bundle.targets[*t]);
    PatternStream lane =
        transform_forbidden(bundle.params, j, target.forbidden, target.alphabet);
    fillers[j] = choose_filler(bundle.params, j, lane, depth,
                               int64_t(uint64_t(len + 4) * geo.m / mj) + 2);
  }

  std::set<Word> language;
  for (int64_t delta : offsets) {
    WindowModel model(bundle.params, bundle.max_layer, n, delta, b_lo, b_hi,
                      fillers);

    // every cell the placement scan or a decoder window can touch,
    // resolved once; the loops below are plain array reads
    const int64_t r_lo = b_lo * m - delta, r_hi = (b_hi + 1) * m - delta;
    const int64_t lo = std::min(r_lo, -m),
                  hi = std::max(r_hi, int64_t(len) * m + 1);
    std::vector<WindowModel::CellClass> cls(size_t(hi - lo));
    for (int64_t p = lo; p < hi; ++p) cls[size_t(p - lo)] = model.classify(p);
    const auto at = [&cls, lo](int64_t p) -> const WindowModel::CellClass& {
      return cls[size_t(p - lo)];
    };

    // Placements of the spec's first `depth` patterns whose support lies
    // in the enumerated block range, reduced to tests on the free bits.
    // mask == 0 means the placement matches every combo.
    struct Placement {
      uint64_t mask, want;
      bool operator==(const Placement& o) const {
        return mask == o.mask && want == o.want;
      }
      bool operator<(const Placement& o) const {
        return std::tie(mask, want) < std::tie(o.mask, o.want);
      }
    };
    std::vector<Placement> placements;
    bool dead_alignment = false;
    for (uint64_t i = 0; i < depth && !dead_alignment; ++i) {
      PartialPattern pat = bundle.spec.forbidden.at(i);
      if (pat.empty()) continue;
      for (int64_t t0 = r_lo - pat.min_coord(); t0 + pat.max_coord() < r_hi;
           ++t0) {
        uint64_t mask = 0, want = 0;
        bool possible = true;
        for (const auto& [coord, letter] : pat.cells) {
          const WindowModel::CellClass& c = at(coord[0] + t0);
          if (c.var < 0) {
            if (c.fixed != letter) {
              possible = false;
              break;
            }
            continue;
          }
          if (letter != kC0 && letter != kC1) {
            possible = false;
            break;
          }
          const uint64_t bitmask = uint64_t(1) << c.var;
          const uint64_t bitwant = letter == kC1 ? bitmask : 0;
          if ((mask & bitmask) && (want & bitmask) != bitwant) {
            possible = false;
            break;
          }
          mask |= bitmask;
          want |= bitwant;
        }
        if (!possible) continue;
        if (mask == 0) {
          dead_alignment = true;
          break;
        }
        placements.push_back({mask, want});
      }
    }
    if (dead_alignment) continue;
    std::sort(placements.begin(), placements.end());
    placements.erase(std::unique(placements.begin(), placements.end()),
                     placements.end());

    // output j reads only the cells phi locates on its window; a window
    // without a complete block (or with structure on a located cell)
    // decodes to 0 for every combo, matching the total block rule
    std::vector<std::vector<WindowModel::CellClass>> taps(len);
    std::vector<bool> blocked(len, false);
    for (uint32_t j = 0; j < len; ++j) {
      const int64_t center = m * int64_t(j);
      std::vector<Letter> w(size_t(2 * m + 1));
      for (int64_t t = -m; t <= m; ++t) {
        const WindowModel::CellClass& c = at(center + t);
        w[size_t(t + m)] = c.var < 0 ? c.fixed : kC0;
      }
      try {
        std::vector<size_t> cells =
            phi_bit_cells(bundle.params, n, Word(kSkeletonAlphabet, w));
        for (uint32_t b = 0; b < n; ++b) {
          const WindowModel::CellClass& c = at(center - m + int64_t(cells.at(b)));
          if (c.var < 0 && c.fixed != kC0 && c.fixed != kC1) blocked[j] = true;
          taps[j].push_back(c);
        }
      } catch (const Error&) {
        blocked[j] = true;
      }
    }

    for (uint64_t combo = 0; combo < combos; ++combo) {
      bool admissible = true;
      for (const Placement& pl : placements)
        if ((combo & pl.mask) == pl.want) {
          admissible = false;
          break;
        }
      if (!admissible) continue;

      std::vector<Letter> out;
      bool in_alphabet = true;
      for (uint32_t j = 0; j < len && in_alphabet; ++j) {
        uint64_t v = 0;
        if (!blocked[j])
          for (const WindowModel::CellClass& c : taps[j]) {
            const bool bit =
                c.var < 0 ? c.fixed == kC1 : ((combo >> c.var) & 1) != 0;
            v = (v << 1) | (bit ? 1 : 0);
          }
        if (v >= s) in_alphabet = false;  // depth below the range guards
        else out.push_back(Letter(v));
      }
      if (in_alphabet) language.insert(Word(s, std::move(out)));
    }
  }
  return language;
}

}  // namespace

std::set<Word> decode_layer_language(const UniversalBundle& bundle, size_t target,
                                     uint32_t len, uint64_t depth,
                                     std::vector<int64_t> offsets) {
  if (target >= bundle.targets.size())
    throw Error(ErrorKind::BadArgument, "no such target");
  const uint32_t n = *bundle.assignment.layer_of(target);
  return decode_language_impl(bundle, n, bundle.targets[target].alphabet(), len,
                              depth, std::move(offsets));
}

std::set<Word> decode_free_layer_language(const UniversalBundle& bundle,
                                          uint32_t layer, uint32_t len,
                                          uint64_t depth,
                                          std::vector<int64_t> offsets) {
  if (layer == 0 || layer > bundle.max_layer)
    throw Error(ErrorKind::BadArgument, "layer outside the materialized range");
  return decode_language_impl(bundle, layer, uint32_t(1) << layer, len, depth,
                              std::move(offsets));
}

int64_t pack_bit_cell(const SkeletonParams& params, uint32_t n) {
  if (n == 0) throw Error(ErrorKind::BadArgument, "layers are numbered from 1");
  if (n > 16) throw Error(ErrorKind::BadArgument, "layer too deep to address");
  int64_t q = 1;
  for (uint32_t j = 1; j < n; ++j) q = int64_t(params.period()) * q + (params.k + 2);
  return q;
}

ConfigGenerator pack_binary(const SkeletonParams& params, const NatStream& x) {
  return [params, x](const std::vector<int64_t>& pos) -> Letter {
    if (pos.size() != 1)
      throw Error(ErrorKind::BadArgument, "packed configurations are 1-D");
    CellInfo info = cell_role(params, pos[0], 40);
    if (info.role == CellRole::LeftBracket) return kLB;
    if (info.role == CellRole::RightBracket) return kRB;
    if (info.role == CellRole::Unresolved) return kC0;
    const uint64_t bit = x.at(info.layer - 1);
    if (bit > 1) throw Error(ErrorKind::NotBit, "packed stream entries must be bits");
    return bit ? kC1 : kC0;
  };
}

namespace {

struct UnpackMachine final : OracleMachine {
  SkeletonParams params;
  explicit UnpackMachine(const SkeletonParams& p) : params(p) {}

  std::string name() const override { return "unpack"; }

  StepResult step(uint64_t input, const std::vector<uint64_t>& answers) const override {
    const uint64_t idx = z_index_1d(pack_bit_cell(params, uint32_t(input) + 1)) + 2;
    if (answers.empty()) return StepResult::ask(idx);
    if (answers[0] == kC0) return StepResult::halt(0);
    if (answers[0] == kC1) return StepResult::halt(1);
    throw Error(ErrorKind::NotBit, "cell does not hold a coding bit");
  }

  std::optional<std::vector<uint64_t>> footprint(uint64_t input) const override {
    return std::vector<uint64_t>{
        z_index_1d(pack_bit_cell(params, uint32_t(input) + 1)) + 2};
  }
};

}  // namespace

MachinePtr unpack_operator(const SkeletonParams& params) {
  return std::make_shared<UnpackMachine>(params);
}

PatternStream uniformity_stream(const SkeletonParams& params) {
  return PatternStream([params](uint64_t i) {
    const bool flip = i & 1;
    std::vector<int64_t> t = z_coords(i >> 1, 4);
    uint32_t n = uint32_t(std::abs(t[0])) + 1;
    uint64_t g = uint64_t(std::abs(t[1]));
    uint64_t j1 = uint64_t(std::abs(t[2])), j2 = uint64_t(std::abs(t[3]));
    if (n > 5) {  // too deep to materialize: repeat a layer-1 pair
      n = 1;
      g = 0;
      j1 = 0;
      j2 = 1;
    }
    const LayerGeometry geo = geometry(params, n);
    j1 %= geo.kappa;
    j2 %= geo.kappa;
    if (g == 0 && j1 == j2) j2 = (j2 + 1) % geo.kappa;

    BlockLayout layout = block_layout(params, n);
    std::map<int64_t, Letter> cells;
    auto anchor = [&](uint64_t block) {
      const int64_t base = int64_t(block * geo.m);
      for (int64_t p : layout.lb) cells[base + p] = kLB;
      for (int64_t p : layout.rb) cells[base + p] = kRB;
    };
    anchor(0);
    anchor(g);
    cells[layout.coding[j1]] = flip ? kC1 : kC0;
    cells[int64_t(g * geo.m) + layout.coding[j2]] = flip ? kC0 : kC1;

    std::vector<std::pair<std::vector<int64_t>, Letter>> cs;
    cs.reserve(cells.size());
    for (auto& [p, a] : cells) cs.push_back({{p}, a});
    return PartialPattern(kSkeletonAlphabet, 1, std::move(cs));
  });
}

SubshiftSpec packed_spec(const SkeletonParams& params) {
  PatternStream skel = skeleton_forbidden_stream(params);
  PatternStream uni = uniformity_stream(params);
  return SubshiftSpec{
      kSkeletonAlphabet, 1,
      PatternStream(
          [skel, uni](uint64_t i) { return i % 2 ? uni.at(i / 2) : skel.at(i / 2); }),
      std::nullopt};
}

NatStream gamma_encode_stream(const NatStream& w) {
  struct State {
    NatStream w;
    std::vector<uint8_t> bits;
    uint64_t next = 0;
    std::recursive_mutex mu;
    explicit State(const NatStream& s) : w(s) {}
  };
  auto state = std::make_shared<State>(w);
  return NatStream([state](uint64_t j) -> uint64_t {
    std::lock_guard<std::recursive_mutex> lock(state->mu);
    while (state->bits.size() <= j) {
      const uint64_t v = state->w.at(state->next++);
      if (v == UINT64_MAX)
        throw Error(ErrorKind::BadArgument, "value too large to serialize");
      const uint64_t n = v + 1;
      const int width = std::bit_width(n);
      for (int z = 0; z < width - 1; ++z) state->bits.push_back(0);
      for (int b = width - 1; b >= 0; --b)
        state->bits.push_back(uint8_t((n >> b) & 1));
    }
    return state->bits[j];
  });
}

namespace {

struct GammaReader final : OracleMachine {
  std::string name() const override { return "gamma-read"; }

  StepResult step(uint64_t input, const std::vector<uint64_t>& answers) const override {
    size_t pos = 0;
    auto next_bit = [&](uint64_t& out) -> bool {
      if (pos == answers.size()) return false;
      out = answers[pos++];
      if (out > 1) throw Error(ErrorKind::NotBit, "serialized stream must be bits");
      return true;
    };
    for (uint64_t parsed = 0;; ++parsed) {
      uint32_t zeros = 0;
      uint64_t bit = 0;
      for (;;) {
        if (!next_bit(bit)) return StepResult::ask(pos);
        if (bit == 1) break;
        if (++zeros > 62)
          throw Error(ErrorKind::MalformedCode, "length prefix runs away");
      }
      uint64_t value = 1;
      for (uint32_t b = 0; b < zeros; ++b) {
        if (!next_bit(bit)) return StepResult::ask(pos);
        value = (value << 1) | bit;
      }
      if (parsed == input) return StepResult::halt(value - 1);
    }
  }
};

// Bit prefixes that already prove the decoded stream cannot code a point
// of S: wrong header values, a letter outside S's alphabet, or enough
// decoded cells to contain a forbidden pattern. Enumerated shortest
// first, skipping extensions of shorter bad prefixes; the stream repeats
// its last entry once the length budget is spent.
struct BadPrefixState {
  SkeletonParams params;
  SubshiftSpec S;
  uint32_t max_len;
  std::vector<std::vector<uint8_t>> bad;
  std::vector<PartialPattern> patterns;
  uint64_t len = 1;
  uint64_t counter = 0;
  bool exhausted = false;
  std::recursive_mutex mu;

  BadPrefixState(const SkeletonParams& p, SubshiftSpec s, uint32_t ml)
      : params(p), S(std::move(s)), max_len(ml) {
    if (S.alphabet == 0)
      throw Error(ErrorKind::ZeroAlphabet, "alphabet must be nonempty");
  }

  bool prefix_is_bad(const std::vector<uint8_t>& beta) const {
    std::vector<uint64_t> ws;
    size_t pos = 0;
    while (pos < beta.size()) {
      uint32_t zeros = 0;
      while (pos < beta.size() && beta[pos] == 0) {
        ++zeros;
        ++pos;
      }
      if (pos == beta.size() || zeros > 62) break;
      ++pos;  // the leading 1
      if (pos + zeros > beta.size()) break;
      uint64_t value = 1;
      for (uint32_t b = 0; b < zeros; ++b) value = (value << 1) | beta[pos++];
      ws.push_back(value - 1);
    }
    if (!ws.empty() && ws[0] != S.alphabet) return true;
    if (ws.size() >= 2 && ws[1] != S.dim) return true;
    if (ws.size() < 3) return false;

    std::map<std::vector<int64_t>, Letter> decoded;
    for (size_t c = 0; c + 2 < ws.size(); ++c) {
      if (ws[c + 2] >= S.alphabet) return true;
      decoded[z_coords(c, S.dim)] = Letter(ws[c + 2]);
    }

    uint64_t pat_depth = ws.size();
    if (S.sft_bound) pat_depth = std::min<uint64_t>(pat_depth, *S.sft_bound);
    for (uint64_t t = 0; t < pat_depth; ++t) {
      PartialPattern pat = S.forbidden.at(t);
      if (pat.empty()) continue;
      for (const auto& entry : decoded) {
        const std::vector<int64_t>& anchor = entry.first;
        std::vector<int64_t> shift(S.dim);
        for (uint32_t d = 0; d < S.dim; ++d)
          shift[d] = anchor[d] - pat.cells[0].first[d];
        bool hit = true;
        for (const auto& [coord, letter] : pat.cells) {
          std::vector<int64_t> c(S.dim);
          for (uint32_t d = 0; d < S.dim; ++d) c[d] = coord[d] + shift[d];
          auto it = decoded.find(c);
          if (it == decoded.end() || it->second != letter) {
            hit = false;
            break;
          }
        }
        if (hit) return true;
      }
    }
    return false;
  }

  PartialPattern pattern_for(const std::vector<uint8_t>& beta) const {
    std::map<int64_t, Letter> cells;
    for (uint32_t n = 1; n <= beta.size(); ++n) {
      BlockLayout layout = block_layout(params, n);
      for (int64_t p : layout.lb) cells[p] = kLB;
      for (int64_t p : layout.rb) cells[p] = kRB;
      cells[layout.coding[0]] = beta[n - 1] ? kC1 : kC0;
    }
    std::vector<std::pair<std::vector<int64_t>, Letter>> cs;
    cs.reserve(cells.size());
    for (auto& [p, a] : cells) cs.push_back({{p}, a});
    return PartialPattern(kSkeletonAlphabet, 1, std::move(cs));
  }

  void advance() {
    while (!exhausted) {
      if (counter == (uint64_t(1) << len)) {
        ++len;
        counter = 0;
        if (len > max_len) {
          exhausted = true;
          break;
        }
      }
      std::vector<uint8_t> beta(len);
      uint64_t v = counter++;
      for (size_t j = len; j-- > 0;) {
        beta[j] = uint8_t(v & 1);
        v >>= 1;
      }
      bool extends = false;
      for (const auto& b : bad)
        if (b.size() < beta.size() && std::equal(b.begin(), b.end(), beta.begin())) {
          extends = true;
          break;
        }
      if (extends) continue;
      if (!prefix_is_bad(beta)) continue;
      patterns.push_back(pattern_for(beta));
      bad.push_back(std::move(beta));
      return;
    }
  }

  PartialPattern at(uint64_t i) {
    std::lock_guard<std::recursive_mutex> lock(mu);
    while (patterns.size() <= i && !exhausted) advance();
    if (patterns.empty())
      throw Error(ErrorKind::NoPatterns, "no refutable prefixes under the cap");
    return patterns[std::min<uint64_t>(i, patterns.size() - 1)];
  }
};

}  // namespace

MachinePtr gamma_reader() { return std::make_shared<GammaReader>(); }

KSResult build_KS(const SubshiftSpec& S, const SkeletonParams& params,
                  uint32_t max_prefix) {
  if (max_prefix > 6)
    throw Error(ErrorKind::BadArgument, "prefix cap exceeds addressable layers");
  auto bad = std::make_shared<BadPrefixState>(params, S, max_prefix);
  PatternStream skel = skeleton_forbidden_stream(params);
  PatternStream uni = uniformity_stream(params);
  KSResult out;
  out.spec = SubshiftSpec{
      kSkeletonAlphabet, 1,
      PatternStream([skel, uni, bad](uint64_t i) {
        switch (i % 3) {
          case 0: return skel.at(i / 3);
          case 1: return uni.at(i / 3);
          default: return bad->at(i / 3);
        }
      }),
      std::nullopt};
  out.psi = compose(gamma_reader(), unpack_operator(params));
  return out;
}

SubshiftSpec axis_constant_lift(const SubshiftSpec& spec_1d,
                                const SkeletonParams& params) {
  (void)params;
  if (spec_1d.dim != 1)
    throw Error(ErrorKind::BadArgument, "lift starts from a 1-D spec");
  std::vector<PartialPattern> dominoes;
  for (Letter a : {kLB, kRB, kC0, kC1})
    for (Letter b : {kLB, kRB, kC0, kC1}) {
      const bool coding_a = a == kC0 || a == kC1;
      const bool coding_b = b == kC0 || b == kC1;
      const bool mixed = coding_a != coding_b || (!coding_a && a != b);
      if (!mixed) continue;
      dominoes.push_back(
          PartialPattern(kSkeletonAlphabet, 2, {{{0, 0}, a}, {{0, 1}, b}}));
    }

  PatternStream rows = spec_1d.forbidden;
  const uint64_t head = dominoes.size();
  std::optional<uint64_t> bound;
  if (spec_1d.sft_bound) bound = *spec_1d.sft_bound + head;

  return SubshiftSpec{
      spec_1d.alphabet, 2,
      PatternStream([dominoes, rows, head](uint64_t i) {
        if (i < head) return dominoes[i];
        PartialPattern p = rows.at(i - head);
        std::vector<std::pair<std::vector<int64_t>, Letter>> cells;
        cells.reserve(p.cells.size());
        for (const auto& [coord, a] : p.cells) cells.push_back({{coord[0], 0}, a});
        return PartialPattern(p.alphabet, 2, std::move(cells));
      }),
      bound};
}

}  // namespace sshift
