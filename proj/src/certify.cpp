#include "sshift/certify.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>

#include "sshift/codec.hpp"
#include "sshift/errors.hpp"
#include "sshift/toeplitz.hpp"

namespace sshift {

namespace {

// largest extent across axes; the window [-b;b]^d holds the pattern iff
// b is at least this
uint64_t pattern_extent(const PartialPattern& p) {
  if (p.empty()) return 0;
  uint64_t best = 0;
  for (uint32_t a = 0; a < p.dim; ++a) {
    int64_t lo = p.cells.front().first[a], hi = lo;
    for (const auto& [c, l] : p.cells) {
      lo = std::min(lo, c[a]);
      hi = std::max(hi, c[a]);
    }
    best = std::max(best, uint64_t(hi - lo + 1));
  }
  return best;
}

// inputs 0..r cover the header plus every cell of [-b;b]
uint64_t input_radius(uint64_t b) {
  uint64_t mx = 0;
  for (int64_t v = -int64_t(b); v <= int64_t(b); ++v)
    mx = std::max(mx, z_index_1d(v));
  return 2 + mx;
}

// forbidden placements of one target inside the output window [-b;b]
struct OutputPlacement {
  std::vector<std::pair<int64_t, Letter>> cells;  // window cell -> letter
};

std::vector<OutputPlacement> output_placements(const SubshiftSpec& S,
                                               uint64_t b) {
  std::vector<OutputPlacement> out;
  const uint64_t count = std::min<uint64_t>(b, S.sft_bound.value_or(0));
  for (uint64_t idx = 0; idx < count; ++idx) {
    PartialPattern pat = S.forbidden.at(idx);
    if (pat.empty()) continue;
    const int64_t lo = pat.min_coord(), hi = pat.max_coord();
    for (int64_t t = -int64_t(b) - lo; t + hi <= int64_t(b); ++t) {
      OutputPlacement pl;
      for (const auto& [c, l] : pat.cells) pl.cells.emplace_back(c[0] + t, l);
      out.push_back(std::move(pl));
    }
  }
  return out;
}

enum class SweepVerdict { Clean, Dirty, Widen };

// run the operator on one window (letters served by `cell`), check the
// [-b;b] output against the target's placements
SweepVerdict check_window(const OracleMachine& op,
                          const std::function<Letter(int64_t)>& cell,
                          uint32_t x_alphabet, uint64_t j, uint64_t r,
                          uint32_t s_target,
                          const std::vector<OutputPlacement>& placements,
                          uint64_t step_budget) {
  NatStream oracle([cell, x_alphabet, j](uint64_t idx) -> uint64_t {
    if (idx == 0) return x_alphabet;
    if (idx == 1) return 1;
    const int64_t z = z_coords(idx - 2, 1)[0];
    if (z < -int64_t(j) || z > int64_t(j))
      throw Error(ErrorKind::OutOfWindow, "query beyond the window");
    return cell(z);
  });

  std::map<int64_t, Letter> y;
  try {
    for (uint64_t t = 2; t <= r; ++t) {
      const uint64_t v = run_operator(op, oracle, t, step_budget);
      if (v >= s_target) return SweepVerdict::Dirty;
      y[z_coords(t - 2, 1)[0]] = Letter(v);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::OutOfWindow) return SweepVerdict::Widen;
    throw;
  }

  for (const auto& pl : placements) {
    bool hit = true;
    for (const auto& [c, l] : pl.cells)
      if (y.at(c) != l) {
        hit = false;
        break;
      }
    if (hit) return SweepVerdict::Dirty;
  }
  return SweepVerdict::Clean;
}

// ---- structured windows over a universal bundle ----------------------

uint64_t unit_size_of(const SkeletonParams& params, uint32_t layer) {
  uint64_t u = 1;
  for (uint32_t j = 1; j < layer; ++j) u *= params.k + 2;
  return u;
}

// One alignment class of the depth-capped skeleton: every first-assignment
// layer's visible leading coding bits become free variables, everything
// else is fixed by the canonical structure (blank fill).
struct AlignedWindow {
  std::vector<Letter> fixed;   // letter per cell, index p + j
  std::vector<int32_t> var;    // free-bit index or -1, same indexing
  uint32_t bits = 0;

  Letter at(int64_t p, uint64_t combo, int64_t j) const {
    const size_t i = size_t(p + j);
    const int32_t v = var[i];
    if (v < 0) return fixed[i];
    return ((combo >> v) & 1) ? kC1 : kC0;
  }
};

AlignedWindow build_aligned_window(const UniversalBundle& bundle,
                                   const std::set<uint32_t>& free_layers,
                                   int64_t delta, uint64_t j) {
  const SkeletonParams& params = bundle.params;
  AlignedWindow w;
  w.fixed.resize(2 * j + 1, kC0);
  w.var.assign(2 * j + 1, -1);

  std::map<std::pair<uint32_t, int64_t>, uint32_t> site_base;
  for (int64_t p = -int64_t(j); p <= int64_t(j); ++p) {
    const size_t i = size_t(p + int64_t(j));
    const CellInfo info = cell_role(params, p + delta, bundle.max_layer);
    if (info.role == CellRole::LeftBracket) {
      w.fixed[i] = kLB;
      continue;
    }
    if (info.role == CellRole::RightBracket) {
      w.fixed[i] = kRB;
      continue;
    }
    if (info.role != CellRole::Coding) continue;  // unresolved stays blank
    const uint64_t bit =
        (info.unit_class - 1) * unit_size_of(params, info.layer) +
        info.cell_offset;
    if (!free_layers.count(info.layer) || bit >= info.layer) continue;
    const auto key = std::make_pair(info.layer, info.group);
    auto it = site_base.find(key);
    if (it == site_base.end()) {
      it = site_base.emplace(key, w.bits).first;
      w.bits += info.layer;
    }
    w.var[i] = int32_t(it->second + (info.layer - 1 - uint64_t(bit)));
  }
  return w;
}

// admissibility filter: placements of the bundle's first j patterns
// reduced to bit tests over the free variables
struct BitTest {
  uint64_t mask = 0, want = 0;
};

// nullopt = the fixed part already violates a pattern (dead alignment)
std::optional<std::vector<BitTest>> placement_tests(
    const AlignedWindow& w, const std::vector<PartialPattern>& pats,
    uint64_t j) {
  std::vector<BitTest> tests;
  for (const auto& pat : pats) {
    if (pat.empty()) continue;
    const int64_t lo = pat.min_coord(), hi = pat.max_coord();
    for (int64_t t = -int64_t(j) - lo; t + hi <= int64_t(j); ++t) {
      BitTest bt;
      bool possible = true;
      for (const auto& [c, l] : pat.cells) {
        const size_t i = size_t(c[0] + t + int64_t(j));
        const int32_t v = w.var[i];
        if (v < 0) {
          if (w.fixed[i] != l) {
            possible = false;
            break;
          }
          continue;
        }
        if (l != kC0 && l != kC1) {
          possible = false;
          break;
        }
        const uint64_t bitmask = uint64_t(1) << v;
        const uint64_t bitwant = (l == kC1) ? bitmask : 0;
        if ((bt.mask & bitmask) && (bt.want & bitmask) != bitwant) {
          possible = false;  // pattern contradicts itself here
          break;
        }
        bt.mask |= bitmask;
        bt.want |= bitwant;
      }
      if (!possible) continue;
      if (bt.mask == 0) return std::nullopt;  // fires on every combo
      tests.push_back(bt);
    }
  }
  std::sort(tests.begin(), tests.end(), [](const BitTest& a, const BitTest& b) {
    return std::tie(a.mask, a.want) < std::tie(b.mask, b.want);
  });
  tests.erase(std::unique(tests.begin(), tests.end(),
                          [](const BitTest& a, const BitTest& b) {
                            return a.mask == b.mask && a.want == b.want;
                          }),
              tests.end());
  return tests;
}

SweepVerdict sweep_bundle(const UniversalBundle& bundle, const OracleMachine& op,
                          const SubshiftSpec& S, uint64_t b, uint64_t j,
                          uint64_t r, uint64_t step_budget) {
  std::set<uint32_t> free_layers;
  uint32_t deepest = 0;
  for (uint64_t t = 0; t < bundle.targets.size(); ++t)
    if (auto l = bundle.assignment.layer_of(t)) {
      free_layers.insert(*l);
      deepest = std::max(deepest, *l);
    }
  const uint32_t align_layer = std::min(deepest + 1, bundle.max_layer);
  const uint64_t M = geometry(bundle.params, align_layer).m;
  if (M > (uint64_t(1) << 13))
    throw Error(ErrorKind::BudgetExceeded,
                "alignment sweep too wide for the deepest constrained layer");

  std::vector<PartialPattern> first_j;
  first_j.reserve(j);
  for (uint64_t idx = 0; idx < j; ++idx)
    first_j.push_back(bundle.spec.forbidden.at(idx));

  const auto placements = output_placements(S, b);

  bool widened = false;
  for (int64_t delta = 0; delta < int64_t(M); ++delta) {
    AlignedWindow w = build_aligned_window(bundle, free_layers, delta, j);
    if (w.bits > 20)
      throw Error(ErrorKind::BudgetExceeded,
                  "free-bit enumeration too wide at this depth");
    auto tests = placement_tests(w, first_j, j);
    if (!tests) continue;  // structure itself inadmissible at this shift

    std::function<Letter(int64_t)> cell;
    for (uint64_t combo = 0; combo < (uint64_t(1) << w.bits); ++combo) {
      bool admissible = true;
      for (const auto& bt : *tests)
        if ((combo & bt.mask) == bt.want) {
          admissible = false;
          break;
        }
      if (!admissible) continue;
      cell = [&w, combo, j](int64_t p) { return w.at(p, combo, int64_t(j)); };
      const SweepVerdict v = check_window(op, cell, bundle.spec.alphabet, j, r,
                                          S.alphabet, placements, step_budget);
      if (v == SweepVerdict::Dirty) return v;
      if (v == SweepVerdict::Widen) widened = true;
    }
  }
  return widened ? SweepVerdict::Widen : SweepVerdict::Clean;
}

SweepVerdict sweep_literal(const SubshiftSpec& X, const OracleMachine& op,
                           const SubshiftSpec& S, uint64_t b, uint64_t j,
                           uint64_t r, uint64_t node_cap,
                           uint64_t step_budget) {
  if (X.dim != 1)
    throw Error(ErrorKind::BadArgument, "literal window sweeps are 1-D only");
  const auto words =
      admissible_words(X, uint32_t(2 * j + 1), j, node_cap);
  const auto placements = output_placements(S, b);
  bool widened = false;
  for (const auto& word : words) {
    auto cell = [&word, j](int64_t p) { return word[size_t(p + int64_t(j))]; };
    const SweepVerdict v = check_window(op, cell, X.alphabet, j, r, S.alphabet,
                                        placements, step_budget);
    if (v == SweepVerdict::Dirty) return v;
    if (v == SweepVerdict::Widen) widened = true;
  }
  return widened ? SweepVerdict::Widen : SweepVerdict::Clean;
}

SweepVerdict inner_check(const CertifiableX& X, const OracleMachine& op,
                         const SubshiftSpec& S, uint64_t b, uint64_t j,
                         uint64_t step_budget, uint64_t node_cap) {
  const uint64_t r = input_radius(b);
  if (X.bundle)
    return sweep_bundle(*X.bundle, op, S, b, j, r, step_budget);
  return sweep_literal(X.spec, op, S, b, j, r, node_cap, step_budget);
}

// continuity level of operator n at the radius serving precision b;
// nullopt when the level outruns the probe cap (tuple unreachable)
class LevelCache {
 public:
  LevelCache(const CertifiableX& X, const OperatorRegistry& registry,
             const CertifyBudgets& budgets)
      : X_(X), registry_(registry), budgets_(budgets) {}

  std::optional<uint64_t> level(uint64_t n, uint64_t b) {
    const auto key = std::make_pair(n, b);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    ModulusCaps caps;
    caps.max_i = budgets_.max_sum;
    caps.node_cap = budgets_.node_cap;
    caps.step_budget = budgets_.step_budget;
    std::optional<uint64_t> out;
    try {
      out = modulus_of_continuity(*registry_.at(n), input_radius(b), X_.spec,
                                  caps).level;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CapExceeded) throw;
    }
    memo_.emplace(key, out);
    return out;
  }

 private:
  const CertifiableX& X_;
  const OperatorRegistry& registry_;
  const CertifyBudgets& budgets_;
  std::map<std::pair<uint64_t, uint64_t>, std::optional<uint64_t>> memo_;
};

}  // namespace

std::vector<std::pair<uint64_t, uint64_t>> build_B(
    const std::vector<SubshiftSpec>& targets) {
  std::vector<std::pair<uint64_t, uint64_t>> out;
  out.reserve(targets.size());
  for (uint64_t i = 0; i < targets.size(); ++i) {
    const SubshiftSpec& S = targets[i];
    if (!S.sft_bound)
      throw Error(ErrorKind::NotSFT,
                  "precision bounds need a finite forbidden set");
    uint64_t b = 1;
    for (uint64_t t = 0; t < *S.sft_bound; ++t)
      b = std::max(b, pattern_extent(S.forbidden.at(t)));
    out.emplace_back(i, b);
  }
  return out;
}

std::vector<ClaimRecord> enumerate_simulated(
    const CertifiableX& X, const OperatorRegistry& registry,
    const std::vector<SubshiftSpec>& targets,
    const std::vector<std::pair<uint64_t, uint64_t>>& B,
    const CertifyBudgets& budgets) {
  std::map<uint64_t, uint64_t> precision;
  for (const auto& [i, b] : B) precision[i] = b;

  LevelCache levels(X, registry, budgets);
  std::vector<ClaimRecord> claims;
  std::set<uint64_t> claimed;

  std::deque<ClaimRecord> parked;

  enum class Outcome { Claimed, Failed, Parked };
  auto attempt = [&](const ClaimRecord& tuple, uint64_t scale) -> Outcome {
    if (claimed.count(tuple.target)) return Outcome::Failed;
    try {
      const SweepVerdict v = inner_check(
          X, *registry.at(tuple.op), targets[tuple.target], tuple.precision,
          tuple.depth, budgets.step_budget * scale, budgets.node_cap * scale);
      if (v == SweepVerdict::Clean) {
        claims.push_back(tuple);
        claimed.insert(tuple.target);
        return Outcome::Claimed;
      }
      return Outcome::Failed;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::BudgetExhausted ||
          e.kind() == ErrorKind::BudgetExceeded)
        return Outcome::Parked;
      throw;
    }
  };

  for (uint64_t sum = 0; sum <= budgets.max_sum; ++sum) {
    for (uint64_t i = 0; i < targets.size(); ++i) {
      auto pit = precision.find(i);
      if (pit == precision.end() || claimed.count(i)) continue;
      const uint64_t b = pit->second;
      for (uint64_t n = 0; n < registry.size(); ++n) {
        if (i + n + b > sum) continue;
        const uint64_t j = sum - i - n - b;
        const auto ell = levels.level(n, b);
        if (!ell || j <= *ell) continue;
        const ClaimRecord tuple{i, n, b, j};
        if (attempt(tuple, 1) == Outcome::Parked) parked.push_back(tuple);
      }
    }
  }

  // parked tuples retry with doubled budgets, preserving park order
  for (uint64_t round = 1; round <= budgets.retry_rounds && !parked.empty();
       ++round) {
    std::deque<ClaimRecord> still;
    for (const ClaimRecord& tuple : parked)
      if (attempt(tuple, uint64_t(1) << round) == Outcome::Parked)
        still.push_back(tuple);
    parked = std::move(still);
  }

  return claims;
}

bool verify_claim(const ClaimRecord& claim, const CertifiableX& X,
                  const OperatorRegistry& registry,
                  const std::vector<SubshiftSpec>& targets,
                  const CertifyBudgets& budgets) {
  if (claim.target >= targets.size() || claim.op >= registry.size())
    return false;
  CertifyBudgets probe = budgets;
  probe.max_sum = std::max(budgets.max_sum, claim.depth + 1);
  LevelCache levels(X, registry, probe);
  const auto ell = levels.level(claim.op, claim.precision);
  if (!ell || claim.depth <= *ell) return false;
  const SweepVerdict v =
      inner_check(X, *registry.at(claim.op), targets[claim.target],
                  claim.precision, claim.depth, probe.step_budget,
                  probe.node_cap);
  return v == SweepVerdict::Clean;
}

}  // namespace sshift
