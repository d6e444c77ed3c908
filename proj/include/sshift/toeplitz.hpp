#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sshift/core.hpp"
#include "sshift/errors.hpp"
#include "sshift/oracle.hpp"

namespace sshift {

// Skeleton alphabet. Cells of deep layers hold C0 until their layer is
// activated, so "blank" is not a letter of its own.
inline constexpr Letter kLB = 0;
inline constexpr Letter kRB = 1;
inline constexpr Letter kC0 = 2;
inline constexpr Letter kC1 = 3;
inline constexpr uint32_t kSkeletonAlphabet = 4;

struct SkeletonParams {
  uint32_t k = 4;

  explicit SkeletonParams(uint32_t k_ = 4) : k(k_) {
    if (k < 3) throw Error(ErrorKind::BadArgument, "skeleton needs k >= 3");
  }

  uint32_t period() const { return 2 * (k + 2); }  // letters per layer block
};

struct LayerGeometry {
  uint64_t m = 0;      // spacing of consecutive layer-n coding blocks
  uint64_t kappa = 0;  // real coding cells per block
  uint64_t rho = 0;    // m/2, the decoder's nominal radius
};

// m_n = 2^n (k+2)^n, kappa_n = k (k+2)^(n-1), rho_n = m_n / 2.
LayerGeometry geometry(const SkeletonParams& params, uint32_t n);

enum class CellRole { LeftBracket, RightBracket, Coding, Unresolved };

// Where one cell of the canonical (offset-0) layering lives.
struct CellInfo {
  uint32_t layer = 0;  // 0 = deeper than the probed bound
  CellRole role = CellRole::Unresolved;
  uint32_t unit_class = 0;   // 0 = LB unit, 1..k coding units, k+1 = RB unit
  uint64_t cell_offset = 0;  // position inside the unit, 0-based
  int64_t group = 0;         // which layer-n block the unit belongs to
};

// Peel the canonical template at position p, stopping below max_layer.
// The cells that every layer skips (a measure-zero residue) come back
// Unresolved.
CellInfo cell_role(const SkeletonParams& params, int64_t p,
                   uint32_t max_layer = 40);

struct CheckViolation {
  uint32_t layer = 0;
  size_t position = 0;  // index into the checked word
  std::string rule;
};

struct CheckResult {
  bool valid = false;
  std::optional<CheckViolation> violation;

  static CheckResult ok() { return {true, std::nullopt}; }
};

// Does the window extend to a configuration obeying the bracket/coding/
// slot rules of layers 1..depth, with the cells of deeper layers blank?
// Tries every alignment of the window against the layer-1 period, checks
// bracket and coding classes, requires each slot to hold letters of one
// type, collapses slots to meta letters and recurses at depth-1. Words the
// rules cannot falsify are Valid.
CheckResult skeleton_check(const SkeletonParams& params, const Word& w,
                           uint32_t depth);

// Matched checking depth for a window of the given length.
uint32_t check_depth_for_length(const SkeletonParams& params, uint64_t len);

struct LayerParse {
  struct CellAssign {
    uint32_t layer = 0;
    CellRole role = CellRole::Unresolved;
  };
  std::vector<CellAssign> cells;
  // units[n-1] lists each visible unit of layer n as its sorted cell
  // positions (units of deep layers are scattered clumps, not intervals)
  std::vector<std::vector<std::vector<size_t>>> units;
};

// Full per-cell layer assignment for a valid window; nullopt when the
// window fails skeleton_check at this depth.
std::optional<LayerParse> parse_layers(const SkeletonParams& params,
                                       const Word& w, uint32_t depth);

// bits[n-1][g] holds the kappa_n coding bits of layer n's g-th block, in
// cell-position order; g runs over the m_N / m_n blocks of one period.
using LayerBits = std::vector<std::vector<std::vector<uint8_t>>>;

// One period (length m_N) of the depth-N skeleton: layers 1..N placed
// structurally, coding cells set from bits, deeper cells blank (C0).
Word skeleton_generate(const SkeletonParams& params, uint32_t depth,
                       const LayerBits& bits);

// The forbidden-pattern presentation of the full skeleton: every word
// failing skeleton_check at its matched depth, shortest first, skipping
// words that already contain an emitted violation.
PatternStream skeleton_forbidden_stream(const SkeletonParams& params);

// The stream packaged with alphabet/dimension headers.
SubshiftSpec skeleton_spec(const SkeletonParams& params);

// Read the layer-n letter out of a window: find the leftmost complete
// layer-n coding block (brackets and coding cells all visible), read its
// kappa_n bits in position order, return the integer of the first n bits,
// most significant first. NoCompleteCell when no such block is visible.
Letter phi_value(const SkeletonParams& params, uint32_t n, const Word& w);

// Window positions of the n bits phi_value would read. Block location
// only inspects letter types, never which coding value a cell holds, so
// rewriting kC0/kC1 cells leaves the result (and whether one exists)
// unchanged: phi_value is a function of these positions alone on any
// window reachable from w by coding-bit flips.
std::vector<size_t> phi_bit_cells(const SkeletonParams& params, uint32_t n,
                                  const Word& w);

// phi_value as a total sliding-block rule of radius m_n (the nominal
// rho_n = m_n/2 misses every block for two alignments per period, so the
// radius is widened; geometry() still reports rho_n). Windows without a
// complete block map to 0.
BlockCode phi_block_code(const SkeletonParams& params, uint32_t n);

// The layer-n projective subdynamics operator: phi_n sampled at stride
// m_n, as an oracle machine over configuration streams.
MachinePtr layer_decoder(const SkeletonParams& params, uint32_t n);

// Rewrite a forbidden stream over an alphabet of size s <= 2^n into
// skeleton patterns: first the range guards that outlaw the unused letter
// codes s..2^n-1 at any layer-n block, then one pattern per input word
// pinning its letters' n-bit codes onto the first n coding cells of
// consecutive layer-n blocks, with both bracket units pinned as anchors.
// Input patterns must be 1-D with contiguous support.
PatternStream transform_forbidden(const SkeletonParams& params, uint32_t n,
                                  const PatternStream& F, uint32_t s);

// Skeleton words print as L, R, 0, 1 (brackets and coding bits).
std::string skeleton_word_to_string(const Word& w);
Word skeleton_word_from_string(const std::string& text);

}  // namespace sshift
