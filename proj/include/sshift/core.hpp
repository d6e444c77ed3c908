#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sshift/errors.hpp"

namespace sshift {

using Letter = uint32_t;

// Finite word over {0, ..., alphabet-1}.
struct Word {
  uint32_t alphabet = 0;
  std::vector<Letter> letters;

  Word() = default;
  Word(uint32_t alpha, std::vector<Letter> ls) : alphabet(alpha), letters(std::move(ls)) {}

  // Digit-string constructor, alphabet <= 10.
  static Word from_digits(uint32_t alpha, const std::string& digits);

  size_t size() const { return letters.size(); }
  Letter operator[](size_t i) const { return letters[i]; }

  std::string to_string() const;  // digits when alphabet <= 10, else dot-separated

  auto operator<=>(const Word&) const = default;
};

// Partial pattern: finitely many pinned cells in Z^dim, possibly with gaps.
// Cells are kept sorted by coordinate; duplicate coordinates are invalid.
struct PartialPattern {
  uint32_t alphabet = 0;
  uint32_t dim = 1;
  std::vector<std::pair<std::vector<int64_t>, Letter>> cells;

  PartialPattern() = default;
  PartialPattern(uint32_t alpha, uint32_t d,
                 std::vector<std::pair<std::vector<int64_t>, Letter>> cs);

  // Contiguous 1-D pattern with support {0, ..., |w|-1}.
  static PartialPattern from_word(const Word& w);

  bool empty() const { return cells.empty(); }

  // 1-D support bounds; BadArgument when dim != 1 or empty.
  int64_t min_coord() const;
  int64_t max_coord() const;
  int64_t span() const { return max_coord() - min_coord() + 1; }

  auto operator<=>(const PartialPattern&) const = default;
};

// True when every pinned cell sits inside w after shifting by t and agrees.
// OutOfWindow when some cell lands outside [0, |w|).
bool matches(const Word& w, const PartialPattern& p, int64_t t);

// True when p matches w at some shift with full support inside w.
bool occurs_in(const Word& w, const PartialPattern& p);

// Lazily evaluated, memoized stream of patterns indexed by 0, 1, 2, ...
// Copies share the memo; safe to pull from several threads.
class PatternStream {
public:
  PatternStream() = default;
  explicit PatternStream(std::function<PartialPattern(uint64_t)> gen);

  static PatternStream from_list(std::vector<PartialPattern> pats);

  PartialPattern at(uint64_t index) const;

private:
  struct State {
    std::function<PartialPattern(uint64_t)> gen;
    std::map<uint64_t, PartialPattern> memo;
    std::recursive_mutex mu;  // generators may consult earlier entries
  };
  std::shared_ptr<State> state_;
};

// Subshift presentation: alphabet, dimension, forbidden pattern stream.
// sft_bound set means the stream is exhausted after that many patterns
// (0 = no constraints at all); unset means genuinely infinite.
struct SubshiftSpec {
  uint32_t alphabet = 0;
  uint32_t dim = 1;
  PatternStream forbidden;
  std::optional<uint64_t> sft_bound;

  bool is_sft() const { return sft_bound.has_value(); }
};

// Words avoiding the first `depth` forbidden patterns at every placement.
// For SFT specs depth is clamped to the pattern count. Search is a prefix
// DFS; more than node_cap explored prefixes raises BudgetExceeded.
std::set<Word> admissible_words(const SubshiftSpec& spec, uint32_t len, uint64_t depth,
                                uint64_t node_cap = uint64_t(1) << 24);

// Existence-only variant: stops at the first complete word. Same search,
// so budgets and errors match admissible_words.
bool admissible_word_exists(const SubshiftSpec& spec, uint32_t len, uint64_t depth,
                            uint64_t node_cap = uint64_t(1) << 24);

// Convenience: does this single word avoid the first `depth` patterns?
bool locally_admissible(const Word& w, const SubshiftSpec& spec, uint64_t depth);

// Exact language of a 1-D SFT (all patterns consulted): words of length len
// that occur in some bi-infinite point. Built on the overlap graph of
// max-span windows with dead-end trimming.
std::set<Word> sft_language(const SubshiftSpec& spec, uint32_t len);

// Sliding block code with radius r: output letter from a (2r+1)-window.
struct BlockCode {
  uint32_t in_alphabet = 0;
  uint32_t out_alphabet = 0;
  uint32_t radius = 0;
  std::function<Letter(const std::vector<Letter>&)> rule;

  static BlockCode from_table(uint32_t in_alpha, uint32_t out_alpha, uint32_t r,
                              std::vector<Letter> table);  // row-major, in_alpha^(2r+1) entries
};

// Image word: positions r .. |w|-1-r; WindowTooSmall when |w| < 2r+1.
Word apply_block_code(const BlockCode& code, const Word& w);

// Letters at phase, phase+stride, ...
Word subsample(const Word& w, uint64_t stride, uint64_t phase);

// Finite 2-D window with an anchor, row-major storage.
struct Grid2D {
  int64_t x0 = 0, y0 = 0;
  int64_t width = 0, height = 0;
  uint32_t alphabet = 0;
  std::vector<Letter> data;  // (x,y) at (y-y0)*width + (x-x0)

  Letter at(int64_t x, int64_t y) const;
  void set(int64_t x, int64_t y, Letter a);
  bool contains(int64_t x, int64_t y) const;
};

// All-cells-inside-and-equal match at shift (tx, ty); OutOfWindow otherwise
// mirrors the 1-D contract.
bool matches(const Grid2D& g, const PartialPattern& p, int64_t tx, int64_t ty);
bool occurs_in(const Grid2D& g, const PartialPattern& p);

// Named presentations used across tools and tests.
// golden_mean: binary, forbid 11. no00no11: binary, forbid 00 and 11.
// fullshift:<s>: s letters, nothing forbidden.
SubshiftSpec builtin_spec(const std::string& name);

}  // namespace sshift
