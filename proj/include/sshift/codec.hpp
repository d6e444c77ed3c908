#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "sshift/core.hpp"
#include "sshift/errors.hpp"

namespace sshift {

// Total function N -> N with memoized indexed access. All stream-level
// codings (configurations, subshift codes, join/meet/prepend) live here.
class NatStream {
public:
  NatStream() = default;
  explicit NatStream(std::function<uint64_t(uint64_t)> gen);

  uint64_t at(uint64_t index) const;

private:
  struct State {
    std::function<uint64_t(uint64_t)> gen;
    std::map<uint64_t, uint64_t> memo;
    std::recursive_mutex mu;  // generators may consult earlier entries
  };
  std::shared_ptr<State> state_;
};

// Bijection N <-> Z^d. One dimension: 0, 1, -1, 2, -2, ...
// Higher dimensions unpair with the Cantor pairing, right-nested, then map
// each component through the one-dimensional rule.
uint64_t z_index(const std::vector<int64_t>& v);
std::vector<int64_t> z_coords(uint64_t n, uint32_t d);

// One-dimensional shorthands.
uint64_t z_index_1d(int64_t x);
int64_t z_coord_1d(uint64_t n);

// Cantor pairing and its inverse; pair() guards against uint64 overflow.
uint64_t cantor_pair(uint64_t a, uint64_t b);
std::pair<uint64_t, uint64_t> cantor_unpair(uint64_t n);

// Code of a full square pattern over alphabet s, dimension d:
//   code = sum_{r' < r} s^((2r'+1)^d) + v
// where v reads the letters in lexicographic coordinate order over
// [-r;r]^d, most significant first. decode is total on N.
uint64_t encode_pattern(const PartialPattern& p, uint32_t s);
PartialPattern decode_pattern(uint64_t code, uint32_t s, uint32_t d);

// Letters of a full square pattern in lexicographic coordinate order.
// Support must be exactly [-r;r]^d for some r; throws MalformedCode else.
uint64_t pattern_radius(const PartialPattern& p);

// Total configuration rule over Z^d.
using ConfigGenerator = std::function<Letter(const std::vector<int64_t>&)>;

// Configuration <-> stream: out(0)=s, out(1)=d, out(n+2)=c(z_coords(n)).
NatStream encode_config(ConfigGenerator c, uint32_t s, uint32_t d);

struct DecodedConfig {
  uint32_t alphabet = 0;
  uint32_t dim = 1;
  ConfigGenerator cell;  // values already reduced mod alphabet
};

// Inverse direction; reads headers from the stream, reduces cells mod s.
DecodedConfig decode_stream(const NatStream& w);

// Degree-theoretic stream combinators.
NatStream m_join(const NatStream& a, const NatStream& b);
NatStream m_prepend(uint64_t head, const NatStream& a);
NatStream m_meet(const NatStream& a, const NatStream& b, uint32_t side);

// Stream whose value set is exactly the given nonempty set (lists cycle).
NatStream set_enumerator(std::vector<uint64_t> elements);
NatStream set_enumerator(std::function<uint64_t(uint64_t)> gen);

// Subshift transmitted as a stream: (s, d, code, code, ...).
struct SubshiftCode {
  NatStream stream;

  uint32_t alphabet() const { return static_cast<uint32_t>(stream.at(0)); }
  uint32_t dim() const { return static_cast<uint32_t>(stream.at(1)); }
  uint64_t pattern_code(uint64_t i) const { return stream.at(i + 2); }
};

// Gödel-code a presentation. Patterns with wildcards are replaced by the
// finite family of their full square completions at minimal radius,
// enumerated placement-first (ascending offset, then ascending letter
// value). Finite presentations emit every completion once and then repeat
// the final code forever; infinite streams dovetail (pattern, completion)
// pairs. Presentations with no patterns at all are not codable: NoPatterns.
SubshiftCode spec_to_code(const SubshiftSpec& spec);

// Decode side. The result's pattern stream yields the decoded completions
// in stream order; sft_bound is never set (the stream format is total, so
// finiteness is not recoverable). HeaderMismatch if a decoded pattern
// disagrees with the header alphabet.
SubshiftSpec code_to_spec(const SubshiftCode& w);

// Handwritten code for the unconstrained shift on `alphabet` letters:
// header only, the pattern stream raises NoPatterns from index 0 on.
// spec_to_code cannot produce this (padding needs a last pattern), so
// consumers that accept arbitrary codes must tolerate the empty stream.
SubshiftCode fullshift_code(uint32_t alphabet, uint32_t dim = 1);

// The full-square completions of one pattern at its minimal radius, in the
// emission order used by spec_to_code.
std::vector<PartialPattern> pattern_completions(const PartialPattern& p,
                                                uint32_t s);

}  // namespace sshift
