#include "sshift/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace sshift {

namespace {

using u128 = unsigned __int128;

uint64_t checked_u64(u128 v, const char* what) {
  if (v > std::numeric_limits<uint64_t>::max()) {
    throw Error(ErrorKind::BadArgument, std::string(what) + " exceeds 64-bit range");
  }
  return static_cast<uint64_t>(v);
}

u128 isqrt_u128(u128 n) {
  if (n == 0) return 0;
  u128 x = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
  // fix up the floating seed; at most a couple of steps
  while (x > 0 && x * x > n) --x;
  while ((x + 1) * (x + 1) <= n) ++x;
  return x;
}

// s^e, saturating at 2^64-1 (callers only compare against smaller codes).
uint64_t pow_sat(uint64_t s, uint64_t e) {
  u128 acc = 1;
  for (uint64_t i = 0; i < e; ++i) {
    acc *= s;
    if (acc > std::numeric_limits<uint64_t>::max()) {
      return std::numeric_limits<uint64_t>::max();
    }
  }
  return static_cast<uint64_t>(acc);
}

// All coordinate tuples of [-r;r]^d in lexicographic order.
std::vector<std::vector<int64_t>> cube_coords(int64_t r, uint32_t d) {
  std::vector<std::vector<int64_t>> out;
  std::vector<int64_t> cur(d, -r);
  while (true) {
    out.push_back(cur);
    uint32_t i = d;
    while (i > 0) {
      --i;
      if (cur[i] < r) {
        ++cur[i];
        std::fill(cur.begin() + i + 1, cur.end(), -r);
        break;
      }
      if (i == 0) return out;
    }
  }
}

}  // namespace

NatStream::NatStream(std::function<uint64_t(uint64_t)> gen)
    : state_(std::make_shared<State>()) {
  state_->gen = std::move(gen);
}

uint64_t NatStream::at(uint64_t index) const {
  if (!state_) throw Error(ErrorKind::BadArgument, "empty NatStream");
  std::lock_guard<std::recursive_mutex> lock(state_->mu);
  auto it = state_->memo.find(index);
  if (it != state_->memo.end()) return it->second;
  uint64_t value = state_->gen(index);
  state_->memo.emplace(index, value);
  return value;
}

uint64_t cantor_pair(uint64_t a, uint64_t b) {
  u128 s = static_cast<u128>(a) + b;
  u128 v = s * (s + 1) / 2 + b;
  return checked_u64(v, "Cantor pair");
}

std::pair<uint64_t, uint64_t> cantor_unpair(uint64_t n) {
  u128 w = (isqrt_u128(static_cast<u128>(n) * 8 + 1) - 1) / 2;
  u128 t = w * (w + 1) / 2;
  uint64_t b = static_cast<uint64_t>(n - t);
  uint64_t a = static_cast<uint64_t>(w) - b;
  return {a, b};
}

uint64_t z_index_1d(int64_t x) {
  if (x == 0) return 0;
  if (x > 0) return 2 * static_cast<uint64_t>(x) - 1;
  return 2 * static_cast<uint64_t>(-x);
}

int64_t z_coord_1d(uint64_t n) {
  if (n == 0) return 0;
  if (n % 2 == 1) return static_cast<int64_t>((n + 1) / 2);
  return -static_cast<int64_t>(n / 2);
}

uint64_t z_index(const std::vector<int64_t>& v) {
  if (v.empty()) throw Error(ErrorKind::BadArgument, "z_index needs dimension >= 1");
  uint64_t acc = z_index_1d(v.back());
  for (size_t i = v.size() - 1; i > 0; --i) {
    acc = cantor_pair(z_index_1d(v[i - 1]), acc);
  }
  return acc;
}

std::vector<int64_t> z_coords(uint64_t n, uint32_t d) {
  if (d == 0) throw Error(ErrorKind::BadArgument, "z_coords needs dimension >= 1");
  std::vector<int64_t> out;
  out.reserve(d);
  for (uint32_t i = 0; i + 1 < d; ++i) {
    auto [a, rest] = cantor_unpair(n);
    out.push_back(z_coord_1d(a));
    n = rest;
  }
  out.push_back(z_coord_1d(n));
  return out;
}

uint64_t pattern_radius(const PartialPattern& p) {
  if (p.cells.empty()) {
    throw Error(ErrorKind::MalformedCode, "empty pattern is not a full square");
  }
  int64_t r = 0;
  for (const auto& [coord, letter] : p.cells) {
    (void)letter;
    for (int64_t c : coord) r = std::max(r, std::abs(c));
  }
  u128 cells = 1;
  for (uint32_t i = 0; i < p.dim; ++i) {
    cells *= static_cast<u128>(2 * r + 1);
    if (cells > (u128(1) << 40)) {
      throw Error(ErrorKind::BadArgument, "pattern cube too large");
    }
  }
  if (static_cast<u128>(p.cells.size()) != cells) {
    throw Error(ErrorKind::MalformedCode, "pattern support is not a full square");
  }
  return static_cast<uint64_t>(r);
}

uint64_t encode_pattern(const PartialPattern& p, uint32_t s) {
  if (s == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet size 0");
  uint64_t r = pattern_radius(p);
  u128 blocks = 0;
  for (uint64_t rp = 0; rp < r; ++rp) {
    uint64_t cells = 1;
    for (uint32_t i = 0; i < p.dim; ++i) cells *= 2 * rp + 1;
    uint64_t block = pow_sat(s, cells);
    if (block == std::numeric_limits<uint64_t>::max()) {
      throw Error(ErrorKind::BadArgument, "pattern code exceeds 64-bit range");
    }
    blocks += block;
  }
  // cells are stored sorted by coordinate, which is exactly the
  // lexicographic reading order; first cell most significant
  u128 v = 0;
  for (const auto& [coord, letter] : p.cells) {
    (void)coord;
    if (letter >= s) {
      throw Error(ErrorKind::MalformedCode, "letter outside alphabet");
    }
    v = v * s + letter;
    if (v > std::numeric_limits<uint64_t>::max()) {
      throw Error(ErrorKind::BadArgument, "pattern code exceeds 64-bit range");
    }
  }
  return checked_u64(blocks + v, "pattern code");
}

PartialPattern decode_pattern(uint64_t code, uint32_t s, uint32_t d) {
  if (s == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet size 0");
  if (d == 0) throw Error(ErrorKind::BadArgument, "dimension 0");
  uint64_t r = 0;
  while (true) {
    u128 cells = 1;
    for (uint32_t i = 0; i < d; ++i) cells *= 2 * r + 1;
    if (cells > (u128(1) << 40)) {
      throw Error(ErrorKind::MalformedCode, "code implies an oversized pattern");
    }
    uint64_t block = pow_sat(s, static_cast<uint64_t>(cells));
    if (code < block) break;
    code -= block;
    ++r;
  }
  auto coords = cube_coords(static_cast<int64_t>(r), d);
  std::vector<Letter> letters(coords.size(), 0);
  uint64_t v = code;
  for (size_t i = coords.size(); i > 0; --i) {
    letters[i - 1] = static_cast<Letter>(v % s);
    v /= s;
  }
  std::vector<std::pair<std::vector<int64_t>, Letter>> cells;
  cells.reserve(coords.size());
  for (size_t i = 0; i < coords.size(); ++i) {
    cells.emplace_back(coords[i], letters[i]);
  }
  return PartialPattern(s, d, std::move(cells));
}

NatStream encode_config(ConfigGenerator c, uint32_t s, uint32_t d) {
  return NatStream([c = std::move(c), s, d](uint64_t i) -> uint64_t {
    if (i == 0) return s;
    if (i == 1) return d;
    return c(z_coords(i - 2, d));
  });
}

DecodedConfig decode_stream(const NatStream& w) {
  uint64_t s = w.at(0);
  if (s == 0) throw Error(ErrorKind::ZeroAlphabet, "stream header alphabet 0");
  uint64_t d = w.at(1);
  if (d == 0) throw Error(ErrorKind::MalformedCode, "stream header dimension 0");
  DecodedConfig out;
  out.alphabet = static_cast<uint32_t>(s);
  out.dim = static_cast<uint32_t>(d);
  out.cell = [w, s, d](const std::vector<int64_t>& v) -> Letter {
    if (v.size() != d) {
      throw Error(ErrorKind::SizeMismatch, "coordinate arity != stream dimension");
    }
    return static_cast<Letter>(w.at(z_index(v) + 2) % s);
  };
  return out;
}

NatStream m_join(const NatStream& a, const NatStream& b) {
  return NatStream([a, b](uint64_t i) {
    return (i % 2 == 0) ? a.at(i / 2) : b.at((i - 1) / 2);
  });
}

NatStream m_prepend(uint64_t head, const NatStream& a) {
  return NatStream([head, a](uint64_t i) {
    return (i == 0) ? head : a.at(i - 1);
  });
}

NatStream m_meet(const NatStream& a, const NatStream& b, uint32_t side) {
  if (side > 1) throw Error(ErrorKind::BadArgument, "meet side must be 0 or 1");
  return m_prepend(side, side == 0 ? a : b);
}

NatStream set_enumerator(std::vector<uint64_t> elements) {
  if (elements.empty()) {
    throw Error(ErrorKind::EmptySet, "no canonical enumerator of the empty set");
  }
  return NatStream([elems = std::move(elements)](uint64_t i) {
    return elems[i % elems.size()];
  });
}

NatStream set_enumerator(std::function<uint64_t(uint64_t)> gen) {
  return NatStream(std::move(gen));
}

std::vector<PartialPattern> pattern_completions(const PartialPattern& p,
                                                uint32_t s) {
  if (s == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet size 0");
  uint32_t d = p.dim;
  // minimal radius fitting the support span in every dimension
  int64_t r = 0;
  std::vector<int64_t> lo(d, 0), hi(d, 0);
  if (!p.cells.empty()) {
    lo.assign(d, std::numeric_limits<int64_t>::max());
    hi.assign(d, std::numeric_limits<int64_t>::min());
    for (const auto& [coord, letter] : p.cells) {
      (void)letter;
      for (uint32_t i = 0; i < d; ++i) {
        lo[i] = std::min(lo[i], coord[i]);
        hi[i] = std::max(hi[i], coord[i]);
      }
    }
    for (uint32_t i = 0; i < d; ++i) r = std::max(r, (hi[i] - lo[i] + 1) / 2);
  }
  // placements t with support + t inside [-r;r]^d, lexicographic order
  std::vector<std::vector<int64_t>> placements;
  {
    std::vector<int64_t> tlo(d), thi(d);
    for (uint32_t i = 0; i < d; ++i) {
      tlo[i] = -r - lo[i];
      thi[i] = r - hi[i];
    }
    std::vector<int64_t> t(tlo);
    while (true) {
      placements.push_back(t);
      uint32_t i = d;
      bool done = true;
      while (i > 0) {
        --i;
        if (t[i] < thi[i]) {
          ++t[i];
          for (uint32_t j = i + 1; j < d; ++j) t[j] = tlo[j];
          done = false;
          break;
        }
      }
      if (done) break;
    }
  }
  auto coords = cube_coords(r, d);
  std::vector<PartialPattern> out;
  for (const auto& t : placements) {
    // pin the shifted support; remaining cube cells are free
    std::vector<std::optional<Letter>> pin(coords.size());
    std::map<std::vector<int64_t>, size_t> index;
    for (size_t i = 0; i < coords.size(); ++i) index[coords[i]] = i;
    for (const auto& [coord, letter] : p.cells) {
      std::vector<int64_t> c(coord);
      for (uint32_t i = 0; i < d; ++i) c[i] += t[i];
      pin[index.at(c)] = letter;
    }
    std::vector<size_t> free_cells;
    for (size_t i = 0; i < coords.size(); ++i) {
      if (!pin[i]) free_cells.push_back(i);
    }
    uint64_t combos = pow_sat(s, free_cells.size());
    if (combos > (uint64_t(1) << 20)) {
      throw Error(ErrorKind::BudgetExceeded, "completion family too large");
    }
    // counting in base s over the free cells, most significant first,
    // yields completions with ascending full-pattern value
    for (uint64_t v = 0; v < combos; ++v) {
      std::vector<Letter> letters(coords.size());
      for (size_t i = 0; i < coords.size(); ++i) {
        if (pin[i]) letters[i] = *pin[i];
      }
      uint64_t rest = v;
      for (size_t i = free_cells.size(); i > 0; --i) {
        letters[free_cells[i - 1]] = static_cast<Letter>(rest % s);
        rest /= s;
      }
      std::vector<std::pair<std::vector<int64_t>, Letter>> cells;
      cells.reserve(coords.size());
      for (size_t i = 0; i < coords.size(); ++i) {
        cells.emplace_back(coords[i], letters[i]);
      }
      out.emplace_back(s, d, std::move(cells));
    }
  }
  return out;
}

SubshiftCode spec_to_code(const SubshiftSpec& spec) {
  if (spec.alphabet == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet size 0");
  uint32_t s = spec.alphabet;
  uint32_t d = spec.dim;
  if (spec.is_sft()) {
    uint64_t n = *spec.sft_bound;
    if (n == 0) {
      throw Error(ErrorKind::NoPatterns,
                  "a pattern-free subshift has no stream coding");
    }
    std::vector<uint64_t> codes;
    for (uint64_t i = 0; i < n; ++i) {
      for (const auto& q : pattern_completions(spec.forbidden.at(i), s)) {
        codes.push_back(encode_pattern(q, s));
      }
    }
    return SubshiftCode{NatStream([codes = std::move(codes), s, d](uint64_t i) {
      if (i == 0) return static_cast<uint64_t>(s);
      if (i == 1) return static_cast<uint64_t>(d);
      uint64_t k = i - 2;
      return codes[std::min<uint64_t>(k, codes.size() - 1)];
    })};
  }
  // infinite presentation: dovetail (pattern, completion) pairs
  struct Dovetail {
    PatternStream pats;
    uint32_t s = 0;
    std::vector<std::vector<uint64_t>> lists;
    std::vector<size_t> cursor;
    uint64_t round = 0;
    uint64_t pos = 0;
    std::vector<uint64_t> emitted;
    std::recursive_mutex mu;

    void ensure(uint64_t k) {
      std::lock_guard<std::recursive_mutex> lock(mu);
      while (emitted.size() <= k) {
        if (pos > round) {
          ++round;
          pos = 0;
        }
        if (lists.size() <= pos) {
          lists.resize(pos + 1);
          cursor.resize(pos + 1, 0);
          for (const auto& q : pattern_completions(pats.at(pos), s)) {
            lists[pos].push_back(encode_pattern(q, s));
          }
        }
        if (cursor[pos] < lists[pos].size()) {
          emitted.push_back(lists[pos][cursor[pos]++]);
        }
        ++pos;
      }
    }
  };
  auto dv = std::make_shared<Dovetail>();
  dv->pats = spec.forbidden;
  dv->s = s;
  return SubshiftCode{NatStream([dv, s, d](uint64_t i) -> uint64_t {
    if (i == 0) return s;
    if (i == 1) return d;
    dv->ensure(i - 2);
    std::lock_guard<std::recursive_mutex> lock(dv->mu);
    return dv->emitted[i - 2];
  })};
}

SubshiftCode fullshift_code(uint32_t alphabet, uint32_t dim) {
  if (alphabet == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet size 0");
  if (dim == 0) throw Error(ErrorKind::BadArgument, "dimension 0");
  return SubshiftCode{NatStream([alphabet, dim](uint64_t i) -> uint64_t {
    if (i == 0) return alphabet;
    if (i == 1) return dim;
    throw Error(ErrorKind::NoPatterns, "the full shift forbids nothing");
  })};
}

SubshiftSpec code_to_spec(const SubshiftCode& w) {
  uint32_t s = w.alphabet();
  if (s == 0) throw Error(ErrorKind::ZeroAlphabet, "code header alphabet 0");
  uint32_t d = w.dim();
  if (d == 0) throw Error(ErrorKind::MalformedCode, "code header dimension 0");
  SubshiftSpec out;
  out.alphabet = s;
  out.dim = d;
  out.forbidden = PatternStream([w, s, d](uint64_t i) {
    return decode_pattern(w.pattern_code(i), s, d);
  });
  out.sft_bound = std::nullopt;  // stream totality hides finiteness
  return out;
}

}  // namespace sshift
