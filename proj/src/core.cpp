#include "sshift/core.hpp"

#include <algorithm>
#include <cmath>

namespace sshift {

Word Word::from_digits(uint32_t alpha, const std::string& digits) {
  if (alpha == 0 || alpha > 10)
    throw Error(ErrorKind::BadArgument, "digit words need alphabet in 1..10");
  std::vector<Letter> ls;
  ls.reserve(digits.size());
  for (char c : digits) {
    if (c < '0' || c > '9' || uint32_t(c - '0') >= alpha)
      throw Error(ErrorKind::BadArgument, std::string("bad digit '") + c + "' for alphabet");
    ls.push_back(Letter(c - '0'));
  }
  return Word(alpha, std::move(ls));
}

std::string Word::to_string() const {
  std::string out;
  if (alphabet <= 10) {
    for (Letter a : letters) out += char('0' + a);
  } else {
    for (size_t i = 0; i < letters.size(); ++i) {
      if (i) out += '.';
      out += std::to_string(letters[i]);
    }
  }
  return out;
}

PartialPattern::PartialPattern(uint32_t alpha, uint32_t d,
                               std::vector<std::pair<std::vector<int64_t>, Letter>> cs)
    : alphabet(alpha), dim(d), cells(std::move(cs)) {
  std::sort(cells.begin(), cells.end());
  for (size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].first.size() != dim)
      throw Error(ErrorKind::BadArgument, "pattern cell coordinate of wrong dimension");
    if (cells[i].second >= alphabet)
      throw Error(ErrorKind::BadArgument, "pattern letter outside alphabet");
    if (i && cells[i].first == cells[i - 1].first)
      throw Error(ErrorKind::BadArgument, "pattern pins the same cell twice");
  }
}

PartialPattern PartialPattern::from_word(const Word& w) {
  std::vector<std::pair<std::vector<int64_t>, Letter>> cs;
  cs.reserve(w.size());
  for (size_t i = 0; i < w.size(); ++i)
    cs.push_back({{int64_t(i)}, w[i]});
  return PartialPattern(w.alphabet, 1, std::move(cs));
}

int64_t PartialPattern::min_coord() const {
  if (dim != 1 || cells.empty())
    throw Error(ErrorKind::BadArgument, "support bounds need a nonempty 1-D pattern");
  return cells.front().first[0];
}

int64_t PartialPattern::max_coord() const {
  if (dim != 1 || cells.empty())
    throw Error(ErrorKind::BadArgument, "support bounds need a nonempty 1-D pattern");
  return cells.back().first[0];
}

bool matches(const Word& w, const PartialPattern& p, int64_t t) {
  if (p.dim != 1) throw Error(ErrorKind::BadArgument, "word matching needs a 1-D pattern");
  for (const auto& [coord, a] : p.cells) {
    int64_t idx = t + coord[0];
    if (idx < 0 || idx >= int64_t(w.size()))
      throw Error(ErrorKind::OutOfWindow, "pattern cell lands outside the word");
    if (w.letters[size_t(idx)] != a) return false;
  }
  return true;
}

bool occurs_in(const Word& w, const PartialPattern& p) {
  if (p.dim != 1) throw Error(ErrorKind::BadArgument, "word matching needs a 1-D pattern");
  if (p.cells.empty()) return true;
  int64_t lo = -p.min_coord();
  int64_t hi = int64_t(w.size()) - 1 - p.max_coord();
  for (int64_t t = lo; t <= hi; ++t) {
    bool all = true;
    for (const auto& [coord, a] : p.cells) {
      if (w.letters[size_t(t + coord[0])] != a) { all = false; break; }
    }
    if (all) return true;
  }
  return false;
}

PatternStream::PatternStream(std::function<PartialPattern(uint64_t)> gen)
    : state_(std::make_shared<State>()) {
  state_->gen = std::move(gen);
}

PatternStream PatternStream::from_list(std::vector<PartialPattern> pats) {
  auto shared = std::make_shared<std::vector<PartialPattern>>(std::move(pats));
  return PatternStream([shared](uint64_t i) {
    if (i >= shared->size())
      throw Error(ErrorKind::BadArgument, "pattern index beyond end of finite stream");
    return (*shared)[i];
  });
}

PartialPattern PatternStream::at(uint64_t index) const {
  if (!state_) throw Error(ErrorKind::BadArgument, "empty pattern stream");
  std::lock_guard<std::recursive_mutex> lock(state_->mu);
  auto it = state_->memo.find(index);
  if (it != state_->memo.end()) return it->second;
  PartialPattern p = state_->gen(index);
  state_->memo.emplace(index, p);
  return p;
}

namespace {

// Patterns actually consulted for a local admissibility question.
std::vector<PartialPattern> prefix_patterns(const SubshiftSpec& spec, uint64_t depth) {
  if (spec.sft_bound) depth = std::min(depth, *spec.sft_bound);
  std::vector<PartialPattern> pats;
  pats.reserve(size_t(depth));
  for (uint64_t i = 0; i < depth; ++i) pats.push_back(spec.forbidden.at(i));
  return pats;
}

}  // namespace

std::set<Word> admissible_words(const SubshiftSpec& spec, uint32_t len, uint64_t depth,
                                uint64_t node_cap) {
  if (spec.alphabet == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet must be nonempty");
  if (spec.dim != 1) throw Error(ErrorKind::BadArgument, "word enumeration is 1-D only");
  auto pats = prefix_patterns(spec, depth);
  for (const auto& p : pats)
    if (p.empty()) return {};  // the empty pattern occurs everywhere

  std::set<Word> out;
  std::vector<Letter> prefix;
  uint64_t nodes = 0;

  // New placements are exactly those whose rightmost pinned cell is the
  // letter just appended, so each step checks each pattern once.
  auto new_placement_hit = [&](const std::vector<Letter>& w) {
    int64_t last = int64_t(w.size()) - 1;
    for (const auto& p : pats) {
      int64_t t = last - p.max_coord();
      if (t + p.min_coord() < 0) continue;
      bool all = true;
      for (const auto& [coord, a] : p.cells)
        if (w[size_t(t + coord[0])] != a) { all = false; break; }
      if (all) return true;
    }
    return false;
  };

  std::function<void()> dfs = [&]() {
    if (++nodes > node_cap)
      throw Error(ErrorKind::BudgetExceeded, "admissible word search exceeded node cap");
    if (prefix.size() == len) {
      out.insert(Word(spec.alphabet, prefix));
      return;
    }
    for (Letter a = 0; a < spec.alphabet; ++a) {
      prefix.push_back(a);
      if (!new_placement_hit(prefix)) dfs();
      prefix.pop_back();
    }
  };
  dfs();
  return out;
}

bool admissible_word_exists(const SubshiftSpec& spec, uint32_t len, uint64_t depth,
                            uint64_t node_cap) {
  if (spec.alphabet == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet must be nonempty");
  if (spec.dim != 1) throw Error(ErrorKind::BadArgument, "word enumeration is 1-D only");
  auto pats = prefix_patterns(spec, depth);
  for (const auto& p : pats)
    if (p.empty()) return false;

  std::vector<Letter> prefix;
  uint64_t nodes = 0;

  auto new_placement_hit = [&](const std::vector<Letter>& w) {
    int64_t last = int64_t(w.size()) - 1;
    for (const auto& p : pats) {
      int64_t t = last - p.max_coord();
      if (t + p.min_coord() < 0) continue;
      bool all = true;
      for (const auto& [coord, a] : p.cells)
        if (w[size_t(t + coord[0])] != a) { all = false; break; }
      if (all) return true;
    }
    return false;
  };

  std::function<bool()> dfs = [&]() -> bool {
    if (++nodes > node_cap)
      throw Error(ErrorKind::BudgetExceeded, "admissible word search exceeded node cap");
    if (prefix.size() == len) return true;
    for (Letter a = 0; a < spec.alphabet; ++a) {
      prefix.push_back(a);
      bool ok = !new_placement_hit(prefix) && dfs();
      prefix.pop_back();
      if (ok) return true;
    }
    return false;
  };
  return dfs();
}

bool locally_admissible(const Word& w, const SubshiftSpec& spec, uint64_t depth) {
  for (const auto& p : prefix_patterns(spec, depth))
    if (occurs_in(w, p)) return false;
  return true;
}

std::set<Word> sft_language(const SubshiftSpec& spec, uint32_t len) {
  if (!spec.is_sft())
    throw Error(ErrorKind::BadArgument, "exact language needs a finite pattern list");
  if (spec.dim != 1) throw Error(ErrorKind::BadArgument, "exact language is 1-D only");
  if (spec.alphabet == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet must be nonempty");
  const uint64_t cap = uint64_t(1) << 24;

  auto pats = prefix_patterns(spec, *spec.sft_bound);
  int64_t span = 1;
  for (const auto& p : pats)
    if (!p.empty()) span = std::max(span, p.span());
  for (const auto& p : pats)
    if (p.empty()) return {};

  uint32_t lam = uint32_t(span);
  std::vector<Word> verts;
  for (const Word& w : admissible_words(spec, lam, pats.size(), cap)) verts.push_back(w);

  // Overlap edges, validated on the glued (lam+1)-window.
  auto joins = [&](const Word& u, const Word& v) {
    for (uint32_t i = 0; i + 1 < lam; ++i)
      if (u[i + 1] != v[i]) return false;
    Word glued = u;
    glued.letters.push_back(v.letters.back());
    return locally_admissible(glued, spec, pats.size());
  };

  size_t n = verts.size();
  std::vector<std::vector<size_t>> succ(n), pred(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (joins(verts[i], verts[j])) {
        succ[i].push_back(j);
        pred[j].push_back(i);
      }

  // A vertex survives iff it lies on a bi-infinite walk; trimming dead ends
  // to a fixpoint leaves exactly those.
  std::vector<bool> dead(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < n; ++i) {
      if (dead[i]) continue;
      auto alive = [&](const std::vector<size_t>& nb) {
        return std::any_of(nb.begin(), nb.end(), [&](size_t j) { return !dead[j]; });
      };
      if (!alive(succ[i]) || !alive(pred[i])) {
        dead[i] = true;
        changed = true;
      }
    }
  }

  std::vector<size_t> live;
  for (size_t i = 0; i < n; ++i)
    if (!dead[i]) live.push_back(i);

  std::set<Word> out;
  if (live.empty()) return out;
  if (len == 0) {
    out.insert(Word(spec.alphabet, {}));
    return out;
  }

  if (len < lam) {
    for (size_t i : live)
      for (uint32_t off = 0; off + len <= lam; ++off) {
        std::vector<Letter> fac(verts[i].letters.begin() + off,
                                verts[i].letters.begin() + off + len);
        out.insert(Word(spec.alphabet, std::move(fac)));
      }
    return out;
  }

  uint64_t nodes = 0;
  std::vector<Letter> path;
  std::function<void(size_t, uint32_t)> walk = [&](size_t v, uint32_t remaining) {
    if (++nodes > cap)
      throw Error(ErrorKind::BudgetExceeded, "language path enumeration exceeded cap");
    if (remaining == 0) {
      out.insert(Word(spec.alphabet, path));
      return;
    }
    for (size_t w : succ[v]) {
      if (dead[w]) continue;
      path.push_back(verts[w].letters.back());
      walk(w, remaining - 1);
      path.pop_back();
    }
  };
  for (size_t i : live) {
    path = verts[i].letters;
    walk(i, len - lam);
  }
  return out;
}

BlockCode BlockCode::from_table(uint32_t in_alpha, uint32_t out_alpha, uint32_t r,
                                std::vector<Letter> table) {
  uint64_t want = 1;
  for (uint32_t i = 0; i < 2 * r + 1; ++i) {
    want *= in_alpha;
    if (want > (uint64_t(1) << 32))
      throw Error(ErrorKind::BadArgument, "rule table too large");
  }
  if (table.size() != want)
    throw Error(ErrorKind::SizeMismatch, "rule table size must be alphabet^(window length)");
  for (Letter a : table)
    if (a >= out_alpha) throw Error(ErrorKind::BadArgument, "rule table letter outside alphabet");
  auto shared = std::make_shared<std::vector<Letter>>(std::move(table));
  BlockCode code;
  code.in_alphabet = in_alpha;
  code.out_alphabet = out_alpha;
  code.radius = r;
  code.rule = [in_alpha, shared](const std::vector<Letter>& win) {
    uint64_t idx = 0;
    for (Letter a : win) idx = idx * in_alpha + a;  // leftmost letter most significant
    return (*shared)[size_t(idx)];
  };
  return code;
}

Word apply_block_code(const BlockCode& code, const Word& w) {
  if (w.alphabet != code.in_alphabet)
    throw Error(ErrorKind::SizeMismatch, "input word alphabet differs from code input alphabet");
  Word out(code.out_alphabet, {});
  uint32_t width = 2 * code.radius + 1;
  if (w.size() < width)
    throw Error(ErrorKind::WindowTooSmall, "word shorter than the sliding window");
  std::vector<Letter> win(width);
  for (size_t i = 0; i + width <= w.size(); ++i) {
    std::copy(w.letters.begin() + i, w.letters.begin() + i + width, win.begin());
    Letter a = code.rule(win);
    if (a >= code.out_alphabet)
      throw Error(ErrorKind::BadArgument, "block rule produced letter outside alphabet");
    out.letters.push_back(a);
  }
  return out;
}

Word subsample(const Word& w, uint64_t stride, uint64_t phase) {
  if (stride == 0) throw Error(ErrorKind::BadArgument, "subsample stride must be positive");
  Word out(w.alphabet, {});
  for (uint64_t i = phase; i < w.size(); i += stride) out.letters.push_back(w.letters[size_t(i)]);
  return out;
}

Letter Grid2D::at(int64_t x, int64_t y) const {
  if (!contains(x, y)) throw Error(ErrorKind::OutOfWindow, "grid cell outside window");
  return data[size_t((y - y0) * width + (x - x0))];
}

void Grid2D::set(int64_t x, int64_t y, Letter a) {
  if (!contains(x, y)) throw Error(ErrorKind::OutOfWindow, "grid cell outside window");
  data[size_t((y - y0) * width + (x - x0))] = a;
}

bool Grid2D::contains(int64_t x, int64_t y) const {
  return x >= x0 && x < x0 + width && y >= y0 && y < y0 + height;
}

bool matches(const Grid2D& g, const PartialPattern& p, int64_t tx, int64_t ty) {
  if (p.dim != 2) throw Error(ErrorKind::BadArgument, "grid matching needs a 2-D pattern");
  for (const auto& [coord, a] : p.cells) {
    int64_t x = tx + coord[0], y = ty + coord[1];
    if (!g.contains(x, y)) throw Error(ErrorKind::OutOfWindow, "pattern cell lands outside grid");
    if (g.at(x, y) != a) return false;
  }
  return true;
}

bool occurs_in(const Grid2D& g, const PartialPattern& p) {
  if (p.dim != 2) throw Error(ErrorKind::BadArgument, "grid matching needs a 2-D pattern");
  if (p.cells.empty()) return true;
  int64_t xmin = p.cells[0].first[0], xmax = xmin, ymin = p.cells[0].first[1], ymax = ymin;
  for (const auto& [coord, a] : p.cells) {
    (void)a;
    xmin = std::min(xmin, coord[0]);
    xmax = std::max(xmax, coord[0]);
    ymin = std::min(ymin, coord[1]);
    ymax = std::max(ymax, coord[1]);
  }
  for (int64_t ty = g.y0 - ymin; ty + ymax < g.y0 + g.height; ++ty)
    for (int64_t tx = g.x0 - xmin; tx + xmax < g.x0 + g.width; ++tx) {
      bool all = true;
      for (const auto& [coord, a] : p.cells)
        if (g.at(tx + coord[0], ty + coord[1]) != a) { all = false; break; }
      if (all) return true;
    }
  return false;
}

SubshiftSpec builtin_spec(const std::string& name) {
  auto forbid_words = [](uint32_t alpha, std::vector<std::string> words) {
    std::vector<PartialPattern> pats;
    for (const auto& s : words) pats.push_back(PartialPattern::from_word(Word::from_digits(alpha, s)));
    SubshiftSpec spec;
    spec.alphabet = alpha;
    spec.dim = 1;
    spec.sft_bound = pats.size();
    spec.forbidden = PatternStream::from_list(std::move(pats));
    return spec;
  };
  if (name == "golden_mean") return forbid_words(2, {"11"});
  if (name == "no00no11") return forbid_words(2, {"00", "11"});
  if (name.rfind("fullshift:", 0) == 0) {
    uint64_t s = 0;
    try {
      s = std::stoull(name.substr(10));
    } catch (const std::exception&) {
      throw Error(ErrorKind::BadArgument, "fullshift wants a numeric alphabet size");
    }
    if (s == 0 || s > (uint64_t(1) << 31))
      throw Error(ErrorKind::BadArgument, "fullshift alphabet size out of range");
    SubshiftSpec spec;
    spec.alphabet = uint32_t(s);
    spec.dim = 1;
    spec.sft_bound = 0;
    spec.forbidden = PatternStream::from_list({});
    return spec;
  }
  throw Error(ErrorKind::BadArgument, "unknown builtin '" + name + "'");
}

}  // namespace sshift
