#include "sshift/oracle.hpp"

#include <algorithm>

namespace sshift {

namespace {

// Inner replay bound for composed machines; a diverging inner machine
// would otherwise spin inside a single outer step.
constexpr uint64_t kInnerSteps = uint64_t(1) << 20;

class IdentityMachine final : public OracleMachine {
public:
  std::string name() const override { return "identity"; }

  StepResult step(uint64_t input,
                  const std::vector<uint64_t>& answers) const override {
    if (answers.empty()) return StepResult::ask(input);
    return StepResult::halt(answers[0]);
  }

  std::optional<std::vector<uint64_t>> footprint(uint64_t input) const override {
    return std::vector<uint64_t>{input};
  }
};

class HeaderMachine final : public OracleMachine {
public:
  std::string name() const override { return "header"; }

  StepResult step(uint64_t input, const std::vector<uint64_t>&) const override {
    return StepResult::halt(input);
  }

  std::optional<std::vector<uint64_t>> footprint(uint64_t) const override {
    return std::vector<uint64_t>{};
  }
};

class BlockSubsampleMachine final : public OracleMachine {
public:
  BlockSubsampleMachine(BlockCode code, uint64_t stride)
      : code_(std::move(code)), stride_(stride) {}

  std::string name() const override {
    return "block_subsample(r=" + std::to_string(code_.radius) +
           ",m=" + std::to_string(stride_) + ")";
  }

  StepResult step(uint64_t input,
                  const std::vector<uint64_t>& answers) const override {
    if (input == 0) return StepResult::halt(code_.out_alphabet);
    if (input == 1) return StepResult::halt(1);
    uint64_t width = 2 * uint64_t(code_.radius) + 1;
    if (answers.size() < width) {
      int64_t center = static_cast<int64_t>(stride_) * z_coord_1d(input - 2);
      int64_t t = -int64_t(code_.radius) + int64_t(answers.size());
      return StepResult::ask(z_index_1d(center + t) + 2);
    }
    std::vector<Letter> window(width);
    for (uint64_t i = 0; i < width; ++i) {
      window[i] = static_cast<Letter>(answers[i] % code_.in_alphabet);
    }
    return StepResult::halt(code_.rule(window));
  }

  std::optional<std::vector<uint64_t>> footprint(uint64_t input) const override {
    if (input <= 1) return std::vector<uint64_t>{};
    std::vector<uint64_t> out;
    int64_t center = static_cast<int64_t>(stride_) * z_coord_1d(input - 2);
    for (int64_t t = -int64_t(code_.radius); t <= int64_t(code_.radius); ++t) {
      out.push_back(z_index_1d(center + t) + 2);
    }
    return out;
  }

private:
  BlockCode code_;
  uint64_t stride_;
};

class ComposedMachine final : public OracleMachine {
public:
  ComposedMachine(MachinePtr f, MachinePtr g)
      : f_(std::move(f)), g_(std::move(g)) {}

  std::string name() const override {
    return f_->name() + " . " + g_->name();
  }

  // Replay: rebuild the whole nested computation from the answer prefix;
  // the first unanswered inner query becomes this machine's next query.
  StepResult step(uint64_t input,
                  const std::vector<uint64_t>& answers) const override {
    size_t consumed = 0;
    std::vector<uint64_t> f_answers;
    for (uint64_t outer = 0; outer < kInnerSteps; ++outer) {
      StepResult fr = f_->step(input, f_answers);
      if (!fr.query) return fr;
      std::vector<uint64_t> g_answers;
      for (uint64_t inner = 0;; ++inner) {
        if (inner >= kInnerSteps) {
          throw Error(ErrorKind::BudgetExhausted, "inner machine did not halt");
        }
        StepResult gr = g_->step(fr.value, g_answers);
        if (!gr.query) {
          f_answers.push_back(gr.value);
          break;
        }
        if (consumed < answers.size()) {
          g_answers.push_back(answers[consumed++]);
        } else {
          return gr;  // surfaces g's query verbatim
        }
      }
    }
    throw Error(ErrorKind::BudgetExhausted, "outer machine did not halt");
  }

  std::optional<std::vector<uint64_t>> footprint(uint64_t input) const override {
    auto fq = f_->footprint(input);
    if (!fq) return std::nullopt;
    std::vector<uint64_t> out;
    for (uint64_t q : *fq) {
      auto gq = g_->footprint(q);
      if (!gq) return std::nullopt;
      out.insert(out.end(), gq->begin(), gq->end());
    }
    return out;
  }

private:
  MachinePtr f_;
  MachinePtr g_;
};

}  // namespace

uint64_t run_operator(const OracleMachine& m, const NatStream& oracle,
                      uint64_t input, uint64_t step_budget) {
  if (step_budget == 0) {
    throw Error(ErrorKind::BadArgument, "step budget must be positive");
  }
  std::vector<uint64_t> answers;
  for (uint64_t s = 0; s < step_budget; ++s) {
    StepResult r = m.step(input, answers);
    if (!r.query) return r.value;
    answers.push_back(oracle.at(r.value));
  }
  throw Error(ErrorKind::BudgetExhausted,
              "operator did not halt within its step budget");
}

MachinePtr identity_machine() { return std::make_shared<IdentityMachine>(); }

MachinePtr header_machine() { return std::make_shared<HeaderMachine>(); }

MachinePtr block_subsample_operator(BlockCode code, uint64_t stride) {
  if (stride == 0) throw Error(ErrorKind::BadArgument, "stride must be positive");
  if (code.in_alphabet == 0 || code.out_alphabet == 0) {
    throw Error(ErrorKind::ZeroAlphabet, "block code alphabets must be nonempty");
  }
  return std::make_shared<BlockSubsampleMachine>(std::move(code), stride);
}

MachinePtr compose(MachinePtr f, MachinePtr g) {
  if (!f || !g) throw Error(ErrorKind::BadArgument, "compose needs two machines");
  return std::make_shared<ComposedMachine>(std::move(f), std::move(g));
}

uint64_t OperatorRegistry::add(std::string name, MachinePtr m) {
  if (!m) throw Error(ErrorKind::BadArgument, "registry entry must be a machine");
  entries_.emplace_back(std::move(name), std::move(m));
  return entries_.size() - 1;
}

const std::string& OperatorRegistry::name_at(uint64_t index) const {
  if (index >= entries_.size()) {
    throw Error(ErrorKind::BadArgument, "registry index out of range");
  }
  return entries_[index].first;
}

MachinePtr OperatorRegistry::at(uint64_t index) const {
  if (index >= entries_.size()) {
    throw Error(ErrorKind::BadArgument, "registry index out of range");
  }
  return entries_[index].second;
}

MachinePtr OperatorRegistry::by_name(const std::string& name) const {
  for (const auto& [n, m] : entries_) {
    if (n == name) return m;
  }
  throw Error(ErrorKind::BadArgument, "no registry entry named " + name);
}

namespace {

// Cell queries of one literal machine run against a centered word. Returns
// false as soon as a query leaves [-i;i]; out_cell tracks the farthest ask.
bool run_within(const OracleMachine& m, uint64_t input, const SubshiftSpec& spec,
                const Word& w, int64_t i, uint64_t step_budget,
                int64_t& max_cell) {
  std::vector<uint64_t> answers;
  for (uint64_t s = 0; s < step_budget; ++s) {
    StepResult r = m.step(input, answers);
    if (!r.query) return true;
    uint64_t idx = r.value;
    if (idx == 0) {
      answers.push_back(spec.alphabet);
      continue;
    }
    if (idx == 1) {
      answers.push_back(spec.dim);
      continue;
    }
    int64_t cell = z_coord_1d(idx - 2);
    max_cell = std::max(max_cell, std::abs(cell));
    if (std::abs(cell) > i) return false;
    answers.push_back(w[size_t(cell + i)]);
  }
  throw Error(ErrorKind::BudgetExhausted,
              "operator did not halt during modulus simulation");
}

}  // namespace

ModulusResult modulus_of_continuity(const OracleMachine& m, uint64_t r,
                                    const SubshiftSpec& spec,
                                    const ModulusCaps& caps) {
  if (spec.alphabet == 0) throw Error(ErrorKind::ZeroAlphabet, "alphabet must be nonempty");

  // Does the machine promise an answer-independent footprint on all of
  // 0..r? Then the level check reduces to the footprint's cell extent.
  std::optional<int64_t> footprint_extent;
  {
    bool have = true;
    int64_t extent = 0;
    for (uint64_t n = 0; n <= r && have; ++n) {
      auto fp = m.footprint(n);
      if (!fp) {
        have = false;
        break;
      }
      for (uint64_t idx : *fp) {
        if (idx <= 1) continue;  // header asks are always answerable
        auto coords = z_coords(idx - 2, spec.dim);
        for (int64_t c : coords) extent = std::max(extent, std::abs(c));
      }
    }
    if (have) footprint_extent = extent;
  }

  for (uint64_t i = 0; i <= caps.max_i; ++i) {
    uint32_t len = static_cast<uint32_t>(2 * i + 1);
    if (!admissible_word_exists(spec, len, i, caps.node_cap)) {
      return ModulusResult{i, true, 0, 0};
    }
    if (footprint_extent) {
      if (*footprint_extent <= int64_t(i)) {
        return ModulusResult{i, false, 0, *footprint_extent};
      }
      continue;
    }
    if (spec.dim != 1) {
      throw Error(ErrorKind::BadArgument,
                  "literal modulus enumeration is 1-D only");
    }
    auto words = admissible_words(spec, len, i, caps.node_cap);
    bool all_inside = true;
    int64_t max_cell = 0;
    uint64_t tested = 0;
    for (const auto& w : words) {
      ++tested;
      for (uint64_t n = 0; n <= r && all_inside; ++n) {
        all_inside = run_within(m, n, spec, w, int64_t(i), caps.step_budget,
                                max_cell);
      }
      if (!all_inside) break;
    }
    if (all_inside) {
      return ModulusResult{i, false, tested, max_cell};
    }
  }
  throw Error(ErrorKind::CapExceeded, "modulus level search passed max_i");
}

}  // namespace sshift
