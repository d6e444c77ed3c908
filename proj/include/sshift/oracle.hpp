#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sshift/codec.hpp"
#include "sshift/core.hpp"
#include "sshift/errors.hpp"

namespace sshift {

// One step of a resumable oracle computation: either ask for stream index
// `value` or halt with output `value`.
struct StepResult {
  bool query = false;
  uint64_t value = 0;

  static StepResult ask(uint64_t index) { return {true, index}; }
  static StepResult halt(uint64_t out) { return {false, out}; }
};

// A deterministic machine with oracle access. The continuation contract:
// step(input, answers) inspects only its arguments, so replaying a prefix
// of answers reproduces the query sequence exactly.
class OracleMachine {
public:
  virtual ~OracleMachine() = default;

  virtual std::string name() const = 0;

  virtual StepResult step(uint64_t input,
                          const std::vector<uint64_t>& answers) const = 0;

  // Exact query-index list for this input when it does not depend on the
  // answers; nullopt when the machine cannot promise that.
  virtual std::optional<std::vector<uint64_t>> footprint(uint64_t) const {
    return std::nullopt;
  }
};

using MachinePtr = std::shared_ptr<const OracleMachine>;

// Drive a machine against a stream until it halts. Each step (query or
// halt) costs one unit of budget; running out raises BudgetExhausted.
uint64_t run_operator(const OracleMachine& m, const NatStream& oracle,
                      uint64_t input, uint64_t step_budget = uint64_t(1) << 20);

// Query(n) then Halt(answer): the identity on streams.
MachinePtr identity_machine();

// Halt(n) with no queries at all.
MachinePtr header_machine();

// masstrad . (subsample stride . sliding block code) . massdetrad:
// input 0 halts with the output alphabet, input 1 with the dimension (1),
// input j+2 reads the (2r+1)-window of input cells around stride*z_coord(j)
// and halts with the rule value. Cell answers are reduced mod the input
// alphabet before entering the rule.
MachinePtr block_subsample_operator(BlockCode code, uint64_t stride);

// f after g: queries of f are served by replaying g against the shared
// oracle. Footprints concatenate when both sides report them.
MachinePtr compose(MachinePtr f, MachinePtr g);

// Named, densely indexed family of machines.
class OperatorRegistry {
public:
  uint64_t add(std::string name, MachinePtr m);
  uint64_t size() const { return entries_.size(); }
  const std::string& name_at(uint64_t index) const;
  MachinePtr at(uint64_t index) const;
  MachinePtr by_name(const std::string& name) const;

private:
  std::vector<std::pair<std::string, MachinePtr>> entries_;
};

struct ModulusCaps {
  uint64_t max_i = 64;
  uint64_t node_cap = uint64_t(1) << 22;   // admissible-word search budget
  uint64_t step_budget = uint64_t(1) << 20;  // per machine run
};

struct ModulusResult {
  uint64_t level = 0;        // the computed modulus
  bool vacuous = false;      // no admissible word existed at this level
  uint64_t words_tested = 0; // 0 when the footprint shortcut decided
  int64_t max_queried = 0;   // largest |cell| the machine asked for
};

// Smallest i such that every word of length 2i+1 avoiding the first i
// forbidden patterns keeps all cell queries of inputs 0..r inside [-i;i].
// Header queries (stream indices 0 and 1) are answered from the spec and
// never count as cell queries. Levels with no admissible word at all
// satisfy the condition vacuously and are reported as such. CapExceeded
// when i would pass caps.max_i.
ModulusResult modulus_of_continuity(const OracleMachine& m, uint64_t r,
                                    const SubshiftSpec& spec,
                                    const ModulusCaps& caps = {});

}  // namespace sshift
