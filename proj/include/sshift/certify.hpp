#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sshift/core.hpp"
#include "sshift/oracle.hpp"
#include "sshift/universal.hpp"

namespace sshift {

// One certified simulation: registry operator `op` maps the probed
// subshift into target `target`, checked on every depth-`depth` window
// at output precision `precision`.
struct ClaimRecord {
  uint64_t target = 0;
  uint64_t op = 0;
  uint64_t precision = 0;
  uint64_t depth = 0;

  auto operator<=>(const ClaimRecord&) const = default;
};

// Precision bound per target: the largest extent (cells across, max over
// axes) of its forbidden patterns, never below 1. Targets must carry
// sft_bound (NotSFT otherwise); a bound of 0 (nothing forbidden) gives 1.
std::vector<std::pair<uint64_t, uint64_t>> build_B(
    const std::vector<SubshiftSpec>& targets);

struct CertifyBudgets {
  uint64_t max_sum = 64;                     // horizon on target+op+b+depth
  uint64_t step_budget = uint64_t(1) << 20;  // per operator run
  uint64_t node_cap = uint64_t(1) << 22;     // word-search budget
  uint64_t retry_rounds = 2;                 // parked-tuple retries, budgets double
};

// The subshift being probed. With `bundle` set, window sweeps walk the
// bundle's structured configurations (alignment classes of the skeleton
// with free coding bits on every constrained layer) instead of literal
// words over the full alphabet, which stop being enumerable long before
// the depths the claims need.
struct CertifiableX {
  SubshiftSpec spec;
  const UniversalBundle* bundle = nullptr;
};

// Dovetail over candidate tuples (target i, operator n, precision b_i,
// window depth j) by increasing i+n+b+j with lexicographic tie-break,
// j always past the operator's continuity level at radius r_b. A tuple
// claims when every admissible window's decoded [-b;b] output stays inside
// the target's alphabet and avoids its first min(b, sft_bound) forbidden
// patterns. Claims are deduplicated by target; order follows the
// sequential schedule above. Tuples that outrun a budget are parked and
// retried after the sweep with doubled budgets.
std::vector<ClaimRecord> enumerate_simulated(
    const CertifiableX& X, const OperatorRegistry& registry,
    const std::vector<SubshiftSpec>& targets,
    const std::vector<std::pair<uint64_t, uint64_t>>& B,
    const CertifyBudgets& budgets = {});

// Re-run the single inner check behind one claim, from scratch. False when
// the recorded depth does not clear the operator's continuity level, or
// the sweep finds a dirty or too-narrow window.
bool verify_claim(const ClaimRecord& claim, const CertifiableX& X,
                  const OperatorRegistry& registry,
                  const std::vector<SubshiftSpec>& targets,
                  const CertifyBudgets& budgets = {});

}  // namespace sshift
