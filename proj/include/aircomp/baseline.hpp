#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aircomp/channel.hpp"
#include "aircomp/dfa.hpp"
#include "aircomp/functions.hpp"
#include "aircomp/rng.hpp"

namespace aircomp {

/// Slots per user: ⌊M/K⌋ each, one extra for the first M mod K users.
/// Empty when M < K (no schedule exists).
std::vector<std::size_t> tdma_slot_counts(std::size_t K, std::size_t M);

struct TdmaTrace {
  bool infeasible = false;
  std::vector<double> inner_estimates;  // f̂_k before clamping
  double estimate = 0.0;
};

/// TDMA baseline: user k sends √a_k·U in its own contiguous block of slots,
/// the receiver inverts each user's block energy separately and returns
/// F(Σ_k f̂_k). Signs are drawn one per slot for the active user only.
TdmaTrace run_tdma_trace(const FmonFunction& f, const CorrelationModel& model,
                         std::span<const double> s, const DfaConfig& cfg, Rng& sign_rng,
                         Rng& channel_rng);

/// Estimate, or nullopt when M < K.
std::optional<double> run_tdma(const FmonFunction& f, const CorrelationModel& model,
                               std::span<const double> s, const DfaConfig& cfg, Rng& rng);

/// Absolute error charged to an infeasible TDMA run: the full output range of f.
double tdma_infeasible_error(const FmonFunction& f);

}  // namespace aircomp
