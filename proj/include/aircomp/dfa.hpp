#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "aircomp/channel.hpp"
#include "aircomp/functions.hpp"
#include "aircomp/linalg.hpp"
#include "aircomp/rng.hpp"

namespace aircomp {

struct DfaConfig {
  double P = 1.0;        // peak power, |x_k(m)|² ≤ P
  double sigma_f = 1.0;  // per-real-component fading std assumed by the decoder
  bool clamp = true;     // clip the decoded inner sum to [Σφ_min, Σφ_max]

  void validate() const;
};

/// Transmit amplitudes a_k and signs U_k(m) ∈ {-1, +1}; X_k(m) = √a_k U_k(m).
class Codeword {
 public:
  Codeword(std::vector<double> amplitudes, std::size_t uses, std::vector<double> signs);

  std::size_t users() const noexcept { return amplitudes_.size(); }
  std::size_t uses() const noexcept { return uses_; }
  std::span<const double> amplitudes() const noexcept { return amplitudes_; }
  double sign(std::size_t k, std::size_t m) const { return signs_[m * users() + k]; }

  /// K × M matrix of transmit symbols.
  Matrix transmit_matrix() const;

 private:
  std::vector<double> amplitudes_;
  std::size_t uses_;
  std::vector<double> signs_;  // use-major: signs_[m·K + k]
};

/// a_k = P/Δ(f)·(f_k(s_k) - φ_min,k); all zero when Δ(f) = 0.
std::vector<double> encode_amplitudes(const FmonFunction& f, std::span<const double> s, double P);

/// Signs are drawn use by use, user by user, from `rng`.
Codeword encode(const FmonFunction& f, std::span<const double> s, const DfaConfig& cfg,
                std::size_t M, Rng& rng);

/// Affine energy-to-value map shared by DFA and TDMA receivers:
/// spread/(2σ_F²·uses·P)·excess_energy + offset.
double energy_to_value(double spread, double sigma_f, std::size_t uses, double P,
                       double excess_energy, double offset);

/// Estimated inner sum Σ f_k(s_k) from the received energy (clamped when cfg.clamp).
double decode_sum(const FmonFunction& f, double received_energy, double expected_noise_energy,
                  std::size_t M, const DfaConfig& cfg);

/// F(decode_sum(...)).
double decode(const FmonFunction& f, double received_energy, double expected_noise_energy,
              std::size_t M, const DfaConfig& cfg);

double received_energy(std::span<const std::complex<double>> y);

struct DfaTrace {
  double received_energy = 0.0;
  double sum_estimate = 0.0;
  double estimate = 0.0;
};

/// One shot of encode → channel → ‖Y‖² → decode, streamed over channel uses
/// so that neither H nor the transmit matrix is held in memory.
DfaTrace run_dfa_trace(const FmonFunction& f, const CorrelationModel& model,
                       std::span<const double> s, const DfaConfig& cfg, Rng& sign_rng,
                       Rng& channel_rng);

/// As run_dfa_trace, with sign and channel streams split from `rng`.
double run_dfa(const FmonFunction& f, const CorrelationModel& model, std::span<const double> s,
               const DfaConfig& cfg, Rng& rng);

}  // namespace aircomp
