#include "aircomp/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aircomp/error.hpp"

namespace aircomp {

std::vector<std::size_t> tdma_slot_counts(std::size_t K, std::size_t M) {
  if (K == 0) throw ValidationError("tdma_slot_counts: K must be positive");
  if (M < K) return {};
  std::vector<std::size_t> counts(K, M / K);
  for (std::size_t k = 0; k < M % K; ++k) ++counts[k];
  return counts;
}

TdmaTrace run_tdma_trace(const FmonFunction& f, const CorrelationModel& model,
                         std::span<const double> s, const DfaConfig& cfg, Rng& sign_rng,
                         Rng& channel_rng) {
  cfg.validate();
  const std::size_t K = model.users();
  const std::size_t M = model.uses();
  if (f.users() != K) {
    throw ValidationError("run_tdma: function has " + std::to_string(f.users()) +
                          " users but the model has " + std::to_string(K));
  }
  const auto a = encode_amplitudes(f, s, cfg.P);
  TdmaTrace out;
  const auto slots = tdma_slot_counts(K, M);
  if (slots.empty()) {
    out.infeasible = true;
    return out;
  }

  const double spread = spreads(f, cfg.P).max_spread;
  ChannelSampler sampler(model, channel_rng);
  std::vector<double> h_re(K);
  std::vector<double> h_im(K);
  out.inner_estimates.resize(K);
  double total = 0.0;
  std::size_t m = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t first = m;
    const double root = std::sqrt(a[k]);
    double energy = 0.0;
    for (std::size_t i = 0; i < slots[k]; ++i, ++m) {
      const double x = root * sign_rng.sign();
      double n_re = 0.0;
      double n_im = 0.0;
      sampler.next(h_re, h_im, n_re, n_im);
      double re = 0.0;
      double im = 0.0;
      re += h_re[k] * x;
      im += h_im[k] * x;
      re += n_re;
      im += n_im;
      energy += re * re + im * im;
    }
    const double lo = f.phi_min()[k];
    const double est = energy_to_value(spread, cfg.sigma_f, slots[k], cfg.P,
                                       energy - model.expected_noise_energy(first, m), lo);
    out.inner_estimates[k] = est;
    total += cfg.clamp ? std::clamp(est, lo, f.phi_max()[k]) : est;
  }
  out.estimate = f.outer(total);
  return out;
}

std::optional<double> run_tdma(const FmonFunction& f, const CorrelationModel& model,
                               std::span<const double> s, const DfaConfig& cfg, Rng& rng) {
  Rng sign_rng = rng.split();
  Rng channel_rng = rng.split();
  const auto t = run_tdma_trace(f, model, s, cfg, sign_rng, channel_rng);
  if (t.infeasible) return std::nullopt;
  return t.estimate;
}

double tdma_infeasible_error(const FmonFunction& f) { return f.output_range(); }

}  // namespace aircomp
