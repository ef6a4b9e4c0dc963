#include "aircomp/dfa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aircomp/error.hpp"

namespace aircomp {

void DfaConfig::validate() const {
  if (!(P > 0.0) || !std::isfinite(P)) throw ValidationError("DFA: power P must be positive");
  if (!(sigma_f > 0.0) || !std::isfinite(sigma_f)) {
    throw ValidationError("DFA: sigma_f must be positive");
  }
}

Codeword::Codeword(std::vector<double> amplitudes, std::size_t uses, std::vector<double> signs)
    : amplitudes_(std::move(amplitudes)), uses_(uses), signs_(std::move(signs)) {
  if (signs_.size() != amplitudes_.size() * uses_) {
    throw ValidationError("Codeword: expected K*M signs");
  }
  for (double u : signs_) {
    if (u != 1.0 && u != -1.0) throw ValidationError("Codeword: signs must be +1 or -1");
  }
}

Matrix Codeword::transmit_matrix() const {
  Matrix x(users(), uses_);
  for (std::size_t k = 0; k < users(); ++k) {
    const double root = std::sqrt(amplitudes_[k]);
    for (std::size_t m = 0; m < uses_; ++m) x(k, m) = root * sign(k, m);
  }
  return x;
}

std::vector<double> encode_amplitudes(const FmonFunction& f, std::span<const double> s, double P) {
  f.inner_sum(s);  // domain check
  const double spread = spreads(f, P).max_spread;
  std::vector<double> a(f.users(), 0.0);
  if (spread == 0.0) return a;
  for (std::size_t k = 0; k < f.users(); ++k) {
    a[k] = P / spread * (f.inner(k, s[k]) - f.phi_min()[k]);
  }
  return a;
}

Codeword encode(const FmonFunction& f, std::span<const double> s, const DfaConfig& cfg,
                std::size_t M, Rng& rng) {
  cfg.validate();
  if (M == 0) throw ValidationError("encode: M must be positive");
  auto a = encode_amplitudes(f, s, cfg.P);
  std::vector<double> signs(f.users() * M);
  for (double& u : signs) u = rng.sign();
  return Codeword(std::move(a), M, std::move(signs));
}

double energy_to_value(double spread, double sigma_f, std::size_t uses, double P,
                       double excess_energy, double offset) {
  const double scale = spread / (2.0 * sigma_f * sigma_f * static_cast<double>(uses) * P);
  return scale * excess_energy + offset;
}

double decode_sum(const FmonFunction& f, double received_energy, double expected_noise_energy,
                  std::size_t M, const DfaConfig& cfg) {
  cfg.validate();
  if (M == 0) throw ValidationError("decode: M must be positive");
  const double lo = f.phi_min_sum();
  const double value = energy_to_value(spreads(f, cfg.P).max_spread, cfg.sigma_f, M, cfg.P,
                                       received_energy - expected_noise_energy, lo);
  return cfg.clamp ? std::clamp(value, lo, f.phi_max_sum()) : value;
}

double decode(const FmonFunction& f, double received_energy, double expected_noise_energy,
              std::size_t M, const DfaConfig& cfg) {
  return f.outer(decode_sum(f, received_energy, expected_noise_energy, M, cfg));
}

double received_energy(std::span<const std::complex<double>> y) {
  double e = 0.0;
  for (const auto& v : y) e += v.real() * v.real() + v.imag() * v.imag();
  return e;
}

DfaTrace run_dfa_trace(const FmonFunction& f, const CorrelationModel& model,
                       std::span<const double> s, const DfaConfig& cfg, Rng& sign_rng,
                       Rng& channel_rng) {
  cfg.validate();
  const std::size_t K = model.users();
  if (f.users() != K) {
    throw ValidationError("run_dfa: function has " + std::to_string(f.users()) +
                          " users but the model has " + std::to_string(K));
  }
  const auto a = encode_amplitudes(f, s, cfg.P);
  std::vector<double> root(K);
  for (std::size_t k = 0; k < K; ++k) root[k] = std::sqrt(a[k]);

  ChannelSampler sampler(model, channel_rng);
  std::vector<double> h_re(K);
  std::vector<double> h_im(K);
  std::vector<double> x(K);
  double energy = 0.0;
  for (std::size_t m = 0; m < model.uses(); ++m) {
    for (std::size_t k = 0; k < K; ++k) x[k] = root[k] * sign_rng.sign();
    double n_re = 0.0;
    double n_im = 0.0;
    sampler.next(h_re, h_im, n_re, n_im);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      re += h_re[k] * x[k];
      im += h_im[k] * x[k];
    }
    re += n_re;
    im += n_im;
    energy += re * re + im * im;
  }

  DfaTrace t;
  t.received_energy = energy;
  t.sum_estimate = decode_sum(f, energy, expected_noise_energy(model), model.uses(), cfg);
  t.estimate = f.outer(t.sum_estimate);
  return t;
}

double run_dfa(const FmonFunction& f, const CorrelationModel& model, std::span<const double> s,
               const DfaConfig& cfg, Rng& rng) {
  Rng sign_rng = rng.split();
  Rng channel_rng = rng.split();
  return run_dfa_trace(f, model, s, cfg, sign_rng, channel_rng).estimate;
}

}  // namespace aircomp
