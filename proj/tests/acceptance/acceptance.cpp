// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aircomp/bounds.hpp"
#include "aircomp/channel.hpp"
#include "aircomp/correlation_file.hpp"
#include "aircomp/dfa.hpp"
#include "aircomp/functions.hpp"
#include "aircomp/harness.hpp"
#include "aircomp/linalg.hpp"
#include "aircomp/parallel.hpp"
#include "aircomp/rng.hpp"
#include "cli.hpp"
#include "support/oracles.hpp"

using namespace aircomp;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED(" << what << ")";
    }
  }
};

double rel_err(double x, double ref) { return std::abs(x - ref) / std::max(1.0, std::abs(ref)); }

// ---------------------------------------------------------------------------

Verdict unbiasedness() {
  Verdict v;
  const std::size_t K = 5;
  const std::size_t M = 200;
  const auto f = make_mean(K);
  const auto model = iid_model(K, M, 1.0, 0.1);
  DfaConfig cfg;
  cfg.clamp = false;
  const std::vector<std::vector<double>> messages = {
      {0.1, 0.2, 0.3, 0.4, 0.5}, {0.9, 0.05, 0.5, 0.77, 0.31}, {1.0, 1.0, 0.0, 0.0, 0.5}};
  const std::size_t runs = 10000;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const auto& s = messages[i];
    const auto est = parallel_map(runs, [&](std::size_t r) {
      Rng signs(derive_seed(100 + i, 2 * r));
      Rng channel(derive_seed(100 + i, 2 * r + 1));
      return run_dfa_trace(f, model, s, cfg, signs, channel).sum_estimate;
    });
    const auto mo = oracle::moments(est);
    const double z = (mo.mean - f.inner_sum(s)) / mo.stderr_of_mean;
    v.detail << " z" << i << "=" << z;
    v.require(std::abs(z) <= 5.0, "message vector " + std::to_string(i));
  }
  return v;
}

// ---------------------------------------------------------------------------

// Single user. Each fading component mixes a fresh coordinate with the
// coordinate of use 0 (a weak common component over time), and the noise
// leaks into the fading coordinate of its own use, so A Bᵀ ≠ 0.
CorrelationModel correlated_noise_model(std::size_t M, double sigma_n) {
  const std::size_t cols = 4 * M;
  Matrix a(2 * M, cols);
  Matrix b(2 * M, cols);
  const double common = 0.05;
  const double fresh = std::sqrt(1.0 - common * common);
  const double leak = 0.4;
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t part = 0; part < 2; ++part) {
      const std::size_t row = 2 * m + part;
      if (m == 0) {
        a(row, row) = 1.0;
      } else {
        a(row, row) = fresh;
        a(row, part) = common;
      }
      b(row, 2 * M + row) = sigma_n * std::sqrt(1.0 - leak * leak);
      b(row, row) = sigma_n * leak;
    }
  }
  return dense_model(1, M, std::move(a), std::move(b));
}

struct BoundConfig {
  std::string name;
  FmonFunction f;
  CorrelationModel model;
  std::vector<double> s;
};

// φ with capped bound equal to `target`, by bisection (the bound decreases in φ).
double phi_for_target(BoundTerms terms, double target) {
  double lo = 1e-9;
  double hi = 1.0;
  auto at = [&](double phi) {
    terms.phi_inv_eps = phi;
    return error_probability_bound(terms);
  };
  while (at(hi) > target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (at(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

Verdict bound_validity() {
  Verdict v;
  const double sigma_n = 0.1;
  const std::size_t M = 8000;
  const auto dir = std::filesystem::temp_directory_path();
  const auto corr_path = dir / "aircomp_acceptance_custom.corr";
  write_correlation_model(correlated_noise_model(1000, sigma_n), corr_path);
  const CorrelationModel custom = read_correlation_model(corr_path);
  std::filesystem::remove(corr_path);

  std::vector<BoundConfig> configs = {
      {"mean/iid", make_mean(2), iid_model(2, M, 1.0, sigma_n), {0.3, 0.8}},
      {"norm/iid", make_euclidean_norm(2), iid_model(2, M, 1.0, sigma_n), {0.3, 0.8}},
      {"mean/ar0.5", make_mean(2), temporal_ar_model(2, M, 0.5, 1.0, sigma_n), {0.6, 0.2}},
      {"norm/ar0.5", make_euclidean_norm(2), temporal_ar_model(2, M, 0.5, 1.0, sigma_n), {0.6, 0.2}},
      {"mean/custom", make_mean(1), custom, {0.45}},
      {"norm/custom", make_euclidean_norm(1), custom, {0.45}},
  };

  const std::size_t runs = 10000;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& cfg = configs[c];
    const AiStrategy ai = AiStrategy::same;
    const BoundTerms probe = bound_terms(cfg.f, cfg.model, ai, 1.0, 0.1);
    const double phi = phi_for_target(probe, 0.85);
    const double eps = cfg.f.phi(phi);
    BoundTerms terms = bound_terms(cfg.f, cfg.model, ai, 1.0, eps);
    const double bound = error_probability_bound(terms);
    const double truth = cfg.f.evaluate(cfg.s);
    const auto miss = parallel_map(runs, [&](std::size_t r) {
      Rng rng(derive_seed(7000 + c, r));
      const double est = run_dfa(cfg.f, cfg.model, cfg.s, DfaConfig{}, rng);
      return std::abs(est - truth) >= eps ? 1.0 : 0.0;
    });
    const auto mo = oracle::moments(miss);
    const double p = mo.mean;
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(runs));
    v.detail << " " << cfg.name << ":eps=" << eps << "/range=" << cfg.f.output_range()
             << ",bound=" << bound << ",emp=" << p;
    v.require(bound >= 0.05 && bound <= 0.9, cfg.name + " bound outside [0.05, 0.9]");
    v.require(p <= bound + 3.0 * se, cfg.name);
  }
  return v;
}

// ---------------------------------------------------------------------------

Verdict eta_identities() {
  Verdict v;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Matrix a = oracle::random_matrix(3 + i % 6, 4 + (i * 3) % 9, 500 + i);
    const double same = eta(a, a);
    const double op = oracle::max_singular_value(a);
    const double zero = eta(a, Matrix(a.rows(), a.cols()));
    worst = std::max({worst, std::abs(same), rel_err(zero, op * op)});
    v.require(std::abs(same) <= 1e-10, "a_i = a, matrix " + std::to_string(i));
    v.require(rel_err(zero, op * op) <= 1e-10, "a_i = 0, matrix " + std::to_string(i));
  }
  v.detail << " worst=" << worst;
  return v;
}

// ---------------------------------------------------------------------------

Verdict uncorrelated_closed_forms() {
  Verdict v;
  double worst = 0.0;
  for (auto [K, M] : {std::pair<std::size_t, std::size_t>{2, 3}, {4, 8}, {8, 16}}) {
    for (const auto& f : {make_mean(K), make_euclidean_norm(K)}) {
      const double sf = 1.0;
      const double sn = 0.5;
      const double P = 1.0;
      const auto model = iid_model(K, M, sf, sn);
      const Matrix a = model.fading_matrix();
      const auto terms = bound_terms(f, model, a, P, 0.2);
      const auto sp = spreads(f, P);
      const auto ref = oracle::iid_bound(static_cast<double>(K), sp.total_spread, sp.max_spread, sf, sn,
                                         P, static_cast<double>(M), terms.phi_inv_eps);
      const double e = std::max(rel_err(terms.l_term, ref.l_term), rel_err(terms.f_term, ref.f_term));
      worst = std::max(worst, e);
      v.require(e <= 1e-10 && terms.d_term == 0.0,
                "K=" + std::to_string(K) + " M=" + std::to_string(M) + " " + f.name());
    }
  }
  v.detail << " worst=" << worst;
  return v;
}

// ---------------------------------------------------------------------------

Verdict cost_self_consistency() {
  Verdict v;
  const auto f = make_mean(4);
  const ModelFamily family = [](std::size_t M) { return iid_model(4, M, 1.0, 0.3); };
  for (double eps : {0.05, 0.1, 0.25}) {
    for (double delta : {0.01, 0.1, 0.5}) {
      const auto c = communication_cost(f, eps, delta, family, AiStrategy::same, 1.0, 1'000'000'000);
      if (!c.M) {
        v.require(false, "no cost found");
        continue;
      }
      const std::size_t M = *c.M;
      const auto terms = bound_terms(f, iid_model(4, M, 1.0, 0.3), AiStrategy::same, 1.0, eps);
      const double phi = terms.phi_inv_eps;
      const double needed = (std::log(4.0) - std::log(delta)) / (phi * phi) * gamma_term(terms);
      v.require(error_probability_bound(terms) <= delta, "bound(M) > delta");
      v.require(static_cast<double>(M - 1) < needed, "Gamma inequality holds at M-1");
      v.detail << " (" << eps << "," << delta << ")->" << M;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------

SweepConfig reference_sweep(const std::string& function) {
  SweepConfig cfg;
  cfg.function = function;
  cfg.fading = FadingPreset::experiments;
  cfg.runs = 500;
  cfg.root_seed = 20240;
  return cfg;
}

const SweepRow& find_row(const SweepResult& r, Scheme scheme, std::size_t K, std::size_t M,
                         double db) {
  for (const auto& row : r.rows) {
    if (row.scheme == scheme && row.users == K && row.chuses == M && row.noise_db == db) return row;
  }
  throw std::runtime_error("missing sweep row");
}

Verdict user_scaling() {
  Verdict v;
  for (const std::string fn : {"mean", "norm"}) {
    auto cfg = reference_sweep(fn);
    cfg.users = {64, 640};
    cfg.chuses = {512};
    cfg.noise_db = {0.0};
    const auto r = run_sweep(cfg);
    const auto& d64 = find_row(r, Scheme::dfa, 64, 512, 0.0);
    const auto& t64 = find_row(r, Scheme::tdma, 64, 512, 0.0);
    const auto& d640 = find_row(r, Scheme::dfa, 640, 512, 0.0);
    const auto& t640 = find_row(r, Scheme::tdma, 640, 512, 0.0);
    v.detail << " " << fn << ":dfa64=" << d64.mse << ",tdma64=" << t64.mse << ",dfa640=" << d640.mse
             << ",tdma640_infeasible=" << t640.infeasible_fraction;
    v.require(d64.mse < t64.mse, fn + " DFA not below TDMA at K=64");
    v.require(t640.infeasible_fraction == 1.0, fn + " TDMA feasible at K=640");
    v.require(d640.mse <= 10.0 * d64.mse, fn + " DFA blows up at K=640");
  }
  return v;
}

Verdict noise_saturation() {
  Verdict v;
  auto cfg = reference_sweep("mean");
  cfg.schemes = {Scheme::dfa};
  cfg.users = {40};
  cfg.chuses = {1000};
  cfg.noise_db = {-40.0, -20.0};
  const auto r = run_sweep(cfg);
  const double lo = find_row(r, Scheme::dfa, 40, 1000, -40.0).mse;
  const double hi = find_row(r, Scheme::dfa, 40, 1000, -20.0).mse;
  const double ratio = lo / hi;
  v.detail << " mse(-40dB)=" << lo << " mse(-20dB)=" << hi << " ratio=" << ratio;
  v.require(ratio >= 1.0 / 1.5 && ratio <= 1.5, "ratio outside [1/1.5, 1.5]");
  return v;
}

Verdict error_decay() {
  Verdict v;
  auto cfg = reference_sweep("mean");
  cfg.schemes = {Scheme::dfa};
  cfg.users = {40};
  cfg.chuses = {250, 500, 1000, 2000};
  cfg.noise_db = {-20.0};
  const auto r = run_sweep(cfg);
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t M : cfg.chuses) {
    x.push_back(static_cast<double>(M));
    y.push_back(std::log(find_row(r, Scheme::dfa, 40, M, -20.0).mse));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fit = my + slope * (x[i] - mx);
    sse += (y[i] - fit) * (y[i] - fit);
  }
  const double se = std::sqrt(sse / (n - 2.0) / sxx);
  const double t_crit = 2.919986;  // one-sided 95%, 2 degrees of freedom
  const double upper = slope + t_crit * se;
  v.detail << " slope=" << slope << " se=" << se << " upper95=" << upper;
  v.require(upper < 0.0, "slope not negative at 95% confidence");
  return v;
}

// ---------------------------------------------------------------------------

Verdict oracle_equivalence() {
  Verdict v;
  Rng meta(31337);
  double worst_energy = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t K = 1 + meta.next_u64() % 3;
    const std::size_t M = 1 + meta.next_u64() % 4;
    const std::size_t cols = 2 * K * M + 2 * M;
    const Matrix a = oracle::random_matrix(2 * K * M, cols, 9000 + inst);
    const Matrix b = oracle::random_matrix(2 * M, cols, 9500 + inst);
    const auto model = dense_model(K, M, a, b);
    const auto f = inst % 2 == 0 ? make_mean(K) : make_euclidean_norm(K);
    std::vector<double> s(K);
    for (auto& x : s) x = meta.uniform01();
    Rng signs(derive_seed(inst, 0));
    Rng channel(derive_seed(inst, 1));
    Rng signs_copy = signs;
    Rng channel_copy = channel;
    const auto trace = run_dfa_trace(f, model, s, DfaConfig{}, signs, channel);
    const Matrix x = encode(f, s, DfaConfig{}, M, signs_copy).transmit_matrix();
    const auto r = draw_r(model, channel_copy);
    const double ref = oracle::energy_quadratic_form(oracle::dense_q(x), a, b, r);
    const double e = rel_err(trace.received_energy, ref);
    worst_energy = std::max(worst_energy, e);
    v.require(e <= 1e-9, "energy instance " + std::to_string(inst));
  }
  double worst_norm = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Matrix m = oracle::random_matrix(1 + i % 11, 1 + (i * 7) % 13, 40000 + i);
    const double e = rel_err(operator_norm(m, kNormTolerance), oracle::max_singular_value(m));
    worst_norm = std::max(worst_norm, e);
    v.require(e <= 1e-8, "operator norm matrix " + std::to_string(i));
  }
  v.detail << " worst_energy=" << worst_energy << " worst_opnorm=" << worst_norm;
  return v;
}

// ---------------------------------------------------------------------------

Verdict determinism() {
  Verdict v;
  const auto dir = std::filesystem::temp_directory_path();
  std::vector<std::string> contents;
  for (int pass = 0; pass < 2; ++pass) {
    const auto path = dir / ("aircomp_determinism_" + std::to_string(pass) + ".csv");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run({"simulate", "--function", "norm", "--scheme", "both", "--users",
                               "1,4,16", "--chuses", "8,64", "--noise-db", "-10,0,10", "--runs",
                               "200", "--seed", "99", "--correlation", "ar:0.3", "--out",
                               path.string()},
                              out, err);
    v.require(code == 0, "simulate exit code " + std::to_string(code) + ": " + err.str());
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    contents.push_back(buf.str());
    std::filesystem::remove(path);
  }
  v.require(!contents[0].empty() && contents[0] == contents[1], "CSV differs between runs");
  v.detail << " bytes=" << contents[0].size();
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "unbiased sum estimate", unbiasedness},
      {2, "error bound validity", bound_validity},
      {3, "eta identities", eta_identities},
      {4, "uncorrelated closed forms", uncorrelated_closed_forms},
      {5, "communication cost self-consistency", cost_self_consistency},
      {6, "user scaling vs TDMA", user_scaling},
      {7, "noise saturation", noise_saturation},
      {8, "error decay in M", error_decay},
      {9, "oracle equivalence", oracle_equivalence},
      {10, "determinism", determinism},
  };
  int failures = 0;
  std::size_t ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("[%s] criterion %d: %s (%.1fs)%s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(ran) - failures, ran);
  return failures == 0 ? 0 : 1;
}
