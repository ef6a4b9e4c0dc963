#include "aircomp/functions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aircomp/error.hpp"
#include "aircomp/format.hpp"

namespace aircomp {

namespace {

void require_users(std::size_t K) {
  if (K == 0) throw ValidationError("function needs at least one user (K = 0)");
}

}  // namespace

double FmonFunction::inner(std::size_t k, double s) const {
  switch (kind_) {
    case Kind::mean:
      return s;
    case Kind::euclidean_norm:
      return s * s;
    case Kind::weighted_sum:
      return weights_.at(k) * s;
    case Kind::constant:
      return constant_;
  }
  return 0.0;
}

double FmonFunction::outer(double x) const {
  switch (kind_) {
    case Kind::mean:
      return x / static_cast<double>(users());
    case Kind::euclidean_norm:
      return std::sqrt(std::max(x, 0.0));
    case Kind::weighted_sum:
    case Kind::constant:
      return x;
  }
  return x;
}

double FmonFunction::phi(double t) const {
  switch (kind_) {
    case Kind::mean:
      return t / static_cast<double>(users());
    case Kind::euclidean_norm:
      return std::sqrt(t);
    case Kind::weighted_sum:
    case Kind::constant:
      return t;
  }
  return t;
}

double FmonFunction::phi_inv(double eps) const {
  if (eps < 0.0) throw ValidationError("phi_inv: negative argument");
  switch (kind_) {
    case Kind::mean:
      return static_cast<double>(users()) * eps;
    case Kind::euclidean_norm:
      return eps * eps;
    case Kind::weighted_sum:
    case Kind::constant:
      return eps;
  }
  return eps;
}

double FmonFunction::phi_min_sum() const noexcept {
  return std::accumulate(phi_min_.begin(), phi_min_.end(), 0.0);
}

double FmonFunction::phi_max_sum() const noexcept {
  return std::accumulate(phi_max_.begin(), phi_max_.end(), 0.0);
}

double FmonFunction::output_range() const {
  return std::abs(outer(phi_max_sum()) - outer(phi_min_sum()));
}

double FmonFunction::inner_sum(std::span<const double> s) const {
  if (s.size() != users()) {
    throw ValidationError("expected " + std::to_string(users()) + " inputs, got " +
                          std::to_string(s.size()));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!domains_[k].contains(s[k])) {
      throw ValidationError("input " + std::to_string(k) + " = " + std::to_string(s[k]) +
                            " outside its domain [" + std::to_string(domains_[k].lo) + ", " +
                            std::to_string(domains_[k].hi) + "]");
    }
    sum += inner(k, s[k]);
  }
  return sum;
}

double FmonFunction::evaluate(std::span<const double> s) const { return outer(inner_sum(s)); }

FmonFunction make_mean(std::size_t K) {
  require_users(K);
  FmonFunction f;
  f.kind_ = FmonFunction::Kind::mean;
  f.name_ = "mean";
  f.domains_.assign(K, Interval{0.0, 1.0});
  f.outer_domain_ = {0.0, static_cast<double>(K)};
  f.phi_min_.assign(K, 0.0);
  f.phi_max_.assign(K, 1.0);
  f.lipschitz_c_ = 1.0 / static_cast<double>(K);
  return f;
}

FmonFunction make_euclidean_norm(std::size_t K) {
  require_users(K);
  FmonFunction f;
  f.kind_ = FmonFunction::Kind::euclidean_norm;
  f.name_ = "norm";
  f.domains_.assign(K, Interval{0.0, 1.0});
  f.outer_domain_ = {0.0, static_cast<double>(K)};
  f.phi_min_.assign(K, 0.0);
  f.phi_max_.assign(K, 1.0);
  return f;
}

FmonFunction make_weighted_sum(std::vector<double> weights) {
  require_users(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0) || !std::isfinite(weights[k])) {
      throw ValidationError("weight " + std::to_string(k) + " must be positive and finite");
    }
  }
  FmonFunction f;
  f.kind_ = FmonFunction::Kind::weighted_sum;
  f.name_ = "wsum";
  f.domains_.assign(weights.size(), Interval{0.0, 1.0});
  f.phi_min_.assign(weights.size(), 0.0);
  f.phi_max_ = weights;
  f.outer_domain_ = {0.0, std::accumulate(weights.begin(), weights.end(), 0.0)};
  f.weights_ = std::move(weights);
  f.lipschitz_c_ = 1.0;
  return f;
}

FmonFunction make_constant(std::size_t K, double value) {
  require_users(K);
  FmonFunction f;
  f.kind_ = FmonFunction::Kind::constant;
  f.name_ = "const";
  f.constant_ = value;
  f.domains_.assign(K, Interval{0.0, 1.0});
  f.phi_min_.assign(K, value);
  f.phi_max_.assign(K, value);
  const double total = value * static_cast<double>(K);
  f.outer_domain_ = {total, total};
  f.lipschitz_c_ = 1.0;
  return f;
}

FmonFunction parse_function(std::string_view spec, std::size_t K) {
  if (spec == "mean") return make_mean(K);
  if (spec == "norm") return make_euclidean_norm(K);
  if (spec.starts_with("wsum:")) {
    std::vector<double> weights;
    std::string_view rest = spec.substr(5);
    while (true) {
      const auto comma = rest.find(',');
      weights.push_back(parse_double_strict(rest.substr(0, comma), "weight"));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (weights.size() != K) {
      throw ValidationError("wsum has " + std::to_string(weights.size()) + " weights but K = " +
                            std::to_string(K));
    }
    return make_weighted_sum(std::move(weights));
  }
  if (spec.starts_with("const:")) return make_constant(K, parse_double_strict(spec.substr(6), "constant"));
  throw ValidationError("unknown function '" + std::string(spec) +
                        "' (expected mean, norm or wsum:<w1,...>)");
}

SpreadSummary spreads(const FmonFunction& f, double P) {
  if (!(P > 0.0)) throw ValidationError("spreads: power P must be positive");
  SpreadSummary out;
  for (std::size_t k = 0; k < f.users(); ++k) {
    const double w = f.phi_max()[k] - f.phi_min()[k];
    out.total_spread += w;
    out.max_spread = std::max(out.max_spread, w);
  }
  out.relative_spread = out.max_spread > 0.0 ? P * out.total_spread / out.max_spread : 0.0;
  return out;
}

}  // namespace aircomp
