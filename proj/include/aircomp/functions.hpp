#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aircomp {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  double width() const noexcept { return hi - lo; }
};

/// A function f(s) = F(Σ_k f_k(s_k)) of the monotone-majorant class, drawn from
/// a closed-form registry so that inner ranges and Φ⁻¹ are exact.
///
/// Inner maps f_k act on closed intervals S_k; Φ is an increment majorant of
/// the outer map F, i.e. |F(x) - F(y)| ≤ Φ(|x - y|) on the outer domain.
class FmonFunction {
 public:
  enum class Kind { mean, euclidean_norm, weighted_sum, constant };

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t users() const noexcept { return phi_min_.size(); }

  double inner(std::size_t k, double s) const;
  /// Outer map. Outside its declared domain it is continued in closed form
  /// (the norm uses √max(x, 0)); callers that want D respected clamp first.
  double outer(double x) const;
  double phi(double t) const;
  double phi_inv(double eps) const;

  Interval domain(std::size_t k) const { return domains_.at(k); }
  Interval outer_domain() const noexcept { return outer_domain_; }
  std::span<const double> phi_min() const noexcept { return phi_min_; }
  std::span<const double> phi_max() const noexcept { return phi_max_; }
  std::optional<double> lipschitz_c() const noexcept { return lipschitz_c_; }

  double phi_min_sum() const noexcept;
  double phi_max_sum() const noexcept;

  /// Width of the attainable output range, F(Σφ_max) - F(Σφ_min) for the
  /// monotone outer maps of the registry. 1 for the mean, √K for the norm.
  double output_range() const;

  /// F(Σ_k f_k(s_k)); throws ValidationError naming the first index out of S_k.
  double evaluate(std::span<const double> s) const;

  /// Σ_k f_k(s_k) without applying F.
  double inner_sum(std::span<const double> s) const;

  friend FmonFunction make_mean(std::size_t K);
  friend FmonFunction make_euclidean_norm(std::size_t K);
  friend FmonFunction make_weighted_sum(std::vector<double> weights);
  friend FmonFunction make_constant(std::size_t K, double value);

 private:
  FmonFunction() = default;

  Kind kind_ = Kind::mean;
  std::string name_;
  std::vector<Interval> domains_;
  Interval outer_domain_;
  std::vector<double> weights_;
  double constant_ = 0.0;
  std::vector<double> phi_min_;
  std::vector<double> phi_max_;
  std::optional<double> lipschitz_c_;
};

/// f_k(s) = s on [0,1], F(x) = x/K, Φ(t) = t/K.
FmonFunction make_mean(std::size_t K);
/// f_k(s) = s² on [0,1], F(x) = √x, Φ(t) = √t.
FmonFunction make_euclidean_norm(std::size_t K);
/// f_k(s) = w_k s on [0,1], F = id, Φ(t) = t.
FmonFunction make_weighted_sum(std::vector<double> weights);
/// Constant inner maps f_k ≡ value on [0,1], F = id. Zero spreads; a test fixture.
FmonFunction make_constant(std::size_t K, double value);

/// Parses `mean`, `norm`, `wsum:<w1,w2,...>` or `const:<value>` for K users.
/// For wsum the weight count must equal K.
FmonFunction parse_function(std::string_view spec, std::size_t K);

struct SpreadSummary {
  double total_spread = 0.0;
  double max_spread = 0.0;
  double relative_spread = 0.0;
};

SpreadSummary spreads(const FmonFunction& f, double P);

}  // namespace aircomp
