#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>

#include "aircomp/channel.hpp"
#include "aircomp/functions.hpp"
#include "aircomp/linalg.hpp"

namespace aircomp {

/// Choice of the user-uncorrelated approximation A_i of A.
///  same: A_i = A (requires A itself to be user-uncorrelated)
///  zero: A_i = 0
///  mask: A with every column shared by two users' rows zeroed
enum class AiStrategy { same, zero, mask };

AiStrategy parse_ai_strategy(std::string_view name);

/// Builds A_i from a dense A. Throws ValidationError if `same` is requested
/// for an A that is not user-uncorrelated.
Matrix select_ai(const Matrix& a, std::size_t K, std::size_t M, AiStrategy strategy);

/// ‖(A + A_i)(A - A_i)ᵀ‖_op, without forming the product.
double eta(const Matrix& a, const Matrix& a_i);

/// Norms of the correlation factors that enter the error bound.
struct ModelNorms {
  double a_op = 0.0;
  double a_fro = 0.0;
  double b_op = 0.0;
  double b_fro = 0.0;
  double ab_fro = 0.0;  // ‖A Bᵀ‖_F
  double eta = 0.0;
};

inline constexpr double kNormTolerance = 1e-12;

ModelNorms model_norms(const Matrix& a, const Matrix& b, const Matrix& a_i);

/// Closed forms for the i.i.d. and AR(1) families; dense models go through
/// the dense path.
ModelNorms model_norms(const CorrelationModel& model, AiStrategy strategy);

/// ‖C‖_op of the M×M lower-triangular AR(1) synthesis factor.
double ar_factor_operator_norm(std::size_t M, double rho);

struct BoundTerms {
  double eta = 0.0;
  double l_term = 0.0;
  double f_term = 0.0;
  double d_term = 0.0;
  double phi_inv_eps = 0.0;
  std::size_t M = 0;
};

/// Φ⁻¹(ε), or ε/C when `use_lipschitz` and F is C-Lipschitz.
double deviation_threshold(const FmonFunction& f, double eps, bool use_lipschitz);

BoundTerms bound_terms(const SpreadSummary& spread, const ModelNorms& norms, std::size_t M,
                       double P, double phi_inv_eps);

BoundTerms bound_terms(const FmonFunction& f, const CorrelationModel& model, const Matrix& a_i,
                       double P, double eps, bool use_lipschitz = false);

BoundTerms bound_terms(const FmonFunction& f, const CorrelationModel& model, AiStrategy strategy,
                       double P, double eps, bool use_lipschitz = false);

/// Sum of the two exponential terms, uncapped (may exceed 1).
double error_probability_bound_raw(const BoundTerms& terms);
/// min(1, raw).
double error_probability_bound(const BoundTerms& terms);

/// Γ = max(16F + D + 4Φ⁻¹(ε)L, 256F + 32Φ⁻¹(ε)L).
double gamma_term(const BoundTerms& terms);

using ModelFamily = std::function<CorrelationModel(std::size_t M)>;

struct CostResult {
  std::optional<std::size_t> M;  // nullopt: no M ≤ m_max meets δ
  std::size_t m_max = 0;
  bool closed_form = false;
  BoundTerms terms;  // at M (or at the last M examined)
};

/// Smallest number of channel uses whose bound is ≤ δ.
///
/// For the i.i.d. family with η = 0 the terms do not depend on M and the
/// answer is ⌈(log 4 - log δ)/Φ⁻¹(ε)² · Γ⌉. Otherwise the bound need not be
/// monotone in M and M = 1, 2, ... is scanned up to m_max.
CostResult communication_cost(const FmonFunction& f, double eps, double delta,
                              const ModelFamily& family, AiStrategy strategy, double P,
                              std::size_t m_max, bool use_lipschitz = false);

}  // namespace aircomp
