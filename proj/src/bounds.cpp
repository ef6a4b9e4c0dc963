#include "aircomp/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "aircomp/error.hpp"

namespace aircomp {

AiStrategy parse_ai_strategy(std::string_view name) {
  if (name == "same") return AiStrategy::same;
  if (name == "zero") return AiStrategy::zero;
  if (name == "mask") return AiStrategy::mask;
  throw ValidationError("unknown A_i strategy '" + std::string(name) + "' (same|zero|mask)");
}

Matrix select_ai(const Matrix& a, std::size_t K, std::size_t M, AiStrategy strategy) {
  switch (strategy) {
    case AiStrategy::zero:
      return Matrix(a.rows(), a.cols());
    case AiStrategy::same:
      if (!validate_user_uncorrelated(a, K, M)) {
        throw ValidationError("A_i = A requires user-uncorrelated fading; use 'mask' or 'zero'");
      }
      return a;
    case AiStrategy::mask: {
      if (a.rows() != 2 * K * M) throw ValidationError("select_ai: A has the wrong row count");
      constexpr std::size_t kUnowned = static_cast<std::size_t>(-1);
      constexpr std::size_t kShared = static_cast<std::size_t>(-2);
      std::vector<std::size_t> owner(a.cols(), kUnowned);
      for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto row = a.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (row[c] == 0.0) continue;
          if (owner[c] == kUnowned) {
            owner[c] = r % K;
          } else if (owner[c] != r % K) {
            owner[c] = kShared;
          }
        }
      }
      Matrix out = a;
      for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (owner[c] == kShared) row[c] = 0.0;
        }
      }
      if (!validate_user_uncorrelated(out, K, M)) {
        throw NumericalError("select_ai: masked matrix is not user-uncorrelated");
      }
      return out;
    }
  }
  return a;
}

double eta(const Matrix& a, const Matrix& a_i) {
  if (a.rows() != a_i.rows() || a.cols() != a_i.cols()) {
    throw ValidationError("eta: A and A_i must have the same dimensions");
  }
  if (a.empty()) throw ValidationError("empty matrix");
  const Matrix sum = a + a_i;
  const Matrix diff = a - a_i;
  LinearOperator op;
  op.rows = a.rows();
  op.cols = a.rows();
  // (S Dᵀ) v = S (Dᵀ v), (S Dᵀ)ᵀ w = D (Sᵀ w)
  op.apply = [&](std::span<const double> v, std::span<double> out) {
    const auto t = multiply(sum, multiply_transpose(diff, v));
    std::copy(t.begin(), t.end(), out.begin());
  };
  op.apply_transpose = [&](std::span<const double> w, std::span<double> out) {
    const auto t = multiply(diff, multiply_transpose(sum, w));
    std::copy(t.begin(), t.end(), out.begin());
  };
  return operator_norm(op, kNormTolerance);
}

ModelNorms model_norms(const Matrix& a, const Matrix& b, const Matrix& a_i) {
  ModelNorms n;
  n.a_op = operator_norm(a, kNormTolerance);
  n.b_op = operator_norm(b, kNormTolerance);
  n.a_fro = frobenius_norm(a);
  n.b_fro = frobenius_norm(b);
  n.ab_fro = frobenius_norm(matmul_transpose(a, b));
  n.eta = eta(a, a_i);
  return n;
}

// L Lᵀ = [ρ^|i-j|]. Its eigenvalues are (1-ρ²)/(1 - 2|ρ|cos θ + ρ²) where θ runs over
// the roots of sin((M+1)θ) - 2|ρ| sin(Mθ) + ρ² sin((M-1)θ) in (0, π); the
// smallest root lies in (0, π/(M+1)) and gives the top eigenvalue.
double ar_factor_operator_norm(std::size_t M, double rho) {
  if (M == 0) throw ValidationError("empty matrix");
  const double r = std::abs(rho);
  if (M == 1 || r == 0.0) return 1.0;
  const double m = static_cast<double>(M);
  auto g = [&](double t) {
    return std::sin((m + 1.0) * t) - 2.0 * r * std::sin(m * t) + r * r * std::sin((m - 1.0) * t);
  };
  double lo = 0.0;
  double hi = std::numbers::pi / (m + 1.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  const double half = std::sin(0.25 * (lo + hi));
  return std::sqrt((1.0 - r * r) / ((1.0 - r) * (1.0 - r) + 4.0 * r * half * half));
}

ModelNorms model_norms(const CorrelationModel& model, AiStrategy strategy) {
  using S = CorrelationModel::Structure;
  if (model.structure() == S::dense) {
    const Matrix a = model.fading_matrix();
    return model_norms(a, model.noise_matrix(),
                       select_ai(a, model.users(), model.uses(), strategy));
  }
  const double K = static_cast<double>(model.users());
  const double M = static_cast<double>(model.uses());
  ModelNorms n;
  n.a_op = model.sigma_f() * (model.structure() == S::iid
                                  ? 1.0
                                  : ar_factor_operator_norm(model.uses(), model.rho()));
  // Every row of A has squared norm σ_F² in both families.
  n.a_fro = model.sigma_f() * std::sqrt(2.0 * M * K);
  n.b_op = model.sigma_n();
  n.b_fro = model.sigma_n() * std::sqrt(2.0 * M);
  n.ab_fro = 0.0;  // disjoint column supports
  // Both families are user-uncorrelated, so `mask` leaves A unchanged.
  n.eta = strategy == AiStrategy::zero ? n.a_op * n.a_op : 0.0;
  return n;
}

double deviation_threshold(const FmonFunction& f, double eps, bool use_lipschitz) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (use_lipschitz) {
    const auto c = f.lipschitz_c();
    if (!c) throw ValidationError("function '" + f.name() + "' has no Lipschitz constant");
    return eps / *c;
  }
  return f.phi_inv(eps);
}

BoundTerms bound_terms(const SpreadSummary& spread, const ModelNorms& norms, std::size_t M,
                       double P, double phi_inv_eps) {
  if (!(P > 0.0)) throw ValidationError("bound_terms: P must be positive");
  if (M == 0) throw ValidationError("bound_terms: M must be positive");
  if (spread.max_spread == 0.0) throw ValidationError("degenerate function: zero max-spread");
  const double total = spread.total_spread;
  const double maxs = spread.max_spread;
  const double m = static_cast<double>(M);

  BoundTerms t;
  t.M = M;
  t.eta = norms.eta;
  t.phi_inv_eps = phi_inv_eps;
  const double l_root = std::sqrt(total) * norms.a_op + std::sqrt(maxs / P) * norms.b_op;
  t.l_term = l_root * l_root;
  const double f_root = std::sqrt(total / m) * norms.a_fro + std::sqrt(maxs / (P * m)) * norms.b_fro;
  t.f_term = t.l_term * f_root * f_root;
  const double d_root =
      4.0 * std::sqrt(2.0 * m) * total * norms.eta + 4.0 * maxs / std::sqrt(P * m) * norms.ab_fro;
  t.d_term = d_root * d_root;
  return t;
}

BoundTerms bound_terms(const FmonFunction& f, const CorrelationModel& model, const Matrix& a_i,
                       double P, double eps, bool use_lipschitz) {
  if (model.users() != f.users()) throw ValidationError("bound_terms: K mismatch");
  const Matrix a = model.fading_matrix();
  const auto norms = model_norms(a, model.noise_matrix(), a_i);
  return bound_terms(spreads(f, P), norms, model.uses(), P,
                     deviation_threshold(f, eps, use_lipschitz));
}

BoundTerms bound_terms(const FmonFunction& f, const CorrelationModel& model, AiStrategy strategy,
                       double P, double eps, bool use_lipschitz) {
  if (model.users() != f.users()) throw ValidationError("bound_terms: K mismatch");
  return bound_terms(spreads(f, P), model_norms(model, strategy), model.uses(), P,
                     deviation_threshold(f, eps, use_lipschitz));
}

namespace {

double exp_term(double numerator, double denominator) {
  return denominator > 0.0 ? 2.0 * std::exp(-numerator / denominator) : 0.0;
}

}  // namespace

double error_probability_bound_raw(const BoundTerms& t) {
  const double phi = t.phi_inv_eps;
  const double num = static_cast<double>(t.M) * phi * phi;
  return exp_term(num, 16.0 * t.f_term + t.d_term + 4.0 * phi * t.l_term) +
         exp_term(num, 256.0 * t.f_term + 32.0 * phi * t.l_term);
}

double error_probability_bound(const BoundTerms& t) {
  return std::min(1.0, error_probability_bound_raw(t));
}

double gamma_term(const BoundTerms& t) {
  const double phi = t.phi_inv_eps;
  return std::max(16.0 * t.f_term + t.d_term + 4.0 * phi * t.l_term,
                  256.0 * t.f_term + 32.0 * phi * t.l_term);
}

CostResult communication_cost(const FmonFunction& f, double eps, double delta,
                              const ModelFamily& family, AiStrategy strategy, double P,
                              std::size_t m_max, bool use_lipschitz) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (m_max == 0) throw ValidationError("m_max must be positive");
  const double phi = deviation_threshold(f, eps, use_lipschitz);
  const auto spread = spreads(f, P);

  CostResult out;
  out.m_max = m_max;

  const CorrelationModel probe = family(1);
  if (probe.structure() == CorrelationModel::Structure::iid && strategy != AiStrategy::zero) {
    out.closed_form = true;
    const auto norms = model_norms(probe, strategy);
    const BoundTerms at_one = bound_terms(spread, norms, 1, P, phi);
    const double bound_m = (std::log(4.0) - std::log(delta)) / (phi * phi) * gamma_term(at_one);
    const double m = std::max(1.0, std::ceil(bound_m));
    const std::size_t cost = m > static_cast<double>(m_max) ? 0 : static_cast<std::size_t>(m);
    const std::size_t at = cost == 0 ? m_max : cost;
    out.terms = bound_terms(spread, model_norms(family(at), strategy), at, P, phi);
    if (cost != 0) out.M = cost;
    return out;
  }

  for (std::size_t m = 1; m <= m_max; ++m) {
    const CorrelationModel model = family(m);
    if (model.uses() != m || model.users() != f.users()) {
      throw ValidationError("communication_cost: family returned a model of the wrong size");
    }
    out.terms = bound_terms(spread, model_norms(model, strategy), m, P, phi);
    if (error_probability_bound_raw(out.terms) <= delta) {
      out.M = m;
      return out;
    }
  }
  return out;
}

}  // namespace aircomp
