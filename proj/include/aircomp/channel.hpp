#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "aircomp/linalg.hpp"
#include "aircomp/rng.hpp"

namespace aircomp {

/// Distribution of the independent entries of R. All kinds have zero mean,
/// unit variance and sub-gaussian norm at most 1.
enum class SubgaussianKind { standard_gaussian, rademacher, uniform_unit_variance };

std::string_view to_string(SubgaussianKind kind);
SubgaussianKind parse_subgaussian_kind(std::string_view name);
double draw(SubgaussianKind kind, Rng& rng);

/// Per-real-component fading std conventions: `theory` has unit variance per
/// real component, `experiments` unit variance per complex dimension.
enum class FadingPreset { theory, experiments };

double fading_sigma(FadingPreset preset);
/// Noise power in dB per complex dimension to per-real-component std.
double noise_sigma_from_db(double db);

/// Largest R length (2KM + 2M) for which A and B are held densely.
inline constexpr std::size_t kMaxDenseColumns = 4096;

/// Layout of H: entry for user k, use m, part (0 real, 1 imaginary) sits at
/// (2m + part)·K + k; N is interleaved (N^r(m) at 2m, N^i(m) at 2m + 1).
constexpr std::size_t fading_index(std::size_t K, std::size_t k, std::size_t m, std::size_t part) {
  return (2 * m + part) * K + k;
}

/// Joint law of fading H = A R and noise N = B R.
///
/// The i.i.d. and AR(1) families keep only their parameters and are sampled by
/// recurrence; A and B are materialized on request (up to kMaxDenseColumns).
class CorrelationModel {
 public:
  enum class Structure { iid, temporal_ar, dense };

  Structure structure() const noexcept { return structure_; }
  std::size_t users() const noexcept { return K_; }
  std::size_t uses() const noexcept { return M_; }
  std::size_t fading_length() const noexcept { return 2 * K_ * M_; }
  std::size_t noise_length() const noexcept { return 2 * M_; }
  std::size_t r_length() const noexcept { return fading_length() + noise_length(); }
  SubgaussianKind r_kind() const noexcept { return kind_; }

  /// Parameters of the structured families (zero for dense models).
  double sigma_f() const noexcept { return sigma_f_; }
  double sigma_n() const noexcept { return sigma_n_; }
  double rho() const noexcept { return rho_; }

  Matrix fading_matrix() const;
  Matrix noise_matrix() const;

  /// E Σ_{first ≤ m < last} |N(m)|².
  double expected_noise_energy(std::size_t first_use, std::size_t last_use) const;

  friend CorrelationModel iid_model(std::size_t, std::size_t, double, double, SubgaussianKind);
  friend CorrelationModel temporal_ar_model(std::size_t, std::size_t, double, double, double,
                                            SubgaussianKind);
  friend CorrelationModel dense_model(std::size_t, std::size_t, Matrix, Matrix, SubgaussianKind);
  friend class ChannelSampler;

 private:
  struct Sparse {
    std::vector<std::size_t> row_start;
    std::vector<std::size_t> col;
    std::vector<double> val;

    explicit Sparse(const Matrix& m);
    double row_dot(std::size_t r, std::span<const double> x) const;
    double row_norm2(std::size_t r) const;
  };
  struct DenseFactors {
    Matrix a;
    Matrix b;
    Sparse a_sparse;
    Sparse b_sparse;
  };

  CorrelationModel() = default;

  Structure structure_ = Structure::iid;
  std::size_t K_ = 0;
  std::size_t M_ = 0;
  double sigma_f_ = 0.0;
  double sigma_n_ = 0.0;
  double rho_ = 0.0;
  SubgaussianKind kind_ = SubgaussianKind::standard_gaussian;
  std::shared_ptr<const DenseFactors> dense_;
};

/// A = (σ_F I_{2KM} | 0), B = (0 | σ_N I_{2M}).
CorrelationModel iid_model(std::size_t K, std::size_t M, double sigma_f, double sigma_n,
                           SubgaussianKind kind = SubgaussianKind::standard_gaussian);

/// Stationary AR(1) fading per user and real/imaginary part,
/// H(m) = ρ H(m-1) + √(1-ρ²) R_fresh, scaled by σ_F; noise as in iid_model.
/// Each user draws from its own R coordinates, so the fading is user-uncorrelated.
CorrelationModel temporal_ar_model(std::size_t K, std::size_t M, double rho, double sigma_f,
                                   double sigma_n,
                                   SubgaussianKind kind = SubgaussianKind::standard_gaussian);

/// Arbitrary A (2KM × (2KM+2M)) and B (2M × (2KM+2M)); R length ≤ kMaxDenseColumns.
CorrelationModel dense_model(std::size_t K, std::size_t M, Matrix a, Matrix b,
                             SubgaussianKind kind = SubgaussianKind::standard_gaussian);

struct ChannelRealization {
  std::vector<double> fading;  // H, length 2KM
  std::vector<double> noise;   // N, length 2M
};

/// Produces one realization use by use. The parent stream is split into a
/// fading stream (R coordinates 0..2KM-1 in order) and a noise stream
/// (coordinates 2KM..), so streaming and full sampling see the same R.
class ChannelSampler {
 public:
  ChannelSampler(const CorrelationModel& model, Rng& rng);

  /// Fading real/imaginary parts of all K users and the noise at the next use.
  void next(std::span<double> h_re, std::span<double> h_im, double& n_re, double& n_im);

 private:
  const CorrelationModel& model_;
  Rng fading_rng_;
  Rng noise_rng_;
  std::size_t m_ = 0;
  std::vector<double> state_;  // AR state, one per (part, user)
  std::vector<double> h_full_;
  std::vector<double> n_full_;
};

/// R as seen by ChannelSampler for the same stream state.
std::vector<double> draw_r(const CorrelationModel& model, Rng& rng);

ChannelRealization sample(const CorrelationModel& model, Rng& rng);

/// Y(m) = Σ_k H_k(m) x_k(m) + N(m) for a real K × M transmit matrix.
std::vector<std::complex<double>> apply(const CorrelationModel& model,
                                        const ChannelRealization& realization, const Matrix& x);

/// True iff no column of `a` is used by rows of two different users
/// (sufficient for independence across users).
bool validate_user_uncorrelated(const Matrix& a, std::size_t K, std::size_t M);

/// ‖B‖_F², the expected noise energy over all M uses.
double expected_noise_energy(const CorrelationModel& model);

}  // namespace aircomp
