#include "aircomp/channel.hpp"

#include <cmath>
#include <string>

#include "aircomp/error.hpp"

namespace aircomp {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

void require_dims(std::size_t K, std::size_t M) {
  if (K == 0 || M == 0) throw ValidationError("model needs K >= 1 and M >= 1");
}

void require_dense_size(std::size_t K, std::size_t M) {
  const std::size_t n = 2 * K * M + 2 * M;
  if (n > kMaxDenseColumns) {
    throw ValidationError("dense model too large: 2KM+2M = " + std::to_string(n) + " exceeds " +
                          std::to_string(kMaxDenseColumns));
  }
}

}  // namespace

std::string_view to_string(SubgaussianKind kind) {
  switch (kind) {
    case SubgaussianKind::standard_gaussian:
      return "standard_gaussian";
    case SubgaussianKind::rademacher:
      return "rademacher";
    case SubgaussianKind::uniform_unit_variance:
      return "uniform_unit_variance";
  }
  return "standard_gaussian";
}

SubgaussianKind parse_subgaussian_kind(std::string_view name) {
  if (name == "standard_gaussian" || name == "gaussian") return SubgaussianKind::standard_gaussian;
  if (name == "rademacher") return SubgaussianKind::rademacher;
  if (name == "uniform_unit_variance" || name == "uniform") {
    return SubgaussianKind::uniform_unit_variance;
  }
  throw ValidationError("unknown sub-gaussian kind '" + std::string(name) + "'");
}

double draw(SubgaussianKind kind, Rng& rng) {
  switch (kind) {
    case SubgaussianKind::standard_gaussian:
      return rng.gaussian();
    case SubgaussianKind::rademacher:
      return rng.sign();
    case SubgaussianKind::uniform_unit_variance:
      return rng.uniform(-kSqrt3, kSqrt3);
  }
  return 0.0;
}

double fading_sigma(FadingPreset preset) {
  return preset == FadingPreset::theory ? 1.0 : 1.0 / std::sqrt(2.0);
}

double noise_sigma_from_db(double db) {
  if (!std::isfinite(db)) throw ValidationError("noise dB must be finite");
  return std::sqrt(std::pow(10.0, db / 10.0) / 2.0);
}

// --- sparse row cache for dense factors -------------------------------------

CorrelationModel::Sparse::Sparse(const Matrix& m) {
  row_start.reserve(m.rows() + 1);
  row_start.push_back(0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] != 0.0) {
        col.push_back(c);
        val.push_back(row[c]);
      }
    }
    row_start.push_back(col.size());
  }
}

double CorrelationModel::Sparse::row_dot(std::size_t r, std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t i = row_start[r]; i < row_start[r + 1]; ++i) acc += val[i] * x[col[i]];
  return acc;
}

double CorrelationModel::Sparse::row_norm2(std::size_t r) const {
  double acc = 0.0;
  for (std::size_t i = row_start[r]; i < row_start[r + 1]; ++i) acc += val[i] * val[i];
  return acc;
}

// --- constructors ------------------------------------------------------------

CorrelationModel iid_model(std::size_t K, std::size_t M, double sigma_f, double sigma_n,
                           SubgaussianKind kind) {
  require_dims(K, M);
  if (!(sigma_f >= 0.0) || !(sigma_n >= 0.0)) {
    throw ValidationError("iid_model: sigma_f and sigma_n must be nonnegative");
  }
  CorrelationModel m;
  m.structure_ = CorrelationModel::Structure::iid;
  m.K_ = K;
  m.M_ = M;
  m.sigma_f_ = sigma_f;
  m.sigma_n_ = sigma_n;
  m.kind_ = kind;
  return m;
}

CorrelationModel temporal_ar_model(std::size_t K, std::size_t M, double rho, double sigma_f,
                                   double sigma_n, SubgaussianKind kind) {
  require_dims(K, M);
  if (!(std::abs(rho) < 1.0)) throw ValidationError("temporal_ar_model: |rho| must be < 1");
  if (!(sigma_f >= 0.0) || !(sigma_n >= 0.0)) {
    throw ValidationError("temporal_ar_model: sigma_f and sigma_n must be nonnegative");
  }
  CorrelationModel m;
  m.structure_ = CorrelationModel::Structure::temporal_ar;
  m.K_ = K;
  m.M_ = M;
  m.rho_ = rho;
  m.sigma_f_ = sigma_f;
  m.sigma_n_ = sigma_n;
  m.kind_ = kind;
  return m;
}

CorrelationModel dense_model(std::size_t K, std::size_t M, Matrix a, Matrix b,
                             SubgaussianKind kind) {
  require_dims(K, M);
  require_dense_size(K, M);
  const std::size_t n = 2 * K * M + 2 * M;
  if (a.rows() != 2 * K * M || a.cols() != n) {
    throw ValidationError("dense_model: A must be " + std::to_string(2 * K * M) + "x" +
                          std::to_string(n) + ", got " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()));
  }
  if (b.rows() != 2 * M || b.cols() != n) {
    throw ValidationError("dense_model: B must be " + std::to_string(2 * M) + "x" +
                          std::to_string(n) + ", got " + std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()));
  }
  for (double x : a.entries()) {
    if (!std::isfinite(x)) throw ValidationError("dense_model: non-finite entry in A");
  }
  for (double x : b.entries()) {
    if (!std::isfinite(x)) throw ValidationError("dense_model: non-finite entry in B");
  }
  CorrelationModel m;
  m.structure_ = CorrelationModel::Structure::dense;
  m.K_ = K;
  m.M_ = M;
  m.kind_ = kind;
  CorrelationModel::Sparse as(a);
  CorrelationModel::Sparse bs(b);
  m.dense_ = std::make_shared<const CorrelationModel::DenseFactors>(
      CorrelationModel::DenseFactors{std::move(a), std::move(b), std::move(as), std::move(bs)});
  return m;
}

// --- materialization ---------------------------------------------------------

Matrix CorrelationModel::fading_matrix() const {
  if (dense_) return dense_->a;
  require_dense_size(K_, M_);
  Matrix a(fading_length(), r_length());
  if (structure_ == Structure::iid) {
    for (std::size_t i = 0; i < fading_length(); ++i) a(i, i) = sigma_f_;
    return a;
  }
  const double innovation = std::sqrt(1.0 - rho_ * rho_);
  for (std::size_t part = 0; part < 2; ++part) {
    for (std::size_t k = 0; k < K_; ++k) {
      for (std::size_t m = 0; m < M_; ++m) {
        const std::size_t row = fading_index(K_, k, m, part);
        a(row, fading_index(K_, k, 0, part)) = sigma_f_ * std::pow(rho_, static_cast<double>(m));
        for (std::size_t l = 1; l <= m; ++l) {
          a(row, fading_index(K_, k, l, part)) =
              sigma_f_ * innovation * std::pow(rho_, static_cast<double>(m - l));
        }
      }
    }
  }
  return a;
}

Matrix CorrelationModel::noise_matrix() const {
  if (dense_) return dense_->b;
  require_dense_size(K_, M_);
  Matrix b(noise_length(), r_length());
  for (std::size_t i = 0; i < noise_length(); ++i) b(i, fading_length() + i) = sigma_n_;
  return b;
}

double CorrelationModel::expected_noise_energy(std::size_t first_use, std::size_t last_use) const {
  if (first_use > last_use || last_use > M_) {
    throw ValidationError("expected_noise_energy: bad use range");
  }
  if (!dense_) {
    return 2.0 * static_cast<double>(last_use - first_use) * sigma_n_ * sigma_n_;
  }
  double acc = 0.0;
  for (std::size_t r = 2 * first_use; r < 2 * last_use; ++r) acc += dense_->b_sparse.row_norm2(r);
  return acc;
}

double expected_noise_energy(const CorrelationModel& model) {
  return model.expected_noise_energy(0, model.uses());
}

// --- sampling ----------------------------------------------------------------

ChannelSampler::ChannelSampler(const CorrelationModel& model, Rng& rng)
    : model_(model), fading_rng_(rng.split()), noise_rng_(rng.split()) {
  if (model.structure() == CorrelationModel::Structure::temporal_ar) {
    state_.assign(2 * model.users(), 0.0);
  } else if (model.structure() == CorrelationModel::Structure::dense) {
    std::vector<double> r(model.r_length());
    for (std::size_t i = 0; i < model.fading_length(); ++i) r[i] = draw(model.r_kind(), fading_rng_);
    for (std::size_t i = model.fading_length(); i < r.size(); ++i) {
      r[i] = draw(model.r_kind(), noise_rng_);
    }
    const auto& f = *model.dense_;
    h_full_.resize(model.fading_length());
    n_full_.resize(model.noise_length());
    for (std::size_t i = 0; i < h_full_.size(); ++i) h_full_[i] = f.a_sparse.row_dot(i, r);
    for (std::size_t i = 0; i < n_full_.size(); ++i) n_full_[i] = f.b_sparse.row_dot(i, r);
  }
}

void ChannelSampler::next(std::span<double> h_re, std::span<double> h_im, double& n_re,
                          double& n_im) {
  const std::size_t K = model_.users();
  if (m_ >= model_.uses()) throw ValidationError("ChannelSampler: all uses consumed");
  if (h_re.size() != K || h_im.size() != K) throw ValidationError("ChannelSampler: bad span size");
  const SubgaussianKind kind = model_.r_kind();

  switch (model_.structure()) {
    case CorrelationModel::Structure::iid: {
      const double sf = model_.sigma_f();
      for (std::size_t k = 0; k < K; ++k) h_re[k] = sf * draw(kind, fading_rng_);
      for (std::size_t k = 0; k < K; ++k) h_im[k] = sf * draw(kind, fading_rng_);
      n_re = model_.sigma_n() * draw(kind, noise_rng_);
      n_im = model_.sigma_n() * draw(kind, noise_rng_);
      break;
    }
    case CorrelationModel::Structure::temporal_ar: {
      const double sf = model_.sigma_f();
      const double rho = model_.rho();
      const double innovation = std::sqrt(1.0 - rho * rho);
      for (std::size_t part = 0; part < 2; ++part) {
        auto out = part == 0 ? h_re : h_im;
        for (std::size_t k = 0; k < K; ++k) {
          double& s = state_[part * K + k];
          const double r = draw(kind, fading_rng_);
          s = m_ == 0 ? r : rho * s + innovation * r;
          out[k] = sf * s;
        }
      }
      n_re = model_.sigma_n() * draw(kind, noise_rng_);
      n_im = model_.sigma_n() * draw(kind, noise_rng_);
      break;
    }
    case CorrelationModel::Structure::dense: {
      for (std::size_t k = 0; k < K; ++k) {
        h_re[k] = h_full_[fading_index(K, k, m_, 0)];
        h_im[k] = h_full_[fading_index(K, k, m_, 1)];
      }
      n_re = n_full_[2 * m_];
      n_im = n_full_[2 * m_ + 1];
      break;
    }
  }
  ++m_;
}

std::vector<double> draw_r(const CorrelationModel& model, Rng& rng) {
  Rng fading_rng = rng.split();
  Rng noise_rng = rng.split();
  std::vector<double> r(model.r_length());
  for (std::size_t i = 0; i < model.fading_length(); ++i) r[i] = draw(model.r_kind(), fading_rng);
  for (std::size_t i = model.fading_length(); i < r.size(); ++i) r[i] = draw(model.r_kind(), noise_rng);
  return r;
}

ChannelRealization sample(const CorrelationModel& model, Rng& rng) {
  const std::size_t K = model.users();
  ChannelRealization out{std::vector<double>(model.fading_length()),
                         std::vector<double>(model.noise_length())};
  ChannelSampler sampler(model, rng);
  std::vector<double> re(K);
  std::vector<double> im(K);
  for (std::size_t m = 0; m < model.uses(); ++m) {
    sampler.next(re, im, out.noise[2 * m], out.noise[2 * m + 1]);
    for (std::size_t k = 0; k < K; ++k) {
      out.fading[fading_index(K, k, m, 0)] = re[k];
      out.fading[fading_index(K, k, m, 1)] = im[k];
    }
  }
  return out;
}

std::vector<std::complex<double>> apply(const CorrelationModel& model,
                                        const ChannelRealization& realization, const Matrix& x) {
  const std::size_t K = model.users();
  const std::size_t M = model.uses();
  if (x.rows() != K || x.cols() != M) {
    throw ValidationError("apply: transmit matrix must be " + std::to_string(K) + "x" +
                          std::to_string(M));
  }
  if (realization.fading.size() != model.fading_length() ||
      realization.noise.size() != model.noise_length()) {
    throw ValidationError("apply: realization does not match model dimensions");
  }
  std::vector<std::complex<double>> y(M);
  for (std::size_t m = 0; m < M; ++m) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double xk = x(k, m);
      re += realization.fading[fading_index(K, k, m, 0)] * xk;
      im += realization.fading[fading_index(K, k, m, 1)] * xk;
    }
    re += realization.noise[2 * m];
    im += realization.noise[2 * m + 1];
    y[m] = {re, im};
  }
  return y;
}

bool validate_user_uncorrelated(const Matrix& a, std::size_t K, std::size_t M) {
  if (a.rows() != 2 * K * M) {
    throw ValidationError("validate_user_uncorrelated: expected " + std::to_string(2 * K * M) +
                          " rows, got " + std::to_string(a.rows()));
  }
  constexpr std::size_t kUnowned = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(a.cols(), kUnowned);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const std::size_t user = r % K;
    const auto row = a.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] == 0.0) continue;
      if (owner[c] == kUnowned) {
        owner[c] = user;
      } else if (owner[c] != user) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace aircomp
