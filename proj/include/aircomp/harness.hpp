#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aircomp/bounds.hpp"
#include "aircomp/channel.hpp"
#include "aircomp/functions.hpp"
#include "aircomp/rng.hpp"

namespace aircomp {

enum class Scheme { dfa, tdma };

std::string_view to_string(Scheme scheme);

/// `iid`, `ar:<rho>` or `file:<path>`.
struct CorrelationSpec {
  enum class Kind { iid, ar, file };
  Kind kind = Kind::iid;
  double rho = 0.0;
  std::filesystem::path path;

  static CorrelationSpec parse(std::string_view text);
};

/// Correlation model for one grid point; the file model must match (K, M).
CorrelationModel build_model(const CorrelationSpec& spec, std::size_t K, std::size_t M,
                             double sigma_f, double sigma_n,
                             SubgaussianKind kind = SubgaussianKind::standard_gaussian);

struct SweepConfig {
  std::string function = "mean";
  std::vector<Scheme> schemes = {Scheme::dfa, Scheme::tdma};
  std::vector<std::size_t> users;
  std::vector<std::size_t> chuses;
  std::vector<double> noise_db;
  std::size_t runs = 500;
  std::uint64_t root_seed = 1;
  double P = 1.0;
  FadingPreset fading = FadingPreset::experiments;
  CorrelationSpec correlation;
  bool clamp = true;
  SubgaussianKind r_kind = SubgaussianKind::standard_gaussian;
  /// Draw messages i.i.d. uniform on [0,1] instead of the common-μ mixture.
  bool iid_messages = false;

  void validate() const;
};

struct SweepRow {
  std::string function;
  Scheme scheme = Scheme::dfa;
  std::size_t users = 0;
  std::size_t chuses = 0;
  double noise_db = 0.0;
  std::size_t runs = 0;
  double mse = 0.0;
  double mse_stderr = 0.0;
  double infeasible_fraction = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (function, scheme, users, chuses, noise_db)
};

/// Draws μ ~ U[0,1] shared by all users, then each message from U[0,μ] with
/// probability 1-μ and from U[μ,1] otherwise, so that E[s_k | μ] = μ.
std::vector<double> generate_messages(std::size_t K, Rng& rng);
/// Same mixture with μ given.
std::vector<double> generate_messages_given_mu(std::size_t K, double mu, Rng& rng);

/// Random streams of one Monte Carlo run. Seeds depend on the root seed, the
/// grid point's values (not its position) and the run index only.
enum class StreamRole : std::uint64_t {
  messages = 0,
  dfa_signs = 1,
  dfa_channel = 2,
  tdma_signs = 3,
  tdma_channel = 4,
};

std::uint64_t stream_seed(std::uint64_t root_seed, std::size_t K, std::size_t M, double noise_db,
                          std::size_t run, StreamRole role);

SweepResult run_sweep(const SweepConfig& cfg);

inline constexpr std::string_view kSweepCsvHeader =
    "function,scheme,users,chuses,noise_db,runs,mse,mse_stderr,infeasible_frac,seed";

void emit_csv(const SweepResult& result, std::ostream& out);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);
SweepResult parse_sweep_csv(std::istream& in, const std::string& source = "<csv>");

inline constexpr std::string_view kBoundCsvHeader =
    "K,M,eps,delta_or_prob,eta,L,F,D,phi_inv_eps,bound_raw,bound_capped";

/// One-record CSV for the `bound` and `cost` commands.
void emit_bound_csv(std::ostream& out, std::size_t K, double eps, double delta_or_prob,
                    const BoundTerms& terms);

}  // namespace aircomp
