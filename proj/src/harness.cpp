#include "aircomp/harness.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "aircomp/baseline.hpp"
#include "aircomp/correlation_file.hpp"
#include "aircomp/dfa.hpp"
#include "aircomp/error.hpp"
#include "aircomp/format.hpp"
#include "aircomp/parallel.hpp"

namespace aircomp {

std::string_view to_string(Scheme scheme) { return scheme == Scheme::dfa ? "dfa" : "tdma"; }

CorrelationSpec CorrelationSpec::parse(std::string_view text) {
  CorrelationSpec spec;
  if (text == "iid") return spec;
  if (text.starts_with("ar:")) {
    spec.kind = Kind::ar;
    spec.rho = parse_double_strict(text.substr(3), "AR coefficient");
    if (!(std::abs(spec.rho) < 1.0)) throw ValidationError("AR coefficient must satisfy |rho| < 1");
    return spec;
  }
  if (text.starts_with("file:") && text.size() > 5) {
    spec.kind = Kind::file;
    spec.path = std::string(text.substr(5));
    return spec;
  }
  throw ValidationError("unknown correlation '" + std::string(text) +
                        "' (expected iid, ar:<rho> or file:<path>)");
}

CorrelationModel build_model(const CorrelationSpec& spec, std::size_t K, std::size_t M,
                             double sigma_f, double sigma_n, SubgaussianKind kind) {
  switch (spec.kind) {
    case CorrelationSpec::Kind::iid:
      return iid_model(K, M, sigma_f, sigma_n, kind);
    case CorrelationSpec::Kind::ar:
      return temporal_ar_model(K, M, spec.rho, sigma_f, sigma_n, kind);
    case CorrelationSpec::Kind::file: {
      auto model = read_correlation_model(spec.path);
      if (model.users() != K || model.uses() != M) {
        throw ValidationError(spec.path.string() + ": model has K=" +
                              std::to_string(model.users()) + " M=" +
                              std::to_string(model.uses()) + " but the grid asks for K=" +
                              std::to_string(K) + " M=" + std::to_string(M));
      }
      return model;
    }
  }
  throw ValidationError("bad correlation spec");
}

void SweepConfig::validate() const {
  if (runs == 0) throw ValidationError("runs must be at least 1");
  if (users.empty() || chuses.empty() || noise_db.empty()) {
    throw ValidationError("users, chuses and noise-db grids must be nonempty");
  }
  if (schemes.empty()) throw ValidationError("at least one scheme is required");
  for (auto k : users) {
    if (k == 0) throw ValidationError("user counts must be positive");
  }
  for (auto m : chuses) {
    if (m == 0) throw ValidationError("channel-use counts must be positive");
  }
  for (double db : noise_db) {
    if (!std::isfinite(db)) throw ValidationError("noise dB values must be finite");
  }
  if (!(P > 0.0) || !std::isfinite(P)) throw ValidationError("power must be positive");
  for (auto k : users) parse_function(function, k);
}

std::vector<double> generate_messages_given_mu(std::size_t K, double mu, Rng& rng) {
  std::vector<double> s(K);
  for (auto& v : s) {
    // Weight 1-μ on U[0,μ] gives (1-μ)μ/2 + μ(1+μ)/2 = μ.
    const bool low = rng.uniform01() < 1.0 - mu;
    v = low ? rng.uniform(0.0, mu) : rng.uniform(mu, 1.0);
  }
  return s;
}

std::vector<double> generate_messages(std::size_t K, Rng& rng) {
  if (K == 0) throw ValidationError("generate_messages: K must be positive");
  const double mu = rng.uniform01();
  return generate_messages_given_mu(K, mu, rng);
}

std::uint64_t stream_seed(std::uint64_t root_seed, std::size_t K, std::size_t M, double noise_db,
                          std::size_t run, StreamRole role) {
  std::uint64_t s = derive_seed(root_seed, K);
  s = derive_seed(s, M);
  s = derive_seed(s, std::bit_cast<std::uint64_t>(noise_db == 0.0 ? 0.0 : noise_db));
  s = derive_seed(s, run);
  return derive_seed(s, static_cast<std::uint64_t>(role));
}

namespace {

struct RunErrors {
  double dfa = 0.0;
  double tdma = 0.0;
  bool tdma_infeasible = false;
};

SweepRow summarize(const SweepConfig& cfg, const FmonFunction& f, Scheme scheme, std::size_t K,
                   std::size_t M, double db, const std::vector<RunErrors>& errors) {
  SweepRow row;
  row.function = f.name();
  row.scheme = scheme;
  row.users = K;
  row.chuses = M;
  row.noise_db = db;
  row.runs = errors.size();
  row.seed = cfg.root_seed;
  double sum = 0.0;
  std::size_t infeasible = 0;
  for (const auto& e : errors) {
    sum += scheme == Scheme::dfa ? e.dfa : e.tdma;
    if (scheme == Scheme::tdma && e.tdma_infeasible) ++infeasible;
  }
  const double n = static_cast<double>(errors.size());
  row.mse = sum / n;
  if (errors.size() > 1) {
    double ss = 0.0;
    for (const auto& e : errors) {
      const double d = (scheme == Scheme::dfa ? e.dfa : e.tdma) - row.mse;
      ss += d * d;
    }
    row.mse_stderr = std::sqrt(ss / (n - 1.0) / n);
  }
  row.infeasible_fraction = static_cast<double>(infeasible) / n;
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const bool want_dfa = std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::dfa) !=
                        cfg.schemes.end();
  const bool want_tdma = std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::tdma) !=
                         cfg.schemes.end();
  const double sigma_f = fading_sigma(cfg.fading);
  const DfaConfig dfa_cfg{cfg.P, sigma_f, cfg.clamp};

  std::vector<std::size_t> users = cfg.users;
  std::vector<std::size_t> chuses = cfg.chuses;
  std::vector<double> noise = cfg.noise_db;
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  std::sort(chuses.begin(), chuses.end());
  chuses.erase(std::unique(chuses.begin(), chuses.end()), chuses.end());
  std::sort(noise.begin(), noise.end());
  noise.erase(std::unique(noise.begin(), noise.end()), noise.end());

  SweepResult result;
  std::vector<SweepRow> dfa_rows;
  std::vector<SweepRow> tdma_rows;
  for (std::size_t K : users) {
    const FmonFunction f = parse_function(cfg.function, K);
    const double penalty = tdma_infeasible_error(f);
    for (std::size_t M : chuses) {
      for (double db : noise) {
        const CorrelationModel model =
            build_model(cfg.correlation, K, M, sigma_f, noise_sigma_from_db(db), cfg.r_kind);
        const auto errors = parallel_map(cfg.runs, [&](std::size_t run) {
          const auto seed = [&](StreamRole role) {
            return stream_seed(cfg.root_seed, K, M, db, run, role);
          };
          Rng msg_rng(seed(StreamRole::messages));
          std::vector<double> s(K);
          if (cfg.iid_messages) {
            for (auto& v : s) v = msg_rng.uniform01();
          } else {
            s = generate_messages(K, msg_rng);
          }
          const double truth = f.evaluate(s);
          RunErrors e;
          if (want_dfa) {
            Rng signs(seed(StreamRole::dfa_signs));
            Rng channel(seed(StreamRole::dfa_channel));
            const double d = run_dfa_trace(f, model, s, dfa_cfg, signs, channel).estimate - truth;
            e.dfa = d * d;
          }
          if (want_tdma) {
            Rng signs(seed(StreamRole::tdma_signs));
            Rng channel(seed(StreamRole::tdma_channel));
            const auto t = run_tdma_trace(f, model, s, dfa_cfg, signs, channel);
            e.tdma_infeasible = t.infeasible;
            const double d = t.infeasible ? penalty : t.estimate - truth;
            e.tdma = d * d;
          }
          return e;
        });
        if (want_dfa) dfa_rows.push_back(summarize(cfg, f, Scheme::dfa, K, M, db, errors));
        if (want_tdma) tdma_rows.push_back(summarize(cfg, f, Scheme::tdma, K, M, db, errors));
      }
    }
  }
  result.rows = std::move(dfa_rows);
  result.rows.insert(result.rows.end(), tdma_rows.begin(), tdma_rows.end());
  return result;
}

void emit_csv(const SweepResult& result, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : result.rows) {
    out << r.function << ',' << to_string(r.scheme) << ',' << r.users << ',' << r.chuses << ','
        << format_double(r.noise_db) << ',' << r.runs << ',' << format_double(r.mse) << ','
        << format_double(r.mse_stderr) << ',' << format_double(r.infeasible_fraction) << ','
        << r.seed << '\n';
  }
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  emit_csv(result, out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

template <class T>
T parse_integer(std::string_view text, const std::string& source, std::size_t line) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(source, line, "invalid integer '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

SweepResult parse_sweep_csv(std::istream& in, const std::string& source) {
  SweepResult result;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    throw ParseError(source, 1, "missing or unexpected CSV header");
  }
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (fields.size() != 10) throw ParseError(source, line_no, "expected 10 fields");
    SweepRow r;
    try {
      r.function = std::string(fields[0]);
      if (fields[1] == "dfa") {
        r.scheme = Scheme::dfa;
      } else if (fields[1] == "tdma") {
        r.scheme = Scheme::tdma;
      } else {
        throw ValidationError("unknown scheme '" + std::string(fields[1]) + "'");
      }
      r.users = parse_integer<std::size_t>(fields[2], source, line_no);
      r.chuses = parse_integer<std::size_t>(fields[3], source, line_no);
      r.noise_db = parse_double_strict(fields[4], "noise_db");
      r.runs = parse_integer<std::size_t>(fields[5], source, line_no);
      r.mse = parse_double_strict(fields[6], "mse");
      r.mse_stderr = parse_double_strict(fields[7], "mse_stderr");
      r.infeasible_fraction = parse_double_strict(fields[8], "infeasible_frac");
      r.seed = parse_integer<std::uint64_t>(fields[9], source, line_no);
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ParseError(source, line_no, e.what());
    }
    result.rows.push_back(std::move(r));
  }
  return result;
}

void emit_bound_csv(std::ostream& out, std::size_t K, double eps, double delta_or_prob,
                    const BoundTerms& terms) {
  out << kBoundCsvHeader << '\n';
  out << K << ',' << terms.M << ',' << format_double(eps) << ',' << format_double(delta_or_prob)
      << ',' << format_double(terms.eta) << ',' << format_double(terms.l_term) << ','
      << format_double(terms.f_term) << ',' << format_double(terms.d_term) << ','
      << format_double(terms.phi_inv_eps) << ','
      << format_double(error_probability_bound_raw(terms)) << ','
      << format_double(error_probability_bound(terms)) << '\n';
}

}  // namespace aircomp
