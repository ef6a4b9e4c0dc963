#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "aircomp/bounds.hpp"
#include "aircomp/channel.hpp"
#include "aircomp/error.hpp"
#include "aircomp/functions.hpp"
#include "aircomp/harness.hpp"

namespace aircomp::cli {

namespace {

FadingPreset parse_fading(const std::string& s) {
  if (s == "theory") return FadingPreset::theory;
  if (s == "experiments") return FadingPreset::experiments;
  throw ValidationError("unknown fading preset '" + s + "'");
}

/// Writes through `emit` to `path`, or to `out` when path is "-".
template <class Emit>
void write_output(const std::string& path, std::ostream& out, Emit&& emit) {
  if (path == "-") {
    emit(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  emit(file);
  file.flush();
  if (!file) throw IoError("write failed for " + path);
}

struct BoundOptions {
  std::string function = "mean";
  std::size_t users = 1;
  std::size_t chuses = 1;
  double eps = 0.1;
  double delta = 0.1;
  double power = 1.0;
  double noise_db = 0.0;
  std::string fading = "theory";
  std::string correlation = "iid";
  std::string ai = "same";
  bool lipschitz = false;
  std::size_t max_chuses = 100000;
  std::string out = "-";
};

void add_common_bound_options(CLI::App& cmd, BoundOptions& o) {
  cmd.add_option("--function", o.function, "mean | norm | wsum:<w1,...>")->capture_default_str();
  cmd.add_option("--users", o.users, "number of users K")->required();
  cmd.add_option("--eps", o.eps, "accuracy epsilon")->required();
  cmd.add_option("--power", o.power, "peak power P")->capture_default_str();
  cmd.add_option("--noise-db", o.noise_db, "noise power in dB per complex dimension")
      ->capture_default_str();
  cmd.add_option("--fading", o.fading, "theory | experiments")->capture_default_str();
  cmd.add_option("--ai", o.ai, "user-uncorrelated approximation: same | zero | mask")
      ->capture_default_str();
  cmd.add_flag("--lipschitz", o.lipschitz, "use eps/C in place of the majorant inverse");
  cmd.add_option("--out", o.out, "output CSV path, '-' for stdout")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Over-the-air function computation simulator and bound calculator", "aircomp"};
  app.require_subcommand(1);

  // simulate
  SweepConfig sweep;
  std::string sim_function = "mean";
  std::string scheme = "both";
  std::string sim_fading = "experiments";
  std::string sim_corr = "iid";
  bool no_clamp = false;
  std::string sim_out = "-";
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo MSE sweep");
  simulate->add_option("--function", sim_function, "mean | norm | wsum:<w1,...>")
      ->capture_default_str();
  simulate->add_option("--scheme", scheme, "dfa | tdma | both")->capture_default_str();
  simulate->add_option("--users", sweep.users, "comma-separated user counts")
      ->required()
      ->delimiter(',');
  simulate->add_option("--chuses", sweep.chuses, "comma-separated channel-use counts")
      ->required()
      ->delimiter(',');
  simulate->add_option("--noise-db", sweep.noise_db, "comma-separated noise powers in dB")
      ->required()
      ->delimiter(',');
  simulate->add_option("--runs", sweep.runs, "runs per grid point")->capture_default_str();
  simulate->add_option("--seed", sweep.root_seed, "root seed")->capture_default_str();
  simulate->add_option("--power", sweep.P, "peak power P")->capture_default_str();
  simulate->add_option("--fading", sim_fading, "theory | experiments")->capture_default_str();
  simulate->add_option("--correlation", sim_corr, "iid | ar:<rho> | file:<path>")
      ->capture_default_str();
  simulate->add_flag("--no-clamp", no_clamp, "do not clip decoded values to the attainable range");
  simulate->add_flag("--iid-messages", sweep.iid_messages)->group("");
  simulate->add_option("--out", sim_out, "output CSV path, '-' for stdout")->capture_default_str();

  // bound
  BoundOptions bound_opt;
  auto* bound = app.add_subcommand("bound", "Evaluate the error-probability bound");
  add_common_bound_options(*bound, bound_opt);
  bound->add_option("--chuses", bound_opt.chuses, "channel uses M")->required();
  bound->add_option("--correlation", bound_opt.correlation, "iid | ar:<rho> | file:<path>")
      ->capture_default_str();

  // cost
  BoundOptions cost_opt;
  auto* cost = app.add_subcommand("cost", "Channel uses needed for accuracy eps at confidence delta");
  add_common_bound_options(*cost, cost_opt);
  cost->add_option("--delta", cost_opt.delta, "confidence delta in (0,1)")->required();
  cost->add_option("--correlation", cost_opt.correlation, "iid | ar:<rho>")->capture_default_str();
  cost->add_option("--max-chuses", cost_opt.max_chuses, "search limit for M")
      ->capture_default_str();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("aircomp");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "aircomp: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (simulate->parsed()) {
      sweep.function = sim_function;
      if (scheme == "dfa") {
        sweep.schemes = {Scheme::dfa};
      } else if (scheme == "tdma") {
        sweep.schemes = {Scheme::tdma};
      } else if (scheme == "both") {
        sweep.schemes = {Scheme::dfa, Scheme::tdma};
      } else {
        throw ValidationError("unknown scheme '" + scheme + "'");
      }
      sweep.fading = parse_fading(sim_fading);
      sweep.correlation = CorrelationSpec::parse(sim_corr);
      sweep.clamp = !no_clamp;
      const SweepResult result = run_sweep(sweep);
      write_output(sim_out, out, [&](std::ostream& os) { emit_csv(result, os); });
      return kOk;
    }

    if (bound->parsed()) {
      const auto& o = bound_opt;
      const FmonFunction f = parse_function(o.function, o.users);
      const auto corr = CorrelationSpec::parse(o.correlation);
      const CorrelationModel model =
          build_model(corr, o.users, o.chuses, fading_sigma(parse_fading(o.fading)),
                      noise_sigma_from_db(o.noise_db));
      const BoundTerms terms =
          bound_terms(f, model, parse_ai_strategy(o.ai), o.power, o.eps, o.lipschitz);
      write_output(o.out, out, [&](std::ostream& os) {
        emit_bound_csv(os, o.users, o.eps, error_probability_bound(terms), terms);
      });
      return kOk;
    }

    if (cost->parsed()) {
      const auto& o = cost_opt;
      const FmonFunction f = parse_function(o.function, o.users);
      const auto corr = CorrelationSpec::parse(o.correlation);
      if (corr.kind == CorrelationSpec::Kind::file) {
        throw ValidationError("cost needs a model family in M; file models fix M");
      }
      const double sf = fading_sigma(parse_fading(o.fading));
      const double sn = noise_sigma_from_db(o.noise_db);
      const ModelFamily family = [&](std::size_t m) {
        return build_model(corr, o.users, m, sf, sn);
      };
      const CostResult r = communication_cost(f, o.eps, o.delta, family,
                                              parse_ai_strategy(o.ai), o.power, o.max_chuses,
                                              o.lipschitz);
      if (!r.M) {
        err << "aircomp: no M <= " << r.m_max << " reaches delta = " << o.delta << '\n';
        return kInfeasible;
      }
      write_output(o.out, out,
                   [&](std::ostream& os) { emit_bound_csv(os, o.users, o.eps, o.delta, r.terms); });
      return kOk;
    }
  } catch (const IoError& e) {
    err << "aircomp: " << e.what() << '\n';
    return kIo;
  } catch (const ValidationError& e) {
    err << "aircomp: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "aircomp: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace aircomp::cli
