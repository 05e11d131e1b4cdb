// geqlab: construct canonical geodesically equivalent metric pairs, integrate
// their flows, and verify the invariants that come with them.

#include "geqlab/config.hpp"
#include "geqlab/flow.hpp"
#include "geqlab/integrals.hpp"
#include "geqlab/lyapunov.hpp"
#include "geqlab/singular.hpp"
#include "geqlab/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using geq::ChartModel;
using geq::Vector;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerdict = 2;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write to " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

Vector parse_vector(const std::string& text, int expected, const std::string& flag) {
  std::vector<double> vals;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) vals.push_back(std::stod(item));
  if (expected > 0 && static_cast<int>(vals.size()) != expected)
    throw std::runtime_error(flag + " expects " + std::to_string(expected) + " components");
  return Eigen::Map<Vector>(vals.data(), static_cast<long>(vals.size()));
}

struct ModelArgs {
  std::string config_path;
  geq::RunConfig run;
  ChartModel load() {
    run = geq::parse_config_file(config_path);
    return geq::build_model(run.model);
  }
};

int cmd_lc_gen(ModelArgs& margs, const std::string& out_path) {
  margs.load();  // validates profiles, ranges and positivity
  write_text(out_path, geq::render_config(margs.run.model));
  return kExitOk;
}

int cmd_verify(ModelArgs& margs, std::uint64_t seed, const std::string& depth,
               const std::string& out_path) {
  const ChartModel model = margs.load();
  const geq::VerificationReport report =
      geq::run_battery(model, seed, depth == "quick" ? geq::Depth::quick : geq::Depth::full);
  std::cout << report.summary();
  if (!out_path.empty()) write_json(out_path, geq::to_json(report));
  return report.overall ? kExitOk : kExitVerdict;
}

int cmd_integrate(ModelArgs& margs, std::uint64_t seed, long steps, double h, int stride,
                  const std::string& x0_text, const std::string& p0_text,
                  const std::string& xi0_text, const std::string& out_path) {
  if (steps < 0) throw CLI::ValidationError("--steps", "must be >= 0");
  if (!(h > 0.0)) throw CLI::ValidationError("--step-size", "must be > 0");
  const ChartModel model = margs.load();
  const int n = model.dim();

  geq::PhaseState s0;
  if (!x0_text.empty()) {
    s0.x = parse_vector(x0_text, n, "--x0");
    if (!p0_text.empty() && !xi0_text.empty())
      throw CLI::ValidationError("--p0/--xi0", "give momenta or velocities, not both");
    if (!p0_text.empty())
      s0.p = parse_vector(p0_text, n, "--p0");
    else if (!xi0_text.empty())
      s0 = geq::state_from_velocity(model, s0.x, parse_vector(xi0_text, n, "--xi0"));
    else
      throw CLI::ValidationError("--x0", "also needs --p0 or --xi0");
  } else {
    geq::Rng rng(seed);
    s0 = geq::random_unit_speed_state(model, rng);
  }

  geq::IntegratorConfig config;
  config.h = h;
  config.steps = steps;
  config.record_stride = stride;

  std::vector<geq::Observable> record;
  record.push_back(geq::hamiltonian_observable(model));
  record.back().name = "H";
  const Vector t_list = geq::chebyshev_nodes(model, n);
  for (int j = 0; j < n; ++j) {
    record.push_back(geq::integral_observable(model, t_list[j]));
    record.back().name = "I_" + std::to_string(j + 1);
  }

  const geq::Trajectory traj = geq::integrate(model, s0, config, record);
  write_text(out_path, traj.to_csv());
  if (!traj.completed) {
    std::cerr << "integration aborted: " << traj.error << "\n";
    return kExitVerdict;
  }
  return kExitOk;
}

int cmd_scan_singular(ModelArgs& margs, std::uint64_t seed, int samples, double tol,
                      const std::string& out_path) {
  if (samples < 1) throw CLI::ValidationError("--samples", "must be >= 1");
  const ChartModel model = margs.load();
  const int n = model.dim();
  geq::Rng rng(seed);

  std::vector<geq::PhaseState> states;
  for (int s = 0; s < samples; ++s) states.push_back(geq::random_unit_speed_state(model, rng));

  // constructed candidates: per axis, drive x_i to critical points of the
  // profile (sign changes of lambda_i' on a fine grid) and zero out p_i
  if (model.is_lc()) {
    constexpr int kGrid = 2048;
    for (int i = 0; i < n; ++i) {
      const auto& prof = model.lc().profiles[i];
      double prev_x = model.lower()[i];
      double prev_s = prof.slope(prev_x);
      for (int k = 1; k <= kGrid; ++k) {
        const double x = model.lower()[i] + model.axis_length(i) * k / kGrid;
        const double sl = prof.slope(x);
        if (prev_s == 0.0 || prev_s * sl < 0.0) {
          double a = prev_x, b = x;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (a + b);
            (prof.slope(a) * prof.slope(mid) <= 0.0 ? b : a) = mid;
          }
          geq::PhaseState st = geq::random_unit_speed_state(model, rng);
          st.x[i] = 0.5 * (a + b);
          st.p[i] = 0.0;
          states.push_back(st);
        }
        prev_x = x;
        prev_s = sl;
      }
    }
  }

  json out;
  out["seed"] = seed;
  out["tol"] = tol;
  out["reports"] = json::array();
  int dependent = 0;
  for (const auto& st : states) {
    const geq::SingularReport rep = geq::classify_singular(model, st, tol);
    if (rep.dependent) ++dependent;
    out["reports"].push_back(geq::to_json(rep));
  }
  out["states_scanned"] = states.size();
  out["dependent_states"] = dependent;
  write_json(out_path, out);
  return kExitOk;
}

int cmd_entropy(ModelArgs& margs, std::uint64_t seed, int ensemble, double horizon, double h,
                const std::string& out_path) {
  if (ensemble < 1) throw CLI::ValidationError("--ensemble", "must be >= 1");
  if (!(horizon >= 1.0)) throw CLI::ValidationError("--horizon", "must be >= 1");
  const ChartModel model = margs.load();
  geq::IntegratorConfig config;
  config.h = h;
  const geq::EntropyReport report = geq::entropy_report(model, ensemble, horizon, seed, config);
  std::cout << "verdict: " << geq::to_string(report.verdict) << "\n";
  if (!report.detail.empty()) std::cout << report.detail << "\n";
  if (!out_path.empty()) write_json(out_path, geq::to_json(report));
  return report.verdict == geq::EntropyVerdict::consistent_with_zero_entropy ? kExitOk
                                                                             : kExitVerdict;
}

int cmd_pseudonorm(ModelArgs& margs, std::uint64_t seed, double horizon, double h,
                   const std::string& a_text, const std::string& t_text,
                   const std::string& out_path) {
  if (!(horizon >= 1.0)) throw CLI::ValidationError("--horizon", "must be >= 1");
  const ChartModel model = margs.load();
  const Vector a = parse_vector(a_text, model.dim(), "--a");
  const Vector t_list = parse_vector(t_text, model.dim(), "--t");
  geq::IntegratorConfig config;
  config.h = h;
  const geq::LyapunovEstimate est =
      geq::pseudonorm_estimate(model, a, t_list, horizon, config, seed);
  const double threshold = geq::entropy_threshold(est.horizon);

  json out;
  out["exponent"] = est.exponent;
  out["threshold"] = threshold;
  out["horizon"] = est.horizon;
  out["renorm_interval"] = est.renorm_interval;
  out["seed"] = seed;
  std::cout << "exponent " << geq::fmt17(est.exponent) << " vs threshold "
            << geq::fmt17(threshold) << "\n";
  if (!out_path.empty()) write_json(out_path, out);
  return est.exponent < threshold ? kExitOk : kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"canonical geodesically equivalent metric pairs: generation, flows, checks"};
  app.require_subcommand(1);

  ModelArgs margs;
  std::uint64_t seed = 0;
  std::string out_path, depth = "full";

  auto add_common = [&](CLI::App* cmd, bool with_seed = true) {
    cmd->add_option("--config", margs.config_path, "model config file")->required();
    cmd->add_option("--out", out_path, "output path (default: stdout)");
    if (with_seed) cmd->add_option("--seed", seed, "RNG seed");
  };

  CLI::App* lc_gen = app.add_subcommand("lc-gen", "validate profiles and emit a model file");
  add_common(lc_gen, false);

  CLI::App* verify = app.add_subcommand("verify", "run the identity battery");
  add_common(verify);
  verify->add_option("--depth", depth, "quick|full")
      ->check(CLI::IsMember({"quick", "full"}));

  CLI::App* integrate = app.add_subcommand("integrate", "geodesic flow trajectory -> CSV");
  add_common(integrate);
  long steps = 100000;
  double step_size = 1e-3;
  int stride = 100;
  std::string x0_text, p0_text, xi0_text;
  integrate->add_option("--steps", steps, "number of steps");
  integrate->add_option("--step-size", step_size, "step in flow time");
  integrate->add_option("--stride", stride, "record every N steps");
  integrate->add_option("--x0", x0_text, "initial position, comma separated");
  integrate->add_option("--p0", p0_text, "initial momenta, comma separated");
  integrate->add_option("--xi0", xi0_text, "initial velocities, comma separated");

  CLI::App* scan = app.add_subcommand("scan-singular", "classify singular phase points");
  add_common(scan);
  int samples = 100;
  double tol = geq::kSingularTol;
  scan->add_option("--samples", samples, "random states to scan");
  scan->add_option("--tol", tol, "gradient-vanishing tolerance");

  CLI::App* entropy = app.add_subcommand("entropy", "ensemble Lyapunov probe");
  add_common(entropy);
  int ensemble = 32;
  double horizon = 1e4;
  double entropy_h = 0.02;
  entropy->add_option("--ensemble", ensemble, "ensemble size");
  entropy->add_option("--horizon", horizon, "flow time per member");
  entropy->add_option("--step-size", entropy_h, "integrator step");

  CLI::App* pseudo = app.add_subcommand("pseudonorm", "combined-flow Lyapunov probe");
  add_common(pseudo);
  double pseudo_horizon = 1e4;
  double pseudo_h = 0.01;
  std::string a_text = "1,1", t_text = "0,1";
  pseudo->add_option("--horizon", pseudo_horizon, "flow time");
  pseudo->add_option("--step-size", pseudo_h, "integrator step");
  pseudo->add_option("--a", a_text, "combination coefficients, comma separated");
  pseudo->add_option("--t", t_text, "reference t values, comma separated");

  try {
    app.parse(argc, argv);
    if (lc_gen->parsed()) return cmd_lc_gen(margs, out_path);
    if (verify->parsed()) return cmd_verify(margs, seed, depth, out_path);
    if (integrate->parsed())
      return cmd_integrate(margs, seed, steps, step_size, stride, x0_text, p0_text, xi0_text,
                           out_path);
    if (scan->parsed()) return cmd_scan_singular(margs, seed, samples, tol, out_path);
    if (entropy->parsed())
      return cmd_entropy(margs, seed, ensemble, horizon, entropy_h, out_path);
    if (pseudo->parsed())
      return cmd_pseudonorm(margs, seed, pseudo_horizon, pseudo_h, a_text, t_text, out_path);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
