#include "geqlab/flow.hpp"

#include <cmath>
#include <sstream>

namespace geq {

double hamiltonian(const ChartModel& model, const PhaseState& state, Which w) {
  const Matrix G = model.metric(w, state.x);
  return 0.5 * state.p.dot(Eigen::LLT<Matrix>(G).solve(state.p));
}

namespace {

// Hamiltonian vector field (dx/dt, dp/dt) = (dF/dp, -dF/dx).
Vector phase_velocity(const Observable& generator, const PhaseState& s) {
  const Vector grad = generator.gradient(s);
  const int n = static_cast<int>(grad.size()) / 2;
  Vector f(2 * n);
  f.head(n) = grad.tail(n);
  f.tail(n) = -grad.head(n);
  return f;
}

PhaseState unpack(const Vector& z, int n) {
  return PhaseState{z.head(n), z.tail(n)};
}

Vector pack(const PhaseState& s) {
  Vector z(2 * s.x.size());
  z.head(s.x.size()) = s.x;
  z.tail(s.p.size()) = s.p;
  return z;
}

// Solves the midpoint stage m = z + (h/2) f(m) by fixed-point iteration.
Vector midpoint_stage(const Observable& generator, const Vector& z, double h, double tol,
                      int max_iter) {
  const int n = static_cast<int>(z.size()) / 2;
  Vector m = z;
  for (int it = 0; it < max_iter; ++it) {
    const Vector next = z + 0.5 * h * phase_velocity(generator, unpack(m, n));
    const double delta = (next - m).cwiseAbs().maxCoeff();
    m = next;
    if (delta < tol) return m;
  }
  std::ostringstream msg;
  msg << "implicit midpoint stage did not converge to " << tol << " within " << max_iter
      << " iterations (h = " << h << ")";
  throw StepFailure(msg.str());
}

}  // namespace

PhaseState symplectic_step(const Observable& generator, const PhaseState& state, double h,
                           double fixed_point_tol, int max_iter) {
  const Vector z = pack(state);
  const Vector m = midpoint_stage(generator, z, h, fixed_point_tol, max_iter);
  return unpack(2.0 * m - z, static_cast<int>(state.x.size()));
}

Trajectory flow_trajectory(const Observable& generator, const ChartModel& model,
                           const PhaseState& start, const IntegratorConfig& config,
                           const std::vector<Observable>& record) {
  if (!(config.h > 0.0)) throw std::invalid_argument("integrate: step size must be > 0");
  if (config.steps < 0) throw std::invalid_argument("integrate: steps must be >= 0");
  const int stride = std::max(1, config.record_stride);

  Trajectory traj;
  for (const auto& obs : record) traj.observable_names.push_back(obs.name);
  auto push_sample = [&](double t, const PhaseState& s) {
    traj.times.push_back(t);
    traj.states.push_back(PhaseState{model.wrap(s.x), s.p});
    Vector vals(static_cast<int>(record.size()));
    for (int i = 0; i < vals.size(); ++i) vals[i] = record[i].value(s);
    traj.observables.push_back(vals);
  };

  PhaseState s = start;
  push_sample(0.0, s);
  for (long k = 1; k <= config.steps; ++k) {
    try {
      s = symplectic_step(generator, s, config.h, config.fixed_point_tol,
                          config.fixed_point_max_iter);
    } catch (const StepFailure& err) {
      traj.completed = false;
      traj.error = err.what();
      return traj;
    }
    if (k % stride == 0 || k == config.steps) push_sample(k * config.h, s);
  }
  return traj;
}

Trajectory integrate(const ChartModel& model, const PhaseState& start,
                     const IntegratorConfig& config, const std::vector<Observable>& record,
                     Which w) {
  return flow_trajectory(hamiltonian_observable(model, w), model, start, config, record);
}

PhaseState combined_flow(const ChartModel& model, const PhaseState& start, const Vector& a,
                         const Vector& t_list, double time, const IntegratorConfig& config) {
  for (int i = 0; i < t_list.size(); ++i)
    for (int j = i + 1; j < t_list.size(); ++j)
      if (std::abs(t_list[i] - t_list[j]) < 1e-12)
        throw std::invalid_argument("combined_flow: repeated t values");
  if (time == 0.0 || a.isZero(0.0)) return start;

  const Observable gen = combined_observable(model, a, t_list);
  const double dir = time > 0.0 ? 1.0 : -1.0;
  const long steps = std::max<long>(1, std::lround(std::abs(time) / config.h));
  const double h = dir * std::abs(time) / steps;
  PhaseState s = start;
  for (long k = 0; k < steps; ++k)
    s = symplectic_step(gen, s, h, config.fixed_point_tol, config.fixed_point_max_iter);
  return s;
}

std::string Trajectory::to_csv() const {
  const int n = states.empty() ? 0 : static_cast<int>(states.front().x.size());
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  for (int i = 1; i <= n; ++i) out << ",p" << i;
  for (const auto& name : observable_names) out << "," << name;
  out << "\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    out << fmt17(times[k]);
    for (int i = 0; i < n; ++i) out << "," << fmt17(states[k].x[i]);
    for (int i = 0; i < n; ++i) out << "," << fmt17(states[k].p[i]);
    for (int i = 0; i < observables[k].size(); ++i) out << "," << fmt17(observables[k][i]);
    out << "\n";
  }
  return out.str();
}

namespace {

// Difference respecting periodic identifications (minimal image).
Vector chart_difference(const ChartModel& model, const Vector& a, const Vector& b) {
  Vector d = a - b;
  for (int i = 0; i < model.dim(); ++i)
    if (model.periodic()[i]) {
      const double len = model.axis_length(i);
      d[i] -= len * std::round(d[i] / len);
    }
  return d;
}

}  // namespace

ReparamResult reparam_residual(const ChartModel& model, Which w,
                               const std::vector<Vector>& positions, double dt) {
  if (positions.size() < 3)
    throw std::invalid_argument("reparam_residual: need at least 3 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("reparam_residual: dt must be > 0");

  ReparamResult out{0.0, 0};
  const int n = model.dim();
  for (std::size_t k = 1; k + 1 < positions.size(); ++k) {
    const Vector fwd = chart_difference(model, positions[k + 1], positions[k]);
    const Vector bwd = chart_difference(model, positions[k], positions[k - 1]);
    const Vector vel = (fwd + bwd) / (2.0 * dt);
    const Vector acc = (fwd - bwd) / (dt * dt);

    const Matrix G = model.metric(w, positions[k]);
    const double speed2 = vel.dot(G * vel);
    if (speed2 < 1e-14) {
      ++out.rejected_samples;
      continue;
    }
    const std::vector<Matrix> gamma = christoffel(model, w, positions[k]);
    Vector cov = acc;
    for (int kk = 0; kk < n; ++kk) cov[kk] += vel.dot(gamma[kk] * vel);
    const Vector trans = cov - (cov.dot(G * vel) / speed2) * vel;
    out.residual = std::max(out.residual, std::sqrt(trans.dot(G * trans)) / speed2);
  }
  return out;
}

Matrix tangent_step_matrix(const Observable& generator, const PhaseState& state, double h,
                           const IntegratorConfig& config) {
  const int n = static_cast<int>(state.x.size());
  const Vector z = pack(state);
  const Vector m =
      midpoint_stage(generator, z, h, config.fixed_point_tol, config.fixed_point_max_iter);

  // Symmetrized finite-difference Hessian of the generator at the midpoint;
  // the Cayley map below is then exactly symplectic.
  Matrix hess(2 * n, 2 * n);
  const double step = kGradFdStep;
  for (int j = 0; j < 2 * n; ++j) {
    Vector zp = m, zm = m;
    zp[j] += step;
    zm[j] -= step;
    hess.col(j) = (generator.gradient(unpack(zp, n)) - generator.gradient(unpack(zm, n))) /
                  (2.0 * step);
  }
  hess = 0.5 * (hess + hess.transpose()).eval();

  Matrix jmat = Matrix::Zero(2 * n, 2 * n);
  jmat.topRightCorner(n, n) = Matrix::Identity(n, n);
  jmat.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  const Matrix a = jmat * hess;  // linearized vector field
  const Matrix eye = Matrix::Identity(2 * n, 2 * n);
  return (eye - 0.5 * h * a).partialPivLu().solve(eye + 0.5 * h * a);
}

TangentState tangent_step(const Observable& generator, const TangentState& ts, double h,
                          const IntegratorConfig& config, TangentMode mode) {
  TangentState out;
  out.state = symplectic_step(generator, ts.state, h, config.fixed_point_tol,
                              config.fixed_point_max_iter);
  if (mode == TangentMode::jacobian) {
    out.delta = tangent_step_matrix(generator, ts.state, h, config) * ts.delta;
    return out;
  }
  // two-orbit mode: shadow orbit at fixed tiny separation along delta
  const double norm = ts.delta.norm();
  if (norm == 0.0) {
    out.delta = ts.delta;
    return out;
  }
  constexpr double kSeparation = 1e-8;
  const int n = static_cast<int>(ts.state.x.size());
  const Vector shadow0 = pack(ts.state) + (kSeparation / norm) * ts.delta;
  const PhaseState shadow =
      symplectic_step(generator, unpack(shadow0, n), h, config.fixed_point_tol,
                      config.fixed_point_max_iter);
  out.delta = (pack(shadow) - pack(out.state)) * (norm / kSeparation);
  return out;
}

}  // namespace geq
