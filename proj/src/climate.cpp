#include "assim/climate.hpp"

#include <cmath>

namespace assim {

void EBMParams::validate() const {
  if (heat_capacity <= 0.0) throw Error("EBMParams: heat capacity must be positive");
  if (albedo < 0.0 || albedo > 1.0) throw Error("EBMParams: albedo outside [0,1]");
  if (co2_pi <= 0.0) throw Error("EBMParams: co2_pi must be positive");
  if (feedback >= 0.0) throw Error("EBMParams: feedback must be negative");
}

void Coupled2DParams::validate() const {
  for (double v : {a11, a12, c1, a21, a22, c2})
    if (!std::isfinite(v)) throw Error("Coupled2DParams: non-finite coefficient");
  if (a11 >= 0.0 || a22 >= 0.0)
    throw Error("Coupled2DParams: temporal feedback terms must be damping");
}

double co2_at(int year, const EBMParams& p) {
  double t = (static_cast<double>(year) - 1850.0) / 220.0;
  return p.co2_pi * (1.0 + t * t * t);
}

double ebm_step(double temp, int year, double noise, const EBMParams& p) {
  double forcing = p.forcing_coeff * std::log(co2_at(year, p) / p.co2_pi);
  double drift = p.feedback * (temp - p.preindustrial_temp) + forcing;
  return temp + p.dt / p.heat_capacity * drift + noise;
}

Eigen::Vector2d coupled_step(const Eigen::Vector2d& state, int /*year*/,
                             const Eigen::Vector2d& noise, const Coupled2DParams& p) {
  double t = state[0], h = state[1];
  Eigen::Vector2d next;
  next[0] = t + (p.a11 * t + p.a12 * h + p.c1) * p.dt + noise[0];
  next[1] = h + (p.a21 * t + p.a22 * h + p.c2) * p.dt + noise[1];
  return next;
}

StateSpaceModel make_ebm1d_model(const EBMParams& p, int start_year,
                                 const VectorXd& process_std, const VectorXd& measurement_std) {
  p.validate();
  StateSpaceModel m;
  m.dims = {1, 1};
  m.noise = {process_std, measurement_std};
  m.noise.validate(m.dims);
  m.selector = ObservationSelector::all(1);
  m.transition = [p, start_year](const VectorXd& x, int n, const VectorXd& w) {
    VectorXd out(1);
    out[0] = ebm_step(x[0], start_year + n, w[0], p);
    return out;
  };
  ObservationSelector sel = m.selector;
  m.measurement = [sel](const VectorXd& x, const VectorXd& v) {
    return (sel.select(x) + v).eval();
  };
  return m;
}

StateSpaceModel make_coupled2d_model(const Coupled2DParams& p, int start_year,
                                     const VectorXd& process_std, const VectorXd& measurement_std,
                                     const ObservationSelector& selector) {
  p.validate();
  selector.validate(2);
  StateSpaceModel m;
  m.dims = {2, selector.measurement_dim()};
  m.noise = {process_std, measurement_std};
  m.noise.validate(m.dims);
  m.selector = selector;
  m.transition = [p, start_year](const VectorXd& x, int n, const VectorXd& w) {
    Eigen::Vector2d next = coupled_step(x.head<2>(), start_year + n, w.head<2>(), p);
    return VectorXd(next);
  };
  m.measurement = [selector](const VectorXd& x, const VectorXd& v) {
    return (selector.select(x) + v).eval();
  };
  return m;
}

VectorXd TrajectoryEnsemble::slice(int step_index, int component) const {
  VectorXd out(n_paths);
  for (int pth = 0; pth < n_paths; ++pth) out[pth] = values[pth](step_index, component);
  return out;
}

TrajectoryEnsemble simulate_ensemble(const StateSpaceModel& model, const VectorXd& x0,
                                     int n_paths, int steps, const RngStream& rng,
                                     int base_year) {
  if (n_paths < 1 || steps < 1) throw Error("simulate_ensemble: n_paths and steps must be >= 1");
  TrajectoryEnsemble ens;
  ens.n_paths = n_paths;
  ens.steps = steps;
  ens.base_year = base_year;
  ens.values.reserve(n_paths);
  const VectorXd& q = model.noise.process_std;
  for (int pth = 0; pth < n_paths; ++pth) {
    RngStream path_rng = rng.substream(static_cast<std::uint64_t>(pth));
    MatrixXd path(steps, model.dims.state_dim);
    VectorXd x = x0;
    path.row(0) = x.transpose();
    for (int n = 1; n < steps; ++n) {
      VectorXd w = (q.array() * path_rng.normal_vec(q.size()).array()).matrix();
      x = model.transition(x, n - 1, w);
      path.row(n) = x.transpose();
    }
    ens.values.push_back(std::move(path));
  }
  return ens;
}

}  // namespace assim
