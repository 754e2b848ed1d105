#pragma once

#include "assim/core.hpp"

namespace assim {

/// Globally averaged energy balance model, yearly Euler-Maruyama discretization.
struct EBMParams {
  double forcing_coeff = 5.0;       // f, CO2 forcing [W/m^2]
  double co2_pi = 280.0;            // pre-industrial CO2 [ppm]
  double feedback = -1.3;           // lambda [W/m^2/degC], restoring (< 0)
  double heat_capacity = 51.0;      // C [J/m^2/degC]
  double albedo = 0.3;              // planetary reflectivity
  double insolation = 1368.0;       // S [W/m^2]
  double preindustrial_temp = 14.0; // T0 [degC]
  double dt = 1.0;                  // years
  int base_year = 1850;

  /// Linearized outgoing-radiation offset A = S(1-albedo)/4 + feedback*T0.
  double radiation_offset() const {
    return insolation * (1.0 - albedo) / 4.0 + feedback * preindustrial_temp;
  }
  void validate() const;
};

/// Coupled temperature-anomaly / sea-level model (anomaly degC, sea level cm).
struct Coupled2DParams {
  double a11 = -0.16;
  double a12 = 0.008;
  double c1 = 0.0187;
  double a21 = 0.4673;
  double a22 = -0.0145;
  double c2 = 0.2072;
  double dt = 1.0;
  int base_year = 1880;

  void validate() const;
};

/// CO2 concentration [ppm]: co2_pi * (1 + ((year - 1850)/220)^3).
double co2_at(int year, const EBMParams& p);

/// One Euler step of the 1-D temperature SODE; `noise` is the sigma*dW term.
double ebm_step(double temp, int year, double noise, const EBMParams& p);

/// One Euler step of the coupled 2-D SODE.
Eigen::Vector2d coupled_step(const Eigen::Vector2d& state, int year,
                             const Eigen::Vector2d& noise, const Coupled2DParams& p);

/// 1-D model as a StateSpaceModel; step index n maps to year start_year + n.
/// Default process noise q = 0.05, identity measurement.
StateSpaceModel make_ebm1d_model(const EBMParams& p, int start_year,
                                 const VectorXd& process_std, const VectorXd& measurement_std);

/// 2-D coupled model; the selector picks the observed components.
StateSpaceModel make_coupled2d_model(const Coupled2DParams& p, int start_year,
                                     const VectorXd& process_std, const VectorXd& measurement_std,
                                     const ObservationSelector& selector);

struct TrajectoryEnsemble {
  int n_paths = 0;
  int steps = 0;                 // saved states per path, including the initial one
  int base_year = 0;
  std::vector<MatrixXd> values;  // per path: steps x L

  int year(int step_index) const { return base_year + step_index; }
  /// Cross-path values of one state component at one step.
  VectorXd slice(int step_index, int component) const;
};

/// Simulates n_paths independent trajectories; path p draws its process noise
/// from rng.substream(p).
TrajectoryEnsemble simulate_ensemble(const StateSpaceModel& model, const VectorXd& x0,
                                     int n_paths, int steps, const RngStream& rng,
                                     int base_year);

}  // namespace assim
