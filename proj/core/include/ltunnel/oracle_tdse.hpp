// Crank-Nicolson integration of i psi_t = -psi_xx/2 + V(x) psi on a uniform grid with hard walls.
// Independent of the Laplace-transform machinery; used to check it.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ltunnel/core_model.hpp"
#include "ltunnel/packet.hpp"

namespace ltunnel {

struct OracleConfig {
  double x_min = -60.0;
  double x_max = 50.0;
  int n_points = 11001;
  double dt = 1e-3;
  std::vector<double> frame_times;  // ascending, > 0; t_end is the last one
  std::optional<Barrier> barrier;   // nullopt: free evolution
  std::function<cplx(double)> initial;
  double p_max_effective = 0.0;  // largest momentum that must be resolved

  double dx() const { return (x_max - x_min) / (n_points - 1); }
  double t_end() const { return frame_times.empty() ? 0.0 : frame_times.back(); }
};

// Throws InputError on any violated invariant (resolution, edges off-grid, bad times).
void validate(const OracleConfig& cfg);

// Fills initial/p_max_effective from a packet: p0 + 8 sigma_p.
OracleConfig oracle_config_for(const PacketSpec& packet, std::optional<Barrier> barrier, double dx, double dt,
                               std::vector<double> frame_times, double x_min = -60.0, double x_max = 50.0);

// Frames at cfg.frame_times (the time grid is shortened where needed to land on them exactly).
std::vector<ComplexField> evolve(const OracleConfig& cfg);

struct ObservableSet {
  double norm;
  double centroid;
  double P_left;
  double P_barrier;
  double P_right;
  double peak_position;
  double right_centroid;  // centroid over the transmitted region only
  double right_momentum;  // <p> over the transmitted region, per unit P_right
};

ObservableSet observables(const ComplexField& frame);

struct ArrivalAnalysis {
  double centroid_lag;
  double inferred_delay;
  double velocity;  // transmitted centroid velocity used for the free reference
  double P_right;   // at the last frame
};

// lag = (x0 + d + v t) - centroid_right(t), averaged over frames; v from the centroid
// regression (>= 2 frames) or the transmitted momentum (1 frame). delay = lag / p0.
// With no barrier (d = 0) the reference is the free centroid path itself.
ArrivalAnalysis arrival_analysis(const std::vector<ComplexField>& frames, double x0, double p0);

}  // namespace ltunnel
