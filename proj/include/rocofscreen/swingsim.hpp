#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rocofscreen/case_model.hpp"
#include "rocofscreen/netdyn.hpp"
#include "rocofscreen/rocof.hpp"

namespace rocofscreen {

struct SimOptions {
    double t_end = 10.0;
    double dt = 1.0 / 240.0;
    double damping_d = 0.0;  // per-unit torque per per-unit speed
    double frequency_filter_tc = 0.04;
    double event_time = 0.1;  // contingency instant, snapped to the step grid
    bool relays_enabled = true;
    double blowup_omega = 0.2;
};

// Relay settings in Hz.
inline constexpr double kUflsStage1Hz = 59.3;
inline constexpr double kUflsStage2Hz = 58.9;
inline constexpr double kUflsStage3Hz = 58.5;
inline constexpr double kFfrPickupHz = 59.7;
inline constexpr double kFfrCycles = 25.0;

double ufls_threshold_hz(UflsStage stage);

struct RelayEvent {
    enum class Kind { ufls, ffr };
    Kind kind = Kind::ufls;
    int load_id = 0;
    int bus_id = 0;
    UflsStage stage = UflsStage::none;
    double time = 0.0;
    double frequency_hz = 0.0;
};

/// Load as seen by the frequency relays.
struct RelayLoad {
    int load_id = 0;
    int bus_id = 0;
    UflsStage stage = UflsStage::none;
    bool ffr = false;
};

std::vector<RelayLoad> relay_loads(const GridCase& grid);
std::vector<RelayLoad> relay_loads(const NetworkModel& model);

/// Per-sample under-frequency relays. A UFLS load trips the first sample its
/// own bus frequency is strictly below the stage threshold. An FFR load trips
/// once its bus has been below 59.7 Hz for strictly more than 25 cycles in a
/// row; the timer resets when frequency recovers. Each load trips once.
class FrequencyRelays {
  public:
    FrequencyRelays(std::vector<RelayLoad> loads, std::span<const int> bus_ids, double f_base_hz, double dt,
                    bool ufls = true, bool ffr = true);

    /// Feeds one sample of bus frequencies (ordered like bus_ids) and returns
    /// the loads that trip at this sample.
    std::vector<RelayEvent> observe(double time, std::span<const double> bus_frequency_hz);

  private:
    struct Watch {
        RelayLoad load;
        std::size_t bus = 0;
        long below_samples = 0;
        bool tripped = false;
    };
    std::vector<Watch> watches_;
    double f_base_hz_;
    double dt_;
    bool ufls_;
    bool ffr_;
};

/// Washout-filtered angle differentiator: first-order lag with time constant
/// tc applied to dtheta/dt, exact for piecewise-linear angle between samples.
class WashoutDifferentiator {
  public:
    WashoutDifferentiator(double dt, double tc, double theta0);
    /// Returns the filtered angle rate in rad/s.
    double update(double theta);

  private:
    double dt_;
    double alpha_;
    double last_theta_;
    double rate_ = 0.0;
};

/// Bus frequency in Hz from a uniformly sampled angle trace (radians). The
/// first sample equals f_base. Throws DataError for fewer than 2 samples.
std::vector<double> bus_frequency(std::span<const double> angle, double dt, double f_base_hz, double tc);

struct SimResult {
    double f_base_hz = 60.0;
    double dt = 0.0;
    std::size_t event_step = 0;
    std::vector<double> time;
    std::vector<int> gen_ids;
    std::vector<int> bus_ids;
    std::vector<std::vector<double>> machine_delta;  // [machine][step]
    std::vector<std::vector<double>> machine_omega;  // [machine][step]
    std::vector<std::vector<double>> bus_angle;      // [bus][step], unwrapped radians
    std::vector<std::vector<double>> bus_frequency_hz;
    std::vector<RelayEvent> events;
    std::vector<bool> machine_online;  // status at the end of the run
};

/// Classical-machine simulation. The contingency is applied at
/// opts.event_time; governors and exciters are absent. Integrates
/// d(delta)/dt = 2*pi*f_base*omega and d(omega)/dt = (T_m - T_e - D*omega)/(2H)
/// with fixed-step RK4, solving the network at every stage. Relays act on
/// filtered local bus frequency and remove tripped load shunts from the next
/// step. Throws NumericalError when any |omega| exceeds opts.blowup_omega.
SimResult simulate(const NetworkModel& model, std::span<const MachineState> states, const Contingency& contingency,
                   const SimOptions& opts = {});

/// Runs UFLS logic over recorded frequency traces (no feedback to the run).
std::vector<RelayEvent> check_ufls(const SimResult& sim, std::span<const RelayLoad> loads);
/// Runs FFR logic over recorded frequency traces.
std::vector<RelayEvent> check_ffr(const SimResult& sim, std::span<const RelayLoad> loads);

/// ROCOF in Hz/s at a bus from the unfiltered angle trace: central difference
/// of bus frequency over [event, event + window].
double finite_difference_rocof(const SimResult& sim, std::size_t bus, double window);

/// Slope of the inertia-weighted mean machine frequency over
/// [event, event + window], Hz/s.
double coi_frequency_slope(const SimResult& sim, const NetworkModel& model, double window);

/// Lowest machine frequency (Hz) reached over the run.
double machine_frequency_nadir(const SimResult& sim);

}  // namespace rocofscreen
