#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rocofscreen/case_model.hpp"
#include "rocofscreen/netdyn.hpp"

namespace rocofscreen {

/// Sudden removal of one or more synchronous machines.
struct Contingency {
    std::string id;
    std::vector<int> outaged_generator_ids;
    double total_mw_lost = 0.0;
};

/// Builds a contingency for the given generators, taking MW lost from the
/// current dispatch. Throws DataError for unknown, offline or non-synchronous
/// generators.
Contingency make_outage(const GridCase& grid, std::vector<int> generator_ids, std::string id = {});

/// Parses "gen3", "3" or "gen1,gen2" style lists into generator ids.
std::vector<int> parse_generator_list(const std::string& text);

/// Zero-order system ROCOF in Hz/s: -f_base * P_loss / (2 * sum H*S) over the
/// in-service synchronous machines that remain after removing `outaged`.
/// Throws DataError when no inertia remains.
double system_rocof(const GridCase& grid, double p_loss_mw, std::span<const int> outaged = {});

struct RocofResult {
    double system_rocof_hz_s = 0.0;
    /// Per bus, Hz/s. nullopt where the bus sits in an island with no
    /// remaining synchronous machine.
    std::vector<std::optional<double>> bus_rocof_hz_s;
    /// Per machine (model order), per-unit speed per second; nullopt for
    /// removed machines.
    std::vector<std::optional<double>> machine_accel;
    std::vector<Complex> post_disturbance_voltages;
    std::vector<Complex> voltage_second_derivative;
    /// Sparse solves spent on this evaluation (thread-local instrumentation).
    std::uint64_t sparse_solves = 0;
};

/// Second time derivative of the voltage angle when dV/dt = 0.
/// Throws NumericalError for |v| = 0.
double angle_second_derivative(Complex v, Complex v_ddot);

/// d2I/dt2 for each machine at the instant after a disturbance (omega = 0):
/// (E'/X'd) at angle delta, times omega_dot. Offline machines give 0.
std::vector<Complex> injection_derivatives(const NetworkModel& model, std::span<const MachineState> states,
                                           std::span<const double> omega_dot);

/// General form with a nonzero speed deviation:
/// (E'/X'd)∠delta * omega_dot + omega^2 * (E'/X'd)∠(delta + pi/2).
Complex injection_second_derivative(double e_over_x, double delta, double omega, double omega_dot);

/// Per-bus theoretical ROCOF at the instant after the contingency. Removes the
/// outaged machines' Norton shunts and injections, solves for the new
/// voltages, derives machine accelerations from the swing equation, then
/// solves for the voltage second derivative. Costs exactly two sparse solves.
RocofResult locational_rocof(const NetworkModel& model, std::span<const MachineState> states,
                             const Contingency& contingency);

}  // namespace rocofscreen
