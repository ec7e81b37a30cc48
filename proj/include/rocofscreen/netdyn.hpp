#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rocofscreen/case_model.hpp"
#include "rocofscreen/powerflow.hpp"
#include "rocofscreen/sparse_lu.hpp"

namespace rocofscreen {

/// Branch network admittance on system base (pi model, off-nominal taps on
/// the from side, fixed bus shunts). Row/column order follows
/// GridCase::buses. Diagonal entries are always stored, even when zero.
ComplexSparse build_ybus(const GridCase& grid);

/// One in-service synchronous machine as seen by the network.
struct NortonMachine {
    std::size_t gen_index = 0;  // position in GridCase::generators
    int gen_id = 0;
    std::size_t bus = 0;        // position in GridCase::buses
    double h_sec = 0.0;         // machine base
    double s_base_mva = 0.0;
    double x_sys = 0.0;         // X'd on system base
    Complex shunt;              // 1 / (j x_sys)
};

/// Constant-impedance load shunt, kept per load so relays can remove it.
struct LoadShunt {
    int load_id = 0;
    int bus_id = 0;
    std::size_t bus = 0;
    Complex admittance;
    UflsStage ufls_stage = UflsStage::none;
    bool ffr = false;
};

/// Dynamic network: Y with loads, non-synchronous generation and machine
/// Norton shunts, factorized once. Immutable after construction; the
/// factorization supports concurrent solves.
struct NetworkModel {
    double s_base_mva = 100.0;
    double f_base_hz = 60.0;
    std::vector<int> bus_ids;
    std::vector<int> island;  // per bus
    ComplexSparse y_dyn;
    std::vector<NortonMachine> machines;
    std::vector<LoadShunt> load_shunts;
    std::shared_ptr<const linalg::ComplexLu> factor;

    // Distinct buses hosting machines and the matching block of Y^-1, so a
    // machine removal can be applied as a low-rank correction without
    // refactorizing.
    std::vector<std::size_t> machine_buses;
    std::vector<int> machine_bus_slot;  // per bus: index into machine_buses or -1
    Eigen::MatrixXcd machine_bus_impedance;

    std::size_t bus_count() const { return bus_ids.size(); }
};

/// Builds the dynamic model around the power-flow operating point. Loads add
/// conj(S)/|V|^2, non-synchronous generators add -conj(S)/|V|^2 and each
/// synchronous machine adds 1/(j X'd) converted to system base.
NetworkModel augment_dynamic(const ComplexSparse& ybus, const GridCase& grid, const PowerFlowSolution& solution);

/// X'd converted from machine base to system base.
double machine_to_system_reactance(double xdp_machine_pu, double machine_mva, double system_mva);

struct MachineState {
    int gen_id = 0;
    double e_prime = 0.0;  // |E'|, per unit
    double delta = 0.0;    // radians
    double t_m = 0.0;      // per unit, machine base
    double omega = 0.0;    // per-unit speed deviation
    Complex i_inj;         // Norton current, system base
    bool online = true;
};

/// Classical initialization at the power-flow point. T_m equals the electrical
/// torque obtained by solving the network with the initial injections, so the
/// returned states are an exact equilibrium of the model.
std::vector<MachineState> init_machines(const NetworkModel& model, const GridCase& grid,
                                        const PowerFlowSolution& solution);

/// Norton current for a machine at angle delta.
Complex norton_current(const NortonMachine& machine, double e_prime, double delta);

/// Sums online machine injections per bus.
std::vector<Complex> assemble_injections(const NetworkModel& model, std::span<const MachineState> states);

/// Electrical torque per machine on machine base, from terminal voltage and
/// stator current (injection minus Norton shunt current). Offline machines
/// report 0.
std::vector<double> electrical_torque(const NetworkModel& model, std::span<const MachineState> states,
                                      std::span<const Complex> voltages);

/// Solves Y_dyn V = I for the given states (one sparse solve).
std::vector<Complex> solve_network(const NetworkModel& model, std::span<const MachineState> states);

/// Largest |V_model - V_powerflow| when the network is solved with the states.
double reconstruction_error(const NetworkModel& model, std::span<const MachineState> states,
                            const PowerFlowSolution& solution);

}  // namespace rocofscreen
