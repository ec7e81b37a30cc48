#include "rocofscreen/netdyn.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rocofscreen/errors.hpp"

namespace rocofscreen {

ComplexSparse build_ybus(const GridCase& grid) {
    BusIndex index(grid);
    const auto n = static_cast<int>(grid.buses.size());
    std::vector<Eigen::Triplet<Complex>> t;
    t.reserve(grid.buses.size() + 4 * grid.branches.size());
    for (int i = 0; i < n; ++i) {
        const auto& bus = grid.buses[static_cast<std::size_t>(i)];
        t.emplace_back(i, i, Complex(bus.g_shunt_pu, bus.b_shunt_pu));
    }
    for (const auto& br : grid.branches) {
        if (!br.in_service) continue;
        if (br.r_pu == 0.0 && br.x_pu == 0.0) {
            throw DataError("zero-impedance branch " + std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus));
        }
        const auto f = static_cast<int>(index.at(br.from_bus));
        const auto to = static_cast<int>(index.at(br.to_bus));
        const Complex series = 1.0 / Complex(br.r_pu, br.x_pu);
        const Complex charging(0.0, 0.5 * br.b_pu);
        const double tap = br.tap_ratio;
        t.emplace_back(f, f, (series + charging) / (tap * tap));
        t.emplace_back(to, to, series + charging);
        t.emplace_back(f, to, -series / tap);
        t.emplace_back(to, f, -series / tap);
    }
    ComplexSparse y(n, n);
    y.setFromTriplets(t.begin(), t.end());
    y.makeCompressed();
    return y;
}

double machine_to_system_reactance(double xdp_machine_pu, double machine_mva, double system_mva) {
    return xdp_machine_pu * system_mva / machine_mva;
}

NetworkModel augment_dynamic(const ComplexSparse& ybus, const GridCase& grid, const PowerFlowSolution& solution) {
    BusIndex index(grid);
    const std::size_t n = grid.buses.size();
    if (solution.v_mag.size() != n || solution.gen_p_mw.size() != grid.generators.size()) {
        throw DataError("power-flow solution does not match the case");
    }
    NetworkModel model;
    model.s_base_mva = grid.s_base_mva;
    model.f_base_hz = grid.f_base_hz;
    model.island = island_labels(grid);
    model.bus_ids.reserve(n);
    for (const auto& bus : grid.buses) model.bus_ids.push_back(bus.id);
    model.y_dyn = ybus;
    const auto v = solution.voltages();

    auto terminal_v2 = [&](std::size_t bus, const std::string& what) {
        double v2 = std::norm(v[bus]);
        if (!(v2 > 0.0)) throw DataError(what + " at bus " + std::to_string(grid.buses[bus].id) + " has zero voltage");
        return v2;
    };
    auto add_diag = [&model](std::size_t bus, Complex value) {
        const auto b = static_cast<int>(bus);
        model.y_dyn.coeffRef(b, b) += value;
    };

    for (const auto& load : grid.loads) {
        const auto b = index.at(load.bus_id);
        const Complex s(load.p_mw / grid.s_base_mva, load.q_mvar / grid.s_base_mva);
        const Complex y = std::conj(s) / terminal_v2(b, "load " + std::to_string(load.id));
        add_diag(b, y);
        model.load_shunts.push_back({load.id, load.bus_id, b, y, load.ufls_stage, load.ffr});
    }

    for (std::size_t k = 0; k < grid.generators.size(); ++k) {
        const auto& g = grid.generators[k];
        if (!g.in_service) continue;
        const auto b = index.at(g.bus_id);
        const std::string label = "generator " + std::to_string(g.id);
        if (!g.synchronous) {
            const Complex s(solution.gen_p_mw[k] / grid.s_base_mva, solution.gen_q_mvar[k] / grid.s_base_mva);
            add_diag(b, -std::conj(s) / terminal_v2(b, label));
            continue;
        }
        if (!g.xdp_pu || !(*g.xdp_pu > 0.0)) throw DataError(label + " has no usable xdp_pu");
        if (!g.h_sec || !(*g.h_sec > 0.0)) throw DataError(label + " has no usable h_sec");
        terminal_v2(b, label);
        NortonMachine m;
        m.gen_index = k;
        m.gen_id = g.id;
        m.bus = b;
        m.h_sec = *g.h_sec;
        m.s_base_mva = g.s_base_mva;
        m.x_sys = machine_to_system_reactance(*g.xdp_pu, g.s_base_mva, grid.s_base_mva);
        m.shunt = 1.0 / Complex(0.0, m.x_sys);
        add_diag(b, m.shunt);
        model.machines.push_back(m);
    }
    model.y_dyn.makeCompressed();

    auto lu = std::make_shared<linalg::ComplexLu>();
    try {
        lu->compute(model.y_dyn);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("dynamic admittance matrix is singular: ") + e.what());
    }
    model.factor = lu;

    model.machine_bus_slot.assign(n, -1);
    for (const auto& m : model.machines) {
        if (model.machine_bus_slot[m.bus] < 0) {
            model.machine_bus_slot[m.bus] = static_cast<int>(model.machine_buses.size());
            model.machine_buses.push_back(m.bus);
        }
    }
    const auto nm = static_cast<Eigen::Index>(model.machine_buses.size());
    model.machine_bus_impedance.resize(nm, nm);
    std::vector<Complex> unit(n, Complex{});
    for (Eigen::Index c = 0; c < nm; ++c) {
        const auto bus = model.machine_buses[static_cast<std::size_t>(c)];
        unit[bus] = 1.0;
        auto z = lu->solve(unit);
        unit[bus] = 0.0;
        for (Eigen::Index r = 0; r < nm; ++r) model.machine_bus_impedance(r, c) = z[model.machine_buses[static_cast<std::size_t>(r)]];
    }
    return model;
}

Complex norton_current(const NortonMachine& machine, double e_prime, double delta) {
    return std::polar(e_prime / machine.x_sys, delta - std::numbers::pi / 2.0);
}

std::vector<Complex> assemble_injections(const NetworkModel& model, std::span<const MachineState> states) {
    std::vector<Complex> current(model.bus_count(), Complex{});
    for (std::size_t k = 0; k < model.machines.size(); ++k) {
        if (states[k].online) current[model.machines[k].bus] += states[k].i_inj;
    }
    return current;
}

std::vector<double> electrical_torque(const NetworkModel& model, std::span<const MachineState> states,
                                      std::span<const Complex> voltages) {
    std::vector<double> te(model.machines.size(), 0.0);
    for (std::size_t k = 0; k < model.machines.size(); ++k) {
        if (!states[k].online) continue;
        const auto& m = model.machines[k];
        const Complex vt = voltages[m.bus];
        const Complex stator = states[k].i_inj - m.shunt * vt;
        te[k] = (vt * std::conj(stator)).real() * model.s_base_mva / m.s_base_mva;
    }
    return te;
}

std::vector<Complex> solve_network(const NetworkModel& model, std::span<const MachineState> states) {
    auto rhs = assemble_injections(model, states);
    return model.factor->solve(rhs);
}

std::vector<MachineState> init_machines(const NetworkModel& model, const GridCase& grid,
                                        const PowerFlowSolution& solution) {
    if (solution.gen_p_mw.size() != grid.generators.size()) {
        throw DataError("power-flow solution carries no generation record for the case generators");
    }
    const auto v = solution.voltages();
    std::vector<MachineState> states;
    states.reserve(model.machines.size());
    for (const auto& m : model.machines) {
        const Complex s(solution.gen_p_mw[m.gen_index] / model.s_base_mva,
                        solution.gen_q_mvar[m.gen_index] / model.s_base_mva);
        const Complex vt = v[m.bus];
        const Complex stator = std::conj(s / vt);
        const Complex emf = vt + Complex(0.0, m.x_sys) * stator;
        MachineState st;
        st.gen_id = m.gen_id;
        st.e_prime = std::abs(emf);
        st.delta = std::arg(emf);
        st.i_inj = norton_current(m, st.e_prime, st.delta);
        states.push_back(st);
    }
    const auto v_model = solve_network(model, states);
    const auto te = electrical_torque(model, states, v_model);
    for (std::size_t k = 0; k < states.size(); ++k) states[k].t_m = te[k];
    return states;
}

double reconstruction_error(const NetworkModel& model, std::span<const MachineState> states,
                            const PowerFlowSolution& solution) {
    const auto v_model = solve_network(model, states);
    const auto v_pf = solution.voltages();
    double worst = 0.0;
    for (std::size_t i = 0; i < v_pf.size(); ++i) worst = std::max(worst, std::abs(v_model[i] - v_pf[i]));
    return worst;
}

}  // namespace rocofscreen
