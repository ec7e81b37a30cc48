#include "rocofscreen/rocof.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string_view>

#include <Eigen/LU>

#include "rocofscreen/errors.hpp"

namespace rocofscreen {

Contingency make_outage(const GridCase& grid, std::vector<int> generator_ids, std::string id) {
    Contingency c;
    c.id = std::move(id);
    std::sort(generator_ids.begin(), generator_ids.end());
    generator_ids.erase(std::unique(generator_ids.begin(), generator_ids.end()), generator_ids.end());
    for (int gid : generator_ids) {
        const auto& g = generator_by_id(grid, gid);
        if (!g.in_service) throw DataError("generator " + std::to_string(gid) + " is not in service");
        if (!g.synchronous) throw DataError("generator " + std::to_string(gid) + " is not synchronous");
        c.total_mw_lost += g.p_mw;
    }
    c.outaged_generator_ids = std::move(generator_ids);
    if (c.id.empty()) {
        for (std::size_t i = 0; i < c.outaged_generator_ids.size(); ++i) {
            c.id += (i ? "+gen" : "gen") + std::to_string(c.outaged_generator_ids[i]);
        }
        if (c.id.empty()) c.id = "none";
    }
    return c;
}

std::vector<int> parse_generator_list(const std::string& text) {
    std::vector<int> ids;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        std::string_view digits = token;
        if (digits.size() > 3 && std::tolower(static_cast<unsigned char>(digits[0])) == 'g' &&
            std::tolower(static_cast<unsigned char>(digits[1])) == 'e' &&
            std::tolower(static_cast<unsigned char>(digits[2])) == 'n') {
            digits.remove_prefix(3);
        }
        int value = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
            throw DataError("cannot parse generator id '" + token + "'");
        }
        ids.push_back(value);
        token.clear();
    };
    for (char ch : text) {
        if (ch == ',' || ch == ';' || std::isspace(static_cast<unsigned char>(ch))) {
            flush();
        } else {
            token.push_back(ch);
        }
    }
    flush();
    if (ids.empty()) throw DataError("empty generator list");
    return ids;
}

double system_rocof(const GridCase& grid, double p_loss_mw, std::span<const int> outaged) {
    double inertia_mws = 0.0;
    for (const auto& g : grid.generators) {
        if (!g.in_service || !g.synchronous || !g.h_sec) continue;
        if (std::find(outaged.begin(), outaged.end(), g.id) != outaged.end()) continue;
        inertia_mws += *g.h_sec * g.s_base_mva;
    }
    if (!(inertia_mws > 0.0)) throw DataError("zero remaining inertia");
    return -grid.f_base_hz * p_loss_mw / (2.0 * inertia_mws) + 0.0;
}

double angle_second_derivative(Complex v, Complex v_ddot) {
    const double mag2 = std::norm(v);
    if (!(mag2 > 0.0)) throw NumericalError("angle second derivative undefined at zero voltage");
    return (v.real() * v_ddot.imag() - v.imag() * v_ddot.real()) / mag2;
}

Complex injection_second_derivative(double e_over_x, double delta, double omega, double omega_dot) {
    return std::polar(e_over_x, delta) * omega_dot +
           omega * omega * std::polar(e_over_x, delta + std::numbers::pi / 2.0);
}

std::vector<Complex> injection_derivatives(const NetworkModel& model, std::span<const MachineState> states,
                                           std::span<const double> omega_dot) {
    std::vector<Complex> out(model.machines.size(), Complex{});
    for (std::size_t k = 0; k < model.machines.size(); ++k) {
        if (!states[k].online) continue;
        out[k] = std::polar(states[k].e_prime / model.machines[k].x_sys, states[k].delta) * omega_dot[k];
    }
    return out;
}

namespace {

/// Y with some machine shunts removed, solved through the base factorization
/// plus a correction on the affected machine buses.
class ReducedNetworkSolver {
  public:
    ReducedNetworkSolver(const NetworkModel& model, std::span<const std::size_t> removed_machines) : model_(model) {
        for (auto k : removed_machines) {
            const auto& m = model.machines[k];
            const int slot = model.machine_bus_slot[m.bus];
            auto it = std::find(slots_.begin(), slots_.end(), slot);
            if (it == slots_.end()) {
                slots_.push_back(slot);
                removed_.push_back(m.shunt);
            } else {
                removed_[static_cast<std::size_t>(it - slots_.begin())] += m.shunt;
            }
        }
        const auto nb = static_cast<Eigen::Index>(slots_.size());
        if (nb == 0) return;
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(nb, nb);
        for (Eigen::Index r = 0; r < nb; ++r) {
            for (Eigen::Index c = 0; c < nb; ++c) {
                a(r, c) -= model.machine_bus_impedance(slots_[static_cast<std::size_t>(r)], slots_[static_cast<std::size_t>(c)]) *
                           removed_[static_cast<std::size_t>(c)];
            }
        }
        lu_.compute(a);
        if (!lu_.isInvertible()) throw NumericalError("singular reduced matrix after machine removal");
    }

    /// rhs must be zero away from machine buses.
    std::vector<Complex> solve(std::vector<Complex> rhs) const {
        const auto nb = static_cast<Eigen::Index>(slots_.size());
        if (nb > 0) {
            const auto& z = model_.machine_bus_impedance;
            Eigen::VectorXcd r = Eigen::VectorXcd::Zero(nb);
            for (Eigen::Index i = 0; i < nb; ++i) {
                const auto row = slots_[static_cast<std::size_t>(i)];
                for (std::size_t s = 0; s < model_.machine_buses.size(); ++s) {
                    r(i) += z(row, static_cast<Eigen::Index>(s)) * rhs[model_.machine_buses[s]];
                }
            }
            Eigen::VectorXcd vb = lu_.solve(r);
            for (Eigen::Index i = 0; i < nb; ++i) {
                const auto bus = model_.machine_buses[static_cast<std::size_t>(slots_[static_cast<std::size_t>(i)])];
                rhs[bus] += removed_[static_cast<std::size_t>(i)] * vb(i);
            }
        }
        return model_.factor->solve(rhs);
    }

  private:
    const NetworkModel& model_;
    std::vector<int> slots_;
    std::vector<Complex> removed_;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu_;
};

}  // namespace

RocofResult locational_rocof(const NetworkModel& model, std::span<const MachineState> states,
                             const Contingency& contingency) {
    const auto solves_before = linalg::solve_count();
    const std::size_t nm = model.machines.size();
    if (states.size() != nm) throw DataError("machine states do not match the network model");

    std::vector<MachineState> post(states.begin(), states.end());
    std::vector<std::size_t> removed;
    for (int gid : contingency.outaged_generator_ids) {
        auto it = std::find_if(model.machines.begin(), model.machines.end(),
                               [gid](const NortonMachine& m) { return m.gen_id == gid; });
        if (it == model.machines.end()) {
            throw DataError("generator " + std::to_string(gid) + " is not an in-service synchronous machine");
        }
        auto k = static_cast<std::size_t>(it - model.machines.begin());
        if (!post[k].online) continue;
        post[k].online = false;
        removed.push_back(k);
    }

    double remaining_mws = 0.0;
    for (std::size_t k = 0; k < nm; ++k) {
        if (post[k].online) remaining_mws += model.machines[k].h_sec * model.machines[k].s_base_mva;
    }
    if (!(remaining_mws > 0.0)) throw DataError("zero remaining inertia");

    RocofResult result;
    result.system_rocof_hz_s = -model.f_base_hz * contingency.total_mw_lost / (2.0 * remaining_mws) + 0.0;

    ReducedNetworkSolver solver(model, removed);
    result.post_disturbance_voltages = solver.solve(assemble_injections(model, post));
    const auto& v = result.post_disturbance_voltages;

    const auto te = electrical_torque(model, post, v);
    std::vector<double> omega_dot(nm, 0.0);
    result.machine_accel.assign(nm, std::nullopt);
    for (std::size_t k = 0; k < nm; ++k) {
        if (!post[k].online) continue;
        omega_dot[k] = (post[k].t_m - te[k]) / (2.0 * model.machines[k].h_sec);
        result.machine_accel[k] = omega_dot[k];
    }

    const auto i_ddot = injection_derivatives(model, post, omega_dot);
    std::vector<Complex> rhs(model.bus_count(), Complex{});
    for (std::size_t k = 0; k < nm; ++k) rhs[model.machines[k].bus] += i_ddot[k];
    result.voltage_second_derivative = solver.solve(std::move(rhs));
    const auto& v_ddot = result.voltage_second_derivative;

    std::vector<bool> island_live;
    for (std::size_t k = 0; k < nm; ++k) {
        if (!post[k].online) continue;
        auto label = static_cast<std::size_t>(model.island[model.machines[k].bus]);
        if (island_live.size() <= label) island_live.resize(label + 1, false);
        island_live[label] = true;
    }
    result.bus_rocof_hz_s.assign(model.bus_count(), std::nullopt);
    for (std::size_t i = 0; i < model.bus_count(); ++i) {
        auto label = static_cast<std::size_t>(model.island[i]);
        if (label >= island_live.size() || !island_live[label] || std::norm(v[i]) == 0.0) continue;
        result.bus_rocof_hz_s[i] = model.f_base_hz * angle_second_derivative(v[i], v_ddot[i]);
    }
    result.sparse_solves = linalg::solve_count() - solves_before;
    return result;
}

}  // namespace rocofscreen
