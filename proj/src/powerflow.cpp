#include "rocofscreen/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rocofscreen/errors.hpp"
#include "rocofscreen/netdyn.hpp"
#include "rocofscreen/sparse_lu.hpp"

namespace rocofscreen {

std::vector<std::complex<double>> PowerFlowSolution::voltages() const {
    std::vector<Complex> v(v_mag.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::polar(v_mag[i], v_ang[i]);
    return v;
}

namespace {

struct Schedule {
    std::vector<BusKind> kind;  // effective kind
    std::vector<double> p;      // per unit
    std::vector<double> q;
    std::vector<double> load_p_mw;
    std::vector<double> load_q_mvar;
};

Schedule make_schedule(const GridCase& grid, const BusIndex& index) {
    const std::size_t n = grid.buses.size();
    Schedule s{std::vector<BusKind>(n), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
               std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    std::vector<bool> has_gen(n, false);
    for (const auto& g : grid.generators) {
        if (!g.in_service) continue;
        auto b = index.at(g.bus_id);
        has_gen[b] = true;
        s.p[b] += g.p_mw;
        s.q[b] += g.q_mvar;
    }
    for (const auto& l : grid.loads) {
        auto b = index.at(l.bus_id);
        s.load_p_mw[b] += l.p_mw;
        s.load_q_mvar[b] += l.q_mvar;
    }
    for (std::size_t i = 0; i < n; ++i) {
        s.p[i] = (s.p[i] - s.load_p_mw[i]) / grid.s_base_mva;
        s.q[i] = (s.q[i] - s.load_q_mvar[i]) / grid.s_base_mva;
        auto kind = grid.buses[i].kind;
        s.kind[i] = (kind == BusKind::pv && !has_gen[i]) ? BusKind::pq : kind;
    }
    return s;
}

std::vector<Complex> injections(const ComplexSparse& y, const std::vector<Complex>& v) {
    std::vector<Complex> current(v.size(), Complex{});
    for (int col = 0; col < y.outerSize(); ++col) {
        for (ComplexSparse::InnerIterator it(y, col); it; ++it) {
            current[static_cast<std::size_t>(it.row())] += it.value() * v[static_cast<std::size_t>(col)];
        }
    }
    std::vector<Complex> s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] * std::conj(current[i]);
    return s;
}

double max_mismatch(const Schedule& sched, const std::vector<Complex>& s, std::size_t* worst = nullptr) {
    double worst_value = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (sched.kind[i] == BusKind::slack) continue;
        double dp = std::abs(s[i].real() - sched.p[i]);
        double dq = sched.kind[i] == BusKind::pq ? std::abs(s[i].imag() - sched.q[i]) : 0.0;
        double m = std::max(dp, dq);
        if (!(m <= worst_value)) {  // NaN propagates as worst
            worst_value = m;
            if (worst) *worst = i;
        }
    }
    return worst_value;
}

// Shares the solved bus injection among the machines at slack and PV buses.
void assign_generator_outputs(const GridCase& grid, const BusIndex& index, const Schedule& sched,
                              const std::vector<Complex>& s, PowerFlowSolution& out) {
    const std::size_t ng = grid.generators.size();
    out.gen_p_mw.assign(ng, 0.0);
    out.gen_q_mvar.assign(ng, 0.0);
    const std::size_t n = grid.buses.size();
    std::vector<std::vector<std::size_t>> at_bus(n);
    for (std::size_t k = 0; k < ng; ++k) {
        const auto& g = grid.generators[k];
        if (!g.in_service) continue;
        at_bus[index.at(g.bus_id)].push_back(k);
        out.gen_p_mw[k] = g.p_mw;
        out.gen_q_mvar[k] = g.q_mvar;
    }
    const double base = grid.s_base_mva;
    for (std::size_t i = 0; i < n; ++i) {
        if (sched.kind[i] == BusKind::pq || at_bus[i].empty()) continue;
        if (sched.kind[i] == BusKind::slack) {
            double p_needed = s[i].real() * base + sched.load_p_mw[i];
            std::vector<std::size_t> sharers;
            for (auto k : at_bus[i]) {
                if (grid.generators[k].synchronous) {
                    sharers.push_back(k);
                } else {
                    p_needed -= grid.generators[k].p_mw;
                }
            }
            if (sharers.empty()) {
                sharers = at_bus[i];
                p_needed = s[i].real() * base + sched.load_p_mw[i];
            }
            double total_mva = 0.0;
            for (auto k : sharers) total_mva += grid.generators[k].s_base_mva;
            for (auto k : sharers) out.gen_p_mw[k] = p_needed * grid.generators[k].s_base_mva / total_mva;
        }
        double q_needed = s[i].imag() * base + sched.load_q_mvar[i];
        double total_mva = 0.0;
        for (auto k : at_bus[i]) total_mva += grid.generators[k].s_base_mva;
        for (auto k : at_bus[i]) out.gen_q_mvar[k] = q_needed * grid.generators[k].s_base_mva / total_mva;
    }
}

}  // namespace

PowerFlowSolution solve_powerflow(const GridCase& grid, const PowerFlowOptions& options) {
    BusIndex index(grid);
    const std::size_t n = grid.buses.size();
    const Schedule sched = make_schedule(grid, index);
    const ComplexSparse y = build_ybus(grid);

    std::vector<double> vm(n, 1.0);
    std::vector<double> va(n, 0.0);
    std::vector<std::size_t> pvpq;
    std::vector<std::size_t> pq;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& bus = grid.buses[i];
        switch (sched.kind[i]) {
            case BusKind::slack:
                vm[i] = bus.v_mag;
                va[i] = bus.v_ang;
                break;
            case BusKind::pv:
                vm[i] = bus.v_mag;
                pvpq.push_back(i);
                break;
            case BusKind::pq:
                pvpq.push_back(i);
                pq.push_back(i);
                break;
        }
    }
    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(vm[i], va[i]);
    const auto npvpq = static_cast<int>(pvpq.size());
    const auto dim = static_cast<int>(pvpq.size() + pq.size());
    std::vector<int> theta_pos(n, -1);
    std::vector<int> vm_pos(n, -1);
    for (int k = 0; k < npvpq; ++k) theta_pos[pvpq[static_cast<std::size_t>(k)]] = k;
    for (std::size_t k = 0; k < pq.size(); ++k) vm_pos[pq[k]] = npvpq + static_cast<int>(k);

    PowerFlowSolution out;
    linalg::RealLu lu;
    bool analyzed = false;
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> rhs(static_cast<std::size_t>(dim));

    for (int iter = 0;; ++iter) {
        auto s = injections(y, v);
        std::size_t worst = 0;
        double mismatch = max_mismatch(sched, s, &worst);
        out.max_mismatch = mismatch;
        if (mismatch <= options.tol) {
            out.iterations = iter;
            break;
        }
        if (iter >= options.max_iter || !std::isfinite(mismatch)) {
            throw NumericalError("power flow did not converge after " + std::to_string(iter) +
                                 " iterations (max mismatch " + std::to_string(mismatch) + " pu at bus " +
                                 std::to_string(grid.buses[worst].id) + ")");
        }

        // Current injections for the diagonal terms.
        std::vector<Complex> current(n);
        for (std::size_t i = 0; i < n; ++i) current[i] = std::conj(s[i] / v[i]);

        triplets.clear();
        for (int col = 0; col < y.outerSize(); ++col) {
            const auto j = static_cast<std::size_t>(col);
            const Complex vj_unit = v[j] / std::abs(v[j]);
            for (ComplexSparse::InnerIterator it(y, col); it; ++it) {
                const auto i = static_cast<std::size_t>(it.row());
                Complex ds_dtheta = Complex(0.0, -1.0) * v[i] * std::conj(it.value() * v[j]);
                Complex ds_dvm = v[i] * std::conj(it.value() * vj_unit);
                if (i == j) {
                    ds_dtheta += Complex(0.0, 1.0) * v[i] * std::conj(current[i]);
                    ds_dvm += std::conj(current[i]) * vj_unit;
                }
                if (theta_pos[i] >= 0) {
                    if (theta_pos[j] >= 0) triplets.emplace_back(theta_pos[i], theta_pos[j], ds_dtheta.real());
                    if (vm_pos[j] >= 0) triplets.emplace_back(theta_pos[i], vm_pos[j], ds_dvm.real());
                }
                if (vm_pos[i] >= 0) {
                    if (theta_pos[j] >= 0) triplets.emplace_back(vm_pos[i], theta_pos[j], ds_dtheta.imag());
                    if (vm_pos[j] >= 0) triplets.emplace_back(vm_pos[i], vm_pos[j], ds_dvm.imag());
                }
            }
        }
        RealSparse jac(dim, dim);
        jac.setFromTriplets(triplets.begin(), triplets.end());
        jac.makeCompressed();
        if (!analyzed) {
            lu.analyze(jac);
            analyzed = true;
        }
        try {
            lu.factorize(jac);
        } catch (const NumericalError&) {
            std::string where;
            if (auto col = lu.singular_column()) {
                auto c = static_cast<std::size_t>(*col);
                auto bus = c < pvpq.size() ? pvpq[c] : pq[c - pvpq.size()];
                where = " at bus " + std::to_string(grid.buses[bus].id);
            }
            throw NumericalError("singular power-flow Jacobian" + where);
        }

        for (std::size_t i = 0; i < n; ++i) {
            if (theta_pos[i] >= 0) rhs[static_cast<std::size_t>(theta_pos[i])] = sched.p[i] - s[i].real();
            if (vm_pos[i] >= 0) rhs[static_cast<std::size_t>(vm_pos[i])] = sched.q[i] - s[i].imag();
        }
        auto dx = lu.solve(rhs);
        for (std::size_t i = 0; i < n; ++i) {
            if (theta_pos[i] >= 0) va[i] += dx[static_cast<std::size_t>(theta_pos[i])];
            if (vm_pos[i] >= 0) vm[i] += dx[static_cast<std::size_t>(vm_pos[i])];
            v[i] = std::polar(vm[i], va[i]);
        }
    }

    out.v_mag = vm;
    out.v_ang = va;
    assign_generator_outputs(grid, index, sched, injections(y, v), out);
    return out;
}

double injection_mismatch(const GridCase& grid, const std::vector<Complex>& voltages) {
    BusIndex index(grid);
    auto sched = make_schedule(grid, index);
    return max_mismatch(sched, injections(build_ybus(grid), voltages));
}

PowerFlowSolution accept_solved_voltages(const GridCase& grid, double tol) {
    BusIndex index(grid);
    const auto sched = make_schedule(grid, index);
    std::vector<Complex> v(grid.buses.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::polar(grid.buses[i].v_mag, grid.buses[i].v_ang);
    auto s = injections(build_ybus(grid), v);
    std::size_t worst = 0;
    double mismatch = max_mismatch(sched, s, &worst);
    if (!(mismatch <= tol)) {
        throw DataError("stored voltages inconsistent with injections: max mismatch " + std::to_string(mismatch) +
                        " pu at bus " + std::to_string(grid.buses[worst].id));
    }
    PowerFlowSolution out;
    out.iterations = 0;
    out.max_mismatch = mismatch;
    out.v_mag.resize(v.size());
    out.v_ang.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.v_mag[i] = grid.buses[i].v_mag;
        out.v_ang[i] = grid.buses[i].v_ang;
    }
    assign_generator_outputs(grid, index, sched, s, out);
    return out;
}

GridCase apply_solution(GridCase grid, const PowerFlowSolution& solution) {
    for (std::size_t i = 0; i < grid.buses.size(); ++i) {
        grid.buses[i].v_mag = solution.v_mag[i];
        grid.buses[i].v_ang = solution.v_ang[i];
    }
    for (std::size_t k = 0; k < grid.generators.size(); ++k) {
        if (!grid.generators[k].in_service) continue;
        grid.generators[k].p_mw = solution.gen_p_mw[k];
        grid.generators[k].q_mvar = solution.gen_q_mvar[k];
    }
    return grid;
}

}  // namespace rocofscreen
