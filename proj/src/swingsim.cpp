#include "rocofscreen/swingsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rocofscreen/errors.hpp"

namespace rocofscreen {

double ufls_threshold_hz(UflsStage stage) {
    switch (stage) {
        case UflsStage::stage1: return kUflsStage1Hz;
        case UflsStage::stage2: return kUflsStage2Hz;
        case UflsStage::stage3: return kUflsStage3Hz;
        case UflsStage::none: break;
    }
    return -std::numeric_limits<double>::infinity();
}

std::vector<RelayLoad> relay_loads(const GridCase& grid) {
    std::vector<RelayLoad> out;
    for (const auto& l : grid.loads) out.push_back({l.id, l.bus_id, l.ufls_stage, l.ffr});
    return out;
}

std::vector<RelayLoad> relay_loads(const NetworkModel& model) {
    std::vector<RelayLoad> out;
    for (const auto& l : model.load_shunts) out.push_back({l.load_id, l.bus_id, l.ufls_stage, l.ffr});
    return out;
}

FrequencyRelays::FrequencyRelays(std::vector<RelayLoad> loads, std::span<const int> bus_ids, double f_base_hz,
                                 double dt, bool ufls, bool ffr)
    : f_base_hz_(f_base_hz), dt_(dt), ufls_(ufls), ffr_(ffr) {
    for (auto& load : loads) {
        auto it = std::find(bus_ids.begin(), bus_ids.end(), load.bus_id);
        if (it == bus_ids.end()) throw DataError("relay load " + std::to_string(load.load_id) + " on unknown bus");
        Watch w;
        w.load = load;
        w.bus = static_cast<std::size_t>(it - bus_ids.begin());
        watches_.push_back(w);
    }
}

std::vector<RelayEvent> FrequencyRelays::observe(double time, std::span<const double> bus_frequency_hz) {
    std::vector<RelayEvent> events;
    for (auto& w : watches_) {
        if (w.tripped) continue;
        const double f = bus_frequency_hz[w.bus];
        if (ufls_ && w.load.stage != UflsStage::none && f < ufls_threshold_hz(w.load.stage)) {
            w.tripped = true;
            events.push_back({RelayEvent::Kind::ufls, w.load.load_id, w.load.bus_id, w.load.stage, time, f});
            continue;
        }
        if (ffr_ && w.load.ffr) {
            if (f < kFfrPickupHz) {
                ++w.below_samples;
                const double cycles = static_cast<double>(w.below_samples) * dt_ * f_base_hz_;
                if (cycles > kFfrCycles + 1e-9) {
                    w.tripped = true;
                    events.push_back({RelayEvent::Kind::ffr, w.load.load_id, w.load.bus_id, w.load.stage, time, f});
                }
            } else {
                w.below_samples = 0;
            }
        }
    }
    return events;
}

WashoutDifferentiator::WashoutDifferentiator(double dt, double tc, double theta0)
    : dt_(dt), alpha_(tc > 0.0 ? std::exp(-dt / tc) : 0.0), last_theta_(theta0) {}

double WashoutDifferentiator::update(double theta) {
    const double chord = (theta - last_theta_) / dt_;
    rate_ = alpha_ * rate_ + (1.0 - alpha_) * chord;
    last_theta_ = theta;
    return rate_;
}

std::vector<double> bus_frequency(std::span<const double> angle, double dt, double f_base_hz, double tc) {
    if (angle.size() < 2) throw DataError("bus frequency needs at least 2 angle samples");
    std::vector<double> out(angle.size());
    WashoutDifferentiator diff(dt, tc, angle[0]);
    out[0] = f_base_hz;
    for (std::size_t k = 1; k < angle.size(); ++k) out[k] = f_base_hz + diff.update(angle[k]) / (2.0 * std::numbers::pi);
    return out;
}

namespace {

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a + std::numbers::pi, two_pi);
    if (a < 0.0) a += two_pi;
    return a - std::numbers::pi;
}

class SimNetwork {
  public:
    explicit SimNetwork(const NetworkModel& model) : y_(model.y_dyn), shared_(model.factor) {}

    void remove_shunt(std::size_t bus, Complex admittance) {
        const auto b = static_cast<int>(bus);
        y_.coeffRef(b, b) -= admittance;
        dirty_ = true;
    }

    void refresh() {
        if (!dirty_) return;
        if (!own_) {
            own_ = std::make_unique<linalg::ComplexLu>();
            own_->analyze(y_);
        }
        own_->factorize(y_);
        dirty_ = false;
    }

    std::vector<Complex> solve(std::span<const Complex> rhs) const {
        return own_ ? own_->solve(rhs) : shared_->solve(rhs);
    }

  private:
    ComplexSparse y_;
    std::shared_ptr<const linalg::ComplexLu> shared_;
    std::unique_ptr<linalg::ComplexLu> own_;
    bool dirty_ = false;
};

}  // namespace

SimResult simulate(const NetworkModel& model, std::span<const MachineState> states, const Contingency& contingency,
                   const SimOptions& opts) {
    if (!(opts.dt > 0.0) || !(opts.t_end >= opts.dt)) throw DataError("simulation needs dt > 0 and t_end >= dt");
    const std::size_t nm = model.machines.size();
    const std::size_t nb = model.bus_count();
    if (states.size() != nm) throw DataError("machine states do not match the network model");

    const double omega_s = 2.0 * std::numbers::pi * model.f_base_hz;
    const auto steps = static_cast<std::size_t>(std::llround(opts.t_end / opts.dt));
    const auto event_step = static_cast<std::size_t>(std::llround(std::max(0.0, opts.event_time) / opts.dt));

    std::vector<double> delta(nm), omega(nm), e_over_x(nm), tm(nm), two_h(nm);
    std::vector<bool> online(nm);
    for (std::size_t k = 0; k < nm; ++k) {
        delta[k] = states[k].delta;
        omega[k] = states[k].omega;
        online[k] = states[k].online;
        e_over_x[k] = states[k].e_prime / model.machines[k].x_sys;
        tm[k] = states[k].t_m;
        two_h[k] = 2.0 * model.machines[k].h_sec;
    }

    SimNetwork net(model);
    std::vector<bool> load_active(model.load_shunts.size(), true);

    auto solve_voltages = [&](const std::vector<double>& d) {
        std::vector<Complex> current(nb, Complex{});
        for (std::size_t k = 0; k < nm; ++k) {
            if (online[k]) current[model.machines[k].bus] += std::polar(e_over_x[k], d[k] - std::numbers::pi / 2.0);
        }
        return net.solve(current);
    };
    auto torque = [&](const std::vector<double>& d, const std::vector<Complex>& v, std::size_t k) {
        const auto& m = model.machines[k];
        const Complex inj = std::polar(e_over_x[k], d[k] - std::numbers::pi / 2.0);
        const Complex stator = inj - m.shunt * v[m.bus];
        return (v[m.bus] * std::conj(stator)).real() * model.s_base_mva / m.s_base_mva;
    };
    auto derivatives = [&](const std::vector<double>& d, const std::vector<double>& w, std::vector<double>& dd,
                           std::vector<double>& dw) {
        const auto v = solve_voltages(d);
        for (std::size_t k = 0; k < nm; ++k) {
            if (!online[k]) {
                dd[k] = 0.0;
                dw[k] = 0.0;
                continue;
            }
            dd[k] = omega_s * w[k];
            dw[k] = (tm[k] - torque(d, v, k) - opts.damping_d * w[k]) / two_h[k];
        }
    };

    SimResult out;
    out.f_base_hz = model.f_base_hz;
    out.dt = opts.dt;
    out.event_step = event_step;
    out.bus_ids = model.bus_ids;
    for (const auto& m : model.machines) out.gen_ids.push_back(m.gen_id);
    out.time.reserve(steps + 1);
    out.machine_delta.assign(nm, {});
    out.machine_omega.assign(nm, {});
    out.bus_angle.assign(nb, {});
    out.bus_frequency_hz.assign(nb, {});
    for (auto& tr : out.machine_delta) tr.reserve(steps + 1);
    for (auto& tr : out.machine_omega) tr.reserve(steps + 1);
    for (auto& tr : out.bus_angle) tr.reserve(steps + 1);
    for (auto& tr : out.bus_frequency_hz) tr.reserve(steps + 1);

    FrequencyRelays relays(relay_loads(model), model.bus_ids, model.f_base_hz, opts.dt);
    std::vector<WashoutDifferentiator> filters;
    std::vector<double> raw_prev(nb, 0.0);
    std::vector<double> freq(nb, model.f_base_hz);

    std::vector<double> k1d(nm), k1w(nm), k2d(nm), k2w(nm), k3d(nm), k3w(nm), k4d(nm), k4w(nm), td(nm), tw(nm);

    for (std::size_t step = 0;; ++step) {
        const double t = static_cast<double>(step) * opts.dt;
        if (step == event_step) {
            for (int gid : contingency.outaged_generator_ids) {
                auto it = std::find(out.gen_ids.begin(), out.gen_ids.end(), gid);
                if (it == out.gen_ids.end()) {
                    throw DataError("generator " + std::to_string(gid) + " is not an in-service synchronous machine");
                }
                const auto k = static_cast<std::size_t>(it - out.gen_ids.begin());
                if (!online[k]) continue;
                online[k] = false;
                net.remove_shunt(model.machines[k].bus, model.machines[k].shunt);
            }
            net.refresh();
        }

        const auto v = solve_voltages(delta);
        out.time.push_back(t);
        for (std::size_t k = 0; k < nm; ++k) {
            out.machine_delta[k].push_back(delta[k]);
            out.machine_omega[k].push_back(omega[k]);
        }
        for (std::size_t i = 0; i < nb; ++i) {
            const double raw = std::arg(v[i]);
            double unwrapped;
            if (step == 0) {
                unwrapped = raw;
                filters.emplace_back(opts.dt, opts.frequency_filter_tc, raw);
            } else {
                unwrapped = out.bus_angle[i].back() + wrap_angle(raw - raw_prev[i]);
                freq[i] = model.f_base_hz + filters[i].update(unwrapped) / (2.0 * std::numbers::pi);
            }
            raw_prev[i] = raw;
            out.bus_angle[i].push_back(unwrapped);
            out.bus_frequency_hz[i].push_back(freq[i]);
        }
        if (opts.relays_enabled) {
            for (const auto& ev : relays.observe(t, freq)) {
                out.events.push_back(ev);
                for (std::size_t j = 0; j < model.load_shunts.size(); ++j) {
                    if (model.load_shunts[j].load_id == ev.load_id && load_active[j]) {
                        load_active[j] = false;
                        net.remove_shunt(model.load_shunts[j].bus, model.load_shunts[j].admittance);
                    }
                }
            }
            net.refresh();
        }
        if (step == steps) break;

        const double h = opts.dt;
        derivatives(delta, omega, k1d, k1w);
        for (std::size_t k = 0; k < nm; ++k) {
            td[k] = delta[k] + 0.5 * h * k1d[k];
            tw[k] = omega[k] + 0.5 * h * k1w[k];
        }
        derivatives(td, tw, k2d, k2w);
        for (std::size_t k = 0; k < nm; ++k) {
            td[k] = delta[k] + 0.5 * h * k2d[k];
            tw[k] = omega[k] + 0.5 * h * k2w[k];
        }
        derivatives(td, tw, k3d, k3w);
        for (std::size_t k = 0; k < nm; ++k) {
            td[k] = delta[k] + h * k3d[k];
            tw[k] = omega[k] + h * k3w[k];
        }
        derivatives(td, tw, k4d, k4w);
        for (std::size_t k = 0; k < nm; ++k) {
            delta[k] += h / 6.0 * (k1d[k] + 2.0 * k2d[k] + 2.0 * k3d[k] + k4d[k]);
            omega[k] += h / 6.0 * (k1w[k] + 2.0 * k2w[k] + 2.0 * k3w[k] + k4w[k]);
            if (!(std::abs(omega[k]) <= opts.blowup_omega)) {
                std::ostringstream msg;
                msg << "simulation blow-up: generator " << model.machines[k].gen_id << " speed deviation " << omega[k]
                    << " pu at t=" << t + h << " s";
                throw NumericalError(msg.str());
            }
        }
    }
    out.machine_online.assign(online.begin(), online.end());
    return out;
}

namespace {

std::vector<RelayEvent> replay(const SimResult& sim, std::span<const RelayLoad> loads, bool ufls, bool ffr) {
    FrequencyRelays relays(std::vector<RelayLoad>(loads.begin(), loads.end()), sim.bus_ids, sim.f_base_hz, sim.dt,
                           ufls, ffr);
    std::vector<RelayEvent> events;
    std::vector<double> sample(sim.bus_ids.size());
    for (std::size_t k = 0; k < sim.time.size(); ++k) {
        for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = sim.bus_frequency_hz[i][k];
        auto fired = relays.observe(sim.time[k], sample);
        events.insert(events.end(), fired.begin(), fired.end());
    }
    return events;
}

}  // namespace

std::vector<RelayEvent> check_ufls(const SimResult& sim, std::span<const RelayLoad> loads) {
    return replay(sim, loads, true, false);
}

std::vector<RelayEvent> check_ffr(const SimResult& sim, std::span<const RelayLoad> loads) {
    return replay(sim, loads, false, true);
}

double finite_difference_rocof(const SimResult& sim, std::size_t bus, double window) {
    const auto half = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(window / (2.0 * sim.dt) + 1e-9)));
    const std::size_t k0 = sim.event_step;
    const auto& a = sim.bus_angle.at(bus);
    if (k0 + 2 * half >= a.size()) throw DataError("simulation too short for the finite-difference window");
    const double h = static_cast<double>(half) * sim.dt;
    return (a[k0 + 2 * half] - 2.0 * a[k0 + half] + a[k0]) / (h * h) / (2.0 * std::numbers::pi);
}

double coi_frequency_slope(const SimResult& sim, const NetworkModel& model, double window) {
    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window / sim.dt)));
    const std::size_t k0 = sim.event_step;
    if (k0 + m >= sim.time.size()) throw DataError("simulation too short for the slope window");
    double weight = 0.0;
    double w0 = 0.0;
    double w1 = 0.0;
    for (std::size_t k = 0; k < model.machines.size(); ++k) {
        if (!sim.machine_online[k]) continue;
        const double hs = model.machines[k].h_sec * model.machines[k].s_base_mva;
        weight += hs;
        w0 += hs * sim.machine_omega[k][k0];
        w1 += hs * sim.machine_omega[k][k0 + m];
    }
    if (!(weight > 0.0)) throw DataError("no online machines after the event");
    return sim.f_base_hz * (w1 - w0) / weight / (static_cast<double>(m) * sim.dt);
}

double machine_frequency_nadir(const SimResult& sim) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sim.machine_omega.size(); ++k) {
        if (!sim.machine_online.empty() && !sim.machine_online[k]) continue;
        for (double w : sim.machine_omega[k]) lowest = std::min(lowest, sim.f_base_hz * (1.0 + w));
    }
    return lowest;
}

}  // namespace rocofscreen
