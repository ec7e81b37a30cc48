#include "rocofscreen/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "rocofscreen/case_io.hpp"
#include "rocofscreen/errors.hpp"
#include "rocofscreen/log.hpp"
#include "rocofscreen/netdyn.hpp"
#include "rocofscreen/synthdyn.hpp"

namespace rocofscreen {

namespace {

bool is_wind(const Generator& g) { return !g.synchronous && g.fuel == Fuel::wind; }

int merit_rank(Fuel f) {
    switch (f) {
        case Fuel::nuclear: return 0;
        case Fuel::coal: return 1;
        case Fuel::gas: return 2;
        default: return 3;
    }
}

std::string numbered(char prefix, std::size_t i) {
    std::ostringstream ss;
    ss << prefix;
    ss.width(3);
    ss.fill('0');
    ss << i + 1;
    return ss.str();
}

}  // namespace

FleetCapacity fleet_capacity(const GridCase& grid) {
    FleetCapacity cap;
    for (const auto& l : grid.loads) cap.load_mw += l.p_mw;
    for (const auto& g : grid.generators) {
        if (is_wind(g)) {
            cap.wind_mw += g.p_max_mw;
        } else if (!g.synchronous) {
            if (g.in_service) cap.fixed_mw += g.p_mw;
        } else if (g.fuel == Fuel::nuclear) {
            cap.nuclear_mw += g.p_max_mw;
        } else {
            cap.dispatchable_mw += g.p_max_mw;
        }
    }
    return cap;
}

Dispatch dispatch_heuristic(const GridCase& base, double target_load_mw, double target_wind_mw,
                            const PowerFlowOptions& pf) {
    const auto cap = fleet_capacity(base);
    if (!(cap.load_mw > 0.0)) throw DataError("case has no load to scale");
    if (target_wind_mw < 0.0 || target_load_mw <= 0.0) throw DataError("load and wind targets must be positive");
    if (target_wind_mw > cap.wind_mw * (1.0 + 1e-12)) {
        throw DataError("wind target " + format_number(target_wind_mw) + " MW exceeds installed wind " +
                        format_number(cap.wind_mw) + " MW");
    }
    if (target_wind_mw + cap.nuclear_mw + cap.fixed_mw > target_load_mw) {
        throw DataError("wind target " + format_number(target_wind_mw) + " MW exceeds load " +
                        format_number(target_load_mw) + " MW minus the must-run floor");
    }

    Dispatch d;
    d.grid = base;
    GridCase& grid = d.grid;
    const double scale = target_load_mw / cap.load_mw;
    for (auto& l : grid.loads) {
        l.p_mw *= scale;
        l.q_mvar *= scale;
    }

    std::set<int> slack_buses;
    for (const auto& b : grid.buses) {
        if (b.kind == BusKind::slack) slack_buses.insert(b.id);
    }
    std::vector<std::size_t> merit;
    std::vector<bool> must_run(grid.generators.size(), false);
    for (std::size_t k = 0; k < grid.generators.size(); ++k) {
        auto& g = grid.generators[k];
        if (is_wind(g)) {
            g.p_mw = cap.wind_mw > 0.0 ? target_wind_mw * g.p_max_mw / cap.wind_mw : 0.0;
            g.in_service = g.p_max_mw > 0.0;
        } else if (g.synchronous && g.fuel == Fuel::nuclear) {
            g.in_service = true;
            g.p_mw = g.p_max_mw;
        } else if (g.synchronous) {
            must_run[k] = slack_buses.contains(g.bus_id);
            merit.push_back(k);
        }
    }
    std::stable_sort(merit.begin(), merit.end(), [&](std::size_t a, std::size_t b) -> bool {
        const auto& ga = grid.generators[a];
        const auto& gb = grid.generators[b];
        if (must_run[a] != must_run[b]) return must_run[a];
        if (merit_rank(ga.fuel) != merit_rank(gb.fuel)) return merit_rank(ga.fuel) < merit_rank(gb.fuel);
        if (ga.p_max_mw != gb.p_max_mw) return ga.p_max_mw > gb.p_max_mw;
        return ga.id < gb.id;
    });

    const double residual = target_load_mw - target_wind_mw - cap.nuclear_mw - cap.fixed_mw;
    double committed_mw = 0.0;
    std::size_t n_commit = 0;
    for (; n_commit < merit.size(); ++n_commit) {
        const auto k = merit[n_commit];
        if (!must_run[k] && committed_mw * 0.9 >= residual) break;
        committed_mw += grid.generators[k].p_max_mw;
    }
    if (committed_mw < residual) {
        throw DataError("insufficient synchronous capacity for " + format_number(target_load_mw) + " MW load");
    }
    const double factor = committed_mw > 0.0 ? std::min(residual / committed_mw, 1.0) : 0.0;
    for (std::size_t i = 0; i < merit.size(); ++i) {
        auto& g = grid.generators[merit[i]];
        g.in_service = i < n_commit;
        g.p_mw = g.in_service ? factor * g.p_max_mw : 0.0;
        if (!g.in_service) g.q_mvar = 0.0;
    }

    d.powerflow = solve_powerflow(grid, pf);
    grid = apply_solution(std::move(grid), d.powerflow);

    auto& s = d.summary;
    s.target_load_mw = target_load_mw;
    s.target_wind_mw = target_wind_mw;
    double total_gen = 0.0;
    for (const auto& g : grid.generators) {
        s.gen_p_mw.push_back(g.in_service ? g.p_mw : 0.0);
        if (!g.in_service) continue;
        total_gen += g.p_mw;
        if (g.synchronous) s.committed.push_back(g.id);
    }
    s.online_inertia_gws = total_inertia_gws(grid);
    s.wind_fraction = total_gen > 0.0 ? target_wind_mw / total_gen : 0.0;
    return d;
}

std::vector<LoadingCase> generate_loading_cases(const GridCase& base, int n, std::pair<double, double> load_range_mw,
                                                std::pair<double, double> wind_range_mw) {
    if (n <= 0) throw DataError("loading-case count must be positive");
    if (load_range_mw.first > load_range_mw.second || wind_range_mw.first > wind_range_mw.second) {
        throw DataError("ranges must be ordered low to high");
    }
    int n_wind = 1;
    for (int d = 1; static_cast<double>(d) * d <= n; ++d) {
        if (n % d == 0) n_wind = d;
    }
    const int n_load = n / n_wind;
    const auto cap = fleet_capacity(base);
    auto level = [](std::pair<double, double> r, int i, int count) {
        return count == 1 ? r.first : r.first + (r.second - r.first) * i / (count - 1);
    };

    std::vector<LoadingCase> cases;
    for (int i = 0; i < n_load; ++i) {
        const double load = level(load_range_mw, i, n_load);
        const double feasible = std::min(cap.wind_mw, load - cap.nuclear_mw - cap.fixed_mw);
        if (feasible < 0.0) {
            throw DataError("load level " + format_number(load) + " MW is below the must-run floor");
        }
        std::pair<double, double> wind{std::min(wind_range_mw.first, feasible), std::min(wind_range_mw.second, feasible)};
        if (wind != wind_range_mw) {
            logger().info("load {} MW: wind axis clipped to [{}, {}] MW", load, wind.first, wind.second);
        }
        for (int j = 0; j < n_wind; ++j) {
            auto d = dispatch_heuristic(base, load, level(wind, j, n_wind));
            d.summary.id = numbered('L', cases.size());
            cases.push_back(std::move(d.summary));
        }
    }
    return cases;
}

std::vector<Contingency> generate_contingencies(const GridCase& grid, const ContingencyConfig& config,
                                                std::uint64_t seed) {
    if (config.count <= 0) throw DataError("contingency count must be positive");
    if (!(config.min_mw > 0.0 && config.min_mw < config.design_mw && config.design_mw <= config.max_mw)) {
        throw DataError("contingency sizes must satisfy 0 < min < design <= max");
    }
    SynthRng rng(seed);
    auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + rng.uniform() * std::log(hi / lo)); };

    struct Unit {
        int id;
        int bus;
        double mw;
    };
    std::map<std::pair<int, Fuel>, std::vector<Unit>> plants;
    std::vector<Unit> units;
    for (const auto& g : grid.generators) {
        if (!g.synchronous || !(g.p_max_mw > 0.0)) continue;
        plants[{g.bus_id, g.fuel}].push_back({g.id, g.bus_id, g.p_max_mw});
        units.push_back({g.id, g.bus_id, g.p_max_mw});
    }

    struct Candidate {
        std::vector<int> ids;
        double mw;
    };
    std::vector<Candidate> pool;
    constexpr std::size_t kMaxEnumerated = 12;
    for (auto& [key, members] : plants) {
        std::sort(members.begin(), members.end(), [](const Unit& a, const Unit& b) { return a.id < b.id; });
        auto consider = [&](std::vector<int> ids, double mw) {
            if (mw > config.min_mw && mw <= config.design_mw) {
                std::sort(ids.begin(), ids.end());
                pool.push_back({std::move(ids), mw});
            }
        };
        if (members.size() <= kMaxEnumerated) {
            const auto m = members.size();
            for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
                std::vector<int> ids;
                double mw = 0.0;
                for (std::size_t b = 0; b < m; ++b) {
                    if (mask & (1u << b)) {
                        ids.push_back(members[b].id);
                        mw += members[b].mw;
                    }
                }
                consider(std::move(ids), mw);
            }
        } else {
            for (std::size_t s = 0; s < members.size(); ++s) {
                std::vector<int> ids;
                double mw = 0.0;
                for (std::size_t e = s; e < members.size(); ++e) {
                    ids.push_back(members[e].id);
                    mw += members[e].mw;
                    consider(ids, mw);
                }
            }
        }
    }
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
        return a.mw != b.mw ? a.mw < b.mw : a.ids < b.ids;
    });

    const int n_multi = static_cast<int>(std::floor(config.count * config.multi_site_fraction));
    const int n_single = config.count - n_multi;
    std::set<std::vector<int>> used;
    std::vector<Contingency> out;
    std::vector<bool> taken(pool.size(), false);

    for (int i = 0; i < n_single; ++i) {
        const double target = std::log(log_uniform(config.min_mw, config.design_mw));
        std::optional<std::size_t> best;
        for (std::size_t c = 0; c < pool.size(); ++c) {
            if (taken[c]) continue;
            if (!best || std::abs(std::log(pool[c].mw) - target) < std::abs(std::log(pool[*best].mw) - target)) best = c;
        }
        if (!best) {
            throw DataError("fleet yields only " + std::to_string(i) + " distinct single-plant outages above " +
                            format_number(config.min_mw) + " MW; " + std::to_string(n_single) + " requested");
        }
        taken[*best] = true;
        used.insert(pool[*best].ids);
        out.push_back({numbered('c', out.size()), pool[*best].ids, pool[*best].mw});
    }

    for (int i = 0; i < n_multi; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
            const double target = log_uniform(config.design_mw, config.max_mw);
            std::vector<std::size_t> order(units.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t k = order.size(); k > 1; --k) {
                const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k));
                std::swap(order[k - 1], order[std::min(j, k - 1)]);
            }
            std::vector<int> ids;
            std::set<int> buses;
            double mw = 0.0;
            for (auto k : order) {
                if (mw >= target) break;
                ids.push_back(units[k].id);
                buses.insert(units[k].bus);
                mw += units[k].mw;
            }
            std::sort(ids.begin(), ids.end());
            if (mw > config.design_mw && buses.size() > 1 && !used.contains(ids)) {
                used.insert(ids);
                out.push_back({numbered('c', out.size()), std::move(ids), mw});
                placed = true;
            }
        }
        if (!placed) throw DataError("fleet cannot supply distinct multi-site outages above the design size");
    }
    return out;
}

std::string_view to_string(BankMode mode) {
    switch (mode) {
        case BankMode::system_only: return "system_only";
        case BankMode::locational: return "locational";
        case BankMode::simulate: return "simulate";
    }
    return "?";
}

std::optional<BankMode> parse_bank_mode(std::string_view text) {
    for (auto m : {BankMode::system_only, BankMode::locational, BankMode::simulate}) {
        if (to_string(m) == text) return m;
    }
    return std::nullopt;
}

namespace {

struct PreparedCase {
    GridCase grid;
    NetworkModel model;
    std::vector<MachineState> states;
    double inertia_gws = 0.0;
};

ScenarioRecord evaluate(const PreparedCase& pc, const Contingency& contingency, const BankOptions& options) {
    ScenarioRecord row;
    row.contingency_id = contingency.id;
    row.inertia_gws = pc.inertia_gws;
    std::vector<int> online;
    for (int gid : contingency.outaged_generator_ids) {
        auto it = std::find_if(pc.grid.generators.begin(), pc.grid.generators.end(),
                               [gid](const Generator& g) { return g.id == gid; });
        if (it != pc.grid.generators.end() && it->in_service && it->synchronous) online.push_back(gid);
    }
    if (online.empty()) {
        row.status = "not_applicable";
        return row;
    }
    try {
        const auto outage = make_outage(pc.grid, online, contingency.id);
        row.mw_lost = outage.total_mw_lost;
        row.system_rocof = system_rocof(pc.grid, outage.total_mw_lost, outage.outaged_generator_ids);
        row.concern = row.system_rocof < kConcernRocof;
        if (options.mode == BankMode::system_only) return row;

        std::vector<std::optional<double>> bus;
        if (options.mode == BankMode::locational) {
            bus = locational_rocof(pc.model, pc.states, outage).bus_rocof_hz_s;
        } else {
            auto sim_opts = options.sim;
            sim_opts.t_end = std::max(sim_opts.t_end, sim_opts.event_time + 2.0 * options.fd_window);
            const auto sim = simulate(pc.model, pc.states, outage, sim_opts);
            for (std::size_t i = 0; i < sim.bus_ids.size(); ++i) {
                bus.emplace_back(finite_difference_rocof(sim, i, options.fd_window));
            }
        }
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < bus.size(); ++i) {
            if (!bus[i]) continue;
            const double r = *bus[i];
            if (!row.bus_rocof_min || r < *row.bus_rocof_min) {
                row.bus_rocof_min = r;
                row.worst_bus = pc.model.bus_ids[i];
            }
            if (!row.bus_rocof_max || r > *row.bus_rocof_max) row.bus_rocof_max = r;
            sum += r;
            ++count;
        }
        if (count == 0) {
            row.status = "error: no bus with a defined ROCOF";
        } else {
            row.bus_rocof_mean = std::clamp(sum / static_cast<double>(count), *row.bus_rocof_min, *row.bus_rocof_max);
        }
    } catch (const std::exception& e) {
        row.bus_rocof_min.reset();
        row.bus_rocof_mean.reset();
        row.bus_rocof_max.reset();
        row.worst_bus.reset();
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

}  // namespace

void run_bank(const GridCase& base, const std::vector<LoadingCase>& loading_cases,
              const std::vector<Contingency>& contingencies, const BankOptions& options,
              const std::function<void(const ScenarioRecord&)>& sink) {
    const unsigned workers = std::max(1u, options.workers);
    for (const auto& lc : loading_cases) {
        std::vector<ScenarioRecord> rows(contingencies.size());
        std::optional<PreparedCase> pc;
        std::string failure;
        try {
            auto d = dispatch_heuristic(base, lc.target_load_mw, lc.target_wind_mw, options.powerflow);
            PreparedCase p;
            p.inertia_gws = d.summary.online_inertia_gws;
            if (options.mode != BankMode::system_only) {
                p.model = augment_dynamic(build_ybus(d.grid), d.grid, d.powerflow);
                p.states = init_machines(p.model, d.grid, d.powerflow);
            }
            p.grid = std::move(d.grid);
            pc = std::move(p);
        } catch (const std::exception& e) {
            failure = std::string("error: loading case: ") + e.what();
        }

        if (!pc) {
            for (std::size_t c = 0; c < contingencies.size(); ++c) {
                rows[c].contingency_id = contingencies[c].id;
                rows[c].status = failure;
            }
        } else {
            std::atomic<std::size_t> next{0};
            auto work = [&] {
                for (std::size_t c = next++; c < contingencies.size(); c = next++) {
                    rows[c] = evaluate(*pc, contingencies[c], options);
                }
            };
            if (workers == 1 || contingencies.size() < 2) {
                work();
            } else {
                std::vector<std::jthread> pool;
                for (unsigned w = 0; w < std::min<std::size_t>(workers, contingencies.size()); ++w) pool.emplace_back(work);
            }
        }
        for (auto& row : rows) {
            row.loading_id = lc.id;
            sink(row);
        }
    }
}

std::vector<ScenarioRecord> run_bank(const GridCase& base, const std::vector<LoadingCase>& loading_cases,
                                     const std::vector<Contingency>& contingencies, const BankOptions& options) {
    std::vector<ScenarioRecord> rows;
    run_bank(base, loading_cases, contingencies, options, [&rows](const ScenarioRecord& r) { rows.push_back(r); });
    return rows;
}

// ---- files ----

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

double to_double(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(where + ": expected a number, got '" + s + "'");
    }
}

std::optional<double> to_opt_double(const std::string& s, const std::string& where) {
    if (s.empty()) return std::nullopt;
    return to_double(s, where);
}

std::vector<csv::Row> read_table(const std::filesystem::path& path, const csv::Row& header) {
    auto rows = csv::read_file(path);
    if (rows.empty() || rows[0] != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw DataError(path.string() + ":1: expected header " + expected);
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw DataError(path.string() + ":" + std::to_string(r + 1) + ": expected " +
                            std::to_string(header.size()) + " fields");
        }
    }
    rows.erase(rows.begin());
    return rows;
}

const csv::Row kLoadingHeader{"id", "target_load_mw", "target_wind_mw", "online_inertia_gws", "wind_fraction"};
const csv::Row kContingencyHeader{"id", "generator_ids", "nominal_mw"};
const csv::Row kScenarioHeader{"loading_id",     "contingency_id", "mw_lost",       "inertia_gws",
                               "system_rocof",   "bus_rocof_min",  "bus_rocof_mean", "bus_rocof_max",
                               "worst_bus",      "concern_flag",   "status"};

}  // namespace

void write_loading_cases(const std::vector<LoadingCase>& cases, std::ostream& out) {
    csv::write_row(out, kLoadingHeader);
    for (const auto& c : cases) {
        const std::vector<std::string> row{c.id, format_number(c.target_load_mw), format_number(c.target_wind_mw),
                                           format_number(c.online_inertia_gws), format_number(c.wind_fraction)};
        csv::write_row(out, row);
    }
}

std::vector<LoadingCase> read_loading_cases(const std::filesystem::path& path) {
    std::vector<LoadingCase> out;
    const auto rows = read_table(path, kLoadingHeader);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string where = path.string() + ":" + std::to_string(r + 2);
        LoadingCase c;
        c.id = rows[r][0];
        c.target_load_mw = to_double(rows[r][1], where);
        c.target_wind_mw = to_double(rows[r][2], where);
        c.online_inertia_gws = to_double(rows[r][3], where);
        c.wind_fraction = to_double(rows[r][4], where);
        out.push_back(std::move(c));
    }
    return out;
}

void write_contingencies(const std::vector<Contingency>& contingencies, std::ostream& out) {
    csv::write_row(out, kContingencyHeader);
    for (const auto& c : contingencies) {
        std::string ids;
        for (int id : c.outaged_generator_ids) ids += (ids.empty() ? "" : ";") + std::to_string(id);
        const std::vector<std::string> row{c.id, ids, format_number(c.total_mw_lost)};
        csv::write_row(out, row);
    }
}

std::vector<Contingency> read_contingencies(const std::filesystem::path& path) {
    std::vector<Contingency> out;
    const auto rows = read_table(path, kContingencyHeader);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string where = path.string() + ":" + std::to_string(r + 2);
        Contingency c;
        c.id = rows[r][0];
        c.outaged_generator_ids = parse_generator_list(rows[r][1]);
        if (c.outaged_generator_ids.empty()) throw DataError(where + ": contingency without generators");
        c.total_mw_lost = to_double(rows[r][2], where);
        out.push_back(std::move(c));
    }
    return out;
}

void write_scenario_header(std::ostream& out) { csv::write_row(out, kScenarioHeader); }

void write_scenario_row(const ScenarioRecord& r, std::ostream& out) {
    const std::vector<std::string> row{r.loading_id,
                                       r.contingency_id,
                                       format_number(r.mw_lost),
                                       format_number(r.inertia_gws),
                                       format_number(r.system_rocof),
                                       opt_number(r.bus_rocof_min),
                                       opt_number(r.bus_rocof_mean),
                                       opt_number(r.bus_rocof_max),
                                       r.worst_bus ? std::to_string(*r.worst_bus) : "",
                                       r.concern ? "1" : "0",
                                       r.status};
    csv::write_row(out, row);
}

std::vector<ScenarioRecord> read_scenario_table(const std::filesystem::path& path) {
    std::vector<ScenarioRecord> out;
    const auto rows = read_table(path, kScenarioHeader);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string where = path.string() + ":" + std::to_string(r + 2);
        const auto& f = rows[r];
        ScenarioRecord s;
        s.loading_id = f[0];
        s.contingency_id = f[1];
        s.mw_lost = to_double(f[2], where);
        s.inertia_gws = to_double(f[3], where);
        s.system_rocof = to_double(f[4], where);
        s.bus_rocof_min = to_opt_double(f[5], where);
        s.bus_rocof_mean = to_opt_double(f[6], where);
        s.bus_rocof_max = to_opt_double(f[7], where);
        if (!f[8].empty()) s.worst_bus = static_cast<int>(to_double(f[8], where));
        s.concern = f[9] == "1";
        s.status = f[10];
        out.push_back(std::move(s));
    }
    return out;
}

BankReport summarize_bank(const std::vector<ScenarioRecord>& rows, const std::vector<LoadingCase>& loading_cases,
                          double bin_mw) {
    if (!(bin_mw > 0.0)) throw DataError("bin width must be positive");
    BankReport report;
    std::map<long, LossBin> bins;
    std::map<long, std::size_t> bus_counts;
    std::vector<std::string> order;
    std::map<std::string, LoadingSummary> loading;
    std::map<std::string, std::array<double, 4>> fits;  // sum x*y_sys, sum x^2, sum x*y_bus, sum x^2 (bus rows)

    for (const auto& r : rows) {
        if (r.status != "ok") continue;
        const auto key = static_cast<long>(std::floor(r.mw_lost / bin_mw));
        auto& bin = bins[key];
        if (bin.count == 0) {
            bin.lo_mw = static_cast<double>(key) * bin_mw;
            bin.hi_mw = bin.lo_mw + bin_mw;
            bin.system_rocof_min = r.system_rocof;
        }
        ++bin.count;
        bin.system_rocof_mean += r.system_rocof;
        bin.system_rocof_min = std::min(bin.system_rocof_min, r.system_rocof);
        if (r.concern) ++bin.concern_count;
        if (r.bus_rocof_mean) {
            bin.bus_mean_mean = bin.bus_mean_mean.value_or(0.0) + *r.bus_rocof_mean;
            ++bus_counts[key];
        }
        if (r.bus_rocof_min) bin.bus_min_min = std::min(bin.bus_min_min.value_or(*r.bus_rocof_min), *r.bus_rocof_min);

        if (!loading.contains(r.loading_id)) {
            order.push_back(r.loading_id);
            loading[r.loading_id].loading_id = r.loading_id;
            fits[r.loading_id] = {0.0, 0.0, 0.0, 0.0};
        }
        auto& ls = loading[r.loading_id];
        ls.inertia_gws = r.inertia_gws;
        ++ls.scenarios;
        if (r.concern) ++ls.concern_count;
        if (r.bus_rocof_min) ls.worst_bus_rocof = std::min(ls.worst_bus_rocof.value_or(*r.bus_rocof_min), *r.bus_rocof_min);
        auto& fit = fits[r.loading_id];
        fit[0] += r.mw_lost * r.system_rocof;
        fit[1] += r.mw_lost * r.mw_lost;
        if (r.bus_rocof_mean) {
            fit[2] += r.mw_lost * *r.bus_rocof_mean;
            fit[3] += r.mw_lost * r.mw_lost;
        }
    }
    for (auto& [key, bin] : bins) {
        bin.system_rocof_mean /= static_cast<double>(bin.count);
        if (bin.bus_mean_mean) *bin.bus_mean_mean /= static_cast<double>(bus_counts[key]);
        report.loss_bins.push_back(bin);
    }
    for (const auto& id : order) {
        auto ls = loading[id];
        const auto& fit = fits[id];
        if (fit[1] > 0.0) ls.system_slope = fit[0] / fit[1];
        if (fit[3] > 0.0) ls.bus_mean_slope = fit[2] / fit[3];
        for (const auto& lc : loading_cases) {
            if (lc.id == id) ls.wind_fraction = lc.wind_fraction;
        }
        report.loading.push_back(std::move(ls));
    }
    return report;
}

void write_loss_bins(const BankReport& report, std::ostream& out) {
    const std::vector<std::string> header{"mw_lost_lo",     "mw_lost_hi",   "scenarios",    "system_rocof_mean",
                                          "system_rocof_min", "bus_rocof_mean", "bus_rocof_min", "concern_count"};
    csv::write_row(out, header);
    for (const auto& b : report.loss_bins) {
        const std::vector<std::string> row{format_number(b.lo_mw),         format_number(b.hi_mw),
                                           std::to_string(b.count),        format_number(b.system_rocof_mean),
                                           format_number(b.system_rocof_min), opt_number(b.bus_mean_mean),
                                           opt_number(b.bus_min_min),      std::to_string(b.concern_count)};
        csv::write_row(out, row);
    }
}

void write_loading_summary(const BankReport& report, std::ostream& out) {
    const std::vector<std::string> header{"loading_id",       "inertia_gws",    "wind_fraction",
                                          "scenarios",        "concern_count",  "worst_bus_rocof",
                                          "system_slope_hz_s_per_mw", "bus_mean_slope_hz_s_per_mw"};
    csv::write_row(out, header);
    for (const auto& l : report.loading) {
        const std::vector<std::string> row{l.loading_id,
                                           format_number(l.inertia_gws),
                                           opt_number(l.wind_fraction),
                                           std::to_string(l.scenarios),
                                           std::to_string(l.concern_count),
                                           opt_number(l.worst_bus_rocof),
                                           format_number(l.system_slope),
                                           opt_number(l.bus_mean_slope)};
        csv::write_row(out, row);
    }
}

}  // namespace rocofscreen
