#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rocofscreen/case_io.hpp"
#include "rocofscreen/errors.hpp"
#include "rocofscreen/netdyn.hpp"
#include "rocofscreen/powerflow.hpp"
#include "rocofscreen/rocof.hpp"
#include "rocofscreen/scenarios.hpp"
#include "rocofscreen/swingsim.hpp"
#include "rocofscreen/synthdyn.hpp"

namespace rocofscreen::cli {

namespace fs = std::filesystem;

namespace {

void add_case(CLI::App* sub, Options& o) {
    sub->add_option("--case", o.case_path, "Case document (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--sidecar", o.sidecar, "Dynamics sidecar CSV (default: <stem>.dyn.csv if present)")
        ->check(CLI::ExistingFile);
}

void add_tol(CLI::App* sub, Options& o) {
    sub->add_option("--tol", o.tol, "Power-flow mismatch tolerance, per unit")->check(CLI::PositiveNumber);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

GridCase load(const Options& o, bool require_dynamics) {
    ReadOptions ro;
    ro.require_dynamics = require_dynamics;
    if (!o.sidecar.empty()) ro.sidecar = o.sidecar;
    return read_case(o.case_path, ro);
}

struct Prepared {
    GridCase grid;
    PowerFlowSolution pf;
    NetworkModel model;
    std::vector<MachineState> states;
};

Prepared prepare(const Options& o) {
    Prepared p;
    const auto base = load(o, true);
    p.pf = solve_powerflow(base, {.tol = o.tol});
    p.grid = apply_solution(base, p.pf);
    p.model = augment_dynamic(build_ybus(p.grid), p.grid, p.pf);
    p.states = init_machines(p.model, p.grid, p.pf);
    return p;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    return f;
}

int cmd_validate(const Options& o, std::ostream& out) {
    const auto grid = load(o, !o.pf_only);
    out << "valid: " << grid.buses.size() << " buses, " << grid.generators.size() << " generators, "
        << grid.loads.size() << " loads, " << grid.branches.size() << " branches, inertia "
        << format_number(total_inertia_gws(grid)) << " GW-s\n";
    return 0;
}

int cmd_powerflow(const Options& o, std::ostream& out) {
    const auto grid = load(o, false);
    const auto pf = solve_powerflow(grid, {.tol = o.tol});
    out << "converged in " << pf.iterations << " iterations, max mismatch " << format_number(pf.max_mismatch)
        << " pu\n";
    out << "bus_id,v_mag_pu,v_ang_deg\n";
    for (std::size_t i = 0; i < grid.buses.size(); ++i) {
        out << grid.buses[i].id << ',' << format_number(pf.v_mag[i]) << ','
            << format_number(pf.v_ang[i] * 180.0 / 3.141592653589793) << '\n';
    }
    if (!o.out.empty()) write_case(apply_solution(grid, pf), o.out);
    return 0;
}

std::vector<int> outage_ids(const Options& o) {
    if (o.outage.find_first_not_of(" \t,;") == std::string::npos) return {};
    return parse_generator_list(o.outage);
}

int cmd_rocof_system(const Options& o, std::ostream& out) {
    const auto grid = load(o, true);
    const auto ids = outage_ids(o);
    double loss = 0.0;
    if (!ids.empty()) {
        const auto c = make_outage(grid, ids);
        loss = o.loss_mw.value_or(c.total_mw_lost);
    } else if (o.loss_mw) {
        loss = *o.loss_mw;
    } else {
        throw DataError("--loss-mw is required when no --outage is given");
    }
    const double rocof = system_rocof(grid, loss, ids);
    double remaining = 0.0;
    for (const auto& g : grid.generators) {
        if (g.in_service && g.synchronous && g.h_sec && std::find(ids.begin(), ids.end(), g.id) == ids.end()) {
            remaining += *g.h_sec * g.s_base_mva;
        }
    }
    out << "system ROCOF " << fixed(rocof, 4) << " Hz/s (loss " << format_number(loss) << " MW, inertia "
        << format_number(remaining / 1000.0) << " GW-s)\n";
    return 0;
}

int cmd_rocof_local(const Options& o, std::ostream& out) {
    const auto p = prepare(o);
    const auto c = make_outage(p.grid, parse_generator_list(o.outage));
    const auto r = locational_rocof(p.model, p.states, c);
    const auto format = o.format == "geojson" ? ResultFormat::geojson : ResultFormat::csv;
    if (o.out.empty()) {
        write_results(r, p.grid, out, format);
        return 0;
    }
    write_results(r, p.grid, fs::path(o.out), format);
    std::optional<double> lo, hi;
    int worst = 0;
    for (std::size_t i = 0; i < r.bus_rocof_hz_s.size(); ++i) {
        const auto& v = r.bus_rocof_hz_s[i];
        if (!v) continue;
        if (!lo || *v < *lo) {
            lo = v;
            worst = p.grid.buses[i].id;
        }
        if (!hi || *v > *hi) hi = v;
    }
    out << "contingency " << c.id << ": " << format_number(c.total_mw_lost) << " MW lost, system ROCOF "
        << fixed(r.system_rocof_hz_s, 4) << " Hz/s";
    if (lo) out << ", bus ROCOF " << fixed(*lo, 4) << " (bus " << worst << ") to " << fixed(*hi, 4) << " Hz/s";
    out << "\n";
    return 0;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const auto p = prepare(o);
    const auto c = make_outage(p.grid, outage_ids(o));
    SimOptions so;
    so.t_end = o.t_end;
    so.dt = o.dt;
    so.damping_d = o.damping;
    so.relays_enabled = !o.no_relays;
    const auto sim = simulate(p.model, p.states, c, so);
    write_results(sim, fs::path(o.out));
    out << "simulated " << format_number(sim.time.back()) << " s in " << sim.time.size() - 1
        << " steps; machine frequency nadir " << fixed(machine_frequency_nadir(sim), 4) << " Hz; "
        << sim.events.size() << " relay trips\n";
    return 0;
}

int cmd_synth(const Options& o, std::ostream& out) {
    auto grid = load(o, false);
    SynthConfig config;
    config.seed = *o.seed;
    config.ffr_fraction = o.ffr_fraction;
    out << "seed " << config.seed << "\n";
    const auto ufls = synthesize_dynamics(grid, config);
    auto f = open_out(o.out);
    write_sidecar(grid, f);
    const auto report = validate_synthesis(grid);
    out << "total inertia " << format_number(report.total_gws) << " GW-s; UFLS shares " << fixed(ufls.achieved_fraction[0], 4)
        << " / " << fixed(ufls.achieved_fraction[1], 4) << " / " << fixed(ufls.achieved_fraction[2], 4) << "\n";
    return 0;
}

int cmd_scenarios_gen(const Options& o, std::ostream& out) {
    const auto grid = load(o, true);
    out << "seed " << *o.seed << "\n";
    fs::create_directories(o.out);
    const auto loading =
        generate_loading_cases(grid, o.n_loading, {o.load_range[0], o.load_range[1]}, {o.wind_range[0], o.wind_range[1]});
    ContingencyConfig cc;
    cc.count = o.n_contingencies;
    cc.min_mw = o.min_mw;
    cc.design_mw = o.design_mw;
    cc.max_mw = o.max_mw;
    const auto contingencies = generate_contingencies(grid, cc, *o.seed);
    auto lf = open_out((fs::path(o.out) / "loading_cases.csv").string());
    write_loading_cases(loading, lf);
    auto cf = open_out((fs::path(o.out) / "contingencies.csv").string());
    write_contingencies(contingencies, cf);
    out << loading.size() << " loading cases, " << contingencies.size() << " contingencies written to " << o.out
        << "\n";
    return 0;
}

int cmd_scenarios_run(const Options& o, std::ostream& out) {
    const auto grid = load(o, true);
    const fs::path bank(o.bank);
    const auto loading = read_loading_cases(bank / "loading_cases.csv");
    const auto contingencies = read_contingencies(bank / "contingencies.csv");
    BankOptions bo;
    bo.mode = *parse_bank_mode(o.mode);
    bo.workers = o.workers;
    bo.powerflow.tol = o.tol;
    bo.sim.t_end = o.t_end;
    bo.sim.dt = o.dt;
    bo.sim.damping_d = o.damping;
    bo.sim.relays_enabled = !o.no_relays;
    auto f = open_out(o.out);
    write_scenario_header(f);
    std::size_t rows = 0;
    std::size_t failed = 0;
    const auto start = std::chrono::steady_clock::now();
    run_bank(grid, loading, contingencies, bo, [&](const ScenarioRecord& r) {
        write_scenario_row(r, f);
        ++rows;
        if (r.status.starts_with("error")) ++failed;
    });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << rows << " scenarios (" << failed << " failed) in " << fixed(secs, 2) << " s -> " << o.out << "\n";
    return 0;
}

int cmd_report(const Options& o, std::ostream& out) {
    const auto rows = read_scenario_table(o.table);
    std::vector<LoadingCase> loading;
    if (!o.bank.empty()) loading = read_loading_cases(fs::path(o.bank) / "loading_cases.csv");
    const auto report = summarize_bank(rows, loading, o.bin_mw);
    fs::create_directories(o.out);
    auto bins = open_out((fs::path(o.out) / "loss_bins.csv").string());
    write_loss_bins(report, bins);
    auto lc = open_out((fs::path(o.out) / "loading_summary.csv").string());
    write_loading_summary(report, lc);
    out << report.loss_bins.size() << " loss bins, " << report.loading.size() << " loading cases summarized in "
        << o.out << "\n";
    return 0;
}

}  // namespace

std::unique_ptr<CLI::App> make_app(Options& o) {
    auto app = std::make_unique<CLI::App>("Inertia screening: system and bus-level ROCOF after generator loss",
                                          "rocof-screen");
    app->require_subcommand(1);

    auto* validate = app->add_subcommand("validate", "Read and validate a case");
    add_case(validate, o);
    validate->add_flag("--pf-only", o.pf_only, "Accept generators without H or X'd");

    auto* pf = app->add_subcommand("powerflow", "Solve the AC power flow and print bus voltages");
    add_case(pf, o);
    add_tol(pf, o);
    pf->add_option("--out", o.out, "Write the solved case to this JSON file");

    auto* sys = app->add_subcommand("rocof-system", "System-wide ROCOF from total remaining inertia");
    add_case(sys, o);
    sys->add_option("--outage", o.outage, "Outaged generator ids, e.g. gen3 or gen1,gen2 (excluded from inertia)");
    sys->add_option("--loss-mw", o.loss_mw, "Generation lost, MW (default: dispatch of the outaged units)");

    auto* local = app->add_subcommand("rocof-local", "Per-bus ROCOF right after a generator outage");
    add_case(local, o);
    add_tol(local, o);
    local->add_option("--outage", o.outage, "Outaged generator ids, e.g. gen3")->required();
    local->add_option("--out", o.out, "Output file (default: stdout)");
    local->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "geojson"}));

    auto* sim = app->add_subcommand("simulate", "Classical-machine time simulation of an outage");
    add_case(sim, o);
    add_tol(sim, o);
    sim->add_option("--outage", o.outage, "Outaged generator ids; empty for an undisturbed run");
    sim->add_option("--out", o.out, "Time-series CSV; relay events go to <stem>.events.csv")->required();
    sim->add_option("--t-end", o.t_end, "Simulated time, s")->check(CLI::PositiveNumber);
    sim->add_option("--dt", o.dt, "Integration step, s")->check(CLI::PositiveNumber);
    sim->add_option("--damping", o.damping, "Damping, pu torque per pu speed")->check(CLI::NonNegativeNumber);
    sim->add_flag("--no-relays", o.no_relays, "Disable UFLS and FFR tripping");

    auto* synth = app->add_subcommand("synth", "Synthesize inertia constants and UFLS/FFR assignments");
    add_case(synth, o);
    synth->add_option("--seed", o.seed, "Random seed")->required();
    synth->add_option("--out", o.out, "Sidecar CSV to write")->required();
    synth->add_option("--ffr-fraction", o.ffr_fraction, "Share of load flagged for fast frequency response")
        ->check(CLI::Range(0.0, 0.5));

    auto* gen = app->add_subcommand("scenarios-gen", "Generate loading cases and contingencies");
    add_case(gen, o);
    gen->add_option("--seed", o.seed, "Random seed")->required();
    gen->add_option("--out", o.out, "Bank directory")->required();
    gen->add_option("--n-contingencies", o.n_contingencies, "Number of contingencies")->check(CLI::PositiveNumber);
    gen->add_option("--n-loading", o.n_loading, "Number of loading cases")->check(CLI::PositiveNumber);
    gen->add_option("--load-range", o.load_range, "Load range lo,hi in MW")->expected(2)->delimiter(',');
    gen->add_option("--wind-range", o.wind_range, "Wind range lo,hi in MW")->expected(2)->delimiter(',');
    gen->add_option("--min-mw", o.min_mw, "Smallest outage size (exclusive), MW")->check(CLI::PositiveNumber);
    gen->add_option("--design-mw", o.design_mw, "Largest single-plant outage, MW")->check(CLI::PositiveNumber);
    gen->add_option("--max-mw", o.max_mw, "Largest multi-site outage target, MW")->check(CLI::PositiveNumber);

    auto* run = app->add_subcommand("scenarios-run", "Evaluate every loading case and contingency in a bank");
    add_case(run, o);
    add_tol(run, o);
    run->add_option("--bank", o.bank, "Bank directory from scenarios-gen")->required()->check(CLI::ExistingDirectory);
    run->add_option("--mode", o.mode, "Evaluation mode")
        ->check(CLI::IsMember({"system_only", "locational", "simulate"}));
    run->add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
    run->add_option("--out", o.out, "Scenario table CSV")->required();
    run->add_option("--t-end", o.t_end, "Simulate mode: simulated time, s")->check(CLI::PositiveNumber);
    run->add_option("--dt", o.dt, "Simulate mode: integration step, s")->check(CLI::PositiveNumber);
    run->add_option("--damping", o.damping, "Simulate mode: damping")->check(CLI::NonNegativeNumber);
    run->add_flag("--no-relays", o.no_relays, "Simulate mode: disable relays");

    auto* report = app->add_subcommand("report", "Summarize a scenario table");
    report->add_option("--table", o.table, "Scenario table CSV")->required()->check(CLI::ExistingFile);
    report->add_option("--bank", o.bank, "Bank directory, for wind share per loading case")
        ->check(CLI::ExistingDirectory);
    report->add_option("--out", o.out, "Directory for loss_bins.csv and loading_summary.csv")->required();
    report->add_option("--bin-mw", o.bin_mw, "MW-lost bin width")->check(CLI::PositiveNumber);
    return app;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    auto app = make_app(o);
    try {
        app->parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app->exit(e, out, err);
        return code == 0 ? 0 : 1;
    }
    try {
        const auto* sub = app->get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "validate") return cmd_validate(o, out);
        if (name == "powerflow") return cmd_powerflow(o, out);
        if (name == "rocof-system") return cmd_rocof_system(o, out);
        if (name == "rocof-local") return cmd_rocof_local(o, out);
        if (name == "simulate") return cmd_simulate(o, out);
        if (name == "synth") return cmd_synth(o, out);
        if (name == "scenarios-gen") return cmd_scenarios_gen(o, out);
        if (name == "scenarios-run") return cmd_scenarios_run(o, out);
        if (name == "report") return cmd_report(o, out);
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace rocofscreen::cli
