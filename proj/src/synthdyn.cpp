#include "rocofscreen/synthdyn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "rocofscreen/errors.hpp"
#include "rocofscreen/log.hpp"

namespace rocofscreen {

namespace {

constexpr std::array<FuelInertiaSpec, 3> kTable{{
    {Fuel::nuclear, 5.2, 3.8, 4.2, 10000.0},
    {Fuel::coal, 6.0, 2.0, 3.2, 3000.0},
    {Fuel::gas, 10.0, 1.0, 4.3, 2000.0},
}};

constexpr std::array<double, 7> kSizeEdges{0.0, 0.2, 0.4, 0.6, 0.8, 1.0, std::numeric_limits<double>::infinity()};

double unit_rating(const Generator& g) { return g.p_max_mw > 0.0 ? g.p_max_mw : g.s_base_mva; }

bool similar_rating(double a, double b, double tol) {
    const double big = std::max(std::abs(a), std::abs(b));
    return big == 0.0 || std::abs(a - b) / big <= tol;
}

}  // namespace

std::span<const FuelInertiaSpec> default_inertia_table() { return kTable; }

const FuelInertiaSpec& inertia_spec_for(Fuel fuel, std::span<const FuelInertiaSpec> table) {
    for (const auto& row : table) {
        if (row.fuel == fuel) return row;
    }
    for (const auto& row : table) {
        if (row.fuel == Fuel::gas) return row;
    }
    throw DataError("inertia table has no row for " + std::string(to_string(fuel)) + " and no gas fallback");
}

std::pair<double, double> tapered_bounds(const FuelInertiaSpec& spec, double unit_mw) {
    const double s = std::min(unit_mw / spec.p_max_mw, 1.0);
    return {spec.h_avg + (spec.h_min - spec.h_avg) * (1.0 - s), spec.h_avg + (spec.h_max - spec.h_avg) * (1.0 - s)};
}

double triangular_mode(const FuelInertiaSpec& spec, double unit_mw) {
    const auto [a, b] = tapered_bounds(spec, unit_mw);
    return std::clamp(3.0 * spec.h_avg - a - b, a, b);
}

double sample_h(const FuelInertiaSpec& spec, double unit_mw, SynthRng& rng) {
    const double u = rng.uniform();
    if (unit_mw >= spec.p_max_mw) return spec.h_avg;
    const auto [a, b] = tapered_bounds(spec, unit_mw);
    if (!(b > a)) return spec.h_avg;
    const double c = triangular_mode(spec, unit_mw);
    const double split = (c - a) / (b - a);
    const double h = u < split ? a + std::sqrt(u * (b - a) * (c - a)) : b - std::sqrt((1.0 - u) * (b - a) * (b - c));
    return std::clamp(h, a, b);
}

std::size_t assign_plant_correlated(GridCase& grid, std::span<const FuelInertiaSpec> table, const SynthConfig& config,
                                    SynthRng& rng) {
    struct Group {
        int bus_id;
        Fuel fuel;
        double rating;
        double h;
    };
    std::vector<Group> groups;
    for (auto& g : grid.generators) {
        if (!g.synchronous) continue;
        const bool has_row = std::any_of(table.begin(), table.end(), [&](const auto& r) { return r.fuel == g.fuel; });
        if (!has_row) {
            logger().info("generator {} has fuel '{}'; using the gas inertia distribution", g.id, to_string(g.fuel));
        }
        const double rating = unit_rating(g);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& grp) {
            return grp.bus_id == g.bus_id && grp.fuel == g.fuel &&
                   similar_rating(grp.rating, rating, config.plant_rating_similarity);
        });
        if (it == groups.end()) {
            groups.push_back({g.bus_id, g.fuel, rating, sample_h(inertia_spec_for(g.fuel, table), rating, rng)});
            it = std::prev(groups.end());
        }
        g.h_sec = it->h;
    }
    return groups.size();
}

UflsReport assign_ufls(GridCase& grid, const SynthConfig& config, SynthRng& rng) {
    UflsReport report;
    double total = 0.0;
    for (auto& l : grid.loads) {
        l.ufls_stage = UflsStage::none;
        if (config.ffr_fraction > 0.0) l.ffr = false;
        if (l.p_mw > 0.0) total += l.p_mw;
    }
    // Weighted random order (Efraimidis-Spirakis keys); every load consumes
    // one uniform so the stream position does not depend on the data.
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < grid.loads.size(); ++i) {
        const double u = rng.uniform();
        const double w = grid.loads[i].p_mw;
        if (w > 0.0) order.emplace_back(std::pow(u, 1.0 / w), i);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    if (!(total > 0.0)) {
        report.warnings.push_back("no positive load to assign");
        return report;
    }

    std::vector<bool> taken(grid.loads.size(), false);
    auto fill = [&](double fraction, auto&& mark) {
        const double target = fraction * total;
        double current = 0.0;
        for (const auto& [key, i] : order) {
            if (taken[i]) continue;
            const double w = grid.loads[i].p_mw;
            if (std::abs(current + w - target) < std::abs(current - target)) {
                current += w;
                taken[i] = true;
                mark(grid.loads[i]);
            }
        }
        return current / total;
    };
    auto check = [&](const std::string& what, double target, double achieved) {
        if (std::abs(achieved - target) > config.ufls_tolerance + 1e-12) {
            std::ostringstream msg;
            msg << what << " holds " << achieved * 100.0 << "% of load against a target of " << target * 100.0
                << "%; load granularity is too coarse";
            report.warnings.push_back(msg.str());
        }
    };

    constexpr std::array<UflsStage, 3> stages{UflsStage::stage1, UflsStage::stage2, UflsStage::stage3};
    for (std::size_t s = 0; s < stages.size(); ++s) {
        report.achieved_fraction[s] = fill(config.ufls_fractions[s], [&](Load& l) { l.ufls_stage = stages[s]; });
        check("UFLS " + std::string(to_string(stages[s])), config.ufls_fractions[s], report.achieved_fraction[s]);
    }
    if (config.ffr_fraction > 0.0) {
        report.ffr_fraction = fill(config.ffr_fraction, [](Load& l) { l.ffr = true; });
        check("FFR", config.ffr_fraction, report.ffr_fraction);
    }
    for (const auto& w : report.warnings) logger().warn("{}", w);
    return report;
}

SynthesisReport validate_synthesis(const GridCase& grid, std::span<const FuelInertiaSpec> table) {
    SynthesisReport report;
    std::map<Fuel, std::vector<std::pair<double, double>>> by_fuel;  // (size ratio, H)
    for (const auto& g : grid.generators) {
        if (!g.synchronous || !g.h_sec) continue;
        const auto& spec = inertia_spec_for(g.fuel, table);
        by_fuel[g.fuel].emplace_back(unit_rating(g) / spec.p_max_mw, *g.h_sec);
    }
    if (by_fuel.empty()) return report;
    report.total_gws = total_inertia_gws(grid);

    for (const auto& [fuel, units] : by_fuel) {
        FuelStats st;
        st.fuel = fuel;
        st.count = units.size();
        st.min = std::numeric_limits<double>::infinity();
        st.max = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (const auto& [ratio, h] : units) {
            st.min = std::min(st.min, h);
            st.max = std::max(st.max, h);
            sum += h;
        }
        st.mean = sum / static_cast<double>(units.size());
        const double avg = inertia_spec_for(fuel, table).h_avg;
        st.mean_off_target = std::abs(st.mean - avg) > 0.05 * avg;
        report.fuels.push_back(st);

        for (std::size_t b = 0; b + 1 < kSizeEdges.size(); ++b) {
            SizeBinStats bin;
            bin.fuel = fuel;
            bin.lo = kSizeEdges[b];
            bin.hi = kSizeEdges[b + 1];
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            double s1 = 0.0;
            for (const auto& [ratio, h] : units) {
                if (ratio < bin.lo || ratio >= bin.hi) continue;
                ++bin.count;
                s1 += h;
                lo = std::min(lo, h);
                hi = std::max(hi, h);
            }
            if (bin.count == 0) continue;
            const double mean = s1 / static_cast<double>(bin.count);
            double s2 = 0.0;
            for (const auto& [ratio, h] : units) {
                if (ratio >= bin.lo && ratio < bin.hi) s2 += (h - mean) * (h - mean);
            }
            bin.variance = s2 / static_cast<double>(bin.count);
            bin.spread = hi - lo;
            report.size_bins.push_back(bin);
        }
    }
    return report;
}

UflsReport synthesize_dynamics(GridCase& grid, const SynthConfig& config, std::span<const FuelInertiaSpec> table) {
    SynthRng rng(config.seed);
    assign_plant_correlated(grid, table, config, rng);
    return assign_ufls(grid, config, rng);
}

}  // namespace rocofscreen
