#include "rocofscreen/case_model.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "rocofscreen/errors.hpp"

namespace rocofscreen {

std::string_view to_string(BusKind kind) {
    switch (kind) {
        case BusKind::slack: return "slack";
        case BusKind::pv: return "pv";
        case BusKind::pq: return "pq";
    }
    return "pq";
}

std::string_view to_string(Fuel fuel) {
    switch (fuel) {
        case Fuel::nuclear: return "nuclear";
        case Fuel::coal: return "coal";
        case Fuel::gas: return "gas";
        case Fuel::wind: return "wind";
        case Fuel::other: return "other";
    }
    return "other";
}

std::string_view to_string(UflsStage stage) {
    switch (stage) {
        case UflsStage::none: return "none";
        case UflsStage::stage1: return "stage1";
        case UflsStage::stage2: return "stage2";
        case UflsStage::stage3: return "stage3";
    }
    return "none";
}

std::optional<BusKind> parse_bus_kind(std::string_view text) {
    if (text == "slack") return BusKind::slack;
    if (text == "pv") return BusKind::pv;
    if (text == "pq") return BusKind::pq;
    return std::nullopt;
}

std::optional<Fuel> parse_fuel(std::string_view text) {
    if (text == "nuclear") return Fuel::nuclear;
    if (text == "coal") return Fuel::coal;
    if (text == "gas") return Fuel::gas;
    if (text == "wind") return Fuel::wind;
    if (text == "other") return Fuel::other;
    return std::nullopt;
}

std::optional<UflsStage> parse_ufls_stage(std::string_view text) {
    if (text == "none" || text.empty()) return UflsStage::none;
    if (text == "stage1") return UflsStage::stage1;
    if (text == "stage2") return UflsStage::stage2;
    if (text == "stage3") return UflsStage::stage3;
    return std::nullopt;
}

BusIndex::BusIndex(const GridCase& grid) {
    positions_.reserve(grid.buses.size());
    for (std::size_t i = 0; i < grid.buses.size(); ++i) {
        positions_.emplace(grid.buses[i].id, i);
    }
}

std::optional<std::size_t> BusIndex::find(int bus_id) const {
    auto it = positions_.find(bus_id);
    if (it == positions_.end()) return std::nullopt;
    return it->second;
}

std::size_t BusIndex::at(int bus_id) const {
    auto pos = find(bus_id);
    if (!pos) throw DataError("unknown bus id " + std::to_string(bus_id));
    return *pos;
}

namespace {

class DisjointSets {
  public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

  private:
    std::vector<std::size_t> parent_;
};

std::string gen_label(const Generator& g) { return "generator " + std::to_string(g.id); }
std::string load_label(const Load& l) { return "load " + std::to_string(l.id); }
std::string branch_label(std::size_t i, const Branch& b) {
    return "branch " + std::to_string(i) + " (" + std::to_string(b.from_bus) + "-" + std::to_string(b.to_bus) + ")";
}

}  // namespace

std::vector<int> island_labels(const GridCase& grid) {
    BusIndex index(grid);
    DisjointSets sets(grid.buses.size());
    for (const auto& br : grid.branches) {
        if (!br.in_service) continue;
        auto f = index.find(br.from_bus);
        auto t = index.find(br.to_bus);
        if (f && t) sets.unite(*f, *t);
    }
    std::vector<int> labels(grid.buses.size(), -1);
    std::map<std::size_t, int> root_label;
    for (std::size_t i = 0; i < grid.buses.size(); ++i) {
        auto root = sets.find(i);
        auto [it, inserted] = root_label.emplace(root, static_cast<int>(root_label.size()));
        labels[i] = it->second;
    }
    return labels;
}

std::vector<Violation> validate_case(const GridCase& grid, const ValidationOptions& options) {
    std::vector<Violation> out;
    auto add = [&out](std::string record, std::string rule) { out.push_back({std::move(record), std::move(rule)}); };

    if (!(grid.s_base_mva > 0.0)) add("case", "s_base_mva must be positive");
    if (!(grid.f_base_hz > 0.0)) add("case", "f_base_hz must be positive");

    std::set<int> bus_ids;
    for (const auto& bus : grid.buses) {
        std::string rec = "bus " + std::to_string(bus.id);
        if (!bus_ids.insert(bus.id).second) add(rec, "duplicate bus id");
        if (!(bus.v_mag > 0.0)) add(rec, "v_mag must be positive");
    }

    std::set<int> gen_ids;
    bool any_sync = false;
    for (const auto& g : grid.generators) {
        auto rec = gen_label(g);
        if (!gen_ids.insert(g.id).second) add(rec, "duplicate generator id");
        if (!bus_ids.contains(g.bus_id)) add(rec, "references missing bus " + std::to_string(g.bus_id));
        if (!(g.s_base_mva > 0.0)) add(rec, "s_base_mva must be positive");
        if (g.p_mw < 0.0) add(rec, "p_mw must be non-negative");
        if (g.p_mw > g.p_max_mw) add(rec, "p_mw exceeds p_max_mw");
        if (g.synchronous && g.in_service) {
            any_sync = true;
            if (g.h_sec) {
                if (!(*g.h_sec > 0.0)) add(rec, "h_sec must be positive");
            } else if (options.require_dynamics) {
                add(rec, "h_sec missing");
            }
            if (g.xdp_pu) {
                if (!(*g.xdp_pu > 0.0)) add(rec, "xdp_pu must be positive");
            } else if (options.require_dynamics) {
                add(rec, "xdp_pu missing");
            }
        }
    }
    if (!any_sync) add("case", "no in-service synchronous generator");

    std::set<int> load_ids;
    for (const auto& l : grid.loads) {
        auto rec = load_label(l);
        if (!load_ids.insert(l.id).second) add(rec, "duplicate load id");
        if (!bus_ids.contains(l.bus_id)) add(rec, "references missing bus " + std::to_string(l.bus_id));
        if (l.ufls_stage != UflsStage::none && !(l.p_mw > 0.0)) add(rec, "UFLS load must have positive p_mw");
    }

    for (std::size_t i = 0; i < grid.branches.size(); ++i) {
        const auto& br = grid.branches[i];
        auto rec = branch_label(i, br);
        if (br.x_pu == 0.0) add(rec, "x_pu must be nonzero");
        if (br.from_bus == br.to_bus) add(rec, "from_bus equals to_bus");
        if (!bus_ids.contains(br.from_bus)) add(rec, "references missing bus " + std::to_string(br.from_bus));
        if (!bus_ids.contains(br.to_bus)) add(rec, "references missing bus " + std::to_string(br.to_bus));
        if (!(br.tap_ratio > 0.0)) add(rec, "tap_ratio must be positive");
    }

    // One slack per island; islands are only meaningful when ids are unique.
    if (bus_ids.size() == grid.buses.size() && !grid.buses.empty()) {
        auto labels = island_labels(grid);
        int islands = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
        std::vector<int> slack_count(static_cast<std::size_t>(islands), 0);
        std::vector<std::optional<int>> first_bus(static_cast<std::size_t>(islands));
        for (std::size_t i = 0; i < grid.buses.size(); ++i) {
            auto label = static_cast<std::size_t>(labels[i]);
            if (!first_bus[label]) first_bus[label] = grid.buses[i].id;
            if (grid.buses[i].kind == BusKind::slack) ++slack_count[label];
        }
        for (std::size_t k = 0; k < slack_count.size(); ++k) {
            if (slack_count[k] != 1) {
                add("island containing bus " + std::to_string(first_bus[k].value_or(0)),
                    "expected exactly one slack bus, found " + std::to_string(slack_count[k]));
            }
        }
    }
    return out;
}

std::string describe(const std::vector<Violation>& violations) {
    std::ostringstream os;
    for (const auto& v : violations) os << v.record << ": " << v.rule << '\n';
    return os.str();
}

double total_inertia_gws(const GridCase& grid) {
    double mws = 0.0;
    for (const auto& g : grid.generators) {
        if (g.in_service && g.synchronous && g.h_sec) mws += *g.h_sec * g.s_base_mva;
    }
    return mws / 1000.0;
}

const Generator& generator_by_id(const GridCase& grid, int gen_id) {
    for (const auto& g : grid.generators) {
        if (g.id == gen_id) return g;
    }
    throw DataError("unknown generator id " + std::to_string(gen_id));
}

}  // namespace rocofscreen
