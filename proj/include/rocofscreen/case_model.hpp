#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rocofscreen {

enum class BusKind { slack, pv, pq };
enum class Fuel { nuclear, coal, gas, wind, other };
enum class UflsStage { none, stage1, stage2, stage3 };

std::string_view to_string(BusKind kind);
std::string_view to_string(Fuel fuel);
std::string_view to_string(UflsStage stage);

// Parsers return nullopt on unknown text.
std::optional<BusKind> parse_bus_kind(std::string_view text);
std::optional<Fuel> parse_fuel(std::string_view text);
std::optional<UflsStage> parse_ufls_stage(std::string_view text);

struct Bus {
    int id = 0;
    std::string name;
    double nominal_kv = 0.0;
    BusKind kind = BusKind::pq;
    double v_mag = 1.0;  // per unit
    double v_ang = 0.0;  // radians
    std::optional<double> latitude;
    std::optional<double> longitude;
    // Fixed shunt at 1 pu voltage, per unit on system base.
    double g_shunt_pu = 0.0;
    double b_shunt_pu = 0.0;
};

struct Generator {
    int id = 0;
    int bus_id = 0;
    double s_base_mva = 100.0;
    double p_mw = 0.0;
    double q_mvar = 0.0;
    double p_max_mw = 0.0;
    Fuel fuel = Fuel::other;
    std::optional<double> h_sec;   // machine base
    std::optional<double> xdp_pu;  // machine base
    bool in_service = true;
    bool synchronous = true;
};

struct Load {
    int id = 0;
    int bus_id = 0;
    double p_mw = 0.0;
    double q_mvar = 0.0;
    UflsStage ufls_stage = UflsStage::none;
    bool ffr = false;
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r_pu = 0.0;
    double x_pu = 0.0;
    double b_pu = 0.0;
    double tap_ratio = 1.0;
    bool in_service = true;
};

struct GridCase {
    std::string name;
    double s_base_mva = 100.0;
    double f_base_hz = 60.0;
    std::vector<Bus> buses;
    std::vector<Generator> generators;
    std::vector<Load> loads;
    std::vector<Branch> branches;
};

/// Maps external bus ids onto positions in GridCase::buses.
class BusIndex {
  public:
    explicit BusIndex(const GridCase& grid);

    std::optional<std::size_t> find(int bus_id) const;
    /// Throws DataError when the id is unknown.
    std::size_t at(int bus_id) const;
    std::size_t size() const { return positions_.size(); }

  private:
    std::unordered_map<int, std::size_t> positions_;
};

struct Violation {
    std::string record;  // e.g. "generator 3"
    std::string rule;

    bool operator==(const Violation&) const = default;
};

struct ValidationOptions {
    // Power-flow-only cases (CDF imports, synthesis inputs) carry no H or X'd
    // yet; set false to accept missing values. Non-positive values are always
    // violations.
    bool require_dynamics = true;
};

std::vector<Violation> validate_case(const GridCase& grid, const ValidationOptions& options = {});

/// Formats violations one per line, "record: rule".
std::string describe(const std::vector<Violation>& violations);

/// Sum of H * S_base over in-service synchronous generators, in GW-s.
double total_inertia_gws(const GridCase& grid);

/// Connected-component label per bus (positions in GridCase::buses), using
/// in-service branches only. Labels are dense, starting at 0, in order of the
/// first bus of each island.
std::vector<int> island_labels(const GridCase& grid);

/// Generator lookup by id; throws DataError when absent.
const Generator& generator_by_id(const GridCase& grid, int gen_id);

}  // namespace rocofscreen
