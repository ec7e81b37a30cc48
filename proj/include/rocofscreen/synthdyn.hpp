#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rocofscreen/case_model.hpp"

namespace rocofscreen {

/// Inertia distribution parameters for one fuel. Spread tapers linearly to
/// zero at p_max_mw.
struct FuelInertiaSpec {
    Fuel fuel = Fuel::gas;
    double h_max = 0.0;
    double h_min = 0.0;
    double h_avg = 0.0;
    double p_max_mw = 0.0;
};

/// Nuclear, coal and gas rows.
std::span<const FuelInertiaSpec> default_inertia_table();

/// Row for a fuel; fuels without a row use the gas row.
const FuelInertiaSpec& inertia_spec_for(Fuel fuel, std::span<const FuelInertiaSpec> table = default_inertia_table());

/// Seeded stream shared by all synthesis steps. uniform() is computed from
/// the raw 64-bit output so results do not depend on the standard library's
/// distribution implementations.
class SynthRng {
  public:
    explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 engine_;
};

struct SynthConfig {
    std::uint64_t seed = 0;
    std::array<double, 3> ufls_fractions{0.05, 0.10, 0.10};
    double ufls_tolerance = 0.005;  // absolute, as a fraction of system load
    double plant_rating_similarity = 0.10;
    double ffr_fraction = 0.0;  // share of system load flagged for fast frequency response
};

/// Size-tapered support [a, b] for a unit of unit_mw.
std::pair<double, double> tapered_bounds(const FuelInertiaSpec& spec, double unit_mw);
/// Triangular mode: 3*h_avg - a - b clamped into [a, b].
double triangular_mode(const FuelInertiaSpec& spec, double unit_mw);

/// One H draw in seconds. Always consumes exactly one uniform; units at or
/// above p_max return h_avg exactly.
double sample_h(const FuelInertiaSpec& spec, double unit_mw, SynthRng& rng);

/// Fills h_sec on every synchronous generator. Units at one bus with the same
/// fuel and ratings within the similarity tolerance share a single draw.
/// Returns the number of groups drawn.
std::size_t assign_plant_correlated(GridCase& grid, std::span<const FuelInertiaSpec> table, const SynthConfig& config,
                                    SynthRng& rng);

struct UflsReport {
    std::array<double, 3> achieved_fraction{};
    double ffr_fraction = 0.0;
    std::vector<std::string> warnings;
};

/// Resets and assigns UFLS stages (and FFR flags when config.ffr_fraction > 0)
/// by MW-weighted random selection until each stage holds its target share
/// of total load. Targets that cannot be met within tolerance produce a
/// warning; the best-effort assignment is kept.
UflsReport assign_ufls(GridCase& grid, const SynthConfig& config, SynthRng& rng);

struct FuelStats {
    Fuel fuel = Fuel::gas;
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    bool mean_off_target = false;  // more than 5% away from the table average
};

/// H spread for one fuel over units whose size ratio unit_mw / p_max falls
/// in [lo, hi).
struct SizeBinStats {
    Fuel fuel = Fuel::gas;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double variance = 0.0;
    double spread = 0.0;  // max - min
};

struct SynthesisReport {
    double total_gws = 0.0;
    std::vector<FuelStats> fuels;
    std::vector<SizeBinStats> size_bins;
};

/// Summary over synchronous generators with h_sec set. An empty fleet gives
/// an empty report.
SynthesisReport validate_synthesis(const GridCase& grid,
                                   std::span<const FuelInertiaSpec> table = default_inertia_table());

/// Plant-correlated H followed by UFLS/FFR assignment from one seeded stream.
UflsReport synthesize_dynamics(GridCase& grid, const SynthConfig& config,
                               std::span<const FuelInertiaSpec> table = default_inertia_table());

}  // namespace rocofscreen
