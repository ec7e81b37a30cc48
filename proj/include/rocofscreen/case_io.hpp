#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rocofscreen/case_model.hpp"
#include "rocofscreen/rocof.hpp"
#include "rocofscreen/swingsim.hpp"

namespace rocofscreen {

inline constexpr std::string_view kCaseSchemaVersion = "1.0";

/// Shortest text that parses back to the same double.
std::string format_number(double value);

namespace csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader (quoted fields, doubled quotes, CRLF or LF). `source`
/// names the input in error messages.
std::vector<Row> read(std::istream& in, const std::string& source);
std::vector<Row> read_file(const std::filesystem::path& path);

void write_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace csv

struct ReadOptions {
    /// When false, missing h_sec / xdp_pu are accepted (power-flow-only cases).
    bool require_dynamics = true;
    /// Explicit sidecar. Otherwise `<stem>.dyn.csv` next to the case is
    /// applied if it exists.
    std::optional<std::filesystem::path> sidecar;
    bool auto_sidecar = true;
};

/// Reads a JSON case document, applies the sidecar and validates. Throws
/// DataError with the line/field location on parse errors and with the
/// violation list when validation fails.
GridCase read_case(const std::filesystem::path& path, const ReadOptions& options = {});

/// Parses a case document without sidecar or validation.
GridCase parse_case_json(std::string_view text, const std::string& source = "<memory>");
std::string case_to_json(const GridCase& grid);
void write_case(const GridCase& grid, const std::filesystem::path& path);

/// `<dir>/<stem>.dyn.csv` for `<dir>/<stem>.json`.
std::filesystem::path sidecar_path_for(const std::filesystem::path& case_path);

/// Applies a dynamics sidecar. Columns: record,id,h_sec,xdp_pu,fuel,
/// ufls_stage,ffr with record in {gen, load}; empty cells leave the field
/// unchanged. Unknown ids are errors.
void apply_sidecar(GridCase& grid, const std::filesystem::path& path);
void apply_sidecar(GridCase& grid, std::istream& in, const std::string& source);
void write_sidecar(const GridCase& grid, std::ostream& out);
void write_sidecar(const GridCase& grid, const std::filesystem::path& path);

/// IEEE Common Data Format import. Dynamic fields stay unset.
GridCase import_cdf(const std::filesystem::path& path);
GridCase import_cdf(std::istream& in, const std::string& source);

enum class ResultFormat { csv, geojson };

/// Per-bus ROCOF: CSV with bus_id,rocof_hz_per_s (empty for undefined), or a
/// GeoJSON FeatureCollection of bus points. GeoJSON throws DataError
/// "missing coordinates" when any bus lacks latitude/longitude.
void write_results(const RocofResult& result, const GridCase& grid, std::ostream& out, ResultFormat format);
void write_results(const RocofResult& result, const GridCase& grid, const std::filesystem::path& path,
                   ResultFormat format);

/// Time series CSV (time, bus frequencies, machine speeds) plus the relay
/// events in `<stem>.events.csv`.
void write_results(const SimResult& sim, std::ostream& series, std::ostream& events);
void write_results(const SimResult& sim, const std::filesystem::path& path);

}  // namespace rocofscreen
