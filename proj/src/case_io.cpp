#include "rocofscreen/case_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "rocofscreen/errors.hpp"
#include "rocofscreen/log.hpp"

namespace rocofscreen {

using Json = nlohmann::ordered_json;

std::string format_number(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw DataError("cannot format number");
    return {buf, end};
}

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& text, const std::string& where) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw DataError(where + ": expected a number, got '" + text + "'");
    return value;
}

int parse_int(const std::string& text, const std::string& where) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DataError(where + ": expected an integer, got '" + text + "'");
    }
    return value;
}

// ---- JSON helpers ----

class Field {
  public:
    Field(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw DataError(path_ + ": expected an object");
    }

    template <typename T>
    T required(const char* key) const {
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) throw DataError(path_ + ": missing required field '" + key + "'");
        return convert<T>(*it, key);
    }

    template <typename T>
    T optional(const char* key, T fallback) const {
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return fallback;
        return convert<T>(*it, key);
    }

    template <typename T>
    std::optional<T> maybe(const char* key) const {
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return std::nullopt;
        return convert<T>(*it, key);
    }

    const Json& array(const char* key) const {
        static const Json empty = Json::array();
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return empty;
        if (!it->is_array()) throw DataError(path_ + "." + key + ": expected an array");
        return *it;
    }

    const std::string& path() const { return path_; }

  private:
    template <typename T>
    T convert(const Json& value, const char* key) const {
        const std::string where = path_ + "." + key;
        if constexpr (std::is_same_v<T, bool>) {
            if (!value.is_boolean()) throw DataError(where + ": expected true or false");
            return value.get<bool>();
        } else if constexpr (std::is_same_v<T, int>) {
            if (!value.is_number_integer()) throw DataError(where + ": expected an integer");
            return value.get<int>();
        } else if constexpr (std::is_same_v<T, double>) {
            if (!value.is_number()) throw DataError(where + ": expected a number");
            return value.get<double>();
        } else {
            if (!value.is_string()) throw DataError(where + ": expected a string");
            return value.get<std::string>();
        }
    }

    const Json& obj_;
    std::string path_;
};

template <typename E, typename Parse>
E parse_enum(const std::string& text, Parse parse, const std::string& where) {
    auto v = parse(text);
    if (!v) throw DataError(where + ": unknown value '" + text + "'");
    return *v;
}

constexpr double kDeg = std::numbers::pi / 180.0;

Json number_or_null(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

GridCase parse_case_json(std::string_view text, const std::string& source) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw DataError(source + ":" + std::to_string(line) + ": JSON syntax error: " + e.what());
    }
    const Field top(doc, source);
    const auto version = top.required<std::string>("schema_version");
    if (version != kCaseSchemaVersion) {
        throw DataError(source + ": unsupported schema_version '" + version + "'");
    }
    auto it = doc.find("case");
    if (it == doc.end()) throw DataError(source + ": missing required field 'case'");
    const Field c(*it, "case");

    GridCase grid;
    grid.name = c.optional<std::string>("name", "");
    grid.s_base_mva = c.required<double>("s_base_mva");
    grid.f_base_hz = c.optional<double>("f_base_hz", 60.0);

    const auto& buses = c.array("buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const Field f(buses[i], "case.buses[" + std::to_string(i) + "]");
        Bus b;
        b.id = f.required<int>("id");
        b.name = f.optional<std::string>("name", "");
        b.nominal_kv = f.optional<double>("nominal_kv", 0.0);
        b.kind = parse_enum<BusKind>(f.optional<std::string>("kind", "pq"), parse_bus_kind, f.path() + ".kind");
        b.v_mag = f.optional<double>("v_mag", 1.0);
        b.v_ang = f.optional<double>("v_ang_deg", 0.0) * kDeg;
        b.latitude = f.maybe<double>("latitude");
        b.longitude = f.maybe<double>("longitude");
        b.g_shunt_pu = f.optional<double>("g_shunt_pu", 0.0);
        b.b_shunt_pu = f.optional<double>("b_shunt_pu", 0.0);
        grid.buses.push_back(std::move(b));
    }
    const auto& gens = c.array("generators");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const Field f(gens[i], "case.generators[" + std::to_string(i) + "]");
        Generator g;
        g.id = f.required<int>("id");
        g.bus_id = f.required<int>("bus_id");
        g.s_base_mva = f.optional<double>("s_base_mva", grid.s_base_mva);
        g.p_mw = f.optional<double>("p_mw", 0.0);
        g.q_mvar = f.optional<double>("q_mvar", 0.0);
        g.p_max_mw = f.optional<double>("p_max_mw", g.p_mw);
        g.fuel = parse_enum<Fuel>(f.optional<std::string>("fuel", "other"), parse_fuel, f.path() + ".fuel");
        g.h_sec = f.maybe<double>("h_sec");
        g.xdp_pu = f.maybe<double>("xdp_pu");
        g.in_service = f.optional<bool>("in_service", true);
        g.synchronous = f.optional<bool>("synchronous", g.fuel != Fuel::wind);
        grid.generators.push_back(g);
    }
    const auto& loads = c.array("loads");
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const Field f(loads[i], "case.loads[" + std::to_string(i) + "]");
        Load l;
        l.id = f.required<int>("id");
        l.bus_id = f.required<int>("bus_id");
        l.p_mw = f.optional<double>("p_mw", 0.0);
        l.q_mvar = f.optional<double>("q_mvar", 0.0);
        l.ufls_stage = parse_enum<UflsStage>(f.optional<std::string>("ufls_stage", "none"), parse_ufls_stage,
                                             f.path() + ".ufls_stage");
        l.ffr = f.optional<bool>("ffr", false);
        grid.loads.push_back(l);
    }
    const auto& branches = c.array("branches");
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const Field f(branches[i], "case.branches[" + std::to_string(i) + "]");
        Branch br;
        br.from_bus = f.required<int>("from_bus");
        br.to_bus = f.required<int>("to_bus");
        br.r_pu = f.optional<double>("r_pu", 0.0);
        br.x_pu = f.required<double>("x_pu");
        br.b_pu = f.optional<double>("b_pu", 0.0);
        br.tap_ratio = f.optional<double>("tap_ratio", 1.0);
        br.in_service = f.optional<bool>("in_service", true);
        grid.branches.push_back(br);
    }
    return grid;
}

std::string case_to_json(const GridCase& grid) {
    Json c;
    c["name"] = grid.name;
    c["s_base_mva"] = grid.s_base_mva;
    c["f_base_hz"] = grid.f_base_hz;
    Json buses = Json::array();
    for (const auto& b : grid.buses) {
        Json j;
        j["id"] = b.id;
        j["name"] = b.name;
        j["nominal_kv"] = b.nominal_kv;
        j["kind"] = to_string(b.kind);
        j["v_mag"] = b.v_mag;
        j["v_ang_deg"] = b.v_ang / kDeg;
        if (b.latitude) j["latitude"] = *b.latitude;
        if (b.longitude) j["longitude"] = *b.longitude;
        if (b.g_shunt_pu != 0.0) j["g_shunt_pu"] = b.g_shunt_pu;
        if (b.b_shunt_pu != 0.0) j["b_shunt_pu"] = b.b_shunt_pu;
        buses.push_back(std::move(j));
    }
    Json gens = Json::array();
    for (const auto& g : grid.generators) {
        Json j;
        j["id"] = g.id;
        j["bus_id"] = g.bus_id;
        j["s_base_mva"] = g.s_base_mva;
        j["p_mw"] = g.p_mw;
        j["q_mvar"] = g.q_mvar;
        j["p_max_mw"] = g.p_max_mw;
        j["fuel"] = to_string(g.fuel);
        j["h_sec"] = number_or_null(g.h_sec);
        j["xdp_pu"] = number_or_null(g.xdp_pu);
        j["in_service"] = g.in_service;
        j["synchronous"] = g.synchronous;
        gens.push_back(std::move(j));
    }
    Json loads = Json::array();
    for (const auto& l : grid.loads) {
        Json j;
        j["id"] = l.id;
        j["bus_id"] = l.bus_id;
        j["p_mw"] = l.p_mw;
        j["q_mvar"] = l.q_mvar;
        j["ufls_stage"] = to_string(l.ufls_stage);
        j["ffr"] = l.ffr;
        loads.push_back(std::move(j));
    }
    Json branches = Json::array();
    for (const auto& br : grid.branches) {
        Json j;
        j["from_bus"] = br.from_bus;
        j["to_bus"] = br.to_bus;
        j["r_pu"] = br.r_pu;
        j["x_pu"] = br.x_pu;
        j["b_pu"] = br.b_pu;
        j["tap_ratio"] = br.tap_ratio;
        j["in_service"] = br.in_service;
        branches.push_back(std::move(j));
    }
    c["buses"] = std::move(buses);
    c["generators"] = std::move(gens);
    c["loads"] = std::move(loads);
    c["branches"] = std::move(branches);
    Json doc;
    doc["schema_version"] = kCaseSchemaVersion;
    doc["case"] = std::move(c);
    return doc.dump(1) + "\n";
}

void write_case(const GridCase& grid, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << case_to_json(grid);
}

std::filesystem::path sidecar_path_for(const std::filesystem::path& case_path) {
    auto p = case_path;
    p.replace_filename(case_path.stem().string() + ".dyn.csv");
    return p;
}

GridCase read_case(const std::filesystem::path& path, const ReadOptions& options) {
    auto grid = parse_case_json(read_text(path), path.string());
    if (options.sidecar) {
        apply_sidecar(grid, *options.sidecar);
    } else if (options.auto_sidecar) {
        const auto companion = sidecar_path_for(path);
        if (std::filesystem::exists(companion)) {
            logger().info("applying sidecar {}", companion.string());
            apply_sidecar(grid, companion);
        }
    }
    const auto violations = validate_case(grid, {.require_dynamics = options.require_dynamics});
    if (!violations.empty()) throw DataError(path.string() + " failed validation:\n" + describe(violations));
    return grid;
}

// ---- CSV ----

namespace csv {

std::vector<Row> read(std::istream& in, const std::string& source) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    int line = 1;
    char ch;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
    };
    while (in.get(ch)) {
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (field_started || !field.empty()) {
                    throw DataError(source + ":" + std::to_string(line) + ": stray quote inside unquoted field");
                }
                quoted = true;
                field_started = true;
                break;
            case ',': end_field(); break;
            case '\r':
                if (in.peek() == '\n') in.get(ch);
                end_row();
                ++line;
                break;
            case '\n':
                end_row();
                ++line;
                break;
            default: field.push_back(ch); field_started = true;
        }
    }
    if (quoted) throw DataError(source + ":" + std::to_string(line) + ": unterminated quoted field");
    if (field_started || !row.empty()) end_row();
    return rows;
}

std::vector<Row> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return read(in, path.string());
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        const auto& f = fields[i];
        if (f.find_first_of(",\"\r\n") == std::string::npos) {
            out << f;
            continue;
        }
        out << '"';
        for (char ch : f) {
            if (ch == '"') out << '"';
            out << ch;
        }
        out << '"';
    }
    out << '\n';
}

}  // namespace csv

// ---- sidecar ----

void apply_sidecar(GridCase& grid, std::istream& in, const std::string& source) {
    const auto rows = csv::read(in, source);
    if (rows.empty()) throw DataError(source + ": empty sidecar");
    const csv::Row expected{"record", "id", "h_sec", "xdp_pu", "fuel", "ufls_stage", "ffr"};
    if (rows[0] != expected) {
        throw DataError(source + ":1: expected header record,id,h_sec,xdp_pu,fuel,ufls_stage,ffr");
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = source + ":" + std::to_string(r + 1);
        if (row.size() != expected.size()) throw DataError(where + ": expected 7 fields");
        const int id = parse_int(trim(row[1]), where + " id");
        auto cell = [&](std::size_t i) { return trim(row[i]); };
        if (row[0] == "gen") {
            auto it = std::find_if(grid.generators.begin(), grid.generators.end(),
                                   [id](const Generator& g) { return g.id == id; });
            if (it == grid.generators.end()) throw DataError(where + ": no generator " + std::to_string(id));
            if (!cell(5).empty() || !cell(6).empty()) throw DataError(where + ": load columns set on a gen row");
            if (!cell(2).empty()) it->h_sec = parse_double(cell(2), where + " h_sec");
            if (!cell(3).empty()) it->xdp_pu = parse_double(cell(3), where + " xdp_pu");
            if (!cell(4).empty()) it->fuel = parse_enum<Fuel>(cell(4), parse_fuel, where + " fuel");
        } else if (row[0] == "load") {
            auto it = std::find_if(grid.loads.begin(), grid.loads.end(), [id](const Load& l) { return l.id == id; });
            if (it == grid.loads.end()) throw DataError(where + ": no load " + std::to_string(id));
            if (!cell(2).empty() || !cell(3).empty() || !cell(4).empty()) {
                throw DataError(where + ": generator columns set on a load row");
            }
            if (!cell(5).empty()) it->ufls_stage = parse_enum<UflsStage>(cell(5), parse_ufls_stage, where + " ufls_stage");
            if (!cell(6).empty()) {
                const auto v = cell(6);
                if (v == "1" || v == "true") {
                    it->ffr = true;
                } else if (v == "0" || v == "false") {
                    it->ffr = false;
                } else {
                    throw DataError(where + ": ffr must be 0/1 or true/false");
                }
            }
        } else {
            throw DataError(where + ": unknown record type '" + row[0] + "'");
        }
    }
}

void apply_sidecar(GridCase& grid, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    apply_sidecar(grid, in, path.string());
}

void write_sidecar(const GridCase& grid, std::ostream& out) {
    const std::vector<std::string> header{"record", "id", "h_sec", "xdp_pu", "fuel", "ufls_stage", "ffr"};
    csv::write_row(out, header);
    for (const auto& g : grid.generators) {
        if (!g.synchronous) continue;
        const std::vector<std::string> row{"gen",
                                           std::to_string(g.id),
                                           g.h_sec ? format_number(*g.h_sec) : "",
                                           g.xdp_pu ? format_number(*g.xdp_pu) : "",
                                           std::string(to_string(g.fuel)),
                                           "",
                                           ""};
        csv::write_row(out, row);
    }
    for (const auto& l : grid.loads) {
        const std::vector<std::string> row{
            "load", std::to_string(l.id), "", "", "", std::string(to_string(l.ufls_stage)), l.ffr ? "1" : "0"};
        csv::write_row(out, row);
    }
}

void write_sidecar(const GridCase& grid, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_sidecar(grid, out);
}

// ---- CDF ----

namespace {

std::vector<std::string> tokens(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream ss{std::string(s)};
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

bool starts_with_terminator(const std::string& line) {
    const auto t = trim(line);
    return t.size() >= 2 && t[0] == '-' && t[1] == '9';
}

}  // namespace

GridCase import_cdf(std::istream& in, const std::string& source) {
    GridCase grid;
    std::string line;
    int line_no = 0;
    auto where = [&] { return source + ":" + std::to_string(line_no); };

    if (!std::getline(in, line)) throw DataError(source + ": empty CDF file");
    ++line_no;
    if (line.size() < 37) throw DataError(where() + ": title card too short for the MVA base field");
    grid.s_base_mva = parse_double(trim(line.substr(31, 6)), where() + " MVA base");
    if (line.size() > 45) grid.name = trim(line.substr(45));

    int next_gen = 1;
    int next_load = 1;
    enum class Section { none, bus, branch, skip } section = Section::none;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (section == Section::none) {
            const auto header = trim(line);
            if (header.starts_with("BUS DATA FOLLOWS")) {
                section = Section::bus;
            } else if (header.starts_with("BRANCH DATA FOLLOWS")) {
                section = Section::branch;
            } else if (header.starts_with("LOSS ZONES FOLLOW") || header.starts_with("INTERCHANGE DATA FOLLOWS") ||
                       header.starts_with("TIE LINES FOLLOW")) {
                section = Section::skip;
            } else if (header.starts_with("END OF DATA")) {
                break;
            } else {
                throw DataError(where() + ": malformed section header '" + header + "'");
            }
            continue;
        }
        if (starts_with_terminator(line)) {
            section = Section::none;
            continue;
        }
        if (section == Section::skip) continue;

        if (section == Section::bus) {
            if (line.size() < 20) throw DataError(where() + ": bus card too short");
            Bus b;
            b.id = parse_int(trim(line.substr(0, 4)), where() + " bus number");
            b.name = trim(line.substr(5, 13));
            const auto t = tokens(std::string_view(line).substr(18));
            if (t.size() < 15) throw DataError(where() + ": bus card has too few fields");
            const int type = parse_int(t[2], where() + " bus type");
            switch (type) {
                case 0:
                case 1: b.kind = BusKind::pq; break;
                case 2: b.kind = BusKind::pv; break;
                case 3: b.kind = BusKind::slack; break;
                default: throw DataError(where() + ": unknown bus type code " + std::to_string(type));
            }
            b.v_mag = parse_double(t[3], where() + " voltage");
            b.v_ang = parse_double(t[4], where() + " angle") * kDeg;
            double pl = parse_double(t[5], where() + " load MW");
            double ql = parse_double(t[6], where() + " load MVAR");
            const double pg = parse_double(t[7], where() + " gen MW");
            const double qg = parse_double(t[8], where() + " gen MVAR");
            b.nominal_kv = parse_double(t[9], where() + " base kV");
            b.g_shunt_pu = parse_double(t[13], where() + " shunt G");
            b.b_shunt_pu = parse_double(t[14], where() + " shunt B");

            if (b.kind != BusKind::pq || pg > 0.0) {
                Generator g;
                g.id = next_gen++;
                g.bus_id = b.id;
                g.s_base_mva = grid.s_base_mva;
                g.p_mw = std::max(pg, 0.0);
                g.q_mvar = qg;
                g.p_max_mw = g.p_mw;
                g.fuel = Fuel::other;
                grid.generators.push_back(g);
                if (pg < 0.0) pl -= pg;
            } else {
                pl -= pg;
                ql -= qg;
            }
            if (pl != 0.0 || ql != 0.0) {
                Load l;
                l.id = next_load++;
                l.bus_id = b.id;
                l.p_mw = pl;
                l.q_mvar = ql;
                grid.loads.push_back(l);
            }
            grid.buses.push_back(std::move(b));
        } else {
            const auto t = tokens(line);
            if (t.size() < 9) throw DataError(where() + ": branch card has too few fields");
            Branch br;
            br.from_bus = parse_int(t[0], where() + " tap bus");
            br.to_bus = parse_int(t[1], where() + " Z bus");
            br.r_pu = parse_double(t[6], where() + " R");
            br.x_pu = parse_double(t[7], where() + " X");
            br.b_pu = parse_double(t[8], where() + " B");
            if (t.size() > 14) {
                const double ratio = parse_double(t[14], where() + " turns ratio");
                br.tap_ratio = ratio == 0.0 ? 1.0 : ratio;
            }
            if (t.size() > 15 && parse_double(t[15], where() + " phase shift") != 0.0) {
                logger().warn("{}: phase shift ignored", where());
            }
            grid.branches.push_back(br);
        }
    }
    if (section != Section::none && section != Section::skip) {
        throw DataError(source + ": section not terminated before end of file");
    }
    return grid;
}

GridCase import_cdf(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    auto grid = import_cdf(in, path.string());
    if (grid.name.empty()) grid.name = path.stem().string();
    return grid;
}

// ---- results ----

void write_results(const RocofResult& result, const GridCase& grid, std::ostream& out, ResultFormat format) {
    if (result.bus_rocof_hz_s.size() != grid.buses.size()) throw DataError("result does not match the case");
    if (format == ResultFormat::csv) {
        out << "bus_id,rocof_hz_per_s\n";
        for (std::size_t i = 0; i < grid.buses.size(); ++i) {
            const auto& r = result.bus_rocof_hz_s[i];
            out << grid.buses[i].id << ',' << (r ? format_number(*r) : "") << '\n';
        }
        return;
    }
    for (const auto& b : grid.buses) {
        if (!b.latitude || !b.longitude) throw DataError("missing coordinates");
    }
    Json features = Json::array();
    for (std::size_t i = 0; i < grid.buses.size(); ++i) {
        const auto& b = grid.buses[i];
        Json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Point"}, {"coordinates", {*b.longitude, *b.latitude}}};
        f["properties"] = {{"bus_id", b.id}, {"name", b.name}, {"rocof_hz_per_s", number_or_null(result.bus_rocof_hz_s[i])}};
        features.push_back(std::move(f));
    }
    Json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = std::move(features);
    out << doc.dump() << '\n';
}

void write_results(const RocofResult& result, const GridCase& grid, const std::filesystem::path& path,
                   ResultFormat format) {
    std::ostringstream buf;
    write_results(result, grid, buf, format);
    auto out = open_out(path);
    out << buf.str();
}

void write_results(const SimResult& sim, std::ostream& series, std::ostream& events) {
    series << "time_s";
    for (int id : sim.bus_ids) series << ",bus" << id << "_hz";
    for (int id : sim.gen_ids) series << ",gen" << id << "_omega_pu";
    series << '\n';
    for (std::size_t k = 0; k < sim.time.size(); ++k) {
        series << format_number(sim.time[k]);
        for (const auto& tr : sim.bus_frequency_hz) series << ',' << format_number(tr[k]);
        for (const auto& tr : sim.machine_omega) series << ',' << format_number(tr[k]);
        series << '\n';
    }
    events << "time_s,kind,load_id,bus_id,ufls_stage,frequency_hz\n";
    for (const auto& e : sim.events) {
        events << format_number(e.time) << ',' << (e.kind == RelayEvent::Kind::ufls ? "ufls" : "ffr") << ','
               << e.load_id << ',' << e.bus_id << ',' << to_string(e.stage) << ',' << format_number(e.frequency_hz)
               << '\n';
    }
}

void write_results(const SimResult& sim, const std::filesystem::path& path) {
    auto series = open_out(path);
    auto events_path = path;
    events_path.replace_filename(path.stem().string() + ".events.csv");
    auto events = open_out(events_path);
    write_results(sim, series, events);
}

}  // namespace rocofscreen
