#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rocofscreen/case_io.hpp"
#include "rocofscreen/netdyn.hpp"
#include "rocofscreen/powerflow.hpp"

namespace testing_support {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(ROCOF_DATA_DIR) / name; }

inline rocofscreen::GridCase ninebus() { return rocofscreen::read_case(data_path("ninebus.json")); }

struct Prepared {
    rocofscreen::GridCase grid;
    rocofscreen::PowerFlowSolution pf;
    rocofscreen::NetworkModel model;
    std::vector<rocofscreen::MachineState> states;
};

inline Prepared prepare(const rocofscreen::GridCase& base) {
    using namespace rocofscreen;
    Prepared p;
    p.pf = solve_powerflow(base);
    p.grid = apply_solution(base, p.pf);
    p.model = augment_dynamic(build_ybus(p.grid), p.grid, p.pf);
    p.states = init_machines(p.model, p.grid, p.pf);
    return p;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rocofscreen-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing_support
