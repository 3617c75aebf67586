#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "treedamp/cauchy.hpp"
#include "treedamp/tree_function.hpp"

namespace treedamp {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 2;
inline constexpr int numerical = 3;
inline constexpr int assertion = 4;
}  // namespace exit_code

struct SimulateArgs {
    std::filesystem::path config;
    std::filesystem::path control;
    std::filesystem::path out;
};

struct DampArgs {
    std::filesystem::path config;
    std::filesystem::path out;
    std::optional<int> q;
    std::optional<double> tol;
};

struct VerifyArgs {
    std::filesystem::path config;
    std::filesystem::path solution;
};

struct ConvergenceArgs {
    std::filesystem::path config;
    std::vector<int> q;
};

/// Each command writes its report to `out` and returns an exit code; library
/// exceptions propagate (see run_guarded).
int cmd_simulate(const SimulateArgs& args, std::ostream& out);
int cmd_damp(const DampArgs& args, std::ostream& out);
int cmd_verify(const VerifyArgs& args, std::ostream& out);
int cmd_convergence(const ConvergenceArgs& args, std::ostream& out);

/// Runs fn, mapping ValidationError (and JSON type errors) to 2 and
/// NumericalError to 3 with the message on `err`.
int run_guarded(const std::function<int()>& fn, std::ostream& err);

/// edge, t, re_y0, im_y0, ..., re_y{n-1}, im_y{n-1}; 17 significant digits.
void write_trajectory_csv(const std::filesystem::path& path, const TreeFunction& y, int samples_per_piece = 4);
/// edge, t, re_u, im_u.
void write_control_csv(const std::filesystem::path& path, const Control& control, const Tree& tree,
                       int samples_per_piece = 4);

}  // namespace treedamp
