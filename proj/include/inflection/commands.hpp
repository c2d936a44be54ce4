#pragma once

#include "inflection/config.hpp"

#include <iosfwd>
#include <string>

namespace inflection::cli {

// Exit codes: 0 success, 1 configuration or I/O problem, 2 invariant breach.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 1;
inline constexpr int kExitBreach = 2;

// Maps an exception to its exit code and a short type name.
int exit_code_for(const std::exception& e);
std::string error_kind(const std::exception& e);

int cmd_run(const RunConfig& cfg, std::ostream& log);
int cmd_scatter(const RunConfig& cfg, int threads, std::ostream& log);
// Grid-halving study: (dx, dt), (dx/2, dt/2), (dx/4, dt/4).
int cmd_convergence(const RunConfig& cfg, std::ostream& log);
int cmd_selftest(std::ostream& log);

// field_t<t>.csv naming, shortest round-trip form of t
std::string time_tag(double t);

}  // namespace inflection::cli
