#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "fairalloc/packing.hpp"

namespace fairalloc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

/// Entry point of the command-line tool. Returns 0 on success, 2 for bad
/// flags or input, 3 when a solver self-check fails.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// CSV with header iter,utility,max_load,f_r,gap.
void write_trace(std::ostream& out, std::span<const TraceRow> rows);
/// Same, to a file; throws IoError when it cannot be written.
void emit_trace(std::span<const TraceRow> rows, const std::string& path);

}  // namespace fairalloc
