#pragma once

#include <string>

namespace nasgnn {

/// Writes contents to a sibling temp file and renames it over the target,
/// so an interrupted run never leaves a partial file at `path`.
void atomic_write_file(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

/// Shortest-faithful decimal for doubles: 17 significant digits, which
/// round-trips IEEE binary64 exactly. Used for every float we serialize.
std::string format_double(double x);

}  // namespace nasgnn
