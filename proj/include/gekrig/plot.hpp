#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gekrig/harness.hpp"

namespace gekrig {

/// Log-log fit time versus RE chart, one panel per (function, d), one
/// polyline per (model, h, m) joining its sample sizes in increasing n.
/// Output depends only on the rows, byte for byte.
std::string render_tradeoff_svg(const std::vector<SummaryRow>& rows);

void emit_plot(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

}  // namespace gekrig
