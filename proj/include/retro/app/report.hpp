#pragma once

// Structured reports produced by every command. A report is a JSON document
//
//   {"tool", "version", "command", "inputs", "derived", "checks", "passed"}
//
// where each check is {"name", "value", "tolerance", "passed"}. The text
// rendering is derived from the same document.

#include <cstdint>
#include <optional>
#include <string>

#include "retro/app/io.hpp"
#include "retro/check.hpp"
#include "retro/ud.hpp"

namespace retro::app {

inline constexpr const char* kToolName = "retrodictor";
inline constexpr const char* kToolVersion = "0.1.0";

io::Json to_json(const Check& c);
io::Json to_json(const CheckList& checks);

io::Json make_report(const std::string& command, io::Json inputs, io::Json derived,
                     const CheckList& checks);
bool report_passed(const io::Json& report);
std::string render_text(const io::Json& report);

/// Transform of a file-level ensemble and POVM, with identity residuals, the
/// symmetric-Born comparison and, for unbiased sources, the reduction to
/// Pi^ret = D eta rho and rho^ret = Pi / Tr Pi.
io::Json transform_report(const io::EnsembleFile& ensemble, const io::PovmFile& povm);

io::Json ud_report(const ud::UdInstance& inst, std::optional<double> grid_step = std::nullopt);

io::Json channel_report(const ud::UdInstance& inst);

/// Counts and the empirical table. Statistical flags are reported but are not
/// checks: a 3 sigma excursion is an expected event, not a failure.
io::Json simulate_report(const io::EnsembleFile& ensemble, const io::PovmFile& povm, std::uint64_t n,
                         std::uint64_t seed, unsigned workers);

}  // namespace retro::app
