#pragma once

// Command dispatch for the formkit CLI.  Every command produces an ordered
// JSON document; the text format is a rendering of the same document.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "formkit/instance_io.hpp"

namespace formkit {

using Report = nlohmann::ordered_json;

struct CommandOptions {
  Tolerances tol;
  std::optional<Complex> lambda;
  /// Matrix text for Υ, already read from a file if one was named.
  std::optional<std::string> upsilon;
  int grid = 720;
  std::vector<int> Ns{8, 16, 32, 64};
  Complex probe{-100.0, 0.0};
};

const std::vector<std::string>& command_names();

/// Throws formkit::Error; mathematical refusals propagate with their code.
Report run_command(const std::string& cmd, const InstanceFile& file, const CommandOptions& opts);

std::string render_text(const Report& report);

/// Parses "re,im" (or a bare real).  Throws ParseError.
Complex parse_complex_flag(const std::string& text, const std::string& flag);

/// Parses "8,16,32".  Throws ParseError.
std::vector<int> parse_int_list(const std::string& text, const std::string& flag);

}  // namespace formkit
