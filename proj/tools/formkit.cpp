// formkit <cmd> <instance-file> [flags]
//
// Exit codes: 0 success, 2 mathematical refusal, 1 IO or parse error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "formkit/report.hpp"

namespace fs = std::filesystem;
using namespace formkit;

namespace {

int exit_code(const Error& e) { return e.is_input_error() ? 1 : 2; }

Report error_report(const Error& e) {
  Report r;
  r["error"] = std::string(to_string(e.code()));
  r["message"] = e.what();
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print(const Report& r, bool as_json) {
  if (as_json)
    std::cout << r.dump(2) << "\n";
  else
    std::cout << render_text(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sesquilinear form toolkit: majorants, representations, decompositions, "
               "numerical range and solvability"};
  std::string cmd, instance_path, batch_dir;
  std::string lambda_text, upsilon_text, ns_text, probe_text;
  bool as_json = false;
  CommandOptions opts;

  app.add_option("command", cmd, "Command to run")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("instance", instance_path, "Instance file (JSON)");
  app.add_flag("--json", as_json, "Emit the structured report");
  app.add_option("--tol-rank", opts.tol.rank, "Relative rank cutoff")->capture_default_str();
  app.add_option("--tol-residual", opts.tol.residual, "Relative residual bound")
      ->capture_default_str();
  app.add_option("--lambda", lambda_text, "Spectral parameter re,im (solvable)");
  app.add_option("--upsilon", upsilon_text, "Perturbation matrix as JSON text or file (solvable)");
  app.add_option("--batch", batch_dir, "Run the command on every *.json file in a directory");
  app.add_option("--grid", opts.grid, "Numerical range angle grid")->capture_default_str();
  app.add_option("--N", ns_text, "Ascending truncation sizes, e.g. 8,16,32,64 (lab)");
  app.add_option("--probe", probe_text, "Probe point re,im for lab diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!lambda_text.empty()) opts.lambda = parse_complex_flag(lambda_text, "--lambda");
    if (!probe_text.empty()) opts.probe = parse_complex_flag(probe_text, "--probe");
    if (!ns_text.empty()) opts.Ns = parse_int_list(ns_text, "--N");
    if (!upsilon_text.empty()) {
      const auto first = upsilon_text.find_first_not_of(" \t\n");
      opts.upsilon = (first != std::string::npos && upsilon_text[first] == '[')
                         ? upsilon_text
                         : read_file(upsilon_text);
    }
  } catch (const Error& e) {
    std::cerr << "formkit: " << e.what() << "\n";
    return 1;
  }

  if (batch_dir.empty() == instance_path.empty()) {
    std::cerr << "formkit: give exactly one of an instance file or --batch <dir>\n";
    return 1;
  }

  if (!instance_path.empty()) {
    try {
      const InstanceFile file = parse_instance(instance_path, opts.tol.rank);
      print(run_command(cmd, file, opts), as_json);
      return 0;
    } catch (const Error& e) {
      std::cerr << "formkit: " << e.what() << "\n";
      if (as_json) print(error_report(e), true);
      return exit_code(e);
    }
  }

  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(batch_dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  if (ec) {
    std::cerr << "formkit: " << batch_dir << ": " << ec.message() << "\n";
    return 1;
  }
  std::sort(files.begin(), files.end());
  int worst = 0;
  Report combined;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    Report r;
    try {
      r = run_command(cmd, parse_instance(path.string(), opts.tol.rank), opts);
    } catch (const Error& e) {
      std::cerr << "formkit: " << e.what() << "\n";
      r = error_report(e);
      const int code = exit_code(e);
      worst = worst == 1 || code == 1 ? 1 : std::max(worst, code);
    }
    if (as_json) {
      combined[name] = std::move(r);
    } else {
      std::cout << "== " << name << " ==\n" << render_text(r);
    }
  }
  if (as_json) std::cout << combined.dump(2) << "\n";
  return worst;
}
