#pragma once

// Problem files and the analyze / series / mb / verify / triangulate commands.
// Output is JSON on the output stream; a short summary goes to the error stream.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gkz/contour.hpp"
#include "gkz/series.hpp"
#include "gkz/verify.hpp"

namespace gkz::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kInvalidInput = 2, kNumericFailure = 3 };

// Schema violation; `field` is a JSON pointer, `line` is set for syntax errors.
class InputError : public std::runtime_error {
 public:
  InputError(std::string field, const std::string& message, std::optional<std::size_t> line = std::nullopt);
  const std::string& field() const { return field_; }
  std::optional<std::size_t> line() const { return line_; }

 private:
  std::string field_;
  std::optional<std::size_t> line_;
};

struct ProblemFile {
  IntMatrix A;
  std::vector<cplx> c;
  std::optional<RatVector> c_exact;      // every entry given as "p/q"
  std::optional<std::vector<cplx>> z;
  std::optional<std::vector<std::size_t>> sigma;  // 0-based internally
  std::optional<std::vector<long>> k_tilde;
  Truncation truncation;
  ContourSpec quadrature;
  std::optional<RatVector> weights;
  Thresholds thresholds;
};

ProblemFile parse_problem(const nlohmann::json& j);
ProblemFile parse_problem_text(const std::string& text);
ProblemFile load_problem(const std::string& path);

// Fully resolved file, defaults included; parse_problem(echo(p)) reproduces p.
nlohmann::json echo(const ProblemFile& p);

nlohmann::json to_json(cplx v);
std::string format_rational(const Rational& q);

struct CommandOptions {
  bool all_ktilde = false;
  bool self_test = false;
};

// Runs one command; returns the process exit code.
int run_command(const std::string& command, const ProblemFile& problem, const CommandOptions& options,
                std::ostream& out, std::ostream& err);

// Full entry point: argument parsing, file loading, error mapping.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Exit code for a library error.
int exit_code_for(ErrorCode code);

}  // namespace gkz::cli
