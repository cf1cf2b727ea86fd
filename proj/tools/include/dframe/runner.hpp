#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dframe/error.hpp"

namespace dframe::runner {

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitAssertion = 4;

// Semantically invalid config; `field` is the dotted path of the culprit.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Suites in execution order.
const std::vector<std::string>& suite_order();
// Suites whose results depend on the seed.
bool is_randomized(const std::string& suite);

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<double> tol;  // replaces tolerances.residual
  std::optional<std::uint64_t> seed;
};

struct SuiteOutcome {
  std::string name;
  bool passed = false;
  std::vector<std::string> failures;
  nlohmann::json report;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string error;  // parse or validation message
  std::filesystem::path out_dir;
  std::vector<SuiteOutcome> suites;
  nlohmann::json summary;
};

// Parses, validates and runs the config, writing <suite>.json, summary.json
// and (for the sweep) sweep.csv into the output directory. Never throws for
// bad input: the problem is reported through exit_code and error.
RunResult run(const std::filesystem::path& config, const Overrides& overrides = {});

// Same, from an in-memory document; relative file references resolve
// against `base_dir`.
RunResult run_text(const std::string& text, const std::filesystem::path& base_dir,
                   const std::string& config_name, const Overrides& overrides = {});

// Builtin space, basis, frame and symbol families with parameter schemas.
nlohmann::json family_catalog();
std::string catalog_text(const nlohmann::json& catalog);

}  // namespace dframe::runner
