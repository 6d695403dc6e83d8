#pragma once

#include <cstdint>
#include <optional>

#include "gerbelab/cli/json_io.hpp"

namespace gerbelab::cli {

using io::Json;

// Object types: cover, form, field, gerbe, morphism, plectic, loop, surface, functional, section.
struct Object {
  std::string type;
  Json value;
};

struct Task {
  std::string name;
  std::string command;
  std::map<std::string, std::string> refs;  // role -> object name
  Json params = Json::object();
};

struct Manifest {
  std::string version;
  std::map<std::string, Object> objects;
  std::vector<Task> tasks;
};

const std::vector<std::string>& commands();

// Structure, field names and references are checked here; cocycle-level validity is a task outcome.
Manifest parse_manifest(const std::string& text);
Json manifest_to_json(const Manifest& m);
std::string serialize_manifest(const Manifest& m);  // canonical: sorted keys, two-space indent

enum class Status { Pass, Fail, Error };
const char* to_string(Status s);

struct TaskResult {
  std::string name;
  std::string command;
  Status status = Status::Pass;
  Json values = Json::object();
  std::vector<Residual> residuals;
  std::string message;
  double seconds = 0;
};

struct Report {
  std::string version;
  std::vector<TaskResult> tasks;
  bool all_pass() const;
};

constexpr uint64_t kDefaultSeed = 20240917ULL;
// GERBELAB_SEED, or kDefaultSeed when unset
uint64_t seed_from_env();

struct RunOptions {
  std::optional<double> tol;
  std::optional<double> eps;
  std::optional<int> samples;  // N for generated loops
  std::optional<int> degree;   // hom-space degree bound
  std::optional<std::string> only_command;
  uint64_t seed = kDefaultSeed;
};

// Tasks run in manifest order; a failing or throwing task never stops the others.
Report run(const Manifest& m, const RunOptions& opt = {});

enum class Format { Json, Text };
// Timings are left out unless asked for, so equal inputs give byte-identical reports.
std::string emit_report(const Report& r, Format f, bool timings = false);

}  // namespace gerbelab::cli
