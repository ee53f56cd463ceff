#pragma once

#include "maslov/dynamics.hpp"
#include "maslov/errors.hpp"
#include "maslov/gallery.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace maslov {

/// Schema violation in a run configuration; `key` is "section.key" and `line` is 1-based
/// (0 when the problem is not tied to a line).
class ConfigError : public Error {
 public:
  ConfigError(std::string message, std::string key = {}, int line = 0);
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_ = 0;
};

enum class Scenario { Index, Singularities, Liapunov, Verify };

const char* to_string(Scenario s) noexcept;
std::optional<Scenario> scenario_from_string(std::string_view s);

struct SystemSpec {
  std::string builtin;           // empty for a DSL system
  ParameterMap builtin_params;   // a, eps, w1, w2, n
  std::string h_source;          // rotational
  int freedoms = 0;              // DSL
  std::vector<std::string> fields;
  ParameterMap params;           // [parameters]
  Vector weights;                // empty: H = F_1
  Differentiation differentiation = Differentiation::Forward;
  SystemOptions options;
};

struct CurveSpec {
  enum class Kind { Circle, Action };
  Kind kind = Kind::Circle;
  Vector center, u, v;
  double radius = 1.0;
  RotationalAction action = RotationalAction::L12;
  int m = 0;
  Vector point;  // base point of an action orbit
  bool reverse = false;
};

struct SingularitiesSpec {
  std::vector<Vector> seeds;
  bool locate = true;
  /// Tangent pair for the local index; empty means (eta, theta).
  Vector u, v;
  double epsilon = 1e-3;
};

struct RunConfig {
  Scenario scenario = Scenario::Index;
  bool scenario_in_file = false;
  std::string path;
  SystemSpec system;
  std::optional<CurveSpec> curve;  // absent: the system's default curve
  bool disk = false;
  int disk_grid = 64;
  SingularitiesSpec singularities;
  std::optional<Vector> liapunov_point;
  LiapunovSpec liapunov;
  std::string verify_suite = "system";  // or "reference"
  MaslovOptions maslov;
  LocateOptions locate;
  FlowSpec flow;
  /// Empty: <scenario>.json and <scenario>_trace.csv.
  std::string json_name;
  std::string csv_name;
};

/// Parses the key=value-with-sections format. Unknown sections and keys, duplicate keys and
/// malformed values are ConfigErrors that name the key and line.
RunConfig parse_config_text(std::string_view text, const std::string& origin = "<config>");
RunConfig parse_config(const std::string& path);

}  // namespace maslov
