#pragma once

#include <string>

#include <json.hpp>

#include "semico/certificates.hpp"
#include "semico/ladder.hpp"
#include "semico/semicocycle.hpp"

namespace semico {

using json = nlohmann::json;

// All readers throw ConfigError naming the JSON pointer of the offending value.

json to_json(const Integer& z);  // number when it fits int64, else a decimal string
Integer integer_from(const json& j, const std::string& at);

json to_json(const Rational& r);  // {"p":..,"q":..}, lowest terms, q > 0
Rational rational_from(const json& j, const std::string& at);

json to_json(const ExactScalar& x);  // {"p","q"} or {"p","q","sp","sq","d"}
ExactScalar scalar_from(const json& j, const std::string& at);

json to_json(const BaseSystem& sys);
BaseSystem system_from(const json& j, const std::string& at);

json point_to_json(const BaseSystem& sys, const Point& p);
Point point_from(const BaseSystem& sys, const json& j, const std::string& at);

json to_json(const RadiiLadder& L);
RadiiLadder ladder_from(const json& j, const std::string& at);

// Ladder generation parameters as they appear in run configs.
LadderParams ladder_params_from(const json& j, BaseKind kind, const std::string& at);

json to_json(const SemicocycleInstance& inst);
// Rebuilds the derived data (block cells, prepare()); stored J_s endpoints must match.
SemicocycleInstance instance_from(const json& j, const std::string& at);

json to_json(const IndependenceCertificate& c);
IndependenceCertificate certificate_from(const json& j, const std::string& at);

json to_json(const std::vector<Violation>& v);
json to_json(const VerificationReport& r);
json to_json(const TamenessReport& r);

std::string word_csv(const Word& w);
std::string toeplitz_csv(const ToeplitzReport& r);
std::string toeplitz_density_csv(const ToeplitzReport& r);

// File helpers. Parse errors are reported as ConfigError with line and column.
json read_json_file(const std::string& path);
json parse_json_text(const std::string& text, const std::string& name);
// Compact for large artifacts, two-space indent otherwise; always newline-terminated.
std::string dump_json(const json& j, bool pretty = true);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace semico
