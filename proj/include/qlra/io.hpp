#pragma once

// JSON encoding of models, spaces and report fragments.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "qlra/binary.hpp"
#include "qlra/continuous.hpp"
#include "qlra/contextual.hpp"
#include "qlra/kolmogorov.hpp"

namespace qlra::io {

using Json = nlohmann::ordered_json;

/// Unreadable file, malformed JSON or a document missing required fields.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Observable outcomes, probabilities and transition entries are read as
/// given; range violations are left for validate_model to report.
ContextualModel model_from_json(const Json& j);
Json to_json(const ContextualModel& m);

ContinuousModel continuous_from_json(const Json& j);
Json to_json(const ContinuousModel& m);
Json to_json(const Grid& g);

/// Events are lists of outcome names.
FiniteSpace space_from_json(const Json& j);
Json to_json(const FiniteSpace& s);

Json to_json(const Complex& z);  // [re, im]
Json to_json(const Eigen::MatrixXcd& m);  // rows of [re, im]
Json to_json(const Eigen::MatrixXd& m);   // rows
Json to_json(const StateVector& s);
Json to_json(const Basis2& b);
Json to_json(const Operator2& op);
Json to_json(const ChangeOfBasis2& u);
Json to_json(const AngleSet& a);
Json to_json(const ValidationReport& r);

}  // namespace qlra::io
