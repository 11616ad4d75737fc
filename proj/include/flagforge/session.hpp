#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "flagforge/finitary.hpp"
#include "flagforge/finoracle.hpp"

namespace flagforge {

using json = nlohmann::json;

/// An object together with the name of the model it lives in.
template <class T>
struct Bound {
  std::string model;
  T value;
};

/// Every defined object, fully constructed. Names are unique across all sections.
struct Session {
  std::map<std::string, Model> models;
  std::map<std::string, Bound<Vector>> vectors;
  std::map<std::string, Bound<Subspace>> subspaces;
  std::map<std::string, Bound<FinitePairFlag>> flags;
  std::map<std::string, BasisOrderFlag> basis_flags;
  std::map<std::string, Bound<TautCouple>> couples;
  std::map<std::string, Bound<FinitaryElement>> elements;
  std::map<std::string, Bound<TraceConditionSubalgebra>> trace_conditions;
  std::map<std::string, FdLieAlgebra> algebras;
  json commands = json::array();

  /// Section holding `name`, or empty.
  std::string section_of(const std::string& name) const;
};

/// Input errors carry a position when the text itself is malformed.
struct InputError {
  std::string kind;    // ParseError, SchemaError, UnresolvedReference, or a domain kind
  std::string detail;
  std::optional<std::size_t> line{}, column{};
  std::optional<std::string> object{};
  std::optional<std::size_t> command{};
  json to_json() const;
};

class SessionInputError : public std::runtime_error {
public:
  explicit SessionInputError(InputError e) : std::runtime_error(e.kind + ": " + e.detail), error_(std::move(e)) {}
  const InputError& error() const noexcept { return error_; }

private:
  InputError error_;
};

// ---------------------------------------------------------------- codecs

json rational_to_json(const Rational& q);
Rational rational_from_json(const json& j);
json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j);
json matrix_to_json(const Matrix& m);
/// `cols` fixes the width of an empty matrix.
Matrix matrix_from_json(const json& j, std::optional<std::size_t> cols = std::nullopt);
json epset_to_json(const EpSet& s);
EpSet epset_from_json(const json& j);
json epseq_to_json(const EpSeq& s);
EpSeq epseq_from_json(const json& j);
json model_to_json(const Model& m);
Model model_from_json(const json& j);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j, Side side, std::size_t aug_count);
json subspace_to_json(const Subspace& s);
json flag_to_json(const FinitePairFlag& f);
json basis_flag_to_json(const BasisOrderFlag& b);
BasisOrderFlag basis_flag_from_json(const json& j);
json element_to_json(const FinitaryElement& x);
json algebra_to_json(const MatSpace& a);

bool equal_models(const Model& a, const Model& b);
bool equal_couples(const TautCouple& a, const TautCouple& b);
bool equal_basis_flags(const BasisOrderFlag& a, const BasisOrderFlag& b);
/// Same names and structurally equal values in every section (commands ignored).
bool structurally_equal(const Session& a, const Session& b);

// ---------------------------------------------------------------- loading and running

/// Throws SessionInputError.
Session load_session(const json& j);
/// Parses UTF-8 text first; parse failures report line and column.
Session load_session_text(const std::string& text);
/// Every object in definition form, with references inlined. load_session reproduces it.
json emit_objects(const Session& s);

inline constexpr std::uint64_t kDefaultSeed = 1;

struct RunOptions {
  std::uint64_t seed = kDefaultSeed;
  bool parallel = false;
  bool timing = false;
};

struct RunResult {
  json report;
  int exit_code = 0;  // 0 pass, 1 assertion failure, 2 input error
};

/// Validates every command, then executes them. Command i runs with seed + i unless it sets "seed".
RunResult run_session(const Session& s, const RunOptions& opts = {});
/// Load and run; input errors become an exit-2 report.
RunResult run_session_text(const std::string& text, const RunOptions& opts = {});

}  // namespace flagforge
