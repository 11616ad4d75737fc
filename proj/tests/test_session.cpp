#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "flagforge/session.hpp"

using namespace flagforge;

namespace {

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path root() { return FLAGFORGE_SOURCE_DIR; }

std::vector<std::filesystem::path> corpus() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(root() / "sessions"))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

InputError input_error(const std::string& text) {
  try {
    load_session_text(text);
  } catch (const SessionInputError& e) {
    return e.error();
  }
  FAIL("expected an input error");
  return {};
}

}  // namespace

TEST_CASE("session: codecs") {
  CHECK(rational_from_json(json("-6/4")) == Rational(-3, 2));
  CHECK(rational_from_json(json(7)) == 7);
  CHECK(rational_to_json(Rational(3, 4) - Rational(1, 4)) == "1/2");
  CHECK_THROWS_AS(rational_from_json(json(0.5)), SessionInputError);
  const EpSet ev = epset_from_json(json::parse(R"({"period": 2, "residues": [0]})"));
  CHECK(ev == EpSet::residue_class(0, 2));
  CHECK(epset_from_json(epset_to_json(ev)) == ev);
  CHECK(epset_from_json("all") == EpSet::all());
  CHECK(epset_from_json(json::parse(R"({"finite": [3, 1]})")) == EpSet::finite({1, 3}));
  const EpSeq s = epseq_from_json(json::parse(R"({"pre": ["1/2"], "repeat": ["1", "0"]})"));
  CHECK(epseq_from_json(epseq_to_json(s)) == s);
  CHECK(epseq_from_json("3") == EpSeq::constant(3));
  Matrix m = matrix_from_json(json::parse(R"([["1", "2"], [3, "-1/3"]])"));
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  CHECK(matrix_from_json(json::array(), 4).cols() == 4);
  for (const Model& md : {plain_model(), row_of_ones_model(), form_model(FormKind::Antisymmetric)})
    CHECK(equal_models(model_from_json(model_to_json(md)), md));
  Vector v = Vector::unit(Side::W, 1, 4);
  v.aug = {Rational(2, 3)};
  CHECK(vector_from_json(vector_to_json(v), Side::W, 1) == v);
}

TEST_CASE("session: corpus round-trips through emit") {
  const auto files = corpus();
  REQUIRE(files.size() >= 4);
  for (const auto& f : files) {
    CAPTURE(f.string());
    const Session a = load_session_text(read(f));
    const json emitted = emit_objects(a);
    const Session b = load_session(emitted);
    CHECK(structurally_equal(a, b));
    CHECK(emit_objects(b) == emitted);
  }
}

TEST_CASE("session: every corpus session passes") {
  for (const auto& f : corpus()) {
    CAPTURE(f.string());
    RunResult r = run_session_text(read(f));
    CHECK(r.exit_code == 0);
    CHECK(r.report.at("verdict") == "pass");
  }
}

TEST_CASE("session: the augmented model reports V as not closed") {
  const std::string text = R"({
    "models": {"ones": {"preset": "row_of_ones"}},
    "subspaces": {"V": {"side": "V", "aligned": "all"}},
    "commands": [{"cmd": "subspace", "op": "is_closed", "subspace": "V", "expect": false}]})";
  RunResult r = run_session_text(text);
  CHECK(r.exit_code == 0);
  CHECK(r.report["commands"][0]["status"] == "pass");
  CHECK(r.report["commands"][0]["result"]["verdict"] == false);
}

TEST_CASE("session: input errors") {
  RunResult empty = run_session_text(read(root() / "tests/data/empty.json"));
  CHECK(empty.exit_code == 0);
  CHECK(empty.report["commands"].empty());

  InputError p = input_error(read(root() / "tests/data/malformed.json"));
  CHECK(p.kind == "ParseError");
  CHECK(p.line == std::optional<std::size_t>(4));
  CHECK(p.column == std::optional<std::size_t>(3));

  RunResult u = run_session_text(read(root() / "tests/data/unresolved.json"));
  CHECK(u.exit_code == 2);
  CHECK(u.report["error"]["kind"] == "UnresolvedReference");
  CHECK(u.report["error"]["detail"] == "nowhere");
  CHECK(u.report["error"]["command"] == 0);

  // references inside definitions are checked at load time
  InputError d = input_error(R"({"models": {"m": {"preset": "plain"}}, "flags": {"f": {"members": ["ghost"]}}})");
  CHECK(d.kind == "UnresolvedReference");
  CHECK(d.object == std::optional<std::string>("f"));

  CHECK(input_error(R"({"models": {"m": {"preset": "plain"}}, "subspaces": {"a": {"op": "perp", "arg": "a"}}})")
            .kind == "SchemaError");
  CHECK(input_error(R"({"models": {"m": {"preset": "plain"}}, "flags": {"m": {}}})").kind == "SchemaError");
  CHECK(input_error(R"({"models": {"m": {"preset": "plain", "extra": 1}}})").kind == "SchemaError");
  // domain failures while building an object name the object
  InputError nt = input_error(R"({"models": {"m": {"preset": "plain"}},
    "couples": {"c": {"f": {"side": "V", "members": [{"side": "V", "aligned": {"period": 2, "residues": [0]}}]},
                      "g": {"side": "W", "members": []}}}})");
  CHECK(nt.kind == "NotTaut");
  CHECK(nt.object == std::optional<std::string>("c"));

  RunResult bad_cmd = run_session_text(R"({"models": {"m": {"preset": "plain"}}, "commands": [{"cmd": "frobnicate"}]})");
  CHECK(bad_cmd.exit_code == 2);
}

TEST_CASE("session: assertion failures and expected errors") {
  RunResult f = run_session_text(read(root() / "tests/data/failing.json"));
  CHECK(f.exit_code == 1);
  CHECK(f.report["commands"][0]["status"] == "fail");

  const std::string text = R"({
    "algebras": {"j": {"n": 2, "generators": [[["1", "1"], ["0", "1"]]]}},
    "commands": [
      {"cmd": "fd", "op": "gred", "alg": "j", "expect_error": "NotSplittable"},
      {"cmd": "fd", "op": "gred", "alg": "j"}]})";
  RunResult e = run_session_text(text);
  CHECK(e.exit_code == 1);
  CHECK(e.report["commands"][0]["status"] == "pass");
  CHECK(e.report["commands"][1]["status"] == "error");
  CHECK(e.report["commands"][1]["error"]["kind"] == "NotSplittable");
}

TEST_CASE("session: reports are deterministic and parallel runs agree") {
  for (const auto& f : corpus()) {
    CAPTURE(f.string());
    const Session s = load_session_text(read(f));
    RunOptions seq;
    seq.seed = 17;
    RunOptions par = seq;
    par.parallel = true;
    const json a = run_session(s, seq).report;
    CHECK(run_session(s, seq).report == a);
    CHECK(run_session(s, par).report == a);
    CHECK_FALSE(a.dump().find("\"ms\"") != std::string::npos);
  }
  RunOptions t;
  t.timing = true;
  CHECK(run_session_text(read(root() / "sessions/plain_couples.json"), t).report["commands"][0].contains("ms"));
}
