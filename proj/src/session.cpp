#include "flagforge/session.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <random>
#include <set>
#include <thread>

#include "flagforge/coherence.hpp"

namespace flagforge {

namespace {

const char* const kSections[] = {"models",   "vectors",  "subspaces",        "flags",    "basis_flags",
                                 "couples",  "elements", "trace_conditions", "algebras"};

[[noreturn]] void schema(const std::string& detail) { throw SessionInputError({"SchemaError", detail}); }

std::size_t size_from_json(const json& j, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    schema(what + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<std::size_t> sizes_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) schema(what + ": expected an array");
  std::vector<std::size_t> out;
  for (const auto& e : j) out.push_back(size_from_json(e, what));
  return out;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) schema(what + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "note") continue;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      schema(what + ": unknown key \"" + k + "\"");
  }
}

Side side_from_json(const json& j) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "V") return Side::V;
  if (s == "W" || s == "V*") return Side::W;
  schema("side must be \"V\" or \"W\"");
}

FormKind form_from_json(const json& j) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "none") return FormKind::None;
  if (s == "symmetric") return FormKind::Symmetric;
  if (s == "antisymmetric") return FormKind::Antisymmetric;
  schema("form must be none, symmetric or antisymmetric");
}

Ambient ambient_from_json(const json& j) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "gl") return Ambient::Gl;
  if (s == "sl") return Ambient::Sl;
  schema("ambient must be gl or sl");
}

ClassicalKind classical_from_json(const json& j) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "so") return ClassicalKind::So;
  if (s == "sp") return ClassicalKind::Sp;
  schema("form must be so or sp");
}

json involution_to_json(const Involution& v) {
  return {{"threshold", v.threshold}, {"period", v.period}, {"head", v.head},
          {"block", v.block},         {"head_signs", v.head_signs}, {"block_signs", v.block_signs}};
}

Involution involution_from_json(const json& j) {
  check_keys(j, {"threshold", "period", "head", "block", "head_signs", "block_signs"}, "involution");
  Involution v;
  v.threshold = size_from_json(j.value("threshold", json(0)), "involution threshold");
  v.period = size_from_json(j.value("period", json(2)), "involution period");
  v.head = sizes_from_json(j.value("head", json::array()), "involution head");
  v.block = sizes_from_json(j.value("block", json::array()), "involution block");
  for (const char* key : {"head_signs", "block_signs"}) {
    std::vector<int> signs;
    for (const auto& e : j.value(key, json::array())) {
      if (!e.is_number_integer() || (e.get<int>() != 1 && e.get<int>() != -1)) schema("involution signs must be ±1");
      signs.push_back(e.get<int>());
    }
    (std::string(key) == "head_signs" ? v.head_signs : v.block_signs) = signs;
  }
  return v;
}

bool equal_involutions(const std::optional<Involution>& a, const std::optional<Involution>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->threshold == b->threshold && a->period == b->period && a->head == b->head && a->block == b->block &&
         a->head_signs == b->head_signs && a->block_signs == b->block_signs;
}

json basis_of(const MatSpace& a) {
  json out = json::array();
  for (const auto& m : a.basis()) out.push_back(matrix_to_json(m));
  return {{"dim", a.dim()}, {"basis", out}};
}

/// Scalars compare as rationals, so an expected 3 matches "3".
bool json_match(const json& expect, const json& got) {
  if (expect.is_object()) {
    if (!got.is_object()) return false;
    for (const auto& [k, v] : expect.items())
      if (!got.contains(k) || !json_match(v, got.at(k))) return false;
    return true;
  }
  if (expect.is_array()) {
    if (!got.is_array() || got.size() != expect.size()) return false;
    for (std::size_t i = 0; i < expect.size(); ++i)
      if (!json_match(expect[i], got[i])) return false;
    return true;
  }
  const auto numeric = [](const json& j) { return j.is_number_integer() || j.is_string(); };
  if (numeric(expect) && numeric(got) && (expect.is_string() != got.is_string() || expect.is_string())) {
    try {
      return rational_from_json(expect) == rational_from_json(got);
    } catch (const std::exception&) {
      return expect == got;
    }
  }
  return expect == got;
}

}  // namespace

// ---------------------------------------------------------------- codecs

json InputError::to_json() const {
  json j{{"kind", kind}, {"detail", detail}};
  if (line) j["line"] = *line;
  if (column) j["column"] = *column;
  if (object) j["object"] = *object;
  if (command) j["command"] = *command;
  return j;
}

json rational_to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) schema("rationals are strings such as \"-3/4\" or integers");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    schema("bad rational \"" + j.get<std::string>() + "\"");
  }
}

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (const auto& q : v) out.push_back(rational_to_json(q));
  return out;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) schema("expected an array of rationals");
  Vec v;
  for (const auto& e : j) v.push_back(rational_from_json(e));
  return v;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(vec_to_json(m.row(i)));
  return out;
}

Matrix matrix_from_json(const json& j, std::optional<std::size_t> cols) {
  if (!j.is_array()) schema("expected a matrix as a list of rows");
  std::vector<Vec> rows;
  for (const auto& r : j) rows.push_back(vec_from_json(r));
  const std::size_t c = cols ? *cols : (rows.empty() ? 0 : rows.front().size());
  for (const auto& r : rows)
    if (r.size() != c) schema("matrix rows have inconsistent lengths");
  return Matrix::from_rows(rows, c);
}

json epset_to_json(const EpSet& s) {
  return {{"threshold", s.threshold()}, {"period", s.period()}, {"pre", s.pre_members()}, {"residues", s.residues()}};
}

EpSet epset_from_json(const json& j) {
  if (j.is_string()) {
    if (j == "all") return EpSet::all();
    if (j == "empty") return EpSet::empty();
    schema("set shorthand must be \"all\" or \"empty\"");
  }
  check_keys(j, {"threshold", "period", "pre", "residues", "finite", "residue", "modulus", "from"}, "set");
  if (j.contains("finite")) return EpSet::finite(sizes_from_json(j.at("finite"), "finite set"));
  if (j.contains("modulus"))
    return EpSet::residue_class(size_from_json(j.value("residue", json(0)), "residue"),
                                size_from_json(j.at("modulus"), "modulus"),
                                size_from_json(j.value("from", json(0)), "from"));
  const std::size_t n = size_from_json(j.value("threshold", json(0)), "threshold");
  const std::size_t p = size_from_json(j.value("period", json(1)), "period");
  if (p == 0) schema("period must be positive");
  auto pre = sizes_from_json(j.value("pre", json::array()), "pre");
  auto res = sizes_from_json(j.value("residues", json::array()), "residues");
  for (auto i : pre)
    if (i >= n) schema("pre members must lie below the threshold");
  for (auto r : res)
    if (r >= p) schema("residues must lie below the period");
  return EpSet(n, p, pre, res);
}

json epseq_to_json(const EpSeq& s) { return {{"pre", vec_to_json(s.preperiod())}, {"repeat", vec_to_json(s.repeat())}}; }

EpSeq epseq_from_json(const json& j) {
  if (j.is_string() || j.is_number_integer()) return EpSeq::constant(rational_from_json(j));
  check_keys(j, {"pre", "repeat"}, "sequence");
  Vec rep = vec_from_json(j.value("repeat", json::array({"0"})));
  if (rep.empty()) schema("sequence repeat must be non-empty");
  return EpSeq(vec_from_json(j.value("pre", json::array())), rep);
}

json model_to_json(const Model& m) {
  json v = json::array(), w = json::array();
  for (const auto& s : m.v_augs) v.push_back(epseq_to_json(s));
  for (const auto& s : m.w_augs) w.push_back(epseq_to_json(s));
  json j{{"v_augs", v}, {"w_augs", w}, {"cross", matrix_to_json(m.cross)}, {"form", form_kind_name(m.form_kind)}};
  if (m.iota) j["involution"] = involution_to_json(*m.iota);
  return j;
}

Model model_from_json(const json& j) {
  check_keys(j, {"preset", "v_augs", "w_augs", "cross", "form", "involution"}, "model");
  Model m;
  if (j.contains("preset")) {
    const std::string p = j.at("preset").is_string() ? j.at("preset").get<std::string>() : "";
    if (p == "plain") m = plain_model();
    else if (p == "row_of_ones") m = row_of_ones_model();
    else if (p == "symmetric" || p == "antisymmetric")
      m = form_model(form_from_json(p), j.contains("involution")
                                            ? std::optional<Involution>(involution_from_json(j.at("involution")))
                                            : std::nullopt);
    else schema("unknown model preset \"" + p + "\"");
    if (j.size() > std::size_t{1} + j.contains("involution") + j.contains("note")) schema("a preset model takes no other fields");
  } else {
    for (const auto& s : j.value("v_augs", json::array())) m.v_augs.push_back(epseq_from_json(s));
    for (const auto& s : j.value("w_augs", json::array())) m.w_augs.push_back(epseq_from_json(s));
    m.cross = j.contains("cross") ? matrix_from_json(j.at("cross"), m.w_augs.size())
                                  : Matrix(m.v_augs.size(), m.w_augs.size());
    if (j.contains("cross") && m.cross.rows() != m.v_augs.size()) schema("cross must be |v_augs| × |w_augs|");
    m.form_kind = form_from_json(j.value("form", json("none")));
    if (j.contains("involution")) m.iota = involution_from_json(j.at("involution"));
    else if (m.form_kind != FormKind::None) m.iota = default_involution(m.form_kind);
  }
  m.check_shape();
  return m;
}

json vector_to_json(const Vector& v) {
  json b = json::object();
  for (const auto& [i, q] : v.basis) b[std::to_string(i)] = rational_to_json(q);
  return {{"side", side_name(v.side)}, {"basis", b}, {"aug", vec_to_json(v.aug)}};
}

Vector vector_from_json(const json& j, Side side, std::size_t aug_count) {
  check_keys(j, {"model", "side", "basis", "aug", "dense", "unit", "aug_unit"}, "vector");
  if (j.contains("side") && side_from_json(j.at("side")) != side) schema("vector on the wrong side");
  if (j.contains("unit")) return Vector::unit(side, aug_count, size_from_json(j.at("unit"), "unit"));
  if (j.contains("aug_unit")) {
    const std::size_t k = size_from_json(j.at("aug_unit"), "aug_unit");
    if (k >= aug_count) schema("aug_unit index out of range");
    return Vector::aug_unit(side, aug_count, k);
  }
  Vector v = Vector::zero(side, aug_count);
  if (j.contains("basis")) {
    if (!j.at("basis").is_object()) schema("vector basis must map indices to rationals");
    for (const auto& [k, q] : j.at("basis").items()) {
      std::size_t i = 0;
      try {
        std::size_t used = 0;
        i = std::stoul(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        schema("vector basis key \"" + k + "\" is not an index");
      }
      v.set(i, rational_from_json(q));
    }
  }
  if (j.contains("dense")) {
    const Vec d = vec_from_json(j.at("dense"));
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] != 0) v.set(i, v.at(i) + d[i]);
  }
  if (j.contains("aug")) {
    v.aug = vec_from_json(j.at("aug"));
    if (v.aug.size() != aug_count) schema("aug has the wrong length for the model");
  }
  return v;
}

json subspace_to_json(const Subspace& s) {
  Matrix lat = s.lattice();
  json rows = matrix_to_json(lat);
  std::vector<int> tail;
  for (bool b : s.tail()) tail.push_back(b ? 1 : 0);
  return {{"side", side_name(s.side())},
          {"window", {{"threshold", s.threshold()}, {"period", s.period()}, {"tail", tail}, {"lattice", rows}}}};
}

json flag_to_json(const FinitePairFlag& f) {
  json members = json::array();
  for (const auto& s : f.chain) members.push_back(subspace_to_json(s));
  return {{"side", side_name(f.side)}, {"members", members}};
}

json basis_flag_to_json(const BasisOrderFlag& b) {
  json blocks = json::array();
  for (const auto& blk : b.blocks()) {
    json e{{"kind", block_kind_name(blk.kind)}};
    if (blk.kind == BlockKind::FinitePoints) e["points"] = blk.points;
    else e["members"] = epset_to_json(blk.members);
    blocks.push_back(e);
  }
  return {{"blocks", blocks}};
}

BasisOrderFlag basis_flag_from_json(const json& j) {
  check_keys(j, {"blocks"}, "basis flag");
  std::vector<OrderBlock> blocks;
  for (const auto& e : j.value("blocks", json::array())) {
    check_keys(e, {"kind", "points", "members"}, "block");
    OrderBlock blk;
    const std::string k = e.value("kind", std::string());
    if (k == block_kind_name(BlockKind::FinitePoints)) {
      blk.kind = BlockKind::FinitePoints;
      for (const auto& pt : e.value("points", json::array())) blk.points.push_back(sizes_from_json(pt, "point"));
    } else if (k == block_kind_name(BlockKind::OmegaUp) || k == block_kind_name(BlockKind::OmegaDown)) {
      blk.kind = k == block_kind_name(BlockKind::OmegaUp) ? BlockKind::OmegaUp : BlockKind::OmegaDown;
      if (!e.contains("members")) schema("omega block needs members");
      blk.members = epset_from_json(e.at("members"));
    } else {
      schema("unknown block kind \"" + k + "\"");
    }
    blocks.push_back(blk);
  }
  return BasisOrderFlag::make(blocks);
}

json element_to_json(const FinitaryElement& x) {
  json terms = json::array();
  for (const auto& [v, w] : x.terms()) terms.push_back(json::array({vector_to_json(v), vector_to_json(w)}));
  return {{"terms", terms}};
}

json algebra_to_json(const MatSpace& a) {
  json b = json::array();
  for (const auto& m : a.basis()) b.push_back(matrix_to_json(m));
  return {{"n", a.n()}, {"basis", b}};
}

bool equal_models(const Model& a, const Model& b) {
  return a.v_augs == b.v_augs && a.w_augs == b.w_augs && a.cross == b.cross && a.form_kind == b.form_kind &&
         equal_involutions(a.iota, b.iota);
}

bool equal_couples(const TautCouple& a, const TautCouple& b) {
  return a.f.side == b.f.side && a.f.chain == b.f.chain && a.g.side == b.g.side && a.g.chain == b.g.chain &&
         a.c_pairs == b.c_pairs;
}

bool equal_basis_flags(const BasisOrderFlag& a, const BasisOrderFlag& b) {
  const auto& x = a.blocks();
  const auto& y = b.blocks();
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].kind != y[i].kind || x[i].members != y[i].members || x[i].points != y[i].points) return false;
  return true;
}

namespace {

template <class Map, class Eq>
bool same_map(const Map& a, const Map& b, Eq eq) {
  if (a.size() != b.size()) return false;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end() || !eq(v, it->second)) return false;
  }
  return true;
}

template <class T, class Eq>
auto bound_eq(Eq eq) {
  return [eq](const Bound<T>& a, const Bound<T>& b) { return a.model == b.model && eq(a.value, b.value); };
}

}  // namespace

bool structurally_equal(const Session& a, const Session& b) {
  const auto eq = [](const auto& x, const auto& y) { return x == y; };
  return same_map(a.models, b.models, equal_models) && same_map(a.vectors, b.vectors, bound_eq<Vector>(eq)) &&
         same_map(a.subspaces, b.subspaces, bound_eq<Subspace>(eq)) &&
         same_map(a.flags, b.flags,
                  bound_eq<FinitePairFlag>([](const FinitePairFlag& x, const FinitePairFlag& y) {
                    return x.side == y.side && x.aug_count == y.aug_count && x.chain == y.chain;
                  })) &&
         same_map(a.basis_flags, b.basis_flags, equal_basis_flags) &&
         same_map(a.couples, b.couples, bound_eq<TautCouple>(equal_couples)) &&
         same_map(a.elements, b.elements, bound_eq<FinitaryElement>(eq)) &&
         same_map(a.trace_conditions, b.trace_conditions,
                  bound_eq<TraceConditionSubalgebra>(
                      [](const TraceConditionSubalgebra& x, const TraceConditionSubalgebra& y) {
                        return equal_couples(x.couple, y.couple) && x.ambient == y.ambient &&
                               x.constraints == y.constraints;
                      })) &&
         same_map(a.algebras, b.algebras, [](const FdLieAlgebra& x, const FdLieAlgebra& y) {
           return static_cast<const MatSpace&>(x) == static_cast<const MatSpace&>(y);
         });
}

std::string Session::section_of(const std::string& name) const {
  if (models.count(name)) return "models";
  if (vectors.count(name)) return "vectors";
  if (subspaces.count(name)) return "subspaces";
  if (flags.count(name)) return "flags";
  if (basis_flags.count(name)) return "basis_flags";
  if (couples.count(name)) return "couples";
  if (elements.count(name)) return "elements";
  if (trace_conditions.count(name)) return "trace_conditions";
  if (algebras.count(name)) return "algebras";
  return "";
}

// ---------------------------------------------------------------- loader

namespace {

/// Resolves named and inline definitions on demand; named objects are built once.
class Loader {
public:
  explicit Loader(const json& root) : root_(root) {
    check_keys(root, {"models", "vectors", "subspaces", "flags", "basis_flags", "couples", "elements",
                      "trace_conditions", "algebras", "commands"},
               "session");
    for (const char* sec : kSections) {
      if (!root.contains(sec)) continue;
      if (!root.at(sec).is_object()) schema(std::string(sec) + " must map names to definitions");
      for (const auto& [name, def] : root.at(sec).items()) {
        if (!defs_.emplace(name, std::make_pair(std::string(sec), &def)).second)
          schema("name \"" + name + "\" is defined twice");
      }
    }
  }

  Session load() {
    for (const auto& [name, entry] : defs_) {
      const auto& [sec, def] = entry;
      guarded(name, [&] {
        if (sec == "models") model(name);
        else if (sec == "vectors") vector(json(name), "", std::nullopt);
        else if (sec == "subspaces") subspace(json(name), "");
        else if (sec == "flags") flag(json(name), "");
        else if (sec == "basis_flags") basis_flag(json(name));
        else if (sec == "couples") couple(json(name), "");
        else if (sec == "elements") element(json(name), "");
        else if (sec == "trace_conditions") trace_condition(json(name));
        else algebra(json(name));
      });
    }
    if (root_.contains("commands")) {
      if (!root_.at("commands").is_array()) schema("commands must be an array");
      s_.commands = root_.at("commands");
    }
    return std::move(s_);
  }

private:
  template <class F>
  void guarded(const std::string& name, F&& f) {
    try {
      f();
    } catch (SessionInputError& e) {
      if (e.error().object) throw;
      InputError err = e.error();
      err.object = name;
      throw SessionInputError(err);
    } catch (const Error& e) {
      throw SessionInputError({e.kind(), e.detail(), std::nullopt, std::nullopt, name});
    }
  }

  const json& definition(const std::string& name, const std::string& sec) {
    auto it = defs_.find(name);
    if (it == defs_.end()) throw SessionInputError({"UnresolvedReference", name});
    if (it->second.first != sec) schema("\"" + name + "\" is in " + it->second.first + ", expected " + sec);
    if (!resolving_.insert(name).second) schema("cyclic definition through \"" + name + "\"");
    return *it->second.second;
  }

  template <class Map, class Build>
  auto named(Map& cache, const std::string& name, const std::string& sec, Build build) -> decltype(cache.at(name)) {
    if (auto it = cache.find(name); it != cache.end()) return it->second;
    const json& def = definition(name, sec);
    auto value = build(def);
    resolving_.erase(name);
    return cache.emplace(name, std::move(value)).first->second;
  }

  const Model& model(const std::string& name) {
    return named(s_.models, name, "models", [&](const json& def) { return model_from_json(def); });
  }

  /// Explicit "model" key, else the context, else the only model in the session.
  std::string model_name(const json& def, const std::string& ctx) {
    if (def.contains("model")) {
      if (!def.at("model").is_string()) schema("model must be a name");
      const std::string m = def.at("model").get<std::string>();
      if (!ctx.empty() && m != ctx) schema("object in model \"" + m + "\" used inside model \"" + ctx + "\"");
      model(m);
      return m;
    }
    if (!ctx.empty()) return ctx;
    std::vector<std::string> ms;
    if (root_.contains("models"))
      for (const auto& [k, v] : root_.at("models").items()) ms.push_back(k);
    if (ms.size() != 1) schema("object needs a \"model\" key");
    model(ms.front());
    return ms.front();
  }

  Bound<Vector> vector(const json& ref, const std::string& ctx, std::optional<Side> side) {
    Bound<Vector> b;
    if (ref.is_string()) {
      const std::string name = ref.get<std::string>();
      b = named(s_.vectors, name, "vectors", [&](const json& def) { return build_vector(def, "", std::nullopt); });
    } else {
      b = build_vector(ref, ctx, side);
    }
    if (!ctx.empty() && b.model != ctx) schema("vector from model \"" + b.model + "\" used in \"" + ctx + "\"");
    if (side && b.value.side != *side) schema("vector on the wrong side");
    return b;
  }

  Bound<Vector> build_vector(const json& def, const std::string& ctx, std::optional<Side> side) {
    if (!def.is_object()) schema("vector must be a name or an object");
    const std::string mn = model_name(def, ctx);
    const Side s = def.contains("side") ? side_from_json(def.at("side")) : side.value_or(Side::V);
    return {mn, vector_from_json(def, s, model(mn).aug_count(s))};
  }

  Bound<Subspace> subspace(const json& ref, const std::string& ctx) {
    Bound<Subspace> b;
    if (ref.is_string()) {
      b = named(s_.subspaces, ref.get<std::string>(), "subspaces",
                [&](const json& def) { return build_subspace(def, ""); });
    } else {
      b = build_subspace(ref, ctx);
    }
    if (!ctx.empty() && b.model != ctx) schema("subspace from model \"" + b.model + "\" used in \"" + ctx + "\"");
    return b;
  }

  Bound<Subspace> build_subspace(const json& def, const std::string& ctx) {
    check_keys(def, {"model", "side", "aligned", "balanced", "corrections", "span", "zero", "full", "window", "op",
                     "arg", "args"},
               "subspace");
    if (def.contains("op")) {
      const std::string op = def.at("op").is_string() ? def.at("op").get<std::string>() : "";
      if (op == "sum" || op == "intersection") {
        const json& args = def.value("args", json());
        if (!args.is_array() || args.size() != 2) schema(op + " needs two args");
        auto a = subspace(args[0], def.contains("model") ? model_name(def, ctx) : ctx);
        auto c = subspace(args[1], a.model);
        return {a.model, subspace_op(op == "sum" ? SubspaceOp::Sum : SubspaceOp::Intersection, a.value, c.value)};
      }
      if (!def.contains("arg")) schema(op + " needs an arg");
      auto a = subspace(def.at("arg"), def.contains("model") ? model_name(def, ctx) : ctx);
      const Model& m = model(a.model);
      if (op == "perp") return {a.model, perp(m, a.value)};
      if (op == "closure") return {a.model, closure(m, a.value)};
      if (op == "theta") return {a.model, theta(m, a.value)};
      if (op == "theta_inverse") return {a.model, theta_inverse(m, a.value)};
      if (op == "form_perp") return {a.model, form_perp(m, a.value)};
      schema("unknown subspace op \"" + op + "\"");
    }
    const std::string mn = model_name(def, ctx);
    const Side side = side_from_json(def.value("side", json("V")));
    const std::size_t k = model(mn).aug_count(side);
    if (def.value("zero", false)) return {mn, Subspace::zero(side, k)};
    if (def.value("full", false)) return {mn, Subspace::full(side, k)};
    if (def.contains("window")) {
      const json& w = def.at("window");
      check_keys(w, {"threshold", "period", "tail", "lattice"}, "window");
      const std::size_t n = size_from_json(w.value("threshold", json(0)), "threshold");
      const std::size_t p = size_from_json(w.value("period", json(1)), "period");
      std::vector<bool> tail;
      for (const auto& t : w.value("tail", json::array())) tail.push_back(t.is_boolean() ? t.get<bool>() : t == 1);
      if (p == 0 || tail.size() != p) schema("window tail needs one flag per residue");
      const std::size_t cc = k + n + static_cast<std::size_t>(std::count(tail.begin(), tail.end(), true));
      return {mn, Subspace::from_window(side, k, n, p, tail, matrix_from_json(w.value("lattice", json::array()), cc))};
    }
    std::vector<Vector> vs;
    for (const auto& v : def.value(def.contains("span") ? "span" : "corrections", json::array()))
      vs.push_back(vector(v, mn, side).value);
    if (def.contains("span")) return {mn, Subspace::span(side, k, vs)};
    const EpSet al = def.contains("aligned") ? epset_from_json(def.at("aligned")) : EpSet::empty();
    std::size_t bn = 0, bp = 1;
    std::vector<std::size_t> br;
    if (def.contains("balanced")) {
      const json& b = def.at("balanced");
      check_keys(b, {"threshold", "period", "residues"}, "balanced");
      bn = size_from_json(b.value("threshold", json(0)), "threshold");
      bp = size_from_json(b.value("period", json(1)), "period");
      br = sizes_from_json(b.value("residues", json::array()), "residues");
      if (bp == 0) schema("period must be positive");
    }
    return {mn, Subspace::from_parts(side, k, al, bn, bp, br, vs)};
  }

  Bound<FinitePairFlag> flag(const json& ref, const std::string& ctx) {
    Bound<FinitePairFlag> b;
    if (ref.is_string())
      b = named(s_.flags, ref.get<std::string>(), "flags", [&](const json& def) { return build_flag(def, ""); });
    else
      b = build_flag(ref, ctx);
    if (!ctx.empty() && b.model != ctx) schema("flag from model \"" + b.model + "\" used in \"" + ctx + "\"");
    return b;
  }

  Bound<FinitePairFlag> build_flag(const json& def, const std::string& ctx) {
    check_keys(def, {"model", "side", "members"}, "flag");
    const std::string mn = model_name(def, ctx);
    const Side side = side_from_json(def.value("side", json("V")));
    std::vector<Subspace> members;
    for (const auto& r : def.value("members", json::array())) members.push_back(subspace(r, mn).value);
    return {mn, flag_from_chain(side, model(mn).aug_count(side), members)};
  }

  const BasisOrderFlag& basis_flag(const json& ref) {
    return named(s_.basis_flags, ref.get<std::string>(), "basis_flags",
                 [&](const json& def) { return basis_flag_from_json(def); });
  }

  Bound<TautCouple> couple(const json& ref, const std::string& ctx) {
    Bound<TautCouple> b;
    if (ref.is_string())
      b = named(s_.couples, ref.get<std::string>(), "couples", [&](const json& def) { return build_couple(def, ""); });
    else
      b = build_couple(ref, ctx);
    if (!ctx.empty() && b.model != ctx) schema("couple from model \"" + b.model + "\" used in \"" + ctx + "\"");
    return b;
  }

  Bound<TautCouple> build_couple(const json& def, const std::string& ctx) {
    check_keys(def, {"model", "f", "g"}, "couple");
    if (!def.contains("f") || !def.contains("g")) schema("couple needs f and g");
    const std::string mn = model_name(def, ctx);
    auto f = flag(def.at("f"), mn);
    auto g = flag(def.at("g"), mn);
    return {mn, make_taut_couple(model(mn), f.value, g.value)};
  }

  Bound<FinitaryElement> element(const json& ref, const std::string& ctx) {
    Bound<FinitaryElement> b;
    if (ref.is_string())
      b = named(s_.elements, ref.get<std::string>(), "elements",
                [&](const json& def) { return build_element(def, ""); });
    else
      b = build_element(ref, ctx);
    if (!ctx.empty() && b.model != ctx) schema("element from model \"" + b.model + "\" used in \"" + ctx + "\"");
    return b;
  }

  Bound<FinitaryElement> build_element(const json& def, const std::string& ctx) {
    check_keys(def, {"model", "terms", "matrix", "entries"}, "element");
    const std::string mn = model_name(def, ctx);
    const Model& m = model(mn);
    const std::size_t kv = m.aug_count(Side::V), kw = m.aug_count(Side::W);
    FinitaryElement x(kv, kw);
    for (const auto& t : def.value("terms", json::array())) {
      if (!t.is_array() || t.size() != 2) schema("a term is a [vector, covector] pair");
      x = add(x, FinitaryElement::rank_one(vector(t[0], mn, Side::V).value, vector(t[1], mn, Side::W).value));
    }
    for (const auto& e : def.value("entries", json::array())) {
      if (!e.is_array() || e.size() != 3) schema("an entry is [i, j, coefficient]");
      const Vector v = Vector::unit(Side::V, kv, size_from_json(e[0], "entry row"));
      const Vector w = Vector::unit(Side::W, kw, size_from_json(e[1], "entry column"));
      x = add(x, scale(rational_from_json(e[2]), FinitaryElement::rank_one(v, w)));
    }
    if (def.contains("matrix")) {
      const json& mj = def.at("matrix");
      check_keys(mj, {"level", "rows"}, "element matrix");
      const std::size_t level = size_from_json(mj.value("level", json(0)), "level");
      const Matrix a = matrix_from_json(mj.value("rows", json::array()), level + kw);
      if (a.rows() != level + kv) schema("element matrix must be (level + K) × (level + K*)");
      x = add(x, FinitaryElement::from_matrix(kv, kw, level, a));
    }
    return {mn, x};
  }

  const Bound<TraceConditionSubalgebra>& trace_condition(const json& ref) {
    return named(s_.trace_conditions, ref.get<std::string>(), "trace_conditions", [&](const json& def) {
      check_keys(def, {"model", "couple", "ambient", "constraints"}, "trace condition");
      if (!def.contains("couple")) schema("trace condition needs a couple");
      const std::string ctx = def.contains("model") ? model_name(def, "") : "";
      auto c = couple(def.at("couple"), ctx);
      const Matrix cons = matrix_from_json(def.value("constraints", json::array()), c.value.c_pairs.size());
      return Bound<TraceConditionSubalgebra>{
          c.model,
          make_trace_condition_subalgebra(c.value, ambient_from_json(def.value("ambient", json("gl"))), cons)};
    });
  }

  const FdLieAlgebra& algebra(const json& ref) {
    if (!ref.is_string()) schema("algebra references are names");
    return named(s_.algebras, ref.get<std::string>(), "algebras", [&](const json& def) {
      check_keys(def, {"n", "basis", "generators", "preset", "block_parabolic", "direct_sum"}, "algebra");
      if (def.contains("block_parabolic")) return block_parabolic(sizes_from_json(def.at("block_parabolic"), "sizes"));
      if (def.contains("direct_sum")) return direct_sum(def.at("direct_sum"));
      const std::size_t n = size_from_json(def.value("n", json(0)), "n");
      if (n == 0) schema("algebra needs a positive n");
      if (def.contains("preset")) {
        const std::string p = def.at("preset").is_string() ? def.at("preset").get<std::string>() : "";
        if (p == "gl") return gl(n);
        if (p == "sl") return sl(n);
        if (p == "borel") return borel(n);
        schema("unknown algebra preset \"" + p + "\"");
      }
      std::vector<Matrix> ms;
      for (const auto& mj : def.value(def.contains("basis") ? "basis" : "generators", json::array())) {
        Matrix a = matrix_from_json(mj, n);
        if (a.rows() != n) schema("algebra matrices must be n × n");
        ms.push_back(a);
      }
      return def.contains("basis") ? FdLieAlgebra::from_basis(n, ms) : lie_close(n, ms);
    });
  }

  FdLieAlgebra direct_sum(const json& refs) {
    if (!refs.is_array() || refs.empty()) schema("direct_sum needs a list of algebras");
    std::vector<const FdLieAlgebra*> parts;
    std::size_t n = 0;
    for (const auto& r : refs) {
      parts.push_back(&algebra(r));
      n += parts.back()->n();
    }
    std::vector<Matrix> ms;
    std::size_t off = 0;
    for (const auto* p : parts) {
      for (const auto& b : p->basis()) {
        Matrix big(n, n);
        for (std::size_t i = 0; i < p->n(); ++i)
          for (std::size_t j = 0; j < p->n(); ++j) big(off + i, off + j) = b(i, j);
        ms.push_back(big);
      }
      off += p->n();
    }
    return FdLieAlgebra::from_basis(n, ms);
  }

  const json& root_;
  std::map<std::string, std::pair<std::string, const json*>> defs_;
  std::set<std::string> resolving_;
  Session s_;
};

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Session load_session(const json& j) { return Loader(j).load(); }

Session load_session_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte);
    std::string msg = e.what();
    if (auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw SessionInputError({"ParseError", msg, line, col});
  }
  return load_session(j);
}

json emit_objects(const Session& s) {
  json out = json::object();
  for (const auto& [k, m] : s.models) out["models"][k] = model_to_json(m);
  const auto with_model = [](json j, const std::string& m) {
    j["model"] = m;
    return j;
  };
  for (const auto& [k, b] : s.vectors) out["vectors"][k] = with_model(vector_to_json(b.value), b.model);
  for (const auto& [k, b] : s.subspaces) out["subspaces"][k] = with_model(subspace_to_json(b.value), b.model);
  for (const auto& [k, b] : s.flags) out["flags"][k] = with_model(flag_to_json(b.value), b.model);
  for (const auto& [k, b] : s.basis_flags) out["basis_flags"][k] = basis_flag_to_json(b);
  const auto couple_json = [](const TautCouple& t) { return json{{"f", flag_to_json(t.f)}, {"g", flag_to_json(t.g)}}; };
  for (const auto& [k, b] : s.couples) out["couples"][k] = with_model(couple_json(b.value), b.model);
  for (const auto& [k, b] : s.elements) out["elements"][k] = with_model(element_to_json(b.value), b.model);
  for (const auto& [k, b] : s.trace_conditions)
    out["trace_conditions"][k] = {{"model", b.model},
                                  {"couple", couple_json(b.value.couple)},
                                  {"ambient", ambient_name(b.value.ambient)},
                                  {"constraints", matrix_to_json(b.value.constraints)}};
  for (const auto& [k, a] : s.algebras) out["algebras"][k] = algebra_to_json(a);
  return out;
}

// ---------------------------------------------------------------- commands

namespace {

using Task = std::function<json(std::uint64_t seed)>;

/// Resolves a command against the session; every reference is checked here, before anything runs.
class Planner {
public:
  explicit Planner(const Session& s) : s_(s) {}

  Task plan(const json& c) {
    if (!c.is_object() || !c.contains("cmd") || !c.at("cmd").is_string()) schema("command needs a \"cmd\" string");
    const std::string cmd = c.at("cmd").get<std::string>();
    if (cmd == "validate-model") return validate_model_cmd(c);
    if (cmd == "classify-flag") return classify_flag_cmd(c);
    if (cmd == "make-couple") return make_couple_cmd(c);
    if (cmd == "member") return member_cmd(c);
    if (cmd == "block-trace") return block_trace_cmd(c);
    if (cmd == "fc-flag") return fc_flag_cmd(c);
    if (cmd == "subspace") return subspace_cmd(c);
    if (cmd == "truncate-compare") return truncate_compare_cmd(c);
    if (cmd == "fd") return fd_cmd(c);
    if (cmd == "emit") {
      keys(c, {});
      const Session* s = &s_;
      return [s](std::uint64_t) { return json{{"objects", emit_objects(*s)}}; };
    }
    schema("unknown command \"" + cmd + "\"");
  }

private:
  static void keys(const json& c, std::initializer_list<const char*> extra) {
    for (const auto& [k, v] : c.items()) {
      if (k == "cmd" || k == "expect" || k == "expect_error" || k == "seed" || k == "note") continue;
      if (std::none_of(extra.begin(), extra.end(), [&](const char* a) { return k == a; }))
        schema("command " + c.at("cmd").get<std::string>() + ": unknown key \"" + k + "\"");
    }
  }

  static std::string name(const json& c, const char* key) {
    if (!c.contains(key) || !c.at(key).is_string()) schema(std::string("command needs \"") + key + "\" naming an object");
    return c.at(key).get<std::string>();
  }

  template <class Map>
  const typename Map::mapped_type& get(const Map& m, const std::string& n, const char* sec) const {
    auto it = m.find(n);
    if (it != m.end()) return it->second;
    const std::string other = s_.section_of(n);
    if (other.empty()) throw SessionInputError({"UnresolvedReference", n});
    schema("\"" + n + "\" is in " + other + ", expected " + sec);
  }

  const Model& model(const std::string& n) const { return get(s_.models, n, "models"); }

  static void same_model(const std::string& a, const std::string& b) {
    if (a != b) schema("objects from models \"" + a + "\" and \"" + b + "\" cannot be combined");
  }

  Task validate_model_cmd(const json& c) {
    keys(c, {"model"});
    const Model* m = &model(name(c, "model"));
    return [m](std::uint64_t) {
      ModelReport r = model_report(*m);
      json j{{"verdict", r.valid}, {"valid", r.valid}, {"v_radical", subspace_to_json(r.v_radical)},
             {"w_radical", subspace_to_json(r.w_radical)}};
      if (r.witness) j["witness"] = vector_to_json(*r.witness);
      return j;
    };
  }

  Task classify_flag_cmd(const json& c) {
    keys(c, {"flag"});
    const auto& f = get(s_.flags, name(c, "flag"), "flags");
    const Model* m = &model(f.model);
    const FinitePairFlag* fl = &f.value;
    return [m, fl](std::uint64_t) {
      FlagClass k = classify_flag(*m, *fl);
      json j{{"semiclosed", k.semiclosed}, {"closed", k.closed}, {"maximal_semiclosed", k.maximal_semiclosed}};
      if (m->form_kind != FormKind::None && fl->side == Side::V) {
        SelfTautReport st = self_taut_and_iso(*m, *fl);
        json tags = json::array();
        for (auto t : st.tags) tags.push_back(iso_tag_name(t));
        j["self_taut"] = st.self_taut;
        j["iso_tags"] = tags;
      }
      return j;
    };
  }

  static json c_pairs_json(const TautCouple& t) {
    json out = json::array();
    for (const auto& p : t.c_pairs) out.push_back({p.f_pair, p.g_pair});
    return out;
  }

  Task make_couple_cmd(const json& c) {
    keys(c, {"couple", "f", "g"});
    if (c.contains("couple")) {
      const TautCouple* t = &get(s_.couples, name(c, "couple"), "couples").value;
      return [t](std::uint64_t) { return json{{"verdict", true}, {"c_pairs", c_pairs_json(*t)}}; };
    }
    const auto& f = get(s_.flags, name(c, "f"), "flags");
    const auto& g = get(s_.flags, name(c, "g"), "flags");
    same_model(f.model, g.model);
    const Model* m = &model(f.model);
    return [m, pf = &f.value, pg = &g.value](std::uint64_t) {
      TautCouple t = make_taut_couple(*m, *pf, *pg);
      return json{{"verdict", true}, {"c_pairs", c_pairs_json(t)}};
    };
  }

  Task member_cmd(const json& c) {
    keys(c, {"kind", "elem", "couple", "flag", "basis_flag", "tc", "ambient", "form", "sample_level"});
    const std::string kind = c.value("kind", std::string());
    const auto& x = get(s_.elements, name(c, "elem"), "elements");
    const Model* m = &model(x.model);
    const FinitaryElement* px = &x.value;
    const auto verdict = [](bool b) { return json{{"verdict", b}}; };
    if (kind == "stabilizer") {
      if (c.contains("basis_flag")) {
        const BasisOrderFlag* b = &get(s_.basis_flags, name(c, "basis_flag"), "basis_flags");
        return [=](std::uint64_t) { return verdict(in_stabilizer(*px, *b)); };
      }
      const auto& f = get(s_.flags, name(c, "flag"), "flags");
      same_model(x.model, f.model);
      return [=, pf = &f.value](std::uint64_t) { return verdict(in_stabilizer(*m, *px, *pf)); };
    }
    if (kind == "tc") {
      const auto& t = get(s_.trace_conditions, name(c, "tc"), "trace_conditions");
      same_model(x.model, t.model);
      return [=, pt = &t.value](std::uint64_t) { return verdict(tc_member(*m, *px, *pt)); };
    }
    if (kind == "classical" || kind == "so_sp_minus") {
      const ClassicalKind ck = classical_from_json(c.value("form", json()));
      if (kind == "classical") return [=](std::uint64_t) { return verdict(in_classical(*m, *px, ck)); };
      const auto& f = get(s_.flags, name(c, "flag"), "flags");
      same_model(x.model, f.model);
      return [=, pf = &f.value](std::uint64_t) { return verdict(in_so_sp_stabilizer_minus(*m, *px, *pf, ck)); };
    }
    const auto& t = get(s_.couples, name(c, "couple"), "couples");
    same_model(x.model, t.model);
    const TautCouple* pt = &t.value;
    const Ambient amb = ambient_from_json(c.value("ambient", json("gl")));
    if (kind == "joint") return [=](std::uint64_t) { return verdict(in_joint_stabilizer(*m, *px, *pt)); };
    if (kind == "nilradical") return [=](std::uint64_t) { return verdict(in_nilradical(*m, *px, *pt)); };
    if (kind == "pminus") return [=](std::uint64_t) { return verdict(in_pminus(*m, *px, *pt, amb)); };
    if (kind == "pprime") return [=](std::uint64_t) { return verdict(perp_parabolic_member(*m, *px, *pt)); };
    if (kind == "normalizer") {
      if (!c.contains("sample_level")) return [=](std::uint64_t) { return verdict(normalizer_test(*m, *px, *pt)); };
      const std::size_t level = size_from_json(c.at("sample_level"), "sample_level");
      return [=](std::uint64_t) {
        const bool v = normalizer_test(*m, *px, *pt);
        return json{{"verdict", v}, {"sample", normalizer_sample(*m, *px, *pt, amb, level)}};
      };
    }
    schema("unknown member kind \"" + kind + "\"");
  }

  Task block_trace_cmd(const json& c) {
    keys(c, {"elem", "couple"});
    const auto& x = get(s_.elements, name(c, "elem"), "elements");
    const auto& t = get(s_.couples, name(c, "couple"), "couples");
    same_model(x.model, t.model);
    return [m = &model(x.model), px = &x.value, pt = &t.value](std::uint64_t) {
      json traces = json::array();
      for (const auto& q : block_traces(*m, *px, *pt)) traces.push_back(rational_to_json(q));
      return json{{"c_pairs", c_pairs_json(*pt)}, {"traces", traces}, {"infinite_blocks", infinite_blocks(*pt)}};
    };
  }

  Task fc_flag_cmd(const json& c) {
    keys(c, {"flag"});
    const auto& f = get(s_.flags, name(c, "flag"), "flags");
    return [m = &model(f.model), pf = &f.value](std::uint64_t) {
      FinitePairFlag fc = fc_flag(*m, *pf);
      return json{{"flag", flag_to_json(fc)}, {"length", fc.chain.size()}};
    };
  }

  Task subspace_cmd(const json& c) {
    keys(c, {"op", "subspace", "vector", "other"});
    const std::string op = c.value("op", std::string());
    const auto& a = get(s_.subspaces, name(c, "subspace"), "subspaces");
    const Model* m = &model(a.model);
    const Subspace* pa = &a.value;
    const auto verdict = [](bool b) { return json{{"verdict", b}}; };
    if (op == "is_closed") return [=](std::uint64_t) { return verdict(is_closed(*m, *pa)); };
    if (op == "dimension")
      return [=](std::uint64_t) {
        const bool fin = pa->is_finite_dimensional();
        return json{{"finite", fin}, {"dimension", fin ? json(pa->dimension()) : json(nullptr)}};
      };
    if (op == "closure") return [=](std::uint64_t) { return json{{"subspace", subspace_to_json(closure(*m, *pa))}}; };
    if (op == "perp") return [=](std::uint64_t) { return json{{"subspace", subspace_to_json(perp(*m, *pa))}}; };
    if (op == "member") {
      const auto& v = get(s_.vectors, name(c, "vector"), "vectors");
      same_model(a.model, v.model);
      return [=, pv = &v.value](std::uint64_t) { return verdict(pv->side == pa->side() && pa->member(*pv)); };
    }
    if (op == "contains" || op == "equal") {
      const auto& b = get(s_.subspaces, name(c, "other"), "subspaces");
      same_model(a.model, b.model);
      const bool eq = op == "equal";
      return [=, pb = &b.value](std::uint64_t) { return verdict(eq ? *pa == *pb : contains(*pa, *pb)); };
    }
    schema("unknown subspace op \"" + op + "\"");
  }

  static json coherence_json(const std::vector<CoherenceCheck>& cs) {
    json checks = json::array();
    bool all = true;
    for (const auto& ch : cs) {
      json lv = json::array();
      for (const auto& l : ch.levels)
        lv.push_back({{"level", l.level}, {"exact", l.exact}, {"mod_radical", l.mod_radical}, {"naive", l.naive}});
      checks.push_back({{"op", ch.op}, {"object", ch.object}, {"agrees", ch.agrees()}, {"levels", lv}});
      all = all && ch.agrees();
    }
    return {{"verdict", all}, {"checks", checks}};
  }

  Task truncate_compare_cmd(const json& c) {
    keys(c, {"object", "levels", "with", "elem"});
    if (c.value("levels", json("auto")) != "auto") schema("truncate-compare supports levels \"auto\" only");
    const std::string obj = name(c, "object");
    const std::string sec = s_.section_of(obj);
    if (sec.empty()) throw SessionInputError({"UnresolvedReference", obj});
    if (sec == "subspaces") {
      const auto& a = s_.subspaces.at(obj);
      const Model* m = &model(a.model);
      if (c.contains("with")) {
        const auto& b = get(s_.subspaces, name(c, "with"), "subspaces");
        same_model(a.model, b.model);
        return [=, pa = &a.value, pb = &b.value, w = c.at("with").get<std::string>()](std::uint64_t) {
          auto cs = subspace_coherence(*m, *pa, obj);
          auto more = pair_coherence(*m, *pa, *pb, obj + "," + w);
          cs.insert(cs.end(), more.begin(), more.end());
          return coherence_json(cs);
        };
      }
      return [=, pa = &a.value](std::uint64_t) { return coherence_json(subspace_coherence(*m, *pa, obj)); };
    }
    if (sec == "flags") {
      const auto& f = s_.flags.at(obj);
      return [=, m = &model(f.model), pf = &f.value](std::uint64_t) {
        std::vector<CoherenceCheck> cs;
        for (std::size_t i = 0; i < pf->chain.size(); ++i) {
          auto more = subspace_coherence(*m, pf->chain[i], obj + "[" + std::to_string(i) + "]");
          cs.insert(cs.end(), more.begin(), more.end());
        }
        return coherence_json(cs);
      };
    }
    if (sec == "couples") {
      const auto& t = s_.couples.at(obj);
      const Model* m = &model(t.model);
      const FinitaryElement* px = nullptr;
      if (c.contains("elem")) {
        const auto& x = get(s_.elements, name(c, "elem"), "elements");
        same_model(x.model, t.model);
        px = &x.value;
      }
      return [=, pt = &t.value](std::uint64_t) {
        auto cs = couple_coherence(*m, *pt, obj);
        if (px) {
          auto more = membership_coherence(*m, *px, *pt, c.at("elem").get<std::string>());
          cs.insert(cs.end(), more.begin(), more.end());
        }
        return coherence_json(cs);
      };
    }
    if (sec == "elements") {
      const auto& x = s_.elements.at(obj);
      const auto& y = c.contains("with") ? get(s_.elements, name(c, "with"), "elements") : x;
      same_model(x.model, y.model);
      return [=, m = &model(x.model), px = &x.value, py = &y.value](std::uint64_t) {
        return coherence_json(element_coherence(*m, *px, *py, obj));
      };
    }
    schema("truncate-compare does not apply to " + sec);
  }

  Task fd_cmd(const json& c) {
    keys(c, {"op", "alg", "h", "p_red"});
    const std::string op = c.value("op", std::string());
    const FdLieAlgebra* g = &get(s_.algebras, name(c, "alg"), "algebras");
    if (op == "radical") return [=](std::uint64_t) { return basis_of(solvable_radical(*g)); };
    if (op == "nilradical") return [=](std::uint64_t) { return basis_of(linear_nilradical(*g)); };
    if (op == "levi")
      return [=](std::uint64_t) {
        json j = basis_of(levi_component(*g));
        j["semisimple"] = true;
        return j;
      };
    if (op == "splittable")
      return [=](std::uint64_t) {
        auto w = splittable_witness(*g);
        json j{{"verdict", !w.has_value()}, {"closure", basis_of(splittable_closure(*g))}};
        if (w) j["witness"] = matrix_to_json(*w);
        return j;
      };
    if (op == "gred")
      return [=](std::uint64_t seed) {
        FdDecomposition d = locally_reductive_part(*g, seed);
        return json{{"nilradical", basis_of(d.nilradical)},
                    {"levi", basis_of(d.levi)},
                    {"torus", basis_of(d.torus)},
                    {"reductive_part", basis_of(d.reductive_part)}};
      };
    if (op == "cartan") {
      const FdLieAlgebra* h = c.contains("h") ? &get(s_.algebras, name(c, "h"), "algebras") : nullptr;
      return [=](std::uint64_t seed) {
        FdLieAlgebra hh;
        if (h) {
          hh = *h;
        } else {
          std::mt19937_64 rng(seed);
          hh = cartan_from_torus(*g, maximal_torus(*g, rng));
        }
        CartanReport r = cartan_queries(*g, hh);
        return json{{"verdict", r.is_cartan},
                    {"h", basis_of(hh)},
                    {"via_d", r.via_d},
                    {"via_e", r.via_e},
                    {"via_f", r.via_f},
                    {"self_normalizing", r.self_normalizing},
                    {"nilpotent", r.nilpotent}};
      };
    }
    if (op == "taut")
      return [=](std::uint64_t seed) {
        FdCouple t = invariant_taut_couple(*g, seed);
        json chain = json::array(), dual = json::array();
        for (const auto& m : t.chain) chain.push_back(matrix_to_json(m));
        for (const auto& m : t.dual_chain) dual.push_back(matrix_to_json(m));
        return json{{"verdict", t.certified && t.quotients_irreducible && t.nilradical_matches},
                    {"chain", chain},
                    {"dual_chain", dual},
                    {"certified", t.certified},
                    {"quotients_irreducible", t.quotients_irreducible},
                    {"nilradical_matches", t.nilradical_matches}};
      };
    if (op == "parabolic")
      return [=](std::uint64_t seed) {
        ParabolicReport r = fd_parabolic_tests(*g, seed);
        return json{{"verdict", r.is_parabolic},
                    {"is_parabolic", r.is_parabolic},
                    {"borel_restriction_check", r.borel_restriction_check}};
      };
    if (op == "bijection") {
      const FdLieAlgebra* p = &get(s_.algebras, name(c, "p_red"), "algebras");
      return [=](std::uint64_t seed) { return basis_of(parabolic_bijection_check(*g, *p, seed)); };
    }
    schema("unknown fd op \"" + op + "\"");
  }

  const Session& s_;
};

}  // namespace

RunResult run_session(const Session& s, const RunOptions& opts) {
  std::vector<Task> tasks;
  Planner planner(s);
  for (std::size_t i = 0; i < s.commands.size(); ++i) {
    try {
      tasks.push_back(planner.plan(s.commands[i]));
    } catch (const SessionInputError& e) {
      InputError err = e.error();
      err.command = i;
      return {json{{"error", err.to_json()}}, 2};
    } catch (const Error& e) {
      return {json{{"error", InputError{e.kind(), e.detail(), std::nullopt, std::nullopt, std::nullopt, i}.to_json()}},
              2};
    }
  }

  std::vector<json> entries(tasks.size());
  const auto run_one = [&](std::size_t i) {
    const json& c = s.commands[i];
    const std::uint64_t seed = c.contains("seed") && c.at("seed").is_number_unsigned()
                                   ? c.at("seed").get<std::uint64_t>()
                                   : opts.seed + i;
    json e{{"index", i}, {"cmd", c.at("cmd")}};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      json r = tasks[i](seed);
      if (c.contains("expect_error")) {
        e["status"] = "fail";
        e["detail"] = "expected error " + c.at("expect_error").dump();
      } else if (c.contains("expect")) {
        const json& ex = c.at("expect");
        const bool met = ex.is_object() ? json_match(ex, r) : r.contains("verdict") && json_match(ex, r.at("verdict"));
        e["status"] = met ? "pass" : "fail";
      } else {
        e["status"] = "ok";
      }
      e["result"] = std::move(r);
    } catch (const Error& err) {
      e["error"] = {{"kind", err.kind()}, {"detail", err.detail()}};
      e["status"] = c.contains("expect_error") && c.at("expect_error") == err.kind() ? "pass" : "error";
    } catch (const SessionInputError& err) {
      e["error"] = err.error().to_json();
      e["status"] = "error";
    }
    if (opts.timing)
      e["ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    entries[i] = std::move(e);
  };

  if (opts.parallel && tasks.size() > 1) {
    std::atomic<std::size_t> next{0};
    const std::size_t nthreads =
        std::min<std::size_t>(tasks.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) run_one(i);
      });
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
  }

  std::size_t passed = 0, failed = 0, errors = 0, ok = 0;
  for (const auto& e : entries) {
    const std::string st = e.at("status");
    passed += st == "pass";
    failed += st == "fail";
    errors += st == "error";
    ok += st == "ok";
  }
  json report{{"seed", opts.seed},
              {"commands", entries},
              {"summary", {{"total", entries.size()}, {"passed", passed}, {"failed", failed}, {"errors", errors}, {"ok", ok}}},
              {"verdict", failed + errors == 0 ? "pass" : "fail"}};
  return {report, failed + errors == 0 ? 0 : 1};
}

RunResult run_session_text(const std::string& text, const RunOptions& opts) {
  try {
    return run_session(load_session_text(text), opts);
  } catch (const SessionInputError& e) {
    return {json{{"error", e.error().to_json()}}, 2};
  }
}

}  // namespace flagforge
