#pragma once

// Problem-set files: one JSON document
//
//   {"version": 1, "seed": S, "n": N,
//    "pairs": [{"id", "cF", "U1_basis", "U2_basis", "anchors", "points": [{"x0", "reference"}]}]}
//
// Basis fields list the basis vectors as rows. Doubles are written in the
// shortest form that parses back to the same bits.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "cim/problems.hpp"

namespace cim {

namespace detail {

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline nlohmann::json basis_to_json(const LinearSubspace& l) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index j = 0; j < l.dim(); ++j) rows.push_back(vector_to_json(l.basis().col(j)));
  return rows;
}

inline Vector json_to_vector(const nlohmann::json& j, Index n, const std::string& what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n) {
    throw FormatError(what + ": expected an array of " + std::to_string(n) + " numbers");
  }
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    const auto& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw FormatError(what + ": non-numeric entry at index " + std::to_string(i));
    v(i) = e.get<double>();
    if (!std::isfinite(v(i))) throw FormatError(what + ": non-finite entry at index " + std::to_string(i));
  }
  return v;
}

inline LinearSubspace json_to_basis(const nlohmann::json& j, Index n, const std::string& what) {
  if (!j.is_array()) throw FormatError(what + ": expected an array of basis rows");
  if (static_cast<Index>(j.size()) > n) throw FormatError(what + ": more basis rows than the dimension");
  Matrix b(n, static_cast<Index>(j.size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    b.col(static_cast<Index>(r)) = json_to_vector(j[r], n, what + " row " + std::to_string(r));
  }
  if (detail::orthonormality_defect(b) > kOrthonormalTol) throw FormatError(what + " is not orthonormal");
  return LinearSubspace::from_orthonormal(std::move(b));
}

template <typename T>
T required(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(where + ": field '" + std::string(key) + "' has the wrong type");
  }
}

}  // namespace detail

inline nlohmann::json to_json(const ProblemSet& set) {
  nlohmann::json doc;
  doc["version"] = set.version;
  doc["seed"] = set.seed;
  doc["n"] = set.n;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& pr : set.pairs) {
    nlohmann::json p;
    p["id"] = pr.id;
    p["cF"] = pr.cf;
    p["U1_basis"] = detail::basis_to_json(pr.u1.direction());
    p["U2_basis"] = detail::basis_to_json(pr.u2.direction());
    p["anchors"] = nlohmann::json::array({detail::vector_to_json(pr.u1.anchor()), detail::vector_to_json(pr.u2.anchor())});
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& pt : pr.points) {
      pts.push_back({{"x0", detail::vector_to_json(pt.x0)}, {"reference", detail::vector_to_json(pt.reference)}});
    }
    p["points"] = std::move(pts);
    pairs.push_back(std::move(p));
  }
  doc["pairs"] = std::move(pairs);
  return doc;
}

inline std::string serialize_problem_set(const ProblemSet& set) { return to_json(set).dump() + "\n"; }

namespace detail {

inline ProblemSet problem_set_from_json_unchecked(const nlohmann::json& doc) {
  const int version = detail::required<int>(doc, "version", "problem set");
  if (version != kProblemSetVersion) {
    throw FormatError("problem set version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kProblemSetVersion) + ")");
  }
  ProblemSet set;
  set.seed = detail::required<std::uint64_t>(doc, "seed", "problem set");
  set.n = detail::required<Index>(doc, "n", "problem set");
  if (set.n <= 0) throw FormatError("problem set: n must be positive");
  const auto& pairs = doc.at("pairs");
  if (!pairs.is_array()) throw FormatError("problem set: 'pairs' must be an array");
  for (const auto& p : pairs) {
    const std::string id = detail::required<std::string>(p, "id", "pair");
    const std::string where = "pair '" + id + "'";
    const double cf = detail::required<double>(p, "cF", where);
    const auto l1 = detail::json_to_basis(p.at("U1_basis"), set.n, where + ": U1_basis");
    const auto l2 = detail::json_to_basis(p.at("U2_basis"), set.n, where + ": U2_basis");
    const auto& anchors = p.at("anchors");
    if (!anchors.is_array() || anchors.size() != 2) throw FormatError(where + ": 'anchors' must hold two vectors");
    PairRecord rec{id, cf, AffineSubspace(detail::json_to_vector(anchors[0], set.n, where + ": anchor 1"), l1),
                   AffineSubspace(detail::json_to_vector(anchors[1], set.n, where + ": anchor 2"), l2), {}};
    if (!p.contains("points") || !p.at("points").is_array()) throw FormatError(where + ": missing 'points'");
    for (const auto& pt : p.at("points")) {
      if (!pt.contains("x0") || !pt.contains("reference")) throw FormatError(where + ": point without x0/reference");
      rec.points.push_back({detail::json_to_vector(pt.at("x0"), set.n, where + ": x0"),
                            detail::json_to_vector(pt.at("reference"), set.n, where + ": reference")});
    }
    set.pairs.push_back(std::move(rec));
  }
  return set;
}

}  // namespace detail

inline ProblemSet problem_set_from_json(const nlohmann::json& doc) {
  try {
    return detail::problem_set_from_json_unchecked(doc);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("problem set: ") + e.what());
  } catch (const InputError& e) {
    throw FormatError(std::string("problem set: ") + e.what());
  }
}

inline ProblemSet parse_problem_set(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("problem set: invalid JSON: ") + e.what());
  }
  return problem_set_from_json(doc);
}

inline void save_problem_set(const ProblemSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << serialize_problem_set(set);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline ProblemSet load_problem_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem_set(buf.str());
}

}  // namespace cim
