#pragma once

// Canonical JSON encoding for state spaces, composites, and reports.
// Canonical means: object keys sorted, two-space indent, LF line ends, and
// scalars rendered one way only ("num/den" strings in exact mode, shortest
// round-trip numbers in floating mode). Equal values serialize to equal
// bytes, which is what makes emitted artifacts byte-deterministic.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gptlab/composite.hpp"
#include "gptlab/errors.hpp"
#include "gptlab/statespace.hpp"

namespace gptlab {

using json = nlohmann::json;  // object_t is std::map, so dumped keys are sorted

inline constexpr const char* kToolName = "gpt-lab";
inline constexpr const char* kToolVersion = "0.1.0";

template <class S>
constexpr const char* scalar_mode_name() {
  return ScalarOps<S>::exact ? "exact" : "float";
}

// ---- scalars ----------------------------------------------------------

template <class S>
json scalar_to_json(const S& x) {
  if constexpr (ScalarOps<S>::exact) {
    // cpp_rational is stored in lowest terms with a positive denominator,
    // so this string form is already canonical.
    return boost::multiprecision::numerator(x).str() + "/" +
           boost::multiprecision::denominator(x).str();
  } else {
    return x;
  }
}

template <class S>
S scalar_from_json(const json& j) {
  if constexpr (ScalarOps<S>::exact) {
    if (!j.is_string())
      throw ScalarModeError("exact-mode value is not a rational string");
    try {
      return Rat(j.get<std::string>());
    } catch (const std::exception&) {
      throw ScalarModeError("malformed rational: " + j.dump());
    }
  } else {
    if (!j.is_number())
      throw ScalarModeError("floating-mode value is not a number");
    return j.get<double>();
  }
}

// ---- vectors and matrices ---------------------------------------------

template <class S>
json vec_to_json(const Vec<S>& v) {
  json out = json::array();
  for (const S& x : v) out.push_back(scalar_to_json(x));
  return out;
}

template <class S>
Vec<S> vec_from_json(const json& j) {
  if (!j.is_array()) throw UsageError("expected an array of scalars");
  Vec<S> v;
  for (const auto& x : j) v.push_back(scalar_from_json<S>(x));
  return v;
}

template <class S>
json vecs_to_json(const std::vector<Vec<S>>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(vec_to_json(v));
  return out;
}

template <class S>
std::vector<Vec<S>> vecs_from_json(const json& j) {
  if (!j.is_array()) throw UsageError("expected an array of vectors");
  std::vector<Vec<S>> vs;
  for (const auto& v : j) vs.push_back(vec_from_json<S>(v));
  return vs;
}

// A matrix is an array of row arrays.
template <class S>
json mat_to_json(const Mat<S>& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) out.push_back(vec_to_json(m.row(i)));
  return out;
}

template <class S>
Mat<S> mat_from_json(const json& j) {
  auto rows = vecs_from_json<S>(j);
  if (rows.empty()) throw UsageError("matrix needs at least one row");
  for (const auto& r : rows)
    if (r.size() != rows[0].size()) throw UsageError("ragged matrix rows");
  return Mat<S>::from_rows(rows);
}

template <class S>
json mats_to_json(const std::vector<Mat<S>>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(mat_to_json(m));
  return out;
}

template <class S>
std::vector<Mat<S>> mats_from_json(const json& j) {
  if (!j.is_array()) throw UsageError("expected an array of matrices");
  std::vector<Mat<S>> ms;
  for (const auto& m : j) ms.push_back(mat_from_json<S>(m));
  return ms;
}

// ---- scalar-mode header ------------------------------------------------

template <class S>
void require_mode(const json& j) {
  if (!j.is_object() || !j.contains("scalar") || !j["scalar"].is_string())
    throw UsageError("file lacks a scalar-mode header");
  std::string mode = j["scalar"].get<std::string>();
  if (mode != scalar_mode_name<S>())
    throw ScalarModeError("file is " + mode + "-mode, loader is " +
                          scalar_mode_name<S>() + "-mode");
}

// ---- state spaces ------------------------------------------------------

template <class S>
json space_to_json(const StateSpace<S>& a) {
  json j;
  j["kind"] = "statespace";
  j["scalar"] = scalar_mode_name<S>();
  j["dim"] = a.dim();
  j["label"] = a.label;
  j["rays"] = vecs_to_json(a.cone.rays());
  j["unit"] = vec_to_json(a.unit);
  return j;
}

template <class S>
StateSpace<S> space_from_json(const json& j) {
  require_mode<S>(j);
  for (const char* key : {"dim", "rays", "unit", "label"})
    if (!j.contains(key)) throw UsageError(std::string("state-space file lacks \"") + key + "\"");
  int dim = j["dim"].get<int>();
  auto rays = vecs_from_json<S>(j["rays"]);
  Vec<S> unit = vec_from_json<S>(j["unit"]);
  for (const auto& r : rays)
    if (static_cast<int>(r.size()) != dim) throw UsageError("ray length differs from dim");
  if (independent_subset(rays).size() != static_cast<size_t>(dim))
    throw UsageError("rays do not generate the space");
  return make_state_space(Cone<S>::from_rays(dim, rays), unit,
                          j["label"].get<std::string>());
}

// ---- composites --------------------------------------------------------

template <class S>
json composite_to_json(const CompositeSpace<S>& c) {
  json j;
  j["kind"] = "composite";
  j["scalar"] = scalar_mode_name<S>();
  j["tensor"] = c.kind;
  j["factor_a"] = space_to_json(c.factor_a);
  j["factor_b"] = space_to_json(c.factor_b);
  j["space"] = space_to_json(c.space);
  return j;
}

template <class S>
CompositeSpace<S> composite_from_json(const json& j) {
  require_mode<S>(j);
  for (const char* key : {"tensor", "factor_a", "factor_b", "space"})
    if (!j.contains(key)) throw UsageError(std::string("composite file lacks \"") + key + "\"");
  std::string kind = j["tensor"].get<std::string>();
  if (kind != "min" && kind != "max") throw UsageError("tensor kind must be min or max");
  StateSpace<S> fa = space_from_json<S>(j["factor_a"]);
  StateSpace<S> fb = space_from_json<S>(j["factor_b"]);
  StateSpace<S> sp = space_from_json<S>(j["space"]);
  return CompositeSpace<S>{std::move(sp), fa, fb, {fa, fb}, kind};
}

// ---- canonical text, digests, files -------------------------------------

inline std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

// FNV-1a over the canonical text; stable across runs and platforms.
inline std::string digest_of(const json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_dump(j)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a:") + buf;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

inline json read_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

}  // namespace gptlab
