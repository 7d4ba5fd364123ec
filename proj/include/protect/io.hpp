#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "protect/errors.hpp"
#include "protect/flow.hpp"
#include "protect/matrix.hpp"
#include "protect/protection.hpp"

namespace protect::io {

using Json = nlohmann::ordered_json;

/// Malformed input document or flag value.
class ParseError : public Error {
 public:
  using Error::Error;
};

struct MatrixFile {
  SymmetricMatrix<double> matrix;
  std::string label;
};

/// Shortest decimal that parses back to exactly x.
inline std::string format_shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// 17 significant digits, enough to round-trip any double.
inline std::string format_17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(std::string_view text, std::string_view what) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(value))
    throw ParseError("invalid number in " + std::string(what) + ": '" + std::string(text) + "'");
  return value;
}

inline std::vector<double> parse_double_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_double(text.substr(start, comma == std::string_view::npos ? comma : comma - start), what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Parses {"n": int, "matrix": [n*n numbers, row-major], "label": optional string}.
/// Structural problems raise ParseError naming the field; an asymmetric
/// matrix raises NotSymmetric.
inline MatrixFile parse_matrix_document(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("not a valid matrix document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("matrix document must be an object");
  if (!doc.contains("n")) throw ParseError("missing field 'n'");
  const auto& n_field = doc["n"];
  if (!n_field.is_number_integer() || n_field.get<std::int64_t>() < 1)
    throw ParseError("field 'n' must be a positive integer");
  const auto n = static_cast<std::size_t>(n_field.get<std::int64_t>());
  if (!doc.contains("matrix")) throw ParseError("missing field 'matrix'");
  const auto& m = doc["matrix"];
  if (!m.is_array()) throw ParseError("field 'matrix' must be an array");
  if (m.size() != n * n)
    throw ParseError("field 'matrix' has " + std::to_string(m.size()) + " entries, expected n*n = " +
                     std::to_string(n * n));
  std::vector<double> entries(n * n);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i].is_number()) throw ParseError("field 'matrix[" + std::to_string(i) + "]' is not a number");
    entries[i] = m[i].get<double>();
    if (!std::isfinite(entries[i])) throw ParseError("field 'matrix[" + std::to_string(i) + "]' is not finite");
  }
  std::string label;
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) throw ParseError("field 'label' must be a string");
    label = doc["label"].get<std::string>();
  }
  return {SymmetricMatrix<double>(n, std::move(entries)), std::move(label)};
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline MatrixFile read_matrix_file(const std::string& path) {
  try {
    return parse_matrix_document(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Json matrix_json(const SymmetricMatrix<double>& m, const std::string& label) {
  Json doc;
  doc["n"] = m.size();
  doc["matrix"] = Json::array();
  for (double x : m.entries()) doc["matrix"].push_back(x);
  if (!label.empty()) doc["label"] = label;
  return doc;
}

inline std::string matrix_document(const SymmetricMatrix<double>& m, const std::string& label = {}) {
  return matrix_json(m, label).dump(2) + "\n";
}

/// Writes to a sibling temporary and renames over the target.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ParseError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ParseError("cannot move output into place at '" + path + "'");
  }
}

/// 64-bit FNV-1a over the dimension and the IEEE-754 bit patterns of the entries.
inline std::string matrix_digest(const SymmetricMatrix<double>& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      h ^= (word >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(m.size()));
  for (double x : m.entries()) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    feed(bits);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// "t,lambda_1,...,lambda_n" then one row per t, 17 significant digits.
inline std::string flow_csv(const FlowSample<double>& flow) {
  std::string out = "t";
  const std::size_t n = flow.branches.empty() ? 0 : flow.branches.front().size();
  for (std::size_t k = 1; k <= n; ++k) out += ",lambda_" + std::to_string(k);
  out += "\n";
  for (std::size_t i = 0; i < flow.t_values.size(); ++i) {
    out += format_17(flow.t_values[i]);
    for (double x : flow.branches[i]) out += "," + format_17(x);
    out += "\n";
  }
  return out;
}

struct TGrid {
  std::string spec;
  std::vector<double> values;
};

/// "lin:min:max:steps" or "log:min_exp:max_exp:per_decade[,symmetric]".
inline TGrid parse_t_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::string head = spec;
  bool symmetric = false;
  if (const auto comma = head.find(','); comma != std::string::npos) {
    if (head.substr(comma + 1) != "symmetric") throw ParseError("unknown t-grid modifier in '" + spec + "'");
    symmetric = true;
    head.resize(comma);
  }
  std::size_t start = 0;
  while (true) {
    const auto colon = head.find(':', start);
    parts.push_back(head.substr(start, colon == std::string::npos ? colon : colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 4) throw ParseError("t-grid must have the form kind:a:b:c, got '" + spec + "'");
  auto as_int = [&](const std::string& s) {
    const double v = parse_double(s, "t-grid");
    if (v != std::floor(v) || std::abs(v) > 1e6) throw ParseError("t-grid expects an integer, got '" + s + "'");
    return static_cast<long long>(v);
  };
  try {
    if (parts[0] == "lin") {
      if (symmetric) throw ParseError("the symmetric modifier only applies to log grids");
      const long long steps = as_int(parts[3]);
      if (steps < 2) throw ParseError("t-grid needs at least 2 steps");
      return {spec, linear_grid(parse_double(parts[1], "t-grid"), parse_double(parts[2], "t-grid"),
                                static_cast<std::size_t>(steps))};
    }
    if (parts[0] == "log") {
      const long long per_decade = as_int(parts[3]);
      if (per_decade < 1) throw ParseError("t-grid needs at least one point per decade");
      return {spec, log_grid<double>(static_cast<int>(as_int(parts[1])), static_cast<int>(as_int(parts[2])),
                                     static_cast<std::size_t>(per_decade), symmetric)};
    }
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid t-grid '") + spec + "': " + e.what());
  }
  throw ParseError("t-grid kind must be 'lin' or 'log', got '" + parts[0] + "'");
}

inline Json gap_json(const SpectralGap<double>& g) {
  Json j;
  j["lower"] = std::isfinite(g.lower) ? Json(g.lower) : Json(nullptr);
  j["upper"] = std::isfinite(g.upper) ? Json(g.upper) : Json(nullptr);
  switch (g.kind) {
    case SpectralGap<double>::Kind::bounded: j["kind"] = "bounded"; break;
    case SpectralGap<double>::Kind::left_unbounded: j["kind"] = "left-unbounded"; break;
    case SpectralGap<double>::Kind::right_unbounded: j["kind"] = "right-unbounded"; break;
  }
  return j;
}

inline constexpr const char* kToolVersion = "1.0.0";

/// The analysis report document. Doubles are written in shortest round-trip
/// form, so every value parses back bit-identical.
inline std::string analysis_report(const MatrixFile& a, const MatrixFile& b, const PerturbationPair<double>& pair,
                                   const ProtectionReport<double>& report) {
  Json doc;
  doc["tool"] = "protect";
  doc["version"] = kToolVersion;
  auto input = [](const MatrixFile& f) {
    Json j;
    j["label"] = f.label;
    j["n"] = f.matrix.size();
    j["digest"] = matrix_digest(f.matrix);
    return j;
  };
  doc["inputs"]["a"] = input(a);
  doc["inputs"]["b"] = input(b);
  doc["spectrum"] = pair.spectrum().eigenvalues;
  doc["gaps"] = Json::array();
  for (const auto& g : gaps(pair.spectrum(), report.cluster_tolerance)) doc["gaps"].push_back(gap_json(g));
  doc["protected_points"] = Json::array();
  for (const auto& p : report.protected_points) {
    Json j;
    j["lambda"] = p.lambda;
    j["residual"] = p.residual;
    j["gap"] = gap_json(p.gap);
    doc["protected_points"].push_back(j);
  }
  doc["tolerances"]["protection"] = report.tolerance;
  doc["tolerances"]["cluster"] = report.cluster_tolerance;
  doc["tolerances"]["pole"] = kPoleTolerance;
  doc["tolerances"]["psd_floor"] = kPsdFloor;
  doc["tolerances"]["gap_endpoint_offset"] = kGapEndpointOffset;
  doc["perturbation"]["min_eigenvalue"] = pair.b_min_eigenvalue();
  doc["perturbation"]["clamped_to_psd"] = pair.b_min_eigenvalue() < 0.0;
  doc["probe_index"] = report.probe_index;
  doc["gap_diagnostics"] = Json::array();
  for (const auto& d : report.gap_diagnostics) {
    Json j;
    j["gap"] = gap_json(d.gap);
    j["status"] = to_string(d.status);
    j["probe_root"] = d.probe_root ? Json(*d.probe_root) : Json(nullptr);
    j["residual"] = d.residual ? Json(*d.residual) : Json(nullptr);
    doc["gap_diagnostics"].push_back(j);
  }
  return doc.dump(2) + "\n";
}

}  // namespace protect::io
