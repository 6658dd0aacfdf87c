#pragma once

#include "homog3/core.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <variant>

namespace homog3 {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// CSV emission: header row, '\n' endings, '.' decimal separator and
// 17-significant-digit floats (round-trip exact), fixed column order.
// ---------------------------------------------------------------------------

using Cell = std::variant<double, long long, bool, std::string>;

inline std::string format_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(c));
    return buf;
  }
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "1" : "0";
  return std::get<std::string>(c);
}

inline void emit_table(const std::vector<std::string>& header,
                       const std::vector<std::vector<Cell>>& rows, std::ostream& os) {
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    require(row.size() == header.size(), "emit_table: row does not conform to schema");
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
}

inline void emit_table_file(const std::vector<std::string>& header,
                            const std::vector<std::vector<Cell>>& rows,
                            const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "emit_table: cannot open '" + path + "' for writing");
  emit_table(header, rows, os);
  require(os.good(), "emit_table: write failure on '" + path + "'");
}

/// Parse a CSV of doubles; a leading non-numeric row is treated as a header.
inline std::vector<std::vector<double>> parse_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    bool numeric = true;
    while (std::getline(ss, tok, ',')) {
      try {
        size_t pos = 0;
        row.push_back(std::stod(tok, &pos));
        if (pos == 0) numeric = false;
      } catch (...) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      require(first, "parse_csv: non-numeric row in the middle of the table");
      first = false;
      continue;
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::vector<double>> parse_csv_file(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), "cannot open '" + path + "'");
  return parse_csv(is);
}

// ---------------------------------------------------------------------------
// Space specifications: JSON files and built-in named spaces
// ---------------------------------------------------------------------------

inline SpaceSpec space_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "semidirect") {
    const auto& a = j.at("A");
    require(a.is_array() && a.size() == 2 && a[0].size() == 2 && a[1].size() == 2,
            "space: \"A\" must be a 2x2 array");
    Mat2 A;
    A << a[0][0].get<double>(), a[0][1].get<double>(), a[1][0].get<double>(),
        a[1][1].get<double>();
    return SpaceSpec::semidirect(A);
  }
  if (kind == "sl2") {
    const auto& l = j.at("lambda");
    require(l.is_array() && l.size() == 3, "space: \"lambda\" must have 3 entries");
    return SpaceSpec::sl2(l[0].get<double>(), l[1].get<double>(), l[2].get<double>());
  }
  if (kind == "s2xr") return SpaceSpec::s2xr(j.at("kappa").get<double>());
  if (kind == "h2xr") return SpaceSpec::h2xr(j.at("kappa").get<double>());
  throw std::invalid_argument("space: unknown kind '" + kind + "'");
}

inline Json space_to_json(const SpaceSpec& s) {
  Json j;
  switch (s.kind) {
    case SpaceKind::Semidirect:
      j["kind"] = "semidirect";
      j["A"] = {{s.A(0, 0), s.A(0, 1)}, {s.A(1, 0), s.A(1, 1)}};
      j["trace"] = s.A.trace();
      break;
    case SpaceKind::SLTwoTilde:
      j["kind"] = "sl2";
      j["lambda"] = {s.lambda[0], s.lambda[1], s.lambda[2]};
      break;
    case SpaceKind::ProductSphereR:
      j["kind"] = "s2xr";
      j["kappa"] = s.kappa;
      break;
    case SpaceKind::ProductHyperbolicR:
      j["kind"] = "h2xr";
      j["kappa"] = s.kappa;
      break;
  }
  return j;
}

/// Built-in named spaces: euclidean, h3, nil3, sol3, e2tilde(c), h2xr(kappa),
/// s2xr(kappa), sl2(l1,l2,l3), nonunimodular(b).  Arguments in parentheses,
/// comma separated; names without arguments use the standard normalization.
inline std::optional<SpaceSpec> builtin_space(const std::string& name) {
  std::string base = name;
  std::vector<double> args;
  const auto lp = name.find('(');
  if (lp != std::string::npos) {
    require(name.back() == ')', "space name: missing ')'");
    base = name.substr(0, lp);
    std::stringstream ss(name.substr(lp + 1, name.size() - lp - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
  }
  auto arg = [&](size_t i, double dflt) { return i < args.size() ? args[i] : dflt; };
  Mat2 A;
  if (base == "euclidean") return SpaceSpec::semidirect(Mat2::Zero());
  if (base == "h3") return SpaceSpec::semidirect(Mat2::Identity());
  if (base == "nil3") {
    A << 0, 1, 0, 0;
    return SpaceSpec::semidirect(A);
  }
  if (base == "sol3") {
    A << 1, 0, 0, -1;
    return SpaceSpec::semidirect(A);
  }
  if (base == "e2tilde") {
    const double c = arg(0, 1.0);
    require(c > 0, "e2tilde: parameter must be positive");
    A << 0, -c, 1.0 / c, 0;
    return SpaceSpec::semidirect(A);
  }
  if (base == "nonunimodular") {
    A << 1, 0, 0, arg(0, 1.0);
    return SpaceSpec::semidirect(A);
  }
  if (base == "h2xr") return SpaceSpec::h2xr(arg(0, -1.0));
  if (base == "s2xr") return SpaceSpec::s2xr(arg(0, 1.0));
  if (base == "sl2") return SpaceSpec::sl2(arg(0, 1.0), arg(1, 1.0), arg(2, 1.0));
  return std::nullopt;
}

/// Resolve --space values: a built-in name (possibly with arguments) or a
/// JSON file path.
inline SpaceSpec resolve_space(const std::string& value) {
  if (auto s = builtin_space(value)) return *s;
  std::ifstream is(value);
  require(is.good(), "space: '" + value + "' is neither a built-in name nor a readable file");
  Json j;
  is >> j;
  return space_from_json(j);
}

inline std::vector<double> parse_number_list(const std::string& s, size_t expect = 0) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (expect) require(out.size() == expect, "expected " + std::to_string(expect) + " numbers");
  return out;
}

/// "a:b:step" inclusive range, or a comma list of values.
inline std::vector<double> parse_range(const std::string& s) {
  if (s.find(':') == std::string::npos) return parse_number_list(s);
  std::stringstream ss(s);
  std::string a, b, st;
  std::getline(ss, a, ':');
  std::getline(ss, b, ':');
  std::getline(ss, st, ':');
  const double lo = std::stod(a), hi = std::stod(b), step = st.empty() ? 1.0 : std::stod(st);
  require(step > 0 && hi >= lo, "range: need a:b:step with step > 0 and b >= a");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = lo + i * step;
    if (v > hi + 1e-12 * std::max(1.0, std::abs(hi))) break;
    out.push_back(v);
  }
  require(!out.empty(), "range: empty");
  return out;
}

}  // namespace homog3
