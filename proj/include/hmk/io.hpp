#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"

namespace hmk::io {

// 17 significant digits: round-trips every double
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(cells[i]);
  }
  return line + "\n";
}

// write to a sibling temp file and rename over the target
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Usage, "cannot write " + tmp.string());
    out << content;
    out.flush();
    require(static_cast<bool>(out), ErrorCode::Usage, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Usage, "cannot move report into " + path.string());
  }
}

// "t,x..,z" for a point
inline std::string point_string(const Point& x) {
  std::string s = num(x.t);
  for (double v : x.x_perp) s += "," + num(v);
  return s + "," + num(x.z);
}

// "t,x..,z;t',x'..,z'" in a frame with x' at the transverse origin and t' = 0
inline std::string pair_string(const PairSeparation& p) {
  Point x = make_point(p.dim(), p.dt, p.z), xp = make_point(p.dim(), 0.0, p.z_prime);
  for (size_t i = 0; i < p.dx_perp.size(); ++i) x.x_perp[i] = p.dx_perp[i];
  return point_string(x) + ";" + point_string(xp);
}

inline std::vector<double> parse_numbers(const std::string& s, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Usage, "not a number: '" + tok + "'");
    }
    while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
    require(used == tok.size(), ErrorCode::Usage, "trailing characters in '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

// "t,x..,z;t',x'..,z'" with d coordinates per point
inline std::pair<Point, Point> parse_pair(const std::string& s, int d) {
  const auto semi = s.find(';');
  require(semi != std::string::npos, ErrorCode::Usage, "pair needs two points separated by ';'");
  auto a = parse_numbers(s.substr(0, semi)), b = parse_numbers(s.substr(semi + 1));
  require(static_cast<int>(a.size()) == d && static_cast<int>(b.size()) == d, ErrorCode::Usage,
          "each point needs " + std::to_string(d) + " coordinates (t, x_1..x_{d-2}, z)");
  auto to_point = [d](const std::vector<double>& c) {
    Point x = make_point(d, c.front(), c.back());
    for (int i = 0; i < d - 2; ++i) x.x_perp[size_t(i)] = c[size_t(i + 1)];
    return x;
  };
  return {to_point(a), to_point(b)};
}

// lo:hi:step, inclusive of hi up to rounding
inline std::vector<double> parse_range(const std::string& s) {
  auto v = parse_numbers(s, ':');
  require(v.size() == 3 && v[2] > 0.0 && v[1] >= v[0], ErrorCode::Usage, "range must be lo:hi:step with step > 0");
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((v[1] - v[0]) / v[2] + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(v[0] + static_cast<double>(i) * v[2]);
  return out;
}

// flat "key = value" file, '#' starts a comment; duplicate keys are an error
class FlatConfig {
 public:
  static FlatConfig parse(const std::string& text, const std::string& origin = "config") {
    FlatConfig c;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      const auto a = line.find_first_not_of(" \t\r"), b = line.find_last_not_of(" \t\r");
      if (a == std::string::npos) continue;
      line = line.substr(a, b - a + 1);
      const auto eq = line.find('=');
      const std::string where = origin + ":" + std::to_string(lineno);
      require(eq != std::string::npos, ErrorCode::Usage, where + ": expected 'key = value'");
      std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      require(!key.empty(), ErrorCode::Usage, where + ": empty key");
      require(!c.values_.count(key), ErrorCode::Usage, where + ": duplicate key '" + key + "'");
      c.values_[key] = value;
      c.order_.push_back(key);
    }
    return c;
  }

  static FlatConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Usage, "cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
  }

  bool has(const std::string& k) const { return values_.count(k) > 0; }

  std::string str(const std::string& k, const std::string& def) const {
    used_.insert(k);
    auto it = values_.find(k);
    return it == values_.end() ? def : it->second;
  }

  double real(const std::string& k, double def) const {
    if (!has(k)) return def;
    auto v = parse_numbers(str(k, ""));
    require(v.size() == 1, ErrorCode::Usage, "key '" + k + "' needs one number");
    return v[0];
  }

  long long integer(const std::string& k, long long def) const {
    const double v = real(k, static_cast<double>(def));
    require(v == std::floor(v), ErrorCode::Usage, "key '" + k + "' needs an integer");
    return static_cast<long long>(v);
  }

  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    const auto s = str(k, "");
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw Error(ErrorCode::Usage, "key '" + k + "' needs a boolean");
  }

  // keys present in the file that nothing read
  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& k : order_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  mutable std::set<std::string> used_;
};

}  // namespace hmk::io
