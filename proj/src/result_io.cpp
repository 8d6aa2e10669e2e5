#include "wgqed/result_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wgqed {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

bool wants(const std::vector<std::string>& outputs, const std::string& name) {
  return outputs.empty() || std::find(outputs.begin(), outputs.end(), name) != outputs.end();
}

void check_outputs(const std::vector<std::string>& outputs) {
  for (const auto& o : outputs)
    if (std::find(kOutputNames.begin(), kOutputNames.end(), o) == kOutputNames.end())
      throw std::invalid_argument("unknown output '" + o + "'");
}

double parse_cell(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad numeric cell '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<std::string> result_columns(int n, const std::vector<std::string>& outputs) {
  check_outputs(outputs);
  std::vector<std::string> cols{"t"};
  if (wants(outputs, "populations"))
    for (int l = 1; l <= n; ++l) cols.push_back("P_" + std::to_string(l));
  for (const char* name : {"n_total", "I_out", "R", "R_ld"})
    if (wants(outputs, name)) cols.emplace_back(name);
  return cols;
}

void write_result_csv(std::ostream& os, const ScenarioResult& r, const std::vector<std::string>& outputs) {
  const auto cols = result_columns(r.n, outputs);
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  const bool pops = wants(outputs, "populations");
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    os << format_double(r.t[i]);
    if (pops)
      for (int l = 0; l < r.n; ++l) os << ',' << format_double(r.populations(static_cast<Eigen::Index>(i), l));
    if (wants(outputs, "n_total")) os << ',' << format_double(r.total_population[i]);
    if (wants(outputs, "I_out")) os << ',' << format_double(r.output_current[i]);
    if (wants(outputs, "R")) os << ',' << format_double(r.rate[i]);
    if (wants(outputs, "R_ld")) os << ',' << format_double(r.rate_ld[i]);
    os << '\n';
  }
}

void write_result_csv(const std::filesystem::path& path, const ScenarioResult& r,
                      const std::vector<std::string>& outputs) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_result_csv(os, r, outputs);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::ptrdiff_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : it - columns.begin();
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": empty file");
  t.columns = split(line);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.columns.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(t.columns.size()) + " cells, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    try {
      for (const auto& c : cells) row.push_back(parse_cell(c));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CompareReport compare_tables(const Table& a, const Table& b, double tol) {
  const auto ta = a.column("t"), tb = b.column("t");
  if (ta < 0 || tb < 0) throw std::invalid_argument("compare: both tables need a 't' column");
  if (a.rows.empty() || b.rows.empty()) throw std::invalid_argument("compare: empty table");
  CompareReport rep;
  rep.tol = tol;

  bool same_grid = a.rows.size() == b.rows.size();
  for (std::size_t i = 0; same_grid && i < a.rows.size(); ++i) {
    const double x = a.rows[i][ta], y = b.rows[i][tb];
    same_grid = std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(x));
  }
  rep.interpolated = !same_grid;

  // Value of column cb of b at the time of row i of a (NaN outside b's range).
  auto b_at = [&](std::size_t i, std::ptrdiff_t cb) {
    if (same_grid) return b.rows[i][cb];
    const double t = a.rows[i][ta];
    const double eps = 1e-9 * std::max(1.0, std::abs(t));
    if (t < b.rows.front()[tb] - eps || t > b.rows.back()[tb] + eps) return std::numeric_limits<double>::quiet_NaN();
    const auto it = std::lower_bound(b.rows.begin(), b.rows.end(), t,
                                     [&](const std::vector<double>& r, double v) { return r[tb] < v; });
    if (it == b.rows.begin()) return b.rows.front()[cb];
    if (it == b.rows.end()) return b.rows.back()[cb];
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (std::abs(hi[tb] - t) <= eps) return hi[cb];
    const double f = (t - lo[tb]) / (hi[tb] - lo[tb]);
    return (1.0 - f) * lo[cb] + f * hi[cb];
  };

  std::size_t shared = 0;
  for (std::size_t ca = 0; ca < a.columns.size(); ++ca) {
    const auto& name = a.columns[ca];
    if (name == "t") continue;
    const auto cb = b.column(name);
    if (cb < 0) continue;
    ++shared;
    ColumnDeviation d;
    d.name = name;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      if (!same_grid) {
        const double t = a.rows[i][ta];
        if (t < b.rows.front()[tb] - 1e-9 || t > b.rows.back()[tb] + 1e-9) continue;
      }
      const double x = a.rows[i][ca], y = b_at(i, cb);
      if (std::isnan(x) && std::isnan(y)) continue;
      if (std::isnan(x) || std::isnan(y)) {
        ++d.nan_mismatch;
        continue;
      }
      const double e = std::abs(x - y);
      d.max_abs = std::max(d.max_abs, e);
      sum += e;
      ++d.compared;
    }
    d.mean_abs = d.compared ? sum / static_cast<double>(d.compared) : 0.0;
    rep.max_deviation = std::max(rep.max_deviation, d.max_abs);
    rep.columns.push_back(d);
  }
  if (shared == 0) throw std::invalid_argument("compare: tables share no data columns");
  rep.pass = rep.max_deviation <= tol;
  return rep;
}

nlohmann::json to_json(const CompareReport& r) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : r.columns)
    cols.push_back({{"column", c.name},
                    {"max_abs", c.max_abs},
                    {"mean_abs", c.mean_abs},
                    {"compared", c.compared},
                    {"nan_mismatch", c.nan_mismatch}});
  return {{"columns", cols},
          {"max_deviation", r.max_deviation},
          {"tol", r.tol},
          {"interpolated", r.interpolated},
          {"verdict", r.pass ? "pass" : "fail"}};
}

nlohmann::json to_json(const BurstMetrics& b) {
  if (!b.valid) return nullptr;
  return {{"I_dicke", b.i_dicke}, {"I_max", b.i_max}, {"t_max", b.t_max}, {"has_burst", b.has_burst}};
}

namespace {

constexpr char kMagic[8] = {'W', 'G', 'Q', 'E', 'D', 'T', 'R', 'J'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("trajectory file truncated");
  return v;
}

void put_matrix(std::ostream& os, const Mat& m) {
  put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(cplx) * m.size()));
}

Mat get_matrix(std::istream& is) {
  const auto r = get<std::uint64_t>(is), c = get<std::uint64_t>(is);
  if (r > (1u << 20) || c > (1u << 20)) throw std::runtime_error("trajectory file: implausible matrix size");
  Mat m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(cplx) * m.size()));
  if (!is) throw std::runtime_error("trajectory file truncated");
  return m;
}

}  // namespace

void write_trajectory(const std::filesystem::path& path, const ProjectedTrajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kTrajectoryVersion);
  put<std::int32_t>(os, traj.n);
  put<std::int32_t>(os, traj.interpolation == Interpolation::Cubic ? 1 : 0);
  put<std::uint64_t>(os, traj.t.size());
  for (double t : traj.t) put<double>(os, t);
  put_matrix(os, traj.metric);
  for (const auto& u : traj.u) put_matrix(os, u);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

ProjectedTrajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || !std::equal(magic, magic + 8, kMagic)) throw std::runtime_error(path.string() + ": not a trajectory file");
  const auto version = get<std::uint32_t>(is);
  if (version != kTrajectoryVersion)
    throw std::runtime_error(path.string() + ": unsupported trajectory version " + std::to_string(version));
  ProjectedTrajectory traj;
  traj.n = get<std::int32_t>(is);
  traj.interpolation = get<std::int32_t>(is) == 1 ? Interpolation::Cubic : Interpolation::Linear;
  const auto count = get<std::uint64_t>(is);
  traj.t.resize(count);
  for (auto& t : traj.t) t = get<double>(is);
  traj.metric = get_matrix(is);
  traj.u.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) traj.u.push_back(get_matrix(is));
  return traj;
}

}  // namespace wgqed
