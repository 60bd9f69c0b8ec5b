#include "chemolab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "chemolab/error.hpp"
#include "chemolab/format.hpp"

namespace chemolab {

Grid::Grid(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 4 || ny < 4)
    throw DomainError("Grid: need nx >= 4 and ny >= 4, got " +
                      std::to_string(nx) + "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw DomainError("Grid: side lengths must be finite and positive");
}

ScalarField::ScalarField(const Grid& grid, double value)
    : grid_(grid), data_(grid.size(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> data)
    : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size())
    throw DomainError("ScalarField: data length " +
                      std::to_string(data_.size()) + " != nx*ny " +
                      std::to_string(grid_.size()));
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

double ScalarField::min() const noexcept {
  return *std::min_element(data_.begin(), data_.end());
}

double ScalarField::max() const noexcept {
  return *std::max_element(data_.begin(), data_.end());
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  if (!(grid_ == other.grid_)) throw DomainError("ScalarField: grid mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  if (!(grid_ == other.grid_)) throw DomainError("ScalarField: grid mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double c) noexcept {
  for (double& x : data_) x *= c;
  return *this;
}

void require_finite(const ScalarField& field, const char* what) {
  if (!field.all_finite())
    throw DivergedFieldError(std::string(what) + ": non-finite value in field");
}

double integrate(const ScalarField& field) {
  require_finite(field, "integrate");
  double sum = 0.0;
  for (double x : field.values()) sum += x;
  return field.grid().cell_area() * sum;
}

double norm(const ScalarField& field, Norm p) {
  require_finite(field, "norm");
  const auto values = field.values();
  const double area = field.grid().cell_area();
  switch (p) {
    case Norm::L1: {
      double s = 0.0;
      for (double x : values) s += std::abs(x);
      return area * s;
    }
    case Norm::L2: {
      double s = 0.0;
      for (double x : values) s += x * x;
      return std::sqrt(area * s);
    }
    case Norm::L4: {
      double s = 0.0;
      for (double x : values) s += (x * x) * (x * x);
      return std::sqrt(std::sqrt(area * s));
    }
    case Norm::Linf: {
      double m = 0.0;
      for (double x : values) m = std::max(m, std::abs(x));
      return m;
    }
  }
  return 0.0;
}

namespace {

double s_log_s(double s) { return s > 0.0 ? s * std::log(s) : 0.0; }

void require_nonnegative(const ScalarField& u, const char* what) {
  require_finite(u, what);
  for (double x : u.values())
    if (x < 0.0)
      throw PositivityError(std::string(what) + ": negative density " +
                            format_real(x));
}

}  // namespace

double entropy_integrand(const ScalarField& u) {
  require_nonnegative(u, "entropy_integrand");
  double sum = 0.0;
  for (double x : u.values()) sum += s_log_s(x);
  return u.grid().cell_area() * sum;
}

double abs_entropy_integrand(const ScalarField& u) {
  require_nonnegative(u, "abs_entropy_integrand");
  double sum = 0.0;
  for (double x : u.values()) sum += std::abs(s_log_s(x));
  return u.grid().cell_area() * sum;
}

void write_snapshot(std::ostream& out, const ScalarField& field, double t) {
  const Grid& g = field.grid();
  out << "CHEMOFIELD v1 " << g.nx() << ' ' << g.ny() << ' ' << format_real(g.lx())
      << ' ' << format_real(g.ly()) << ' ' << format_real(t) << '\n';
  for (double x : field.values()) out << format_real(x) << '\n';
}

void write_snapshot(const std::string& path, const ScalarField& field,
                    double t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open snapshot for writing: " + path);
  write_snapshot(out, field, t);
  if (!out) throw IoError("failed writing snapshot: " + path);
}

Snapshot read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("snapshot: missing header");
  std::istringstream header(line);
  std::string magic, version, lx, ly, t;
  int nx = 0, ny = 0;
  header >> magic >> version >> nx >> ny >> lx >> ly >> t;
  if (!header || magic != "CHEMOFIELD" || version != "v1")
    throw Error("snapshot: bad header '" + line + "'");
  Grid grid(nx, ny, parse_real(lx), parse_real(ly));
  std::vector<double> data;
  data.reserve(grid.size());
  while (data.size() < grid.size() && std::getline(in, line))
    data.push_back(parse_real(line));
  if (data.size() != grid.size())
    throw Error("snapshot: expected " + std::to_string(grid.size()) +
                " values, got " + std::to_string(data.size()));
  return Snapshot{ScalarField(grid, std::move(data)), parse_real(t)};
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot: " + path);
  return read_snapshot(in);
}

}  // namespace chemolab
