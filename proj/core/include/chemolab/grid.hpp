#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace chemolab {

/// Uniform cell-centered grid on the rectangle [0, lx] x [0, ly].
///
/// Cells are indexed row-major: cell (i, j) with i along x lives at
/// `j * nx + i`. Every file format and every reduction uses this order.
class Grid {
 public:
  /// Throws DomainError unless nx, ny >= 4 and lx, ly > 0.
  Grid(int nx, int ny, double lx, double ly);

  static Grid unit_square(int n) { return Grid(n, n, 1.0, 1.0); }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }
  double hx() const noexcept { return lx_ / nx_; }
  double hy() const noexcept { return ly_ / ny_; }
  double cell_area() const noexcept { return hx() * hy(); }
  double area() const noexcept { return lx_ * ly_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  }

  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(i);
  }
  double x_center(int i) const noexcept { return (i + 0.5) * hx(); }
  double y_center(int j) const noexcept { return (j + 0.5) * hy(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int nx_;
  int ny_;
  double lx_;
  double ly_;
};

/// One real value per cell of a Grid.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double value = 0.0);
  ScalarField(const Grid& grid, std::vector<double> data);

  template <class F>
  static ScalarField from_function(const Grid& grid, F&& f) {
    ScalarField out(grid);
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i)
        out(i, j) = f(grid.x_center(i), grid.y_center(j));
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int i, int j) noexcept { return data_[grid_.index(i, j)]; }
  double operator()(int i, int j) const noexcept {
    return data_[grid_.index(i, j)];
  }
  double& operator[](std::size_t k) noexcept { return data_[k]; }
  double operator[](std::size_t k) const noexcept { return data_[k]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool all_finite() const noexcept;
  double min() const noexcept;
  double max() const noexcept;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double c) noexcept;

  friend ScalarField operator+(ScalarField a, const ScalarField& b) {
    return a += b;
  }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) {
    return a -= b;
  }
  friend ScalarField operator*(double c, ScalarField a) { return a *= c; }

 private:
  Grid grid_;
  std::vector<double> data_;
};

enum class Norm { L1, L2, L4, Linf };

/// cell_area * sum(values). Throws DivergedFieldError on a non-finite entry.
double integrate(const ScalarField& field);

/// Discrete L^p norm; max |value| for Linf. Throws like integrate().
double norm(const ScalarField& field, Norm p);

/// Discrete integral of s*ln(s), with 0*ln(0) = 0.
/// Throws PositivityError on a negative entry.
double entropy_integrand(const ScalarField& u);

/// Discrete integral of |s*ln(s)|.
double abs_entropy_integrand(const ScalarField& u);

/// Throws DivergedFieldError naming `what` if any entry is non-finite.
void require_finite(const ScalarField& field, const char* what);

// Snapshot format: header line "CHEMOFIELD v1 nx ny lx ly t" followed by
// nx*ny values, one per line, row-major. Values use 17 significant digits so a
// write/read cycle reproduces every double exactly.
void write_snapshot(std::ostream& out, const ScalarField& field, double t);
void write_snapshot(const std::string& path, const ScalarField& field, double t);

struct Snapshot {
  ScalarField field;
  double t;
};
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::string& path);

}  // namespace chemolab
