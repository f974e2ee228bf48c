#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace bml {

/// Uniform periodic grid on the box [-L, L)^2 with n samples per axis.
///
/// Sample (i, j) sits at x1 = -L + i*h, x2 = -L + j*h with h = 2L/n and is
/// stored at offset j*n + i (rows run along x2). Wavenumbers are (pi/L)*m
/// with m in [-n/2, n/2).
class Grid {
 public:
  Grid(std::size_t n, double half_length);

  std::size_t n() const { return n_; }
  double half_length() const { return half_length_; }
  double spacing() const { return 2.0 * half_length_ / static_cast<double>(n_); }
  double cell_area() const { return spacing() * spacing(); }
  double box_area() const { return 4.0 * half_length_ * half_length_; }
  std::size_t size() const { return n_ * n_; }

  double coord(std::size_t i) const { return -half_length_ + static_cast<double>(i) * spacing(); }

  /// Number of stored spectral columns (real-to-complex half spectrum).
  std::size_t spectral_cols() const { return n_ / 2 + 1; }
  std::size_t spectral_size() const { return n_ * spectral_cols(); }

  /// Signed mode index of spectral row r (the x2 direction).
  std::ptrdiff_t row_mode(std::size_t r) const {
    const auto rr = static_cast<std::ptrdiff_t>(r);
    return r < n_ / 2 ? rr : rr - static_cast<std::ptrdiff_t>(n_);
  }
  /// Signed mode index of spectral column c (the x1 direction). Column n/2
  /// is the Nyquist column and maps to -n/2.
  std::ptrdiff_t col_mode(std::size_t c) const {
    return c < n_ / 2 ? static_cast<std::ptrdiff_t>(c) : -static_cast<std::ptrdiff_t>(n_ / 2);
  }
  double wavenumber_unit() const { return std::numbers::pi / half_length_; }
  double wavenumber(std::ptrdiff_t m) const { return wavenumber_unit() * static_cast<double>(m); }
  bool is_nyquist(std::ptrdiff_t m) const { return m == -static_cast<std::ptrdiff_t>(n_ / 2); }

  /// Largest |k| present on the lattice (the corner mode).
  double max_wavenumber() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_;
  double half_length_;
};

/// Real samples of a scalar field on a Grid.
class RealField {
 public:
  RealField(Grid grid, std::string label = {});
  RealField(Grid grid, std::vector<double> values, std::string label = {});

  const Grid& grid() const { return grid_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double& at(std::size_t i, std::size_t j) { return values_[j * grid_.n() + i]; }
  double at(std::size_t i, std::size_t j) const { return values_[j * grid_.n() + i]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  bool all_finite() const;

  RealField& operator+=(const RealField& o);
  RealField& operator-=(const RealField& o);
  RealField& operator*=(double s);
  friend RealField operator+(RealField a, const RealField& b) { return a += b; }
  friend RealField operator-(RealField a, const RealField& b) { return a -= b; }
  friend RealField operator*(double s, RealField a) { return a *= s; }

 private:
  Grid grid_;
  std::vector<double> values_;
  std::string label_;
};

/// Half-spectrum Fourier coefficients, normalised so that a constant field c
/// has coefficient c at k = 0. Layout: row r (x2 mode) times spectral_cols().
class SpectralField {
 public:
  using complex = std::complex<double>;

  explicit SpectralField(Grid grid);
  SpectralField(Grid grid, std::vector<complex> coeffs);

  const Grid& grid() const { return grid_; }
  std::vector<complex>& coeffs() { return coeffs_; }
  const std::vector<complex>& coeffs() const { return coeffs_; }
  complex& at(std::size_t r, std::size_t c) { return coeffs_[r * grid_.spectral_cols() + c]; }
  const complex& at(std::size_t r, std::size_t c) const {
    return coeffs_[r * grid_.spectral_cols() + c];
  }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  /// Multiplicity of a stored half-spectrum column in the full lattice sum.
  double column_weight(std::size_t c) const {
    return (c == 0 || c == grid_.n() / 2) ? 1.0 : 2.0;
  }

 private:
  Grid grid_;
  std::vector<complex> coeffs_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace bml
