#include "bml/grid.hpp"

#include <algorithm>
#include <cmath>

#include "bml/error.hpp"

namespace bml {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(std::size_t n, double half_length) : n_(n), half_length_(half_length) {
  if (n < 8 || !is_power_of_two(n)) {
    throw DomainError("grid size must be a power of two >= 8, got " + std::to_string(n));
  }
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw DomainError("grid half-length must be positive and finite");
  }
}

double Grid::max_wavenumber() const {
  const double m = static_cast<double>(n_ / 2);
  return wavenumber_unit() * std::sqrt(2.0) * m;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw DomainError(std::string(what) + ": operands live on different grids");
}

RealField::RealField(Grid grid, std::string label)
    : grid_(grid), values_(grid.size(), 0.0), label_(std::move(label)) {}

RealField::RealField(Grid grid, std::vector<double> values, std::string label)
    : grid_(grid), values_(std::move(values)), label_(std::move(label)) {
  if (values_.size() != grid_.size()) throw DomainError("RealField: sample count does not match grid");
}

bool RealField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

RealField& RealField::operator+=(const RealField& o) {
  require_same_grid(grid_, o.grid_, "RealField +=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

RealField& RealField::operator-=(const RealField& o) {
  require_same_grid(grid_, o.grid_, "RealField -=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

RealField& RealField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

SpectralField::SpectralField(Grid grid) : grid_(grid), coeffs_(grid.spectral_size()) {}

SpectralField::SpectralField(Grid grid, std::vector<complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.spectral_size()) {
    throw DomainError("SpectralField: coefficient count does not match grid");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(grid_, o.grid_, "SpectralField +=");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(grid_, o.grid_, "SpectralField -=");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : coeffs_) v *= s;
  return *this;
}

}  // namespace bml
