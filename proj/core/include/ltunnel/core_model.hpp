// Shared value types: scales, barrier, dimensionless parameters, sampled fields.
// Everything downstream works in units hbar = m = a = 1; conversion happens at I/O only.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ltunnel {

inline constexpr const char* kVersion = "ltunnel 1.0.0";

using cplx = std::complex<double>;

// Bad argument to a library call (maps to exit code 2 at the CLI).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadrature / iteration that did not reach its tolerance (exit code 4).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class QuantityKind { position, momentum, length, time, energy };

QuantityKind parse_quantity_kind(std::string_view name);  // throws InputError
std::string_view to_string(QuantityKind kind);

class PhysicalScales {
 public:
  PhysicalScales() = default;
  PhysicalScales(double hbar, double mass, double a);

  double hbar() const { return hbar_; }
  double mass() const { return mass_; }
  double a() const { return a_; }

 private:
  double hbar_ = 1.0;
  double mass_ = 1.0;
  double a_ = 1.0;
};

double to_dimensionless(double value, QuantityKind kind, const PhysicalScales& s);
double from_dimensionless(double value, QuantityKind kind, const PhysicalScales& s);
double to_dimensionless(double value, std::string_view kind, const PhysicalScales& s);
double from_dimensionless(double value, std::string_view kind, const PhysicalScales& s);

// Rectangular barrier of height V on [0, d), dimensionless.
class Barrier {
 public:
  Barrier(double height, double width);

  double height() const { return v_; }
  double width() const { return d_; }

  double k(double p) const { return p * p / (2.0 * v_); }
  bool tunneling(double p0) const;
  // sqrt(2V - p0^2); throws InputError outside the tunneling regime.
  double gamma(double p0) const;

 private:
  double v_;
  double d_;
};

Barrier barrier_from_k0(double k0, double p0, double width);

struct DimensionlessParams {
  double P0;
  double X0;
  double D;
  double time_unit;  // m a / hbar in physical time units
};

DimensionlessParams make_dimensionless(double x0, double p0, double d, const PhysicalScales& s);

enum class Region { left, barrier, right };

Region region_of(double x, double d);
std::string_view to_string(Region r);

// Wavefunction samples at a single time. Immutable after construction.
class ComplexField {
 public:
  ComplexField(std::vector<double> grid, std::vector<cplx> values, double time, double barrier_width);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  const std::vector<Region>& regions() const { return regions_; }
  double time() const { return time_; }
  double barrier_width() const { return d_; }
  std::size_t size() const { return grid_.size(); }

 private:
  std::vector<double> grid_;
  std::vector<cplx> values_;
  std::vector<Region> regions_;
  double time_;
  double d_;
};

}  // namespace ltunnel
