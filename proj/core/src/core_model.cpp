#include "ltunnel/core_model.hpp"

#include <cmath>

namespace ltunnel {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Physical value of one dimensionless unit of the given kind.
double unit_of(QuantityKind kind, const PhysicalScales& s) {
  const double sa = std::sqrt(s.a());
  switch (kind) {
    case QuantityKind::position:
    case QuantityKind::length:
      return sa;
    case QuantityKind::momentum:
      return s.hbar() / sa;
    case QuantityKind::time:
      return s.mass() * s.a() / s.hbar();
    case QuantityKind::energy:
      return s.hbar() * s.hbar() / (s.mass() * s.a());
  }
  throw InputError("unknown quantity kind");
}

}  // namespace

QuantityKind parse_quantity_kind(std::string_view name) {
  if (name == "position") return QuantityKind::position;
  if (name == "momentum") return QuantityKind::momentum;
  if (name == "length") return QuantityKind::length;
  if (name == "time") return QuantityKind::time;
  if (name == "energy") return QuantityKind::energy;
  throw InputError("unknown quantity kind '" + std::string(name) + "'");
}

std::string_view to_string(QuantityKind kind) {
  switch (kind) {
    case QuantityKind::position: return "position";
    case QuantityKind::momentum: return "momentum";
    case QuantityKind::length: return "length";
    case QuantityKind::time: return "time";
    case QuantityKind::energy: return "energy";
  }
  return "?";
}

PhysicalScales::PhysicalScales(double hbar, double mass, double a) : hbar_(hbar), mass_(mass), a_(a) {
  if (!positive_finite(hbar) || !positive_finite(mass) || !positive_finite(a))
    throw InputError("scales: hbar, mass and a must be positive and finite");
}

double to_dimensionless(double value, QuantityKind kind, const PhysicalScales& s) {
  return value / unit_of(kind, s);
}

double from_dimensionless(double value, QuantityKind kind, const PhysicalScales& s) {
  return value * unit_of(kind, s);
}

double to_dimensionless(double value, std::string_view kind, const PhysicalScales& s) {
  return to_dimensionless(value, parse_quantity_kind(kind), s);
}

double from_dimensionless(double value, std::string_view kind, const PhysicalScales& s) {
  return from_dimensionless(value, parse_quantity_kind(kind), s);
}

Barrier::Barrier(double height, double width) : v_(height), d_(width) {
  if (!positive_finite(height)) throw InputError("barrier height V must be positive");
  if (!positive_finite(width)) throw InputError("barrier width d must be positive");
}

bool Barrier::tunneling(double p0) const {
  const double kk = k(p0);
  return kk > 0.0 && kk < 1.0;
}

double Barrier::gamma(double p0) const {
  if (!tunneling(p0)) throw InputError("gamma is only defined for 0 < k0 < 1");
  return std::sqrt(2.0 * v_ - p0 * p0);
}

Barrier barrier_from_k0(double k0, double p0, double width) {
  if (!(k0 > 0.0) || !std::isfinite(k0)) throw InputError("k0 must be positive");
  return Barrier(p0 * p0 / (2.0 * k0), width);
}

DimensionlessParams make_dimensionless(double x0, double p0, double d, const PhysicalScales& s) {
  DimensionlessParams out{to_dimensionless(p0, QuantityKind::momentum, s),
                          to_dimensionless(x0, QuantityKind::position, s),
                          to_dimensionless(d, QuantityKind::length, s),
                          from_dimensionless(1.0, QuantityKind::time, s)};
  if (!(out.P0 > 0.0)) throw InputError("p0 must be positive");
  return out;
}

Region region_of(double x, double d) {
  if (x < 0.0) return Region::left;
  if (x < d) return Region::barrier;
  return Region::right;
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::left: return "left";
    case Region::barrier: return "barrier";
    case Region::right: return "right";
  }
  return "?";
}

ComplexField::ComplexField(std::vector<double> grid, std::vector<cplx> values, double time,
                           double barrier_width)
    : grid_(std::move(grid)), values_(std::move(values)), time_(time), d_(barrier_width) {
  if (grid_.size() != values_.size()) throw InputError("field: grid and values differ in length");
  if (!(time_ >= 0.0)) throw InputError("field: time must be >= 0");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1])) throw InputError("field: grid must be strictly increasing");
  regions_.reserve(grid_.size());
  for (double x : grid_) regions_.push_back(region_of(x, d_));
}

}  // namespace ltunnel
