#pragma once

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "bisym/symplectic.hpp"

namespace bisym {

/// ẋ^i = P^{ij} ∂_j H
inline std::vector<Expr> hamiltonian_vector_field(const PoissonField& pf, const Expr& H) {
  std::vector<Expr> dH = gradient(H, pf.coords);
  std::vector<Expr> out;
  for (std::size_t i = 0; i < pf.dim(); ++i) {
    Expr acc(0);
    for (std::size_t j = 0; j < pf.dim(); ++j)
      if (!pf.P(i, j).is_zero() && !dH[j].is_zero()) acc += pf.P(i, j) * dH[j];
    out.push_back(acc);
  }
  return out;
}

struct Trajectory {
  std::vector<Symbol> coords;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::string method = "rk4";
  double dt = 0;
  bool aborted = false;
  std::string abort_reason;
};

/// Classical fixed-step RK4; stops with the partial trajectory at a singular point.
inline Trajectory integrate(const std::vector<Expr>& field, const std::vector<Symbol>& coords,
                            const std::vector<double>& x0, double dt, double T, const Assignment& params = {},
                            double den_guard = kDefaultDenGuard) {
  if (!(dt > 0)) throw std::invalid_argument("step must be positive");
  if (field.size() != coords.size() || x0.size() != coords.size())
    throw DimensionError("field, coordinates and start point differ in size");
  Trajectory tr{coords, {0.0}, {x0}, "rk4", dt, false, {}};
  std::size_t n = coords.size();
  long steps = std::lround(T / dt);
  Assignment a = params;
  auto rhs = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) a[coords[i].name] = x[i];
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = eval(field[i], a, den_guard);
    return v;
  };
  std::vector<double> x = x0, tmp(n);
  for (long s = 0; s < steps; ++s) {
    try {
      auto k1 = rhs(x);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
      auto k2 = rhs(tmp);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
      auto k3 = rhs(tmp);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
      auto k4 = rhs(tmp);
      for (std::size_t i = 0; i < n; ++i) x[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    } catch (const SingularPointError& e) {
      tr.aborted = true;
      tr.abort_reason = e.what();
      break;
    }
    tr.times.push_back(static_cast<double>(s + 1) * dt);
    tr.states.push_back(x);
  }
  return tr;
}

struct DriftReport {
  std::vector<double> max_abs;   // max_t |F(x(t)) - F(x(0))|
  std::vector<double> relative;  // max_abs / max(|F(x(0))|, 1)
};

inline DriftReport conservation_drift(const Trajectory& tr, const std::vector<Expr>& F,
                                      const Assignment& params = {}) {
  DriftReport rep{std::vector<double>(F.size(), 0.0), std::vector<double>(F.size(), 0.0)};
  if (tr.states.empty()) return rep;
  Assignment a = params;
  auto at = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < tr.coords.size(); ++i) a[tr.coords[i].name] = x[i];
    std::vector<double> v;
    for (const auto& f : F) v.push_back(eval(f, a, 0.0));
    return v;
  };
  std::vector<double> f0 = at(tr.states.front());
  for (const auto& s : tr.states) {
    std::vector<double> v = at(s);
    for (std::size_t k = 0; k < F.size(); ++k) rep.max_abs[k] = std::max(rep.max_abs[k], std::fabs(v[k] - f0[k]));
  }
  for (std::size_t k = 0; k < F.size(); ++k) rep.relative[k] = rep.max_abs[k] / std::max(std::fabs(f0[k]), 1.0);
  return rep;
}

/// Header: t, coordinates, then F1..Fk.
inline void write_csv(std::ostream& os, const Trajectory& tr, const std::vector<Expr>& F,
                      const Assignment& params = {}) {
  os << "t";
  for (const auto& c : tr.coords) os << "," << c.name;
  for (std::size_t k = 0; k < F.size(); ++k) os << ",F" << k + 1;
  os << "\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  Assignment a = params;
  for (std::size_t s = 0; s < tr.states.size(); ++s) {
    os << tr.times[s];
    for (std::size_t i = 0; i < tr.coords.size(); ++i) {
      os << "," << tr.states[s][i];
      a[tr.coords[i].name] = tr.states[s][i];
    }
    for (const auto& f : F) os << "," << eval(f, a, 0.0);
    os << "\n";
  }
}

}  // namespace bisym
