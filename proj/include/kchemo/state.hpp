#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kchemo/grid.hpp"

namespace kchemo {

/// Phase-space density f(t, x, v) stored cell-major: f[cell * nv + node].
struct KineticState {
  std::size_t n_cells = 0;
  std::size_t nv = 0;
  std::vector<double> f;
  double t = 0.0;

  KineticState() = default;
  explicit KineticState(const PhaseGrid& grid, double value = 0.0)
      : n_cells(grid.n_cells()), nv(grid.nv()), f(n_cells * nv, value) {}

  double& at(std::size_t cell, std::size_t node) { return f[cell * nv + node]; }
  double at(std::size_t cell, std::size_t node) const { return f[cell * nv + node]; }
  std::span<double> cell(std::size_t c) { return {f.data() + c * nv, nv}; }
  std::span<const double> cell(std::size_t c) const { return {f.data() + c * nv, nv}; }
};

/// Velocity moments: density rho = ∫ f dv and flux j = ∫ v f dv.
struct Moments {
  std::vector<double> rho;
  std::vector<double> j;
};

/// Macroscopic fields carried alongside f. s_t is the discrete time
/// derivative actually fed to the turning kernel.
struct MacroState {
  std::vector<double> rho;
  std::vector<double> j;
  std::vector<double> z;
  std::vector<double> s;
  std::vector<double> s_x;
  std::vector<double> s_t;

  MacroState() = default;
  explicit MacroState(std::size_t n_cells)
      : rho(n_cells, 0.0), j(n_cells, 0.0), z(n_cells, 0.0), s(n_cells, 0.0),
        s_x(n_cells, 0.0), s_t(n_cells, 0.0) {}

  std::size_t size() const noexcept { return s.size(); }
};

}  // namespace kchemo
