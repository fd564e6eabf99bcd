#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "vibropol/dynamics.hpp"
#include "vibropol/validate.hpp"

namespace vibropol::testing {

/// Closed cavity + frozen solvent variant of the reference system.
inline SystemParams closed_system(int n, double coupling = 2.1) {
  SystemParams params = reference_system(n);
  for (auto& m : params.molecules) {
    m.coupling = coupling;
    m.solvent_rate = 0.0;
  }
  params.cavity.quality = 1e18;
  return params;
}

/// Root of the arrow-matrix secular equation lambda = sum_s g^2/(lambda - d_s)
/// by bisection; an eigensolver-independent route to block eigenvalues.
inline double secular_root(const std::vector<double>& detunings, double coupling, double lo,
                           double hi) {
  auto f = [&](double x) {
    double value = x;
    for (double d : detunings) value -= coupling * coupling / (x - d);
    return value;
  };
  double flo = f(lo);
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((fmid > 0) == (flo > 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Composite Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int k = 1; k < n; ++k) sum += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Random positive-semidefinite density state with unit total trace,
/// deterministic for a given seed.
inline DensityState random_state(const SectorIndexing& idx, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DensityState state = DensityState::zero(idx);
  const int ns = idx.n_sites;
  for (std::uint32_t p = 0; p < idx.n_configs; ++p) {
    Eigen::MatrixXcd a(ns, ns);
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < ns; ++j) a(i, j) = Complex{gauss(rng), gauss(rng)};
    const Eigen::MatrixXcd block = a * a.adjoint();
    for (int m = 0; m < ns; ++m)
      for (int n = 0; n < ns; ++n)
        state.excited(static_cast<Eigen::Index>(idx.excited(m, n, p))) = block(m, n);
    state.ground(p) = std::abs(gauss(rng));
  }
  const double trace = total_trace(state, idx);
  state.excited /= trace;
  state.ground /= trace;
  return state;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = a + (b - a) * k / (n - 1);
  return out;
}

/// Least-squares exponential decay rate of positive samples y(t).
inline double fitted_decay_rate(const std::vector<double>& t, const std::vector<double>& y) {
  double st = 0, sl = 0, stt = 0, stl = 0;
  int n = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (y[k] < 1e-14) continue;
    const double l = std::log(y[k]);
    st += t[k];
    sl += l;
    stt += t[k] * t[k];
    stl += t[k] * l;
    ++n;
  }
  const double slope = (n * stl - st * sl) / (n * stt - st * st);
  return -slope;
}

}  // namespace vibropol::testing
