#include "vibropol/signals.hpp"

#include <cmath>
#include <stdexcept>

#include "vibropol/errors.hpp"
#include "vibropol/units.hpp"

#ifdef VIBROPOL_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace vibropol {

double gaussian_envelope(double omega, const Pulse& pulse, double cavity_omega) {
  const double detuning = omega - (pulse.center - cavity_omega);
  return pulse.amplitude * std::exp(-detuning * detuning / (2.0 * pulse.sigma * pulse.sigma));
}

Eigen::VectorXd eigenstate_linewidths(const SystemParams& params, const BlockEigensystem& eig,
                                      bool include_cavity) {
  const int n = params.size();
  double solvent = 0.0;
  for (int m = 0; m < n; ++m)
    solvent += params.molecules[m].solvent_rate *
               (params.mean_occupation(m) + eig.config.bit(m));
  Eigen::VectorXd widths = Eigen::VectorXd::Constant(n + 1, solvent);
  if (include_cavity) {
    const double cavity_half = 0.5 * params.cavity_rate();
    for (int k = 0; k <= n; ++k)
      widths(k) += cavity_half * std::norm(eig.vectors(n, k));
  }
  return widths;
}

SpectrumGrid trps(const DensityState& state, const std::vector<BlockEigensystem>& eigensystems,
                  const SystemParams& params, const Pulse& probe, const Pulse& local_oscillator,
                  const Eigen::VectorXd& omega, const TrpsOptions& options) {
  if (omega.size() == 0) throw std::invalid_argument("trps: frequency grid is empty");
  if (eigensystems.empty()) throw std::invalid_argument("trps: eigensystems required");

  const SectorIndexing idx(eigensystems.front().config.n_molecules);
  const int ns = idx.n_sites;
  const Eigen::Index n_poles = static_cast<Eigen::Index>(idx.n_configs) * ns;

  Eigen::VectorXd pole_omega(n_poles), pole_gamma(n_poles);
  Eigen::VectorXcd amplitude(n_poles);

  for (const auto& eig : eigensystems) {
    const std::uint32_t y = eig.config.index;
    const Eigen::VectorXd widths = eigenstate_linewidths(params, eig, options.cavity_linewidth);

    Eigen::MatrixXcd block(ns, ns);
    for (int m = 0; m < ns; ++m)
      for (int n = 0; n < ns; ++n) block(m, n) = state.coefficient(idx, m, n, y);
    const Eigen::MatrixXcd rho_eig = eig.vectors.adjoint() * block * eig.vectors;

    const Eigen::RowVectorXcd v_lo =
        local_oscillator.polarization.transpose().cast<Complex>() * eig.dipoles;
    const Eigen::RowVectorXcd v_pr = probe.polarization.transpose().cast<Complex>() * eig.dipoles;

    for (int i = 0; i < ns; ++i) {
      const Eigen::Index p = static_cast<Eigen::Index>(y) * ns + i;
      pole_omega(p) = eig.omega(i);
      pole_gamma(p) = widths(i);
      const double filter =
          gaussian_envelope(eig.omega(i), local_oscillator, params.cavity.omega) *
          gaussian_envelope(eig.omega(i), probe, params.cavity.omega);
      Complex amp = std::conj(v_lo(i)) * (rho_eig.row(i) * v_pr.transpose())(0, 0);
      if (options.include_leakage_term)
        amp -= std::conj(v_lo(i)) * v_pr(i) * state.ground(y);
      amplitude(p) = amp * filter;
    }
  }

  SpectrumGrid grid;
  grid.axes = {omega};
  grid.values.resize(omega.size(), 1);
  for (Eigen::Index a = 0; a < omega.size(); ++a) {
    Complex sum = 0.0;
    for (Eigen::Index p = 0; p < n_poles; ++p)
      sum += amplitude(p) / Complex{omega(a) - pole_omega(p), pole_gamma(p)};
    grid.values(a, 0) = -sum.imag();
  }
  if (!grid.values.allFinite()) throw NumericalError("trps: non-finite spectrum values");
  return grid;
}

namespace {

struct PoleData {
  Eigen::VectorXd omega;   // frequency per pole
  Eigen::VectorXd gamma;   // linewidth per pole
  Eigen::VectorXcd v_lo, v3, v2, v1;
  Eigen::VectorXd filter_detect, filter_excite;
};

PoleData collect_poles(const SystemParams& params,
                       const std::vector<BlockEigensystem>& eigensystems,
                       const TwodirPulses& pulses, bool cavity_linewidth) {
  const int ns = eigensystems.front().config.n_molecules + 1;
  const Eigen::Index n_poles = static_cast<Eigen::Index>(eigensystems.size()) * ns;
  PoleData poles;
  poles.omega.resize(n_poles);
  poles.gamma.resize(n_poles);
  poles.v_lo.resize(n_poles);
  poles.v3.resize(n_poles);
  poles.v2.resize(n_poles);
  poles.v1.resize(n_poles);
  poles.filter_detect.resize(n_poles);
  poles.filter_excite.resize(n_poles);

  for (const auto& eig : eigensystems) {
    const Eigen::Index base = static_cast<Eigen::Index>(eig.config.index) * ns;
    const Eigen::VectorXd widths = eigenstate_linewidths(params, eig, cavity_linewidth);
    const Eigen::RowVectorXcd lo =
        pulses.local_oscillator.polarization.transpose().cast<Complex>() * eig.dipoles;
    const Eigen::RowVectorXcd p3 = pulses.k3.polarization.transpose().cast<Complex>() * eig.dipoles;
    const Eigen::RowVectorXcd p2 = pulses.k2.polarization.transpose().cast<Complex>() * eig.dipoles;
    const Eigen::RowVectorXcd p1 = pulses.k1.polarization.transpose().cast<Complex>() * eig.dipoles;
    for (int k = 0; k < ns; ++k) {
      poles.omega(base + k) = eig.omega(k);
      poles.gamma(base + k) = widths(k);
      poles.v_lo(base + k) = lo(k);
      poles.v3(base + k) = p3(k);
      poles.v2(base + k) = p2(k);
      poles.v1(base + k) = p1(k);
      poles.filter_detect(base + k) =
          gaussian_envelope(eig.omega(k), pulses.local_oscillator, params.cavity.omega) *
          gaussian_envelope(eig.omega(k), pulses.k3, params.cavity.omega);
      poles.filter_excite(base + k) =
          gaussian_envelope(eig.omega(k), pulses.k2, params.cavity.omega) *
          gaussian_envelope(eig.omega(k), pulses.k1, params.cavity.omega);
    }
  }
  return poles;
}

Eigen::MatrixXd evaluate_grid(const Eigen::MatrixXcd& k_matrix, const PoleData& poles,
                              const Eigen::VectorXd& omega1, const Eigen::VectorXd& omega3) {
  const Eigen::Index n_poles = poles.omega.size();
  Eigen::MatrixXcd d3(omega3.size(), n_poles), d1(omega1.size(), n_poles);
  for (Eigen::Index a = 0; a < omega3.size(); ++a)
    for (Eigen::Index p = 0; p < n_poles; ++p)
      d3(a, p) = 1.0 / Complex{omega3(a) - poles.omega(p), poles.gamma(p)};
  for (Eigen::Index b = 0; b < omega1.size(); ++b)
    for (Eigen::Index p = 0; p < n_poles; ++p)
      d1(b, p) = 1.0 / Complex{omega1(b) + poles.omega(p), poles.gamma(p)};
  return (d1 * k_matrix.transpose() * d3.transpose()).real();
}

}  // namespace

SpectrumGrid twodir(const SystemParams& params, const LiouvillianSpectrum& spectrum,
                    const std::vector<BlockEigensystem>& eigensystems, const TwodirPulses& pulses,
                    double t2_ps, const Eigen::VectorXd& omega1, const Eigen::VectorXd& omega3,
                    InitialWeights initial, const TwodirOptions& options) {
  if (omega1.size() == 0 || omega3.size() == 0)
    throw std::invalid_argument("twodir: frequency grids must be non-empty");
  if (t2_ps < 0.0) throw std::invalid_argument("twodir: waiting time must be non-negative");

  const SectorIndexing& idx = spectrum.idx;
  const int ns = idx.n_sites;
  const std::uint32_t n_configs = static_cast<std::uint32_t>(idx.n_configs);
  const Eigen::Index n_poles = static_cast<Eigen::Index>(n_configs) * ns;

  Eigen::VectorXd weights(n_configs);
  if (initial == InitialWeights::kPureGround) {
    weights.setZero();
    weights(0) = 1.0;
  } else {
    weights = thermal_config_weights(params);
  }

  const PoleData poles = collect_poles(params, eigensystems, pulses, options.cavity_linewidth);

  // Site-pair -> eigen-pair basis change, block diagonal over configurations.
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(spectrum.modes.rows(), spectrum.modes.cols());
  for (const auto& eig : eigensystems) {
    const Eigen::Index offset = static_cast<Eigen::Index>(eig.config.index) * ns * ns;
    for (int m = 0; m < ns; ++m)
      for (int n = 0; n < ns; ++n)
        for (int a = 0; a < ns; ++a)
          for (int b = 0; b < ns; ++b)
            basis(offset + m * ns + n, offset + a * ns + b) =
                eig.vectors(m, a) * std::conj(eig.vectors(n, b));
  }
  const Eigen::VectorXcd phases = (spectrum.eigenvalues.array() * t2_ps).exp();
  const Eigen::MatrixXcd green_eig =
      basis.adjoint() * (spectrum.modes * phases.asDiagonal() * spectrum.modes_inverse) * basis;

  Eigen::MatrixXcd k_ese = Eigen::MatrixXcd::Zero(n_poles, n_poles);
  Eigen::MatrixXcd k_gsb = Eigen::MatrixXcd::Zero(n_poles, n_poles);
  Eigen::MatrixXcd k_esd = Eigen::MatrixXcd::Zero(n_poles, n_poles);

  for (std::uint32_t j_config = 0; j_config < n_configs; ++j_config) {
    if (weights(j_config) == 0.0) continue;
    const double pj = weights(j_config);
    const Eigen::Index exc_base = static_cast<Eigen::Index>(j_config) * ns;

    const Eigen::MatrixXcd esd = esd_green(spectrum, params, eigensystems[j_config], t2_ps);

    for (std::uint32_t r_config = 0; r_config < n_configs; ++r_config) {
      const Eigen::Index det_base = static_cast<Eigen::Index>(r_config) * ns;

      double gg = 1.0;
      for (int s = 0; s < idx.n_molecules; ++s)
        gg *= solvent_gg(params, s, t2_ps)(
            (r_config >> s) & 1u, (j_config >> s) & 1u);

      for (int i = 0; i < ns; ++i) {
        const Eigen::Index p3 = det_base + i;
        const Complex detect = std::conj(poles.v_lo(p3)) * poles.filter_detect(p3);
        for (int j = 0; j < ns; ++j) {
          const Eigen::Index p1 = exc_base + j;
          const Complex excite = std::conj(poles.v1(p1)) * poles.filter_excite(p1) * pj;

          Complex ese_sum = 0.0;
          for (int ip = 0; ip < ns; ++ip)
            for (int jp = 0; jp < ns; ++jp)
              ese_sum += poles.v3(det_base + ip) * poles.v2(exc_base + jp) *
                         green_eig(static_cast<Eigen::Index>(r_config) * ns * ns + i * ns + ip,
                                   static_cast<Eigen::Index>(j_config) * ns * ns + jp * ns + j);
          k_ese(p3, p1) += detect * excite * ese_sum;

          k_gsb(p3, p1) += detect * excite * poles.v3(p3) * poles.v2(p1) * gg;

          Complex esd_sum = 0.0;
          for (int jp = 0; jp < ns; ++jp)
            esd_sum += poles.v2(exc_base + jp) * esd(r_config, jp * ns + j);
          k_esd(p3, p1) += detect * excite * poles.v3(p3) * esd_sum;
        }
      }
    }
  }

  SpectrumGrid grid;
  grid.axes = {omega1, omega3};
  // Overall sign fixed so that the T2=0 diagonal peaks come out positive;
  // the ESD pathway keeps its relative minus sign.
  const Eigen::MatrixXd ese = -evaluate_grid(k_ese, poles, omega1, omega3);
  const Eigen::MatrixXd gsb = -evaluate_grid(k_gsb, poles, omega1, omega3);
  const Eigen::MatrixXd esd = evaluate_grid(k_esd, poles, omega1, omega3);
  grid.values = ese + esd;
  if (!options.subtract_gsb) grid.values += gsb;
  if (options.components) {
    grid.components["ese"] = ese;
    grid.components["gsb"] = gsb;
    grid.components["esd"] = esd;
  }
  if (!grid.values.allFinite()) throw NumericalError("twodir: non-finite spectrum values");
  return grid;
}

StickSpectrum dipole_distribution(const LargeBlockSpec& spec, const SystemParams& reference) {
  if (spec.count < 1 || spec.count > 100000)
    throw std::length_error("dipole_distribution: supported range is 1 <= N <= 100000");
  if (spec.detuned_count < 0 || spec.detuned_count > spec.count)
    throw std::out_of_range("dipole_distribution: detuned_count exceeds N");
  if (reference.molecules.empty())
    throw std::invalid_argument("dipole_distribution: reference molecule required");

  const int n = spec.count;
  const double coupling = spec.collective_coupling / std::sqrt(static_cast<double>(n));
  const double detuning_base =
      reference.molecules.front().omega - reference.cavity.omega;
  const double mu2 = reference.molecules.front().dipole.squaredNorm();

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    h(i, i) = detuning_base + (i < spec.detuned_count ? spec.detuning : 0.0);
    h(i, n) = coupling;
    h(n, i) = coupling;
  }

  StickSpectrum sticks;
#ifdef VIBROPOL_HAVE_LAPACKE
  {
    Eigen::VectorXd values(n + 1);
    const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n + 1, h.data(), n + 1,
                                    values.data());
    if (info != 0) throw NumericalError("dipole_distribution: dsyevd failed");
    sticks.omega = values;
    sticks.strength.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double collective = h.col(k).head(n).sum();
      sticks.strength(k) = mu2 * collective * collective;
    }
  }
#else
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
      throw NumericalError("dipole_distribution: eigensolver failed to converge");
    sticks.omega = solver.eigenvalues();
    sticks.strength.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double collective = solver.eigenvectors().col(k).head(n).sum();
      sticks.strength(k) = mu2 * collective * collective;
    }
  }
#endif
  return sticks;
}

Eigen::VectorXd broaden_sticks(const StickSpectrum& sticks, const Eigen::VectorXd& omega,
                               double width) {
  if (!(width > 0.0)) throw std::invalid_argument("broaden_sticks: width must be positive");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(omega.size());
  for (Eigen::Index a = 0; a < omega.size(); ++a)
    for (Eigen::Index k = 0; k < sticks.omega.size(); ++k) {
      const double d = omega(a) - sticks.omega(k);
      out(a) += sticks.strength(k) * (width / M_PI) / (d * d + width * width);
    }
  return out;
}

}  // namespace vibropol
