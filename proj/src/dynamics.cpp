// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include "mepqlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "mepqlab/parallel.hpp"

namespace mepqlab {

EvolutionCoeffs evolution_coeffs(const QuadraticPotential& pot, double t) {
  EvolutionCoeffs c{};
  const double mu = pot.mu;
  if (pot.V2 == 0.0) {
    c.f0 = -pot.V1 / (2.0 * mu) * t * t;
    c.f1 = 1.0;
    c.f2 = t / mu;
    c.g0 = -pot.V1 * t;
    c.g1 = 0.0;
    c.g2 = 1.0;
    return c;
  }
  if (pot.V2 > 0.0) {
    const double w = std::sqrt(pot.V2 / mu);
    const double C = std::cos(w * t), S = std::sin(w * t);
    c.f0 = -pot.V1 / pot.V2 * (1.0 - C);
    c.f1 = C;
    c.f2 = S / (mu * w);
    c.g0 = -pot.V1 / pot.V2 * mu * w * S;
    c.g1 = -mu * w * S;
    c.g2 = C;
    return c;
  }
  // V2 < 0: analytic continuation of the trigonometric branch
  const double s = std::sqrt(-pot.V2 / mu);
  const double C = std::cosh(s * t), S = std::sinh(s * t);
  c.f0 = -pot.V1 / pot.V2 * (1.0 - C);
  c.f1 = C;
  c.f2 = S / (mu * s);
  c.g0 = -pot.V1 / pot.V2 * mu * s * S;
  c.g1 = mu * s * S;
  c.g2 = C;
  return c;
}

MomentTrajectory closed_form_trajectory(const MEPacketParams& params,
                                        const QuadraticPotential& pot,
                                        const std::vector<double>& times) {
  params.validate_classical();
  for (size_t i = 1; i < times.size(); ++i)
    require(times[i] >= times[i - 1], "closed_form_trajectory: times not sorted");
  MomentTrajectory tr;
  tr.t = times;
  for (double t : times) {
    const EvolutionCoeffs c = evolution_coeffs(pot, t);
    tr.Q.push_back(c.f0 + params.Q * c.f1 + params.P * c.f2);
    tr.P.push_back(c.g0 + params.Q * c.g1 + params.P * c.g2);
    tr.dQ.push_back(std::sqrt(c.f1 * c.f1 * params.dQ * params.dQ +
                              c.f2 * c.f2 * params.dP * params.dP));
    tr.dP.push_back(std::sqrt(c.g1 * c.g1 * params.dQ * params.dQ +
                              c.g2 * c.g2 * params.dP * params.dP));
  }
  return tr;
}

// --- Monte Carlo oracle -----------------------------------------------------

namespace {

struct RKState {
  double q, p;
};

RKState rk_deriv(const RKState& s, double mu,
                 const std::function<double(double)>& dV) {
  return {s.p / mu, -dV(s.q)};
}

void adaptive_rk(RKState& s, double t0, double t1, double mu,
                 const std::function<double(double)>& dV, double tol) {
  double t = t0;
  double h = (t1 > t0) ? (t1 - t0) / 16.0 : 0.0;
  int guard = 0;
  while (t < t1) {
    if (t + h > t1) h = t1 - t;
    // classic step doubling with RK4
    auto rk4 = [&](RKState y, double hh) {
      const RKState k1 = rk_deriv(y, mu, dV);
      const RKState k2 =
          rk_deriv({y.q + 0.5 * hh * k1.q, y.p + 0.5 * hh * k1.p}, mu, dV);
      const RKState k3 =
          rk_deriv({y.q + 0.5 * hh * k2.q, y.p + 0.5 * hh * k2.p}, mu, dV);
      const RKState k4 = rk_deriv({y.q + hh * k3.q, y.p + hh * k3.p}, mu, dV);
      return RKState{y.q + hh / 6.0 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q),
                     y.p + hh / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p)};
    };
    const RKState big = rk4(s, h);
    const RKState half = rk4(rk4(s, 0.5 * h), 0.5 * h);
    const double err = std::max(std::abs(big.q - half.q), std::abs(big.p - half.p));
    if (err < tol || h < 1e-12 * std::max(1.0, std::abs(t1))) {
      s = half;
      t += h;
      if (err < tol / 32.0) h *= 2.0;
    } else {
      h *= 0.5;
    }
    require(++guard < 2000000, "mc_classical_oracle: integrator step failure");
  }
}

struct MomentSums {
  // per-time-point accumulators of q, p and their squares
  std::vector<double> q, p, q2, p2;
  std::int64_t n = 0;

  explicit MomentSums(size_t nt)
      : q(nt, 0.0), p(nt, 0.0), q2(nt, 0.0), p2(nt, 0.0) {}
};

}  // namespace

MomentTrajectory mc_classical_oracle(const MEPacketParams& params,
                                     const QuadraticPotential& pot,
                                     const std::vector<double>& times,
                                     std::int64_t n_samples, std::uint64_t seed,
                                     const std::function<double(double)>* dV,
                                     bool parallel) {
  params.validate_classical();
  require(n_samples >= 1000, "mc_classical_oracle: need at least 10^3 samples");
  const size_t nt = times.size();
  const ClassicalMEPacket packet = classical_density(params);

  // coefficients reused by every sample in the quadratic path
  std::vector<EvolutionCoeffs> coeffs;
  coeffs.reserve(nt);
  for (double t : times) coeffs.push_back(evolution_coeffs(pot, t));

  constexpr std::int64_t kBlock = 4096;
  MomentSums total = block_reduce(
      n_samples, kBlock, MomentSums(nt),
      [&](std::int64_t block, std::int64_t lo, std::int64_t hi) {
        MomentSums part(nt);
        SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(block)));
        for (std::int64_t s = lo; s < hi; ++s) {
          double q0, p0;
          packet.sample(rng, q0, p0);
          if (dV == nullptr) {
            for (size_t k = 0; k < nt; ++k) {
              const EvolutionCoeffs& c = coeffs[k];
              const double q = c.f0 + q0 * c.f1 + p0 * c.f2;
              const double p = c.g0 + q0 * c.g1 + p0 * c.g2;
              part.q[k] += q;
              part.p[k] += p;
              part.q2[k] += q * q;
              part.p2[k] += p * p;
            }
          } else {
            RKState st{q0, p0};
            double tprev = 0.0;
            for (size_t k = 0; k < nt; ++k) {
              adaptive_rk(st, tprev, times[k], pot.mu, *dV, 1e-10);
              tprev = times[k];
              part.q[k] += st.q;
              part.p[k] += st.p;
              part.q2[k] += st.q * st.q;
              part.p2[k] += st.p * st.p;
            }
          }
        }
        part.n = hi - lo;
        return part;
      },
      [&](MomentSums& acc, const MomentSums& part) {
        for (size_t k = 0; k < nt; ++k) {
          acc.q[k] += part.q[k];
          acc.p[k] += part.p[k];
          acc.q2[k] += part.q2[k];
          acc.p2[k] += part.p2[k];
        }
        acc.n += part.n;
      },
      parallel);

  MomentTrajectory tr;
  tr.t = times;
  const double n = static_cast<double>(total.n);
  for (size_t k = 0; k < nt; ++k) {
    const double mq = total.q[k] / n;
    const double mp = total.p[k] / n;
    const double vq = std::max(total.q2[k] / n - mq * mq, 0.0);
    const double vp = std::max(total.p2[k] / n - mp * mp, 0.0);
    tr.Q.push_back(mq);
    tr.P.push_back(mp);
    tr.dQ.push_back(std::sqrt(vq));
    tr.dP.push_back(std::sqrt(vp));
    tr.seQ.push_back(std::sqrt(vq / n));
    tr.seP.push_back(std::sqrt(vp / n));
    // std-dev standard error, Gaussian asymptotics: sd / sqrt(2(n-1))
    tr.sedQ.push_back(std::sqrt(vq / (2.0 * (n - 1))));
    tr.sedP.push_back(std::sqrt(vp / (2.0 * (n - 1))));
  }
  return tr;
}

// --- Fock oracle --------------------------------------------------------------

namespace {

// Reference ladder basis adapted to the trajectory envelope: centered at the
// midpoint of the closed-form moment trajectory and scaled to the widest
// variances, so that spreading packets stay representable at modest cutoffs.
// The closed form enters sizing only; the computed moments come from the
// numerically exponentiated Hamiltonian.
struct AdaptedBasis {
  double cq, cp;    // phase-space center
  double x0, p0;    // ladder lengths, x0 p0 = hbar / 2
  int kept_levels;  // packet levels retained (geometric tail below 1e-11)
};

AdaptedBasis adapt_basis(const MEPacketParams& params,
                         const QuadraticPotential& pot,
                         const std::vector<double>& times) {
  std::vector<double> ts = times;
  ts.push_back(0.0);
  std::sort(ts.begin(), ts.end());
  const MomentTrajectory env = closed_form_trajectory(params, pot, ts);
  double qlo = env.Q[0], qhi = env.Q[0], plo = env.P[0], phi = env.P[0];
  double dq = 0, dp = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    qlo = std::min(qlo, env.Q[i]);
    qhi = std::max(qhi, env.Q[i]);
    plo = std::min(plo, env.P[i]);
    phi = std::max(phi, env.P[i]);
    dq = std::max(dq, env.dQ[i]);
    dp = std::max(dp, env.dP[i]);
  }
  AdaptedBasis b;
  b.cq = 0.5 * (qlo + qhi);
  b.cp = 0.5 * (plo + phi);
  const double ratio = dq / dp;
  b.x0 = std::sqrt(0.5 * params.hbar * ratio);
  b.p0 = std::sqrt(0.5 * params.hbar / ratio);
  b.kept_levels = adaptive_cutoff(params.nu(), 1e-11) + 2;
  return b;
}

int suggest_cutoff(const MEPacketParams& params, const AdaptedBasis& b,
                   const QuadraticPotential& pot,
                   const std::vector<double>& times) {
  std::vector<double> ts = times;
  ts.push_back(0.0);
  std::sort(ts.begin(), ts.end());
  const MomentTrajectory env = closed_form_trajectory(params, pot, ts);
  double occ = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    // occupation of the highest kept packet level under the flow, in the
    // adapted basis: (2m+1)/(4 nu) (dQ(t)^2/x0^2 + dP(t)^2/p0^2)
    const double level_occ =
        (2.0 * b.kept_levels + 1.0) / (4.0 * params.nu()) *
        (env.dQ[i] * env.dQ[i] / (b.x0 * b.x0) +
         env.dP[i] * env.dP[i] / (b.p0 * b.p0));
    const double dq_off = env.Q[i] - b.cq;
    const double dp_off = env.P[i] - b.cp;
    const double disp_occ = 0.25 * (dq_off * dq_off / (b.x0 * b.x0) +
                                    dp_off * dp_off / (b.p0 * b.p0));
    occ = std::max(occ, level_occ + disp_occ);
  }
  const int need = static_cast<int>(2.8 * occ) + 128;
  return 128 * ((need + 127) / 128);
}

MomentTrajectory fock_run(const MEPacketParams& params,
                          const QuadraticPotential& pot,
                          const std::vector<double>& times,
                          const AdaptedBasis& basis, int cutoff) {
  // ladder operators in the adapted basis
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int m = 1; m < cutoff; ++m) a(m - 1, m) = std::sqrt(double(m));
  const Matrix ad = a.adjoint();
  const Matrix id = Matrix::Identity(cutoff, cutoff);
  const Matrix q = basis.cq * id + basis.x0 * (a + ad);
  const Matrix p = basis.cp * id + cx(0, 1) * basis.p0 * (ad - a);

  // the packet state: weights R_m on the numerically diagonalized packet
  // oscillator K = (dP/dQ)(q-Q)^2/2 + (dQ/dP)(p-P)^2/2
  const Matrix dq_op = q - params.Q * id;
  const Matrix dp_op = p - params.P * id;
  const Matrix k_op = 0.5 * (params.dP / params.dQ) * dq_op * dq_op +
                      0.5 * (params.dQ / params.dP) * dp_op * dp_op;
  Eigen::SelfAdjointEigenSolver<Matrix> kes(0.5 * (k_op + k_op.adjoint()));

  const std::vector<double> r = me_weights(params.nu(), basis.kept_levels);
  double wsum = 0;
  for (double w : r) wsum += w;

  const Matrix h = p * p / (2.0 * pot.mu) + pot.V0 * id + pot.V1 * q +
                   0.5 * pot.V2 * q * q;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  const Matrix& vecs = es.eigenvectors();
  const RealVector& evals = es.eigenvalues();

  // packet eigenvectors expressed in the H eigenbasis, reused per time
  Matrix packet_in_h(cutoff, basis.kept_levels);
  for (int m = 0; m < basis.kept_levels; ++m)
    packet_in_h.col(m) = vecs.adjoint() * kes.eigenvectors().col(m);

  MomentTrajectory tr;
  tr.t = times;
  for (double t : times) {
    double mq = 0, mp = 0, mq2 = 0, mp2 = 0;
    for (int m = 0; m < basis.kept_levels; ++m) {
      Vector c = packet_in_h.col(m);
      for (int i = 0; i < cutoff; ++i)
        c(i) *= std::exp(cx(0, -evals(i) * t / params.hbar));
      const Vector w = vecs * c;
      const Vector qw = q * w;
      const Vector pw = p * w;
      const double rm = r[static_cast<size_t>(m)] / wsum;
      mq += rm * (w.dot(qw)).real();
      mp += rm * (w.dot(pw)).real();
      mq2 += rm * qw.squaredNorm();
      mp2 += rm * pw.squaredNorm();
    }
    tr.Q.push_back(mq);
    tr.P.push_back(mp);
    tr.dQ.push_back(std::sqrt(std::max(mq2 - mq * mq, 0.0)));
    tr.dP.push_back(std::sqrt(std::max(mp2 - mp * mp, 0.0)));
  }
  return tr;
}

}  // namespace

MomentTrajectory fock_quantum_oracle(const MEPacketParams& params,
                                     const QuadraticPotential& pot,
                                     const std::vector<double>& times,
                                     int cutoff, double conv_tol) {
  params.validate_quantum();
  require(pot.V2 >= 0.0,
          "fock_quantum_oracle: V2 < 0 unbounded below in a truncated basis");
  const AdaptedBasis basis = adapt_basis(params, pot, times);
  if (cutoff <= 0) cutoff = suggest_cutoff(params, basis, pot, times);
  cutoff = std::max(cutoff, 4 * basis.kept_levels + 64);

  // convergence monitored by doubling: the half-cutoff run must agree
  MomentTrajectory coarse = fock_run(params, pot, times, basis, cutoff / 2);
  for (int round = 0; round < 3; ++round) {
    const MomentTrajectory fine = fock_run(params, pot, times, basis, cutoff);
    double shift = 0;
    for (size_t k = 0; k < times.size(); ++k) {
      shift = std::max(shift, std::abs(fine.Q[k] - coarse.Q[k]));
      shift = std::max(shift, std::abs(fine.P[k] - coarse.P[k]));
      shift = std::max(shift, std::abs(fine.dQ[k] - coarse.dQ[k]));
      shift = std::max(shift, std::abs(fine.dP[k] - coarse.dP[k]));
    }
    if (shift < conv_tol) return fine;
    coarse = fine;
    cutoff *= 2;
  }
  throw numerical_error("fock_quantum_oracle: cutoff non-convergence");
}

void trajectory_to_csv(const MomentTrajectory& tr, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "trajectory_to_csv: cannot open " + path);
  const bool mc = !tr.seQ.empty();
  out << "t,Q,P,dQ,dP" << (mc ? ",seQ,seP,sedQ,sedP" : "") << "\n";
  out << std::scientific << std::setprecision(16);
  for (size_t k = 0; k < tr.t.size(); ++k) {
    out << tr.t[k] << "," << tr.Q[k] << "," << tr.P[k] << "," << tr.dQ[k] << ","
        << tr.dP[k];
    if (mc)
      out << "," << tr.seQ[k] << "," << tr.seP[k] << "," << tr.sedQ[k] << ","
          << tr.sedP[k];
    out << "\n";
  }
}

}  // namespace mepqlab
