// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include "mepqlab/chain.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "mepqlab/parallel.hpp"

namespace mepqlab {

void ChainParams::validate() const {
  require(N >= 2, "ChainParams: N must be >= 2");
  require(mu > 0 && kappa > 0 && xi > 0 && hbar > 0,
          "ChainParams: parameters must be positive");
  require(lambda > 0, "ChainParams: lambda must be positive");
}

ModeTransform mode_matrix(int N) {
  require(N >= 2, "mode_matrix: N must be >= 2");
  RealMatrix Y(N, N);
  for (int m = 0; m < N; ++m) {
    const double A = (m == 0) ? 1.0 / std::sqrt(double(N))
                              : std::sqrt(2.0 / double(N));
    for (int n = 1; n <= N; ++n) {
      const double arg = M_PI * m / double(N) * (n - 0.5 * (N + 1));
      Y(m, n - 1) = A * ((m % 2 == 0) ? std::cos(arg) : std::sin(arg));
    }
  }
  return {Y};
}

std::vector<double> mode_frequencies(int N, double kappa, double mu) {
  require(N >= 2 && kappa > 0 && mu > 0, "mode_frequencies: bad parameters");
  std::vector<double> w(static_cast<size_t>(N));
  for (int m = 0; m < N; ++m)
    w[static_cast<size_t>(m)] =
        2.0 * kappa / std::sqrt(mu) * std::sin(0.5 * M_PI * m / double(N));
  return w;
}

ChainReport length_statistics(const ChainParams& params, bool parallel) {
  params.validate();
  const int N = params.N;
  const double L_avg = (N - 1) * params.xi;

  // only odd modes 2m-1 contribute to L; per-mode thermal occupation gives
  // <u^2> = hbar/(2 mu w) coth(lambda hbar w / 2)
  const std::int64_t n_terms = N / 2;
  constexpr std::int64_t kBlock = 1024;
  const double dl2 = block_reduce(
      n_terms, kBlock, 0.0,
      [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
        double acc = 0;
        for (std::int64_t i = lo; i < hi; ++i) {
          const double m = static_cast<double>(i + 1);
          const double theta = (2.0 * m - 1.0) * M_PI / (2.0 * N);
          const double w = 2.0 * params.kappa / std::sqrt(params.mu) * std::sin(theta);
          const double u2 = params.hbar / (2.0 * params.mu * w) /
                            std::tanh(0.5 * params.lambda * params.hbar * w);
          const double c = std::cos(theta);
          acc += c * c * u2;
        }
        return acc;
      },
      [](double& acc, double part) { acc += part; },
      parallel) * 8.0 / N;

  ChainReport rep;
  rep.omega = mode_frequencies(N, params.kappa, params.mu);
  rep.L_avg = L_avg;
  rep.dL = std::sqrt(dl2);
  rep.ratio = rep.dL / L_avg;
  rep.asymptote = 2.0 * std::sqrt(3.0) /
                  (M_PI * params.kappa * params.xi * std::sqrt(params.lambda)) /
                  std::sqrt(double(N));
  rep.rel_err = std::abs(rep.ratio - rep.asymptote) / rep.asymptote;
  return rep;
}

double internal_energy(const ChainParams& params) {
  params.validate();
  const auto w = mode_frequencies(params.N, params.kappa, params.mu);
  double e = 0;
  for (int m = 1; m < params.N; ++m) {
    const double hw = params.hbar * w[static_cast<size_t>(m)];
    e += hw / std::expm1(params.lambda * hw);
  }
  return e;
}

double energy_relative_spread(const ChainParams& params) {
  const auto w = mode_frequencies(params.N, params.kappa, params.mu);
  double e = 0, var = 0;
  for (int m = 1; m < params.N; ++m) {
    const double hw = params.hbar * w[static_cast<size_t>(m)];
    const double nbar = 1.0 / std::expm1(params.lambda * hw);
    e += hw * nbar;
    var += hw * hw * nbar * (nbar + 1.0);  // Bose number variance
  }
  return std::sqrt(var) / e;
}

double solve_lambda(const ChainParams& base, double e_target, double rel_tol) {
  require(e_target > 0, "solve_lambda: target energy must be positive");
  ChainParams p = base;
  auto energy_at = [&](double lambda) {
    p.lambda = lambda;
    return internal_energy(p);
  };
  // energy is monotone decreasing in lambda
  double lo = 1.0, hi = 1.0;
  while (energy_at(lo) < e_target) {
    lo *= 0.5;
    require(lo > 1e-300, "solve_lambda: target energy too large");
  }
  while (energy_at(hi) > e_target) {
    hi *= 2.0;
    require(hi < 1e300, "solve_lambda: target energy too small");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);  // geometric bisection
    if (energy_at(mid) > e_target)
      lo = mid;
    else
      hi = mid;
    if (hi / lo - 1.0 < rel_tol) break;
  }
  return std::sqrt(lo * hi);
}

std::vector<ScalingRow> scaling_study(const ChainParams& base,
                                      const std::vector<int>& Ns,
                                      bool parallel) {
  std::vector<ScalingRow> rows;
  for (int n : Ns) {
    ChainParams p = base;
    p.N = n;
    const ChainReport rep = length_statistics(p, parallel);
    rows.push_back({n, rep.L_avg, rep.dL, rep.ratio, rep.asymptote, rep.rel_err});
  }
  return rows;
}

double scaling_slope(const std::vector<ScalingRow>& rows) {
  require(rows.size() >= 2, "scaling_slope: need at least 2 rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(double(r.N));
    const double y = std::log(r.ratio);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void scaling_to_csv(const std::vector<ScalingRow>& rows, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "scaling_to_csv: cannot open " + path);
  out << "N,L_avg,dL,ratio,asymptote,rel_err\n";
  out << std::scientific << std::setprecision(16);
  for (const auto& r : rows)
    out << r.N << "," << r.L_avg << "," << r.dL << "," << r.ratio << ","
        << r.asymptote << "," << r.rel_err << "\n";
}

}  // namespace mepqlab
