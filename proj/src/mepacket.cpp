// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

#include "mepqlab/mepacket.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mepqlab {

void MEPacketParams::validate_classical() const {
  require(dQ > 0 && dP > 0, "MEPacketParams: variances must be positive");
  require(hbar > 0 && v > 0, "MEPacketParams: hbar and v must be positive");
}

void MEPacketParams::validate_quantum() const {
  validate_classical();
  require(nu() >= 1.0, "MEPacketParams: quantum packet needs nu >= 1");
}

MEPacketParams params_from_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "params_from_file: cannot open " + path);
  std::map<std::string, double> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(val);
    if (!key.empty()) kv[key] = std::stod(val);
  }
  MEPacketParams p;
  if (kv.count("Q")) p.Q = kv["Q"];
  if (kv.count("P")) p.P = kv["P"];
  require(kv.count("dQ") && kv.count("dP"), "params_from_file: dQ and dP required");
  p.dQ = kv["dQ"];
  p.dP = kv["dP"];
  if (kv.count("hbar")) p.hbar = kv["hbar"];
  if (kv.count("v")) p.v = kv["v"];
  p.validate_classical();
  return p;
}

void params_to_file(const MEPacketParams& p, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "params_to_file: cannot open " + path);
  out.precision(17);
  out << "Q = " << p.Q << "\nP = " << p.P << "\ndQ = " << p.dQ
      << "\ndP = " << p.dP << "\nhbar = " << p.hbar << "\nv = " << p.v << "\n";
}

double ClassicalMEPacket::density(double q, double p) const {
  const auto& pr = params;
  const double eq = (q - pr.Q) / pr.dQ;
  const double ep = (p - pr.P) / pr.dP;
  return pr.v / (2.0 * M_PI * pr.dQ * pr.dP) *
         std::exp(-0.5 * eq * eq - 0.5 * ep * ep);
}

double ClassicalMEPacket::entropy() const {
  return 1.0 + std::log(2.0 * M_PI * params.dQ * params.dP / params.v);
}

void ClassicalMEPacket::sample(SplitMix64& rng, double& q, double& p) const {
  q = params.Q + params.dQ * rng.next_normal();
  p = params.P + params.dP * rng.next_normal();
}

ClassicalMEPacket classical_density(const MEPacketParams& params) {
  params.validate_classical();
  return ClassicalMEPacket{params};
}

double classical_partition(double l1, double l2, double l3, double l4, double v) {
  require(l3 > 0 && l4 > 0, "classical_partition: l3 and l4 must be positive");
  return M_PI / v / std::sqrt(l3 * l4) *
         std::exp(l1 * l1 / (4 * l3) + l2 * l2 / (4 * l4));
}

double quantum_partition(double l1, double l2, double l3, double l4, double hbar) {
  require(l3 > 0 && l4 > 0, "quantum_partition: l3 and l4 must be positive");
  return std::exp(l1 * l1 / (4 * l3) + l2 * l2 / (4 * l4)) /
         (2.0 * std::sinh(hbar * std::sqrt(l3 * l4)));
}

std::vector<double> me_weights(double nu, int cutoff) {
  require(nu >= 1.0, "me_weights: nu must be >= 1");
  std::vector<double> r(static_cast<size_t>(cutoff));
  if (nu == 1.0) {
    r[0] = 1.0;
    return r;
  }
  const double ratio = (nu - 1.0) / (nu + 1.0);
  double w = 2.0 / (nu + 1.0);
  for (int m = 0; m < cutoff; ++m) {
    r[static_cast<size_t>(m)] = w;
    w *= ratio;
  }
  return r;
}

int adaptive_cutoff(double nu, double tail_tol) {
  if (nu <= 1.0) return 1;
  const double ratio = (nu - 1.0) / (nu + 1.0);
  // smallest M with ratio^(M+1) < tail_tol
  const int m = static_cast<int>(std::ceil(std::log(tail_tol) / std::log(ratio)));
  return std::max(m, 1);
}

FockRep fock_rep(const MEPacketParams& params, int cutoff) {
  params.validate_quantum();
  require(cutoff >= 2, "fock_rep: cutoff too small");
  // K = (dP/dQ)(q-Q)^2/2 + (dQ/dP)(p-P)^2/2 is an oscillator with mass
  // dP/dQ and unit frequency; ladder lengths
  const double x0 = std::sqrt(params.hbar * params.dQ / (2.0 * params.dP));
  const double p0 = std::sqrt(params.hbar * params.dP / (2.0 * params.dQ));
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int m = 1; m < cutoff; ++m) a(m - 1, m) = std::sqrt(double(m));
  const Matrix ad = a.adjoint();
  Matrix q = params.Q * Matrix::Identity(cutoff, cutoff) + x0 * (a + ad);
  Matrix p = params.P * Matrix::Identity(cutoff, cutoff) + cx(0, 1) * p0 * (ad - a);
  return {params, cutoff, q, p};
}

static Matrix hermite_functions(const Grid1D& grid, const MEPacketParams& params,
                                int cutoff) {
  // columns: oscillator eigenfunctions of K in l2 grid convention,
  // computed by the normalized three-term recurrence
  const double scale = std::sqrt(params.dP / (params.hbar * params.dQ));
  Matrix h(grid.n, cutoff);
  for (int i = 0; i < grid.n; ++i) {
    const double u = scale * (grid.x(i) - params.Q);
    const double h0 = std::pow(scale * scale / M_PI, 0.25) *
                      std::exp(-0.5 * u * u);
    double hm1 = 0.0, hm = h0;
    for (int m = 0; m < cutoff; ++m) {
      h(i, m) = hm;
      const double hnext = u * std::sqrt(2.0 / (m + 1)) * hm -
                           std::sqrt(double(m) / (m + 1)) * hm1;
      hm1 = hm;
      hm = hnext;
    }
  }
  // momentum phase exp(i P x / hbar)
  Matrix out(grid.n, cutoff);
  for (int i = 0; i < grid.n; ++i) {
    const cx phase = std::exp(cx(0, params.P * grid.x(i) / params.hbar));
    for (int m = 0; m < cutoff; ++m) out(i, m) = phase * h(i, m);
  }
  return std::sqrt(grid.dx) * out;  // l2 columns
}

StateOperator quantum_state(const MEPacketParams& params, Representation rep,
                            int cutoff, const Grid1D* grid, double tail_tol) {
  params.validate_quantum();
  if (cutoff <= 0) cutoff = adaptive_cutoff(params.nu(), tail_tol);
  const std::vector<double> r = me_weights(params.nu(), cutoff);
  double tail = 1.0;
  for (double w : r) tail -= w;
  require(tail < tail_tol * 10 + 1e-15,
          "quantum_state: cutoff too small for requested tail tolerance");

  if (rep == Representation::fock) {
    HilbertSpace space = HilbertSpace::single(cutoff, "fock");
    Matrix t = Matrix::Zero(cutoff, cutoff);
    for (int m = 0; m < cutoff; ++m) t(m, m) = r[static_cast<size_t>(m)];
    t /= t.real().trace();  // renormalize the clipped tail
    return make_state(LinOp{space, t});
  }

  require(grid != nullptr, "quantum_state: grid representation needs a grid");
  const Matrix h = hermite_functions(*grid, params, cutoff);
  Matrix t = Matrix::Zero(grid->n, grid->n);
  for (int m = 0; m < cutoff; ++m)
    t += r[static_cast<size_t>(m)] * h.col(m) * h.col(m).adjoint();
  t /= t.real().trace();
  return make_state(LinOp{grid->space(), t});
}

GridWavefunction ground_wavefunction(const MEPacketParams& params, const Grid1D& grid) {
  params.validate_quantum();
  const Matrix h = hermite_functions(grid, params, 1);
  GridWavefunction psi{grid, h.col(0) / std::sqrt(grid.dx)};
  return psi.normalized();
}

std::vector<ClassicalLimitRow> classical_limit_report(const std::vector<double>& nus) {
  std::vector<ClassicalLimitRow> rows;
  for (double nu : nus) {
    require(nu > 1.0, "classical_limit_report: nu must be > 1");
    const double x = 0.5 * std::log((nu + 1.0) / (nu - 1.0));
    rows.push_back({nu, x, std::sinh(x) / x - 1.0});
  }
  return rows;
}

}  // namespace mepqlab
