// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
//
// Benchmark comparing the OpenMP kernels against their serial reference
// paths. The parallel results must be bitwise identical to the serial ones;
// any nonzero max |diff| is a bug.

#include <chrono>
#include <cstdio>

#include "mepqlab/chain.hpp"
#include "mepqlab/dynamics.hpp"
#include "mepqlab/jointqp.hpp"
#include "mepqlab/measurement.hpp"
#include "mepqlab/parallel.hpp"

using namespace mepqlab;

namespace {

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void report(const char* name, double t_serial, double t_parallel, double dev) {
  std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   max|diff| %g\n",
              name, t_serial, t_parallel, t_serial / t_parallel, dev);
}

}  // namespace

int main() {
  std::printf("workers: %d\n", worker_count());

  {  // Monte Carlo classical oracle
    MEPacketParams packet;
    packet.Q = 1.0;
    QuadraticPotential pot{0.0, 0.0, 1.0, 1.0};
    std::vector<double> times;
    for (int i = 0; i <= 64; ++i) times.push_back(4.0 * M_PI * i / 64.0);
    const std::int64_t n = 2000000;

    auto t0 = std::chrono::steady_clock::now();
    const MomentTrajectory serial =
        mc_classical_oracle(packet, pot, times, n, 7, nullptr, false);
    const double ts = seconds(t0);
    t0 = std::chrono::steady_clock::now();
    const MomentTrajectory par =
        mc_classical_oracle(packet, pot, times, n, 7, nullptr, true);
    const double tp = seconds(t0);

    double dev = 0;
    for (size_t i = 0; i < times.size(); ++i) {
      dev = std::max(dev, std::abs(serial.Q[i] - par.Q[i]));
      dev = std::max(dev, std::abs(serial.dP[i] - par.dP[i]));
    }
    report("mc_classical_oracle", ts, tp, dev);
  }

  {  // chain mode sums over the scaling sweep
    ChainParams base;
    std::vector<int> Ns;
    for (int n = 1 << 14; n <= (1 << 22); n *= 2) Ns.push_back(n);

    auto t0 = std::chrono::steady_clock::now();
    const auto serial = scaling_study(base, Ns, false);
    const double ts = seconds(t0);
    t0 = std::chrono::steady_clock::now();
    const auto par = scaling_study(base, Ns, true);
    const double tp = seconds(t0);

    double dev = 0;
    for (size_t i = 0; i < serial.size(); ++i)
      dev = std::max(dev, std::abs(serial[i].dL - par[i].dL));
    report("chain length statistics", ts, tp, dev);
  }

  {  // joint q-p cell sweep
    const int n = 256;
    const Grid1D grid(-8.0, 16.0 / n, n, 1.0);
    const AncillaPacket ancilla{1.0, grid};
    const GridWavefunction system = boost(shift(ancilla.wavefunction(), 1.5), -1.0);
    const CellGrid cells = CellGrid::uniform(-0.5, 3.5, 32, -1.0, 3.0, 32);

    auto t0 = std::chrono::steady_clock::now();
    const CellTable serial = cell_probabilities(system, ancilla, cells, false);
    const double ts = seconds(t0);
    t0 = std::chrono::steady_clock::now();
    const CellTable par = cell_probabilities(system, ancilla, cells, true);
    const double tp = seconds(t0);

    const double dev = (serial.p_exact - par.p_exact).cwiseAbs().maxCoeff();
    report("jointqp cell sweep", ts, tp, dev);
  }

  {  // trigger indistinguishability randomized sweep
    SplitMix64 rng(11);
    const TriggerModel model = TriggerModel::random(6, 2, 1, rng);
    Vector amp = model.eigvecs[0] * cx(0.6, 0.0) + model.eigvecs[1] * cx(0.0, 0.8);
    const Ket phi{HilbertSpace::single(model.d, "S"), amp};
    const TriggerStates ts_state = trigger_states(model, phi, true, false);

    auto t0 = std::chrono::steady_clock::now();
    const Prop23Report serial = prop23_check(model, ts_state, 400, 5, false);
    const double ts = seconds(t0);
    t0 = std::chrono::steady_clock::now();
    const Prop23Report par = prop23_check(model, ts_state, 400, 5, true);
    const double tp = seconds(t0);

    const double dev =
        std::abs(serial.max_commuting_dev - par.max_commuting_dev);
    report("prop23 randomized sweep", ts, tp, dev);
  }

  return 0;
}
