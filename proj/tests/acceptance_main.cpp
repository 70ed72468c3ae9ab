// This file is part of mep-qlab.
//
// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license in the LICENSE file in the root directory
// of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
//
// Acceptance suite: one criterion per invocation (1..11), or `all`.
// Prints one pass/fail line per criterion check and exits nonzero on any
// failure.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "mepqlab/experiments.hpp"
#include "mepqlab/grid.hpp"
#include "mepqlab/hilbert.hpp"
#include "mepqlab/povm.hpp"
#include "support/oracles.hpp"

using namespace mepqlab;

namespace {

int g_failures = 0;

void line(const std::string& id, const std::string& desc, double value,
          double threshold, bool pass) {
  std::printf("[%s] criterion %s: %s (value %.6g, threshold %.6g)\n",
              pass ? "PASS" : "FAIL", id.c_str(), desc.c_str(), value, threshold);
  if (!pass) ++g_failures;
}

void report_summary(const ExperimentSummary& sum) {
  for (const auto& c : sum.criteria)
    line(c.id, c.description, c.value, c.threshold, c.pass);
}

std::string outdir(const std::string& tag) {
  const auto dir =
      std::filesystem::temp_directory_path() / ("mepqlab_acceptance_" + tag);
  std::filesystem::create_directories(dir);
  return dir.string();
}

const Config kEmpty = Config::parse_string("");

void criterion_1_2() {
  report_summary(run_experiment("mepacket-evolve", kEmpty, outdir("c12"), 20250809));
}

void criterion_3() {
  report_summary(run_experiment("chain-scaling", kEmpty, outdir("c3"), std::nullopt));
  // mode-sum thermal factor certified by the N = 4 Fock-basis Gibbs oracle
  ChainParams p4;
  p4.N = 4;
  const double brute = oracles::chain_dl2_fock_gibbs(p4, 40);
  const ChainReport rep = length_statistics(p4);
  const double dev = std::abs(rep.dL * rep.dL - brute);
  line("AC3", "N=4 mode-sum dL^2 vs brute-force Gibbs oracle", dev, 1e-8,
       dev < 1e-8);
}

void criterion_4() {
  report_summary(run_experiment("entanglement-demo", kEmpty, outdir("c4"), std::nullopt));
}

void criterion_5() {
  report_summary(run_experiment("bcl-report", kEmpty, outdir("c5"), 20250809));
}

void criterion_6_7() {
  report_summary(run_experiment("trigger-report", kEmpty, outdir("c67"), 20250809));
}

void criterion_8() {
  report_summary(run_experiment("locality-check", kEmpty, outdir("c8"), std::nullopt));
}

void criterion_9() {
  report_summary(run_experiment("jointqp-convergence", kEmpty, outdir("c9"), std::nullopt));
}

void criterion_10() {
  report_summary(run_experiment("classical-limit-table", kEmpty, outdir("c10"),
                                std::nullopt));
}

// property suites, each over >= 100 randomized instances
void criterion_11() {
  SplitMix64 rng(20250809);

  {  // subadditivity of von Neumann entropy
    const HilbertSpace hab({3, 3}, {"A", "B"});
    double worst = -1e9;
    for (int i = 0; i < 100; ++i) {
      const StateOperator w = random_state(hab, rng);
      const double gap = von_neumann_entropy(w) -
                         von_neumann_entropy(partial_trace(w, {0})) -
                         von_neumann_entropy(partial_trace(w, {1}));
      worst = std::max(worst, gap);
    }
    line("AC11", "subadditivity S(W) <= S1 + S2 over 100 states", worst, 1e-9,
         worst <= 1e-9);
  }

  {  // uncertainty relation sweep
    const HilbertSpace h4 = HilbertSpace::single(4, "S");
    double worst = -1e9;
    int holds = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
      const UncertaintyReport r = uncertainty_check(
          random_hermitian(h4, rng), random_hermitian(h4, rng),
          random_state(h4, rng));
      if (r.holds) ++holds;
      worst = std::max(worst, r.rhs - r.lhs);
    }
    line("AC11", "uncertainty relation holds on 1000 random instances",
         trials - holds, 0, holds == trials);
  }

  {  // sigma-additivity of POVM probabilities
    const HilbertSpace h4 = HilbertSpace::single(4, "S");
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const DiscretePOVM povm = sharp_povm(random_hermitian(h4, rng));
      const StateOperator t = random_state(h4, rng);
      double total = 0;
      for (int k = 0; k < povm.n_outcomes(); ++k)
        total += probability(povm, t, k);
      std::vector<int> all(povm.n_outcomes());
      for (int k = 0; k < povm.n_outcomes(); ++k) all[static_cast<size_t>(k)] = k;
      worst = std::max(worst, std::abs(total - probability(povm, t, all)));
      worst = std::max(worst, std::abs(total - 1.0));
    }
    line("AC11", "sigma-additivity and normalization over 100 POVMs", worst,
         1e-12, worst < 1e-12);
  }

  {  // symmetrizer idempotence across dimensions and factor counts
    double worst = 0;
    int count = 0;
    for (int d = 2; d <= 4; ++d)
      for (int nf = 2; nf <= 3; ++nf)
        for (int rep = 0; rep < 20; ++rep) {
          std::vector<int> dims(static_cast<size_t>(nf), d);
          std::vector<std::string> labels;
          for (int f = 0; f < nf; ++f) labels.push_back("f" + std::to_string(f));
          const HilbertSpace hs(dims, labels);
          for (SymKind kind : {SymKind::symmetric, SymKind::antisymmetric}) {
            const LinOp p = symmetrizer(hs, kind);
            worst = std::max(worst,
                             (p.mat * p.mat - p.mat).cwiseAbs().maxCoeff());
            worst = std::max(worst,
                             (p.mat - p.mat.adjoint()).cwiseAbs().maxCoeff());
            ++count;
          }
        }
    line("AC11",
         "symmetrizer idempotence and hermiticity (" + std::to_string(count) +
             " instances)",
         worst, 1e-12, worst < 1e-12);
  }

  {  // gemenge evolution commutes with mixing
    const HilbertSpace h3 = HilbertSpace::single(3, "S");
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const StateOperator a = random_state(h3, rng);
      const StateOperator b = random_state(h3, rng);
      const double w = rng.next_double();
      const StateOperator g = make_gemenge({{w, a}, {1.0 - w, b}});
      const LinOp u{h3, random_unitary(3, rng)};
      const StateOperator evolved = evolve(g, u);
      Matrix recomb = Matrix::Zero(3, 3);
      for (const auto& c : evolved.gemenge) recomb += c.weight * c.op.mat;
      worst = std::max(worst,
                       (recomb - evolved.op.mat).cwiseAbs().maxCoeff());
      worst = std::max(
          worst, (evolved.op.mat - u.mat * g.op.mat * u.mat.adjoint())
                     .cwiseAbs().maxCoeff());
    }
    line("AC11", "gemenge evolution commutes with mixing over 100 instances",
         worst, 1e-12, worst < 1e-12);
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = (argc > 1) ? argv[1] : "all";
  try {
    if (which == "1" || which == "2" || which == "all") criterion_1_2();
    if (which == "3" || which == "all") criterion_3();
    if (which == "4" || which == "all") criterion_4();
    if (which == "5" || which == "all") criterion_5();
    if (which == "6" || which == "7" || which == "all") criterion_6_7();
    if (which == "8" || which == "all") criterion_8();
    if (which == "9" || which == "all") criterion_9();
    if (which == "10" || which == "all") criterion_10();
    if (which == "11" || which == "all") criterion_11();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: exception: %s\n", e.what());
    return 3;
  }
  if (g_failures > 0) {
    std::printf("%d check(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all checks passed\n");
  return 0;
}
