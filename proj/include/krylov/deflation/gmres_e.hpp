// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_DEFLATION_GMRES_E_HPP
#define KRYLOV_DEFLATION_GMRES_E_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "krylov/core/eig.hpp"
#include "krylov/solvers/lgmres.hpp"

namespace krylov
{

//
// Restart cycle augmented with approximate eigenvectors: after each cycle the m2 harmonic
// Ritz vectors of smallest |theta| with respect to range(Z_m) are appended as the trailing
// columns of the next cycle's Z_m. Complex pairs contribute their real and imaginary parts.
//
class GmresECycle : public AugmentedCycle<double>
{
public:
  GmresECycle(const LinearOperator<double> &A, const GmresOptions &opts, std::size_t m1,
              std::size_t m2);

  // Harmonic Ritz values selected after the most recent cycle.
  const std::vector<Complex> &selected_values() const { return selected_; }

protected:
  std::vector<AugmentVector<double>> augmentation() override { return next_; }
  void after_cycle(const Vector<double> &dx) override;

private:
  std::vector<AugmentVector<double>> next_;
  std::vector<Complex> selected_;
};

SolveReport gmres_e(const LinearOperator<double> &A, std::span<const double> b,
                    std::span<const double> x0, std::size_t m1, std::size_t m2,
                    const GmresOptions &opts);

}  // namespace krylov

#endif  // KRYLOV_DEFLATION_GMRES_E_HPP
