#pragma once

// Free cumulants of the measure generated by (a, k, eta) and the
// moment-cumulant recursion over non-crossing partitions.

#include <vector>

#include "fsd/levy.hpp"

namespace fsd {

// kappa[i] = cumulant of order i+1:
//   kappa_1 = eta + integral of sign(t) k(t) over |t| > 1,
//   kappa_2 = a + integral of |t| k(t),
//   kappa_m = integral of t^(m-1) sign(t) k(t)   (m >= 3).
// order must lie in [1, 12]; a non-integrable tail throws NumericalError
// naming the offending order. tol is the absolute quadrature/truncation
// target (a relative guard of 1e-8 applies to large cumulants).
std::vector<double> cumulants_from_k(const FreeTriplet& triplet, int order,
                                     double tol = 1e-10);

// moments[n] = n-th moment from kappa_1..kappa_n by
//   m_n = sum_s kappa_s C_s(n - s),  C_1(r) = m_r,
//   C_s(r) = sum_j m_j C_{s-1}(r - j);
// moments[0] = 1. Requires kappa.size() >= order.
std::vector<double> moments_from_cumulants(const std::vector<double>& kappa,
                                           int order);

}  // namespace fsd
