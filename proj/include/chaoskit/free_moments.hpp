#pragma once

// Moments of free homogeneous sums Q_Y(f) = sum over ordered tuples of
// f(i_1..i_d) Y_{i_1} ... Y_{i_d} for freely independent, identically
// distributed Y_i.

#include <cstdint>
#include <span>
#include <vector>

#include "chaoskit/classical_moments.hpp"
#include "chaoskit/distributions.hpp"
#include "chaoskit/kernels.hpp"

namespace chaoskit {

/// phi(Y_{w_1} ... Y_{w_k}) = sum over pi in NC(k), pi <= ker(w), of
/// prod_B kappa_|B|. Letters are arbitrary ints; k <= 12. `nodes`, if given,
/// receives the number of search nodes visited.
Surd free_joint_moment(std::span<const int> word, const FreeDist& law, std::uint64_t* nodes = nullptr);

/// phi(Q^m), summing phi over every index word of m ordered kernel tuples.
/// Words sharing an index pattern are evaluated once.
MomentResult free_sum_moment(const Kernel& k, const FreeDist& law, int m, unsigned workers = 1);

/// phi(Q(f_{s_1}) ... Q(f_{s_K})) for one kernel per slot.
MomentResult free_mixed_moment(std::span<const Kernel* const> slots, const FreeDist& law, unsigned workers = 1);

/// Semicircular fast path: sum over non-crossing pairings of [dm] without a
/// pair inside one tuple, then over the index words consistent with each.
MomentResult semicircular_sum_moment(const Kernel& k, int m, unsigned workers = 1);

/// Coefficients of phi_q(X^m) as a polynomial in q (empty tail trimmed);
/// odd m gives {0}. m <= 16.
std::vector<Integer> qgauss_polynomial(int m);
Rational qgauss_moment(int m, const Rational& q);

/// phi(T^m) for T = (S1 S2 + S2 S1)/sqrt(2), from the 2^m words; m <= 6.
Rational tetilla_moment(int m);

/// phi(S_{w_1} ... S_{w_k}) for a semicircular system with covariance C.
Number semicircular_wick_joint(std::span<const int> word, const std::vector<std::vector<Number>>& C);

}  // namespace chaoskit
