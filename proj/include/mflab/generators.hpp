#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "mflab/dyadic.hpp"
#include "mflab/field.hpp"

namespace mflab {

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// c_{j,k} = 2^{-alpha j} for k < floor(2^{eta j}), else 2^{-beta j}.
CoefficientField gen_two_exponent(double alpha, double beta, double eta, int jmax);

// Three-block variant; C in (1, 2^{1-eta}) keeps the field hierarchical.
CoefficientField gen_three_exponent(double alpha, double beta, double gamma,
                                    double eta, double C, int jmax);

// 2^{-alpha j} on cells contained in stage floor(j/2) of the asymmetric
// quarter Cantor set, 2^{-beta j} elsewhere.
CoefficientField gen_asymmetric_cantor(double alpha, double beta, int jmax);

// Slowly oscillating scales: 2^{-alpha j} when j = m^n (m = beta/alpha
// integer >= 2), else 2^{-beta j}. The optional variant further splits the
// m^n scales by a Cantor set: alpha on cells meeting it, gammaOff elsewhere.
struct SlowOscVariant {
    double gamma_off;
    CantorSpec cantor;
};
CoefficientField gen_slow_oscillation(double alpha, double beta, int jmax,
                                      const std::optional<SlowOscVariant>& variant = {});

// Lacunary wavelet series on C(r): 2^{-alpha j} xi_{j,k} on Gamma_j,
// xi ~ Bernoulli(2^{(eta-gamma)j}) keyed by (seed, j, k).
CoefficientField gen_lws_cantor(std::int64_t r_num, std::int64_t r_den,
                                double alpha, double eta,
                                std::uint64_t seed, int jmax);

// Duplicated lacunary series on C(1/4) with stages floor(j/4) and
// Bernoulli parameter 2^{(eta-3/4)j}; requires eta in (0, 3/4).
CoefficientField gen_duplicated_lws(double alpha, double eta,
                                    std::uint64_t seed, int jmax);

// Coefficient duplication: every cell of the output copies the wavelet
// leader of `src` at (floor(j/m), ktilde). `withLeaders=false` copies the
// plain subtree sup of the source coefficients instead.
CoefficientField gen_duplicate(const CoefficientField& src, double m,
                               int target_jmax, bool with_leaders = true);

// Replace zero coefficients by 2^{-gamma j}; gamma must exceed the
// construction's maximal finite regularity.
CoefficientField background_fill(const CoefficientField& field, double gamma);

// Largest finite leader exponent the construction can produce (closed form
// where known, observed otherwise). Used to validate background_fill.
double max_regularity_oracle(const CoefficientField& field);

int coarse_scale(int j, double m);  // floor(j/m) with exact integer handling

}  // namespace mflab
