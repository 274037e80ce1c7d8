#pragma once

#include <vector>

#include "mflab/field.hpp"

namespace mflab {

// Admissible weight sequence sigma_j, kept in log2 form: sigma grows like
// 2^{+sj} while coefficients decay like 2^{-sj}, and raw sigma overflows
// double far before jmax = 2^14.
struct AdmissibleSequence {
    int jmax = 0;
    std::vector<double> log2_sigma;  // size jmax + 1

    double admissibility_constant_log2() const;  // log2 of the smallest valid C
    bool is_admissible(double log2_C) const;
};

struct BoydIndices {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> under_profile;  // log2(underline sigma_j) / j
    std::vector<double> over_profile;   // log2(overline sigma_j) / j
};

// Finite-jmax Boyd index estimates from the truncated ratio profiles
// underline sigma_j = min_k sigma_{j+k}/sigma_k (and max for overline),
// aggregated over j in [jmax/4, jmax/2]. Truncating the inf over k biases
// the underline profile up and the overline profile down, so the lower
// index takes the window minimum and the upper index the window maximum.
BoydIndices boyd_indices(const AdmissibleSequence& seq);

// Admissible sequence oscillating between the dyadic behaviors 2^{alpha j}
// and 2^{beta j}: slope runs [16^i, 16^{i+1}) alternate between alpha and
// beta after one initial beta step, so the profile log2(sigma_j)/j swings
// within (beta-alpha)/16 of both exponents at observable scales and the
// Boyd indices are attained exactly at jmax = 2^14.
AdmissibleSequence make_oscillating(double alpha, double beta, int jmax);

// sup_j sup_k sigma_j |c_{j,k}|.
double lambda_sigma_norm(const CoefficientField& field, const AdmissibleSequence& seq);

// Projection onto C_N = { sigma_j 2^N |c| integer >= 1 }:
// c = sigma_j^{-1} 2^{-N} max(1, floor(sigma_j 2^N e)) per entry, moving
// each coefficient by at most 2^{-N} in sigma-weighted distance.
CoefficientField cn_project(const CoefficientField& field,
                            const AdmissibleSequence& seq, int N);

struct LeaderSuiteBound {
    double C = 1.0;          // smallest C with C^-1 <= sigma_j |c| <= C
    int j_low = 0;           // witnesses
    std::int64_t k_low = 0;
    int j_high = 0;
    std::int64_t k_high = 0;
};

// Two-sided bound check; throws PreconditionError on zero coefficients.
LeaderSuiteBound leadersuite_check(const CoefficientField& field,
                                   const AdmissibleSequence& seq);

}  // namespace mflab
