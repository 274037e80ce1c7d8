#include "mflab/genspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mflab/generators.hpp"

namespace mflab {

double AdmissibleSequence::admissibility_constant_log2() const {
    double worst = 0.0;
    for (int j = 0; j < jmax; ++j)
        worst = std::max(worst, std::abs(log2_sigma[j + 1] - log2_sigma[j]));
    return worst;
}

bool AdmissibleSequence::is_admissible(double log2_C) const {
    return admissibility_constant_log2() <= log2_C + 1e-9;
}

BoydIndices boyd_indices(const AdmissibleSequence& seq) {
    if (seq.jmax < 64)
        throw PreconditionError("boyd_indices requires jmax >= 64");
    if (int(seq.log2_sigma.size()) != seq.jmax + 1)
        throw PreconditionError("sequence length does not match jmax");
    const auto& L = seq.log2_sigma;
    const int jmax = seq.jmax;
    const int jlo = jmax / 4, jhi = jmax / 2;

    BoydIndices out;
    out.lower = std::numeric_limits<double>::infinity();
    out.upper = -std::numeric_limits<double>::infinity();
    for (int j = jlo; j <= jhi; ++j) {
        double under = std::numeric_limits<double>::infinity();
        double over = -std::numeric_limits<double>::infinity();
        for (int k = 0; k + j <= jmax; ++k) {
            double growth = L[k + j] - L[k];
            under = std::min(under, growth);
            over = std::max(over, growth);
        }
        out.under_profile.push_back(under / j);
        out.over_profile.push_back(over / j);
        // truncating the inf over k biases the underline ratios upward (and
        // the overline ratios downward), so the window extremes face the bias
        out.lower = std::min(out.lower, under / j);
        out.upper = std::max(out.upper, over / j);
    }
    return out;
}

AdmissibleSequence make_oscillating(double alpha, double beta, int jmax) {
    if (!(alpha > 0) || beta < alpha)
        throw PreconditionError("make_oscillating requires 0 < alpha <= beta");
    // Slope runs: one beta step, then 16-fold runs [16^i, 16^{i+1}) up to
    // jmax/8, then [jmax/8, 3 jmax/8) and [3 jmax/8, jmax], alternating.
    // The final two runs hand the Boyd window [jmax/4, jmax/2] pure windows
    // of both slopes; the 16-fold prefix makes log2(sigma_j)/j swing within
    // (beta-alpha)/16 of both exponents at small scales.
    std::vector<std::int64_t> bounds = {1};
    for (std::int64_t b = 16; b < jmax / 8; b *= 16) bounds.push_back(b);
    if (jmax >= 8 && jmax / 8 > bounds.back()) bounds.push_back(jmax / 8);
    if (3 * std::int64_t(jmax) / 8 > bounds.back())
        bounds.push_back(3 * std::int64_t(jmax) / 8);

    AdmissibleSequence seq;
    seq.jmax = jmax;
    seq.log2_sigma.resize(jmax + 1);
    seq.log2_sigma[0] = 0.0;
    std::size_t run = 0;
    for (int j = 0; j < jmax; ++j) {
        while (run < bounds.size() && j >= bounds[run]) ++run;
        double slope = (run % 2 == 0) ? beta : alpha;  // run 0 = [0,1) is beta
        seq.log2_sigma[j + 1] = seq.log2_sigma[j] + slope;
    }
    return seq;
}

double lambda_sigma_norm(const CoefficientField& field, const AdmissibleSequence& seq) {
    if (field.jmax > seq.jmax)
        throw PreconditionError("sequence shorter than the field");
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= field.jmax; ++j)
        for (ExpCode c : field.code[j])
            if (c != kZeroCode)
                best = std::max(best, seq.log2_sigma[j] - code_to_exp(c));
    if (best == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp2(best);
}

CoefficientField cn_project(const CoefficientField& field,
                            const AdmissibleSequence& seq, int N) {
    if (N < 0) throw PreconditionError("cn_project requires N >= 0");
    if (field.jmax > seq.jmax)
        throw PreconditionError("sequence shorter than the field");
    CoefficientField out = field;
    for (int j = 0; j <= field.jmax; ++j) {
        double Lj = seq.log2_sigma[j];
        for (auto& c : out.code[j]) {
            // t = log2(sigma_j 2^N |e|); e = 0 uses the small branch
            double t = c == kZeroCode
                           ? -std::numeric_limits<double>::infinity()
                           : Lj + N - code_to_exp(c);
            if (t < 1.0) {
                c = exp_to_code(Lj + N);  // sigma_j^-1 2^-N
            } else if (t < 52.0) {
                double v = std::exp2(t);
                // absorb the 16.16 quantization so near-integers round down
                // to themselves instead of the previous integer
                double m = std::floor(v * (1.0 + 2e-5) + 1e-9);
                c = exp_to_code(Lj + N - std::log2(m));
            }
            // t >= 52: the grid is finer than double resolution; keep e
        }
    }
    out.meta.params["cn_project_N"] = N;
    return out;
}

LeaderSuiteBound leadersuite_check(const CoefficientField& field,
                                   const AdmissibleSequence& seq) {
    if (field.jmax > seq.jmax)
        throw PreconditionError("sequence shorter than the field");
    LeaderSuiteBound b;
    double lo = 0.0, hi = 0.0;  // extremes of log2(sigma_j |c|)
    bool first = true;
    for (int j = 0; j <= field.jmax; ++j) {
        for (std::int64_t k = 0; k < (std::int64_t(1) << j); ++k) {
            ExpCode c = field.code[j][k];
            if (c == kZeroCode)
                throw PreconditionError("leadersuite_check: zero coefficient");
            double t = seq.log2_sigma[j] - code_to_exp(c);
            if (first || t < lo) {
                lo = t;
                b.j_low = j;
                b.k_low = k;
            }
            if (first || t > hi) {
                hi = t;
                b.j_high = j;
                b.k_high = k;
            }
            first = false;
        }
    }
    b.C = std::exp2(std::max(hi, -lo));
    return b;
}

}  // namespace mflab
