#include "mflab/leaders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mflab/spectra.hpp"

namespace mflab {

std::vector<std::vector<ExpCode>> subtree_sups(const CoefficientField& field) {
    std::vector<std::vector<ExpCode>> sup(field.code);
    for (int j = field.jmax - 1; j >= 0; --j) {
        auto& row = sup[j];
        const auto& child = sup[j + 1];
        for (std::size_t k = 0; k < row.size(); ++k)
            row[k] = std::min({row[k], child[2 * k], child[2 * k + 1]});
    }
    return sup;
}

LeaderField compute_leaders(const CoefficientField& field) {
    auto sup = subtree_sups(field);
    LeaderField lf;
    lf.jmax = field.jmax;
    lf.code.resize(field.jmax + 1);
    for (int j = 0; j <= field.jmax; ++j) {
        const auto& s = sup[j];
        auto& d = lf.code[j];
        d.resize(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) {
            ExpCode v = s[k];
            if (k > 0) v = std::min(v, s[k - 1]);
            if (k + 1 < s.size()) v = std::min(v, s[k + 1]);
            d[k] = v;
        }
    }
    // the sup over scales > jmax is missing everywhere; the top tenth of the
    // scales is where it bites
    int margin = (field.jmax + 9) / 10;
    lf.truncation_bias.assign(field.jmax + 1, false);
    for (int j = std::max(0, field.jmax - margin + 1); j <= field.jmax; ++j)
        lf.truncation_bias[j] = true;
    return lf;
}

std::vector<double> leader_sequence_at(double x, const LeaderField& lf) {
    if (x < 0.0 || x >= 1.0) throw std::invalid_argument("x must lie in [0,1)");
    std::vector<double> out(lf.jmax + 1);
    for (int j = 0; j <= lf.jmax; ++j) {
        auto k = std::int64_t(std::floor(x * std::exp2(j)));
        out[j] = lf.value(j, k);
    }
    return out;
}

HolderEstimate holder_estimate(double x, const LeaderField& lf, int j1, int j2) {
    if (j1 < 1 || j2 > lf.jmax || j1 > j2)
        throw std::invalid_argument("holder_estimate: bad scale window");
    HolderEstimate est;
    est.hhat = std::numeric_limits<double>::infinity();
    std::vector<double> xs, ys;
    for (int j = j1; j <= j2; ++j) {
        auto k = std::int64_t(std::floor(x * std::exp2(j)));
        ExpCode c = lf.code[j][k];
        if (c == kZeroCode) {
            ++est.zero_leaders;
            continue;
        }
        double e = code_to_exp(c) / j;
        est.hhat = std::min(est.hhat, e);
        xs.push_back(j);
        ys.push_back(code_to_exp(c));
    }
    est.all_zero = xs.empty();
    est.slope = xs.size() >= 2 ? regression_slope(xs, ys)
                               : (est.all_zero ? std::numeric_limits<double>::infinity()
                                               : est.hhat);
    return est;
}

}  // namespace mflab
