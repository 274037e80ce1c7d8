#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mflab {

// Coefficient magnitudes are exact powers 2^{-e} in every construction, so
// fields store e in fixed point: code = round(e * 2^16). A zero coefficient
// is the sentinel kZeroCode; it compares larger than any finite exponent,
// which makes sup-propagation a plain integer min.
using ExpCode = std::int32_t;
inline constexpr ExpCode kZeroCode = std::numeric_limits<ExpCode>::max();
inline constexpr double kCodeScale = 65536.0;

inline ExpCode exp_to_code(double neglog2) {
    return static_cast<ExpCode>(std::llround(neglog2 * kCodeScale));
}
inline double code_to_exp(ExpCode c) { return double(c) / kCodeScale; }

struct FieldMeta {
    std::string construction;
    std::map<std::string, double> params;
    std::optional<std::uint64_t> seed;
};

// All |c_{j,k}| for j <= jmax, dense per scale.
struct CoefficientField {
    int jmax = 0;
    std::vector<std::vector<ExpCode>> code;  // code[j].size() == 2^j
    FieldMeta meta;

    static CoefficientField zeros(int jmax);
    double value(int j, std::int64_t k) const;
    std::size_t cell_count() const;
};

// Wavelet leaders d_{j,k} plus the scales where the truncated sup window
// is likely to understate them.
struct LeaderField {
    int jmax = 0;
    std::vector<std::vector<ExpCode>> code;
    std::vector<bool> truncation_bias;  // per scale

    double value(int j, std::int64_t k) const;
};

inline double code_to_value(ExpCode c) {
    return c == kZeroCode ? 0.0 : std::exp2(-code_to_exp(c));
}
inline double CoefficientField::value(int j, std::int64_t k) const {
    return code_to_value(code[j][k]);
}
inline double LeaderField::value(int j, std::int64_t k) const {
    return code_to_value(code[j][k]);
}

}  // namespace mflab
