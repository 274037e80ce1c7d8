#include "mflab/generators.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "mflab/leaders.hpp"
#include "mflab/rng.hpp"

namespace mflab {

namespace {

std::uint64_t alpha_block_count(double eta, int j, std::uint64_t cells) {
    double raw = std::floor(std::exp2(eta * j));
    std::uint64_t n = raw >= double(cells) ? cells : std::uint64_t(raw);
    return n;
}

void require(bool ok, const char* msg) {
    if (!ok) throw PreconditionError(msg);
}

}  // namespace

int coarse_scale(int j, double m) {
    double r = std::round(m);
    if (std::abs(m - r) < 1e-12) return j / int(r);
    return int(std::floor(double(j) / m));
}

CoefficientField gen_two_exponent(double alpha, double beta, double eta, int jmax) {
    require(alpha > 0 && alpha < beta, "two_exponent requires 0 < alpha < beta");
    require(eta > 0 && eta < 1, "two_exponent requires eta in (0,1)");
    CoefficientField f = CoefficientField::zeros(jmax);
    for (int j = 0; j <= jmax; ++j) {
        std::uint64_t cells = std::uint64_t(1) << j;
        std::uint64_t na = alpha_block_count(eta, j, cells);
        ExpCode a = exp_to_code(alpha * j), b = exp_to_code(beta * j);
        for (std::uint64_t k = 0; k < cells; ++k) f.code[j][k] = k < na ? a : b;
    }
    f.meta = {"two_exponent", {{"alpha", alpha}, {"beta", beta}, {"eta", eta}}, {}};
    return f;
}

CoefficientField gen_three_exponent(double alpha, double beta, double gamma,
                                    double eta, double C, int jmax) {
    require(alpha > 0 && alpha < beta && beta < gamma,
            "three_exponent requires 0 < alpha < beta < gamma");
    require(eta > 0 && eta < 1, "three_exponent requires eta in (0,1)");
    require(C > 1 && C < std::exp2(1.0 - eta),
            "three_exponent requires C in (1, 2^{1-eta})");
    CoefficientField f = CoefficientField::zeros(jmax);
    for (int j = 0; j <= jmax; ++j) {
        std::uint64_t cells = std::uint64_t(1) << j;
        std::uint64_t na = alpha_block_count(eta, j, cells);
        double rawb = std::floor(C * std::exp2(eta * j));
        std::uint64_t nb = rawb >= double(cells) ? cells : std::uint64_t(rawb);
        if (nb < na) nb = na;
        ExpCode a = exp_to_code(alpha * j), b = exp_to_code(beta * j),
                c = exp_to_code(gamma * j);
        for (std::uint64_t k = 0; k < cells; ++k)
            f.code[j][k] = k < na ? a : (k < nb ? b : c);
    }
    f.meta = {"three_exponent",
              {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"eta", eta}, {"C", C}},
              {}};
    return f;
}

CoefficientField gen_asymmetric_cantor(double alpha, double beta, int jmax) {
    require(alpha > 0 && alpha < beta, "asymmetric_cantor requires 0 < alpha < beta");
    CantorSpec spec = CantorSpec::asymmetric_quarter();
    CoefficientField f = CoefficientField::zeros(jmax);
    for (int j = 0; j <= jmax; ++j) {
        ExpCode a = exp_to_code(alpha * j), b = exp_to_code(beta * j);
        std::fill(f.code[j].begin(), f.code[j].end(), b);
        for (const auto& cell : cells_inside(cantor_stage(spec, j / 2), j))
            f.code[j][cell.k] = a;
    }
    f.meta = {"asymmetric_cantor", {{"alpha", alpha}, {"beta", beta}}, {}};
    return f;
}

CoefficientField gen_slow_oscillation(double alpha, double beta, int jmax,
                                      const std::optional<SlowOscVariant>& variant) {
    require(alpha > 0 && alpha < beta, "slow_oscillation requires 0 < alpha < beta");
    double md = beta / alpha;
    int m = int(std::round(md));
    require(std::abs(md - m) < 1e-9 && m >= 2,
            "slow_oscillation requires beta/alpha integer >= 2");
    if (variant) require(variant->gamma_off > beta, "variant requires gamma > beta");

    std::vector<bool> is_alpha_scale(jmax + 1, false);
    for (std::int64_t p = 1; p <= jmax; p *= m) is_alpha_scale[p] = true;

    CoefficientField f = CoefficientField::zeros(jmax);
    for (int j = 0; j <= jmax; ++j) {
        ExpCode a = exp_to_code(alpha * j), b = exp_to_code(beta * j);
        if (!variant) {
            std::fill(f.code[j].begin(), f.code[j].end(), is_alpha_scale[j] ? a : b);
        } else {
            // off-Cantor cells carry gamma at every scale; on-Cantor cells
            // alternate between the alpha scales and beta elsewhere
            ExpCode g = exp_to_code(variant->gamma_off * j);
            ExpCode on = is_alpha_scale[j] ? a : b;
            for (std::int64_t k = 0; k < (std::int64_t(1) << j); ++k)
                f.code[j][k] = cantor_meets(variant->cantor, {j, k}) ? on : g;
        }
    }
    f.meta = {"slow_oscillation", {{"alpha", alpha}, {"beta", beta}}, {}};
    if (variant) f.meta.params["gamma"] = variant->gamma_off;
    return f;
}

CoefficientField gen_lws_cantor(std::int64_t r_num, std::int64_t r_den,
                                double alpha, double eta,
                                std::uint64_t seed, int jmax) {
    require(alpha > 0, "lws_cantor requires alpha > 0");
    CantorSpec spec = CantorSpec::symmetric(r_num, r_den);
    double gamma = cantor_dimension(spec);
    require(eta > 0 && eta < gamma, "lws_cantor requires eta in (0, gamma)");
    CoefficientField f = CoefficientField::zeros(jmax);
    for (int j = 0; j <= jmax; ++j) {
        ExpCode a = exp_to_code(alpha * j);
        double p = std::exp2((eta - gamma) * j);
        for (const auto& cell : gamma_j(spec, j))
            if (cell_bernoulli(seed, j, std::uint64_t(cell.k), p))
                f.code[j][cell.k] = a;
    }
    f.meta = {"lws_cantor",
              {{"alpha", alpha}, {"eta", eta},
               {"r_num", double(r_num)}, {"r_den", double(r_den)}},
              seed};
    return f;
}

CoefficientField gen_duplicated_lws(double alpha, double eta,
                                    std::uint64_t seed, int jmax) {
    require(alpha > 0, "duplicated_lws requires alpha > 0");
    require(eta > 0 && eta < 0.75, "duplicated_lws requires eta in (0, 3/4)");
    CantorSpec spec = CantorSpec::quarter_symmetric_duplicated();
    CoefficientField f = CoefficientField::zeros(jmax);
    for (int j = 0; j <= jmax; ++j) {
        ExpCode a = exp_to_code(alpha * j);
        double p = std::exp2((eta - 0.75) * j);
        for (const auto& cell : gamma_j(spec, j))
            if (cell_bernoulli(seed, j, std::uint64_t(cell.k), p))
                f.code[j][cell.k] = a;
    }
    f.meta = {"duplicated_lws", {{"alpha", alpha}, {"eta", eta}}, seed};
    return f;
}

CoefficientField gen_duplicate(const CoefficientField& src, double m,
                               int target_jmax, bool with_leaders) {
    require(m > 1, "duplicate requires m > 1");
    require(coarse_scale(target_jmax, m) <= src.jmax,
            "duplicate requires floor(jmax/m) <= source jmax");
    if (double(target_jmax) > m * src.jmax)
        std::fprintf(stderr,
                     "mflab: duplicate target jmax %d exceeds m*src.jmax = %.1f; "
                     "coarse sups are truncated\n",
                     target_jmax, m * src.jmax);
    std::vector<std::vector<ExpCode>> coarse;
    if (with_leaders) {
        coarse = compute_leaders(src).code;
    } else {
        coarse = subtree_sups(src);
    }
    CoefficientField f = CoefficientField::zeros(target_jmax);
    for (int j = 0; j <= target_jmax; ++j) {
        int cj = coarse_scale(j, m);
        int shift = j - cj;
        for (std::int64_t k = 0; k < (std::int64_t(1) << j); ++k)
            f.code[j][k] = coarse[cj][k >> shift];
    }
    f.meta = src.meta;
    f.meta.construction = "duplicate(" + src.meta.construction + ")";
    f.meta.params["m"] = m;
    return f;
}

double max_regularity_oracle(const CoefficientField& field) {
    const auto& name = field.meta.construction;
    const auto& P = field.meta.params;
    auto get = [&](const char* key) { return P.at(key); };
    if (name == "two_exponent") return get("beta");
    if (name == "three_exponent") return get("gamma");
    if (name == "asymmetric_cantor") return get("beta");
    if (name == "slow_oscillation")
        return P.count("gamma") ? get("gamma") : get("beta");
    if (name == "lws_cantor") {
        CantorSpec spec = CantorSpec::symmetric(std::int64_t(get("r_num")),
                                                std::int64_t(get("r_den")));
        return get("alpha") * cantor_dimension(spec) / get("eta");
    }
    if (name == "duplicated_lws") {
        double a = get("alpha"), eta = get("eta");
        return eta > 0.25 ? a / (eta + 0.25) : a / (2.0 * eta);
    }
    // fall back to the largest finite coefficient exponent observed
    double worst = 0.0;
    for (int j = 1; j <= field.jmax; ++j)
        for (ExpCode c : field.code[j])
            if (c != kZeroCode) worst = std::max(worst, code_to_exp(c) / j);
    return worst;
}

CoefficientField background_fill(const CoefficientField& field, double gamma) {
    double hmax = max_regularity_oracle(field);
    require(gamma > hmax, "background_fill exponent must exceed the maximal regularity");
    CoefficientField f = field;
    for (int j = 0; j <= f.jmax; ++j) {
        ExpCode g = exp_to_code(gamma * j);
        for (auto& c : f.code[j])
            if (c == kZeroCode) c = g;
    }
    f.meta.params["background_gamma"] = gamma;
    return f;
}

}  // namespace mflab
