#include "mflab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mflab/dyadic.hpp"
#include "mflab/generators.hpp"

namespace mflab {

namespace {

constexpr double kPointTol = 1e-9;

// Closed-form curve: isolated points plus linear segments value = a + b h
// on [h1, h2]. Everything else is -inf.
struct Piecewise {
    struct Point {
        double h, v;
    };
    struct Segment {
        double h1, h2, a, b;
    };
    std::vector<Point> points;
    std::vector<Segment> segments;
    double at_inf = kNegInf;

    double eval(double h) const {
        double v = kNegInf;
        for (const auto& s : segments)
            if (h >= s.h1 - kPointTol && h <= s.h2 + kPointTol)
                v = std::max(v, s.a + s.b * h);
        for (const auto& p : points)
            if (std::abs(h - p.h) <= kPointTol) v = std::max(v, p.v);
        return v;
    }

    std::vector<double> anchors() const {
        std::vector<double> a;
        for (const auto& p : points) a.push_back(p.h);
        for (const auto& s : segments) {
            a.push_back(s.h1);
            a.push_back(s.h2);
        }
        return a;
    }

    // g_m duplication squeezes h by m; rescale also maps values through
    // v -> (m-1+v)/m (the large-deviation count relation).
    Piecewise duplicated(double m, bool rescale_values) const {
        Piecewise out;
        out.at_inf = at_inf;
        for (const auto& p : points)
            out.points.push_back({p.h / m, rescale_values ? (m - 1 + p.v) / m : p.v});
        for (const auto& s : segments) {
            // v(h) = a + b (m h) on [h1/m, h2/m], then the value map
            double a = rescale_values ? (m - 1 + s.a) / m : s.a;
            double b = rescale_values ? s.b : s.b * m;
            out.segments.push_back({s.h1 / m, s.h2 / m, a, b});
        }
        return out;
    }
};

struct OracleForms {
    Piecewise D, rho;
};

OracleForms closed_forms(const GeneratorSpec& spec);

OracleForms duplicate_forms(const GeneratorSpec& spec) {
    if (!spec.duplicate_source)
        throw PreconditionError("duplicate oracle needs a source construction");
    GeneratorSpec src = spec;
    src.construction = *spec.duplicate_source;
    src.duplicate_source.reset();
    OracleForms s = closed_forms(src);
    OracleForms out;
    out.D = s.D.duplicated(spec.m, false);
    out.rho = s.rho.duplicated(spec.m, true);
    out.D.at_inf = s.D.at_inf;
    out.rho.at_inf = s.rho.at_inf;
    return out;
}

OracleForms closed_forms(const GeneratorSpec& spec) {
    const auto& c = spec.construction;
    OracleForms f;
    if (c == "two_exponent") {
        f.D.points = {{spec.alpha, 0.0}, {spec.beta, 1.0}};
        f.rho.points = {{spec.alpha, spec.eta}, {spec.beta, 1.0}};
    } else if (c == "three_exponent") {
        f.D.points = {{spec.alpha, 0.0}, {spec.gamma, 1.0}};
        f.rho.points = {{spec.alpha, spec.eta}, {spec.beta, spec.eta}, {spec.gamma, 1.0}};
    } else if (c == "asymmetric_cantor") {
        double dimC = std::log2((1.0 + std::sqrt(5.0)) / 2.0);
        double rhoA = std::log(3.0) / (2.0 * std::log(2.0));
        f.D.points = {{spec.alpha, dimC}, {spec.beta, 1.0}};
        f.rho.points = {{spec.alpha, rhoA}, {spec.beta, 1.0}};
    } else if (c == "slow_oscillation") {
        f.D.points = {{spec.alpha, 1.0}};
        f.rho.segments = {{spec.alpha, spec.beta, 1.0, 0.0}};
    } else if (c == "slow_oscillation_cantor") {
        CantorSpec cs = CantorSpec::symmetric(spec.r_num, spec.r_den);
        double dimC = cantor_dimension(cs);
        f.D.points = {{spec.alpha, dimC}, {spec.gamma, 1.0}};
        f.rho.segments = {{spec.alpha, spec.beta, dimC, 0.0}};
        f.rho.points = {{spec.gamma, 1.0}};
    } else if (c == "lws_cantor") {
        CantorSpec cs = CantorSpec::symmetric(spec.r_num, spec.r_den);
        double g = cantor_dimension(cs);
        if (!(spec.eta > 0 && spec.eta < g))
            throw PreconditionError("lws_cantor oracle requires eta in (0, gamma)");
        double hmax = spec.alpha * g / spec.eta;
        f.D.segments = {{spec.alpha, hmax, 0.0, spec.eta / spec.alpha}};
        f.rho.segments = f.D.segments;
        f.D.at_inf = 1.0;
        f.rho.at_inf = 1.0;
    } else if (c == "duplicated_lws") {
        double a = spec.alpha, eta = spec.eta;
        if (!(eta > 0 && eta < 0.75))
            throw PreconditionError("duplicated_lws oracle requires eta in (0, 3/4)");
        if (eta >= 0.25) {
            double hmax = a / (eta + 0.25);
            f.D.segments = {{a, hmax, -0.5, (eta + 0.25) / a}};
            f.rho.segments = {{a, hmax, 0.0, eta / a}};
        } else {
            double h1 = 2.0 * a / (4.0 * eta + 1.0), h2 = 2.0 * a, h3 = a / (2.0 * eta);
            f.D.segments = {{h1, h2, -0.5, (eta + 0.25) / a}, {h2, h3, 0.0, eta / a}};
            f.rho.segments = {{a, h3, 0.0, eta / a}};
        }
        f.D.at_inf = 1.0;
        f.rho.at_inf = 1.0;
    } else if (c == "duplicate") {
        return duplicate_forms(spec);
    } else {
        throw PreconditionError("unknown construction: " + c);
    }
    if (spec.background_gamma) {
        // the filled background contributes a full-measure exponent
        double g = *spec.background_gamma;
        f.D.points.push_back({g, 1.0});
        f.rho.points.push_back({g, 1.0});
        f.D.at_inf = kNegInf;
        f.rho.at_inf = kNegInf;
    }
    return f;
}

SpectrumCurve sample(const Piecewise& pw, const std::vector<double>& grid,
                     CurveKind kind) {
    SpectrumCurve c;
    c.kind = kind;
    c.grid = grid;
    c.at_infinity = pw.at_inf;
    for (double h : grid) c.values.push_back(pw.eval(h));
    return c;
}

}  // namespace

std::vector<double> oracle_grid(const GeneratorSpec& spec, int points) {
    OracleForms f = closed_forms(spec);
    std::vector<double> anchors = f.D.anchors();
    for (double a : f.rho.anchors()) anchors.push_back(a);
    double lo = anchors[0], hi = anchors[0];
    for (double a : anchors) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    double span = hi > lo ? hi - lo : 1.0;
    lo = std::max(0.0, lo - 0.15 * span);
    hi = hi + 0.15 * span;
    std::vector<double> grid = anchors;
    for (int i = 0; i < points; ++i)
        grid.push_back(lo + (hi - lo) * i / double(points - 1));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               grid.end());
    return grid;
}

OracleSpectra oracle(const GeneratorSpec& spec, const std::vector<double>& h_grid) {
    OracleForms f = closed_forms(spec);
    std::vector<double> grid = h_grid.empty() ? oracle_grid(spec) : h_grid;
    OracleSpectra out;
    out.D = sample(f.D, grid, CurveKind::OracleD);
    out.rho = sample(f.rho, grid, CurveKind::OracleRho);
    out.L = concave_hull(out.rho);
    out.L.kind = CurveKind::OracleL;
    out.L.at_infinity = out.rho.at_infinity;

    double gap = 0.0;
    bool mismatch = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool fd = out.D.finite_at(i), fr = out.rho.finite_at(i);
        if (fd && fr) gap = std::max(gap, out.rho.values[i] - out.D.values[i]);
        if (fd != fr) mismatch = true;
    }
    out.failure_gap = std::max(gap, mismatch ? 1.0 : 0.0);
    return out;
}

bool is_random_construction(const GeneratorSpec& spec) {
    if (spec.construction == "lws_cantor" || spec.construction == "duplicated_lws")
        return true;
    return spec.duplicate_source &&
           (*spec.duplicate_source == "lws_cantor" ||
            *spec.duplicate_source == "duplicated_lws");
}

CoefficientField build_field(const GeneratorSpec& spec,
                             std::optional<std::uint64_t> seed_override) {
    std::uint64_t seed = seed_override.value_or(spec.seed);
    const auto& c = spec.construction;
    CoefficientField f;
    if (c == "two_exponent") {
        f = gen_two_exponent(spec.alpha, spec.beta, spec.eta, spec.jmax);
    } else if (c == "three_exponent") {
        f = gen_three_exponent(spec.alpha, spec.beta, spec.gamma, spec.eta, spec.C,
                               spec.jmax);
    } else if (c == "asymmetric_cantor") {
        f = gen_asymmetric_cantor(spec.alpha, spec.beta, spec.jmax);
    } else if (c == "slow_oscillation") {
        f = gen_slow_oscillation(spec.alpha, spec.beta, spec.jmax);
    } else if (c == "slow_oscillation_cantor") {
        SlowOscVariant v{spec.gamma, CantorSpec::symmetric(spec.r_num, spec.r_den)};
        f = gen_slow_oscillation(spec.alpha, spec.beta, spec.jmax, v);
    } else if (c == "lws_cantor") {
        f = gen_lws_cantor(spec.r_num, spec.r_den, spec.alpha, spec.eta, seed,
                           spec.jmax);
    } else if (c == "duplicated_lws") {
        f = gen_duplicated_lws(spec.alpha, spec.eta, seed, spec.jmax);
    } else if (c == "duplicate") {
        if (!spec.duplicate_source)
            throw PreconditionError("duplicate needs a source construction");
        GeneratorSpec src = spec;
        src.construction = *spec.duplicate_source;
        src.duplicate_source.reset();
        src.jmax = spec.source_jmax > 0 ? spec.source_jmax : spec.jmax;
        f = gen_duplicate(build_field(src, seed), spec.m, spec.jmax);
    } else {
        throw PreconditionError("unknown construction: " + c);
    }
    if (spec.background_gamma) f = background_fill(f, *spec.background_gamma);
    return f;
}

CompareReport compare(const SpectrumCurve& estimate, const SpectrumCurve& oracle,
                      const CompareConfig& cfg) {
    if (estimate.grid.size() != oracle.grid.size())
        throw std::invalid_argument("compare: grid size mismatch");
    for (std::size_t i = 0; i < estimate.grid.size(); ++i)
        if (std::abs(estimate.grid[i] - oracle.grid[i]) > 1e-9)
            throw std::invalid_argument("compare: grids differ");

    CompareReport rep;
    std::vector<double> support;
    for (std::size_t i = 0; i < oracle.grid.size(); ++i)
        if (oracle.finite_at(i)) support.push_back(oracle.grid[i]);

    for (std::size_t i = 0; i < estimate.grid.size(); ++i) {
        bool fe = estimate.finite_at(i), fo = oracle.finite_at(i);
        if (fe && fo) {
            double d = std::abs(estimate.values[i] - oracle.values[i]);
            if (d > rep.sup_distance) {
                rep.sup_distance = d;
                rep.witness_h = estimate.grid[i];
            }
        } else if (fe && !fo && estimate.values[i] >= cfg.mismatch_floor) {
            double dist = std::numeric_limits<double>::infinity();
            for (double s : support)
                dist = std::min(dist, std::abs(estimate.grid[i] - s));
            if (dist > cfg.support_tol && estimate.values[i] > rep.support_mismatch) {
                rep.support_mismatch = estimate.values[i];
                rep.mismatch_h = estimate.grid[i];
            }
        }
    }
    rep.valid = rep.sup_distance <= cfg.tol && rep.support_mismatch == 0.0;
    if (!rep.valid && rep.support_mismatch > 0.0 && rep.sup_distance <= cfg.tol)
        rep.witness_h = rep.mismatch_h;
    return rep;
}

}  // namespace mflab
