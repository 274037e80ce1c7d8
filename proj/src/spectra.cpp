#include "mflab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mflab {

std::string curve_kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::Legendre: return "legendre";
        case CurveKind::LargeDeviation: return "largedev";
        case CurveKind::IncreasingHull: return "hull";
        case CurveKind::OracleD: return "oracleD";
        case CurveKind::OracleRho: return "oracleRho";
        case CurveKind::OracleL: return "oracleL";
    }
    return "unknown";
}

double SpectrumCurve::max_finite() const {
    double m = kNegInf;
    for (double v : values) m = std::max(m, v);
    return m;
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& w) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double wi = w.empty() ? 1.0 : w[i];
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
        sxx += wi * x[i] * x[i];
        sxy += wi * x[i] * y[i];
    }
    double det = sw * sxx - sx * sx;
    if (det <= 0) return 0.0;
    return (sw * sxy - sx * sy) / det;
}

EstimatorConfig EstimatorConfig::defaults_for(int jmax) {
    EstimatorConfig cfg;
    cfg.finalize(jmax);
    return cfg;
}

void EstimatorConfig::finalize(int jmax) {
    if (j2 <= 0) j2 = jmax - (jmax + 9) / 10;
    j2 = std::min(j2, jmax);
    if (j1 <= 0) j1 = 4;
    if (j1 >= j2) j1 = std::max(1, j2 - 1);
    if (p_grid.empty()) {
        for (int i = 0; i <= 40; ++i) p_grid.push_back(-10.0 + 0.5 * i);
    }
    std::sort(eps_schedule.begin(), eps_schedule.end(), std::greater<double>());
}

double structure_function_log2(const LeaderField& lf, double p, int j,
                               ZeroPolicy policy, double floor_B, bool* partial) {
    if (j < 0 || j > lf.jmax) throw std::invalid_argument("scale out of range");
    std::map<ExpCode, std::size_t> buckets;
    std::size_t zeros = 0;
    for (ExpCode c : lf.code[j]) {
        if (c == kZeroCode) ++zeros;
        else ++buckets[c];
    }
    if (zeros > 0 && policy == ZeroPolicy::Floor)
        buckets[exp_to_code(floor_B * j)] += zeros;
    if (partial) *partial = zeros > 0 && policy == ZeroPolicy::Exclude;
    if (buckets.empty()) return kNegInf;

    // log2 sum of n_c * 2^{-p e_c} without leaving the log domain
    double peak = kNegInf;
    for (const auto& [c, n] : buckets)
        peak = std::max(peak, std::log2(double(n)) - p * code_to_exp(c));
    double acc = 0.0;
    for (const auto& [c, n] : buckets)
        acc += std::exp2(std::log2(double(n)) - p * code_to_exp(c) - peak);
    return -double(j) + peak + std::log2(acc);
}

ScalingFunction scaling_function(const LeaderField& lf, const EstimatorConfig& cfg_in) {
    EstimatorConfig cfg = cfg_in;
    cfg.finalize(lf.jmax);
    ScalingFunction sf;
    sf.p = cfg.p_grid;
    for (double p : cfg.p_grid) {
        double eta = std::numeric_limits<double>::infinity();
        bool partial_any = false;
        std::vector<double> xs, ys;
        for (int j = cfg.j1; j <= cfg.j2; ++j) {
            bool partial = false;
            double ls = structure_function_log2(lf, p, j, cfg.zero_policy,
                                                cfg.floor_B, &partial);
            partial_any |= partial;
            if (ls == kNegInf) continue;
            eta = std::min(eta, -ls / j);
            xs.push_back(-double(j));
            ys.push_back(ls);
        }
        sf.eta.push_back(eta);
        sf.slope.push_back(xs.size() >= 2 ? regression_slope(xs, ys) : eta);
        sf.partial_support.push_back(partial_any && p < 0);
    }
    return sf;
}

SpectrumCurve legendre_spectrum(const ScalingFunction& sf,
                                const std::vector<double>& h_grid) {
    SpectrumCurve curve;
    curve.kind = CurveKind::Legendre;
    curve.grid = h_grid;
    for (double h : h_grid) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < sf.p.size(); ++i) {
            if (!std::isfinite(sf.eta[i])) continue;
            best = std::min(best, 1.0 - sf.eta[i] + h * sf.p[i]);
        }
        curve.values.push_back(best < -5.0 || !std::isfinite(best) ? kNegInf : best);
    }
    return curve;
}

namespace {

// Per-scale exponent histogram pooled over fields (counts averaged).
struct ScaleHist {
    std::vector<double> expo;    // sorted unique exponents -log2(d)/j
    std::vector<double> prefix;  // prefix[i] = mean count of expo[0..i)
    double zeros = 0.0;
    double finite = 0.0;

    double count_le(double x) const {
        auto it = std::upper_bound(expo.begin(), expo.end(), x);
        return prefix[std::size_t(it - expo.begin())];
    }
    double band(double h, double eps) const {
        return count_le(h + eps) - count_le(h - eps);
    }
};

std::vector<ScaleHist> build_hists(const std::vector<const LeaderField*>& fields,
                                   int jmax) {
    std::vector<ScaleHist> hists(jmax + 1);
    for (int j = 1; j <= jmax; ++j) {
        std::map<ExpCode, double> counts;
        double zeros = 0.0;
        for (const auto* lf : fields) {
            for (ExpCode c : lf->code[j]) {
                if (c == kZeroCode) zeros += 1.0;
                else counts[c] += 1.0;
            }
        }
        ScaleHist& h = hists[j];
        double n = double(fields.size());
        h.zeros = zeros / n;
        h.prefix.push_back(0.0);
        for (const auto& [c, cnt] : counts) {
            h.expo.push_back(code_to_exp(c) / j);
            h.prefix.push_back(h.prefix.back() + cnt / n);
        }
        h.finite = h.prefix.back();
    }
    return hists;
}

int common_jmax(const std::vector<const LeaderField*>& fields) {
    if (fields.empty()) throw std::invalid_argument("no leader fields");
    int jmax = fields.front()->jmax;
    for (const auto* lf : fields) jmax = std::min(jmax, lf->jmax);
    return jmax;
}

struct PooledExtremes {
    double hmin = 0.0, hmax = 0.0;
};

PooledExtremes pooled_hminmax(const std::vector<ScaleHist>& hists, int j1, int j2) {
    // windowed extremes of the per-scale exponent range
    PooledExtremes ex{std::numeric_limits<double>::infinity(), kNegInf};
    for (int j = j1; j <= j2; ++j) {
        if (hists[j].expo.empty()) continue;
        ex.hmin = std::min(ex.hmin, hists[j].expo.front());
        ex.hmax = std::max(ex.hmax, hists[j].expo.back());
    }
    if (ex.hmax == kNegInf)
        throw std::invalid_argument("field has no finite leaders in window");
    return ex;
}

std::vector<double> default_h_grid(const PooledExtremes& ex) {
    double lo = 0.9 * ex.hmin, hi = 1.1 * ex.hmax;
    if (!(hi > lo)) hi = lo + 1.0;
    std::vector<double> g;
    for (int i = 0; i <= 120; ++i) g.push_back(lo + (hi - lo) * i / 120.0);
    return g;
}

// Regression of log2(one-sided count) against j, masking scales where the
// counts are truncated by jmax (threshold depth below hmin * jmax). The mask
// only matters when exponents arise from coefficients far below the cell, so
// it is applied to lacunary fields (zeros present) and skipped otherwise.
double hull_slope_stat(const std::vector<ScaleHist>& hists, double hplus,
                       const EstimatorConfig& cfg, int jmax, double hmin,
                       bool lacunary) {
    std::vector<double> xs, ys, ws;
    int jtrunc = cfg.j2;
    if (cfg.truncation_mask && lacunary && hplus > 0)
        jtrunc = int(std::floor(hmin * jmax / hplus));
    for (int j = cfg.j1; j <= std::min(cfg.j2, jtrunc); ++j) {
        double c = hists[j].count_le(hplus);
        if (c < std::max(cfg.min_count, 1e-12)) continue;
        xs.push_back(j);
        ys.push_back(std::log2(c));
        ws.push_back(cfg.weighted_fit ? std::sqrt(c) : 1.0);
    }
    if (xs.size() < 3) return kNegInf;
    return regression_slope(xs, ys, ws);
}

}  // namespace

ScalingFunction scaling_function(const std::vector<const LeaderField*>& fields,
                                 const EstimatorConfig& cfg_in) {
    if (fields.empty()) throw std::invalid_argument("no leader fields");
    if (fields.size() == 1) return scaling_function(*fields.front(), cfg_in);
    int jmax = common_jmax(fields);
    EstimatorConfig cfg = cfg_in;
    cfg.finalize(jmax);
    ScalingFunction sf;
    sf.p = cfg.p_grid;
    double logn = std::log2(double(fields.size()));
    for (double p : cfg.p_grid) {
        double eta = std::numeric_limits<double>::infinity();
        bool partial_any = false;
        std::vector<double> xs, ys;
        for (int j = cfg.j1; j <= cfg.j2; ++j) {
            // mean of S_j(p) across fields, composed in the log domain
            double peak = kNegInf;
            std::vector<double> ls(fields.size(), kNegInf);
            for (std::size_t f = 0; f < fields.size(); ++f) {
                bool partial = false;
                ls[f] = structure_function_log2(*fields[f], p, j, cfg.zero_policy,
                                                cfg.floor_B, &partial);
                partial_any |= partial;
                peak = std::max(peak, ls[f]);
            }
            if (peak == kNegInf) continue;
            double acc = 0.0;
            for (double v : ls)
                if (v > kNegInf) acc += std::exp2(v - peak);
            double mean_log = peak + std::log2(acc) - logn;
            eta = std::min(eta, -mean_log / j);
            xs.push_back(-double(j));
            ys.push_back(mean_log);
        }
        sf.eta.push_back(eta);
        sf.slope.push_back(xs.size() >= 2 ? regression_slope(xs, ys) : eta);
        sf.partial_support.push_back(partial_any && p < 0);
    }
    return sf;
}

std::vector<double> derive_h_grid(const std::vector<const LeaderField*>& fields,
                                  const EstimatorConfig& cfg_in) {
    int jmax = common_jmax(fields);
    EstimatorConfig cfg = cfg_in;
    cfg.finalize(jmax);
    if (!cfg.h_grid.empty()) return cfg.h_grid;
    auto hists = build_hists(fields, jmax);
    return default_h_grid(pooled_hminmax(hists, cfg.j1, cfg.j2));
}

LargeDeviationResult large_deviation(const std::vector<const LeaderField*>& fields,
                                     const EstimatorConfig& cfg_in) {
    int jmax = common_jmax(fields);
    EstimatorConfig cfg = cfg_in;
    cfg.finalize(jmax);
    auto hists = build_hists(fields, jmax);
    auto ex = pooled_hminmax(hists, cfg.j1, cfg.j2);

    LargeDeviationResult res;
    res.eps_schedule = cfg.eps_schedule;
    res.rho.kind = CurveKind::LargeDeviation;
    res.rho.grid = cfg.h_grid.empty() ? default_h_grid(ex) : cfg.h_grid;
    for (int j = cfg.j1; j <= cfg.j2; ++j) res.zero_cells += std::size_t(hists[j].zeros);
    bool lacunary = res.zero_cells > 0;

    const auto& grid = res.rho.grid;
    res.value_per_eps.assign(cfg.eps_schedule.size(),
                             std::vector<double>(grid.size(), kNegInf));
    res.eps_used.assign(grid.size(), kNegInf);
    res.extrapolated.assign(grid.size(), kNegInf);

    for (std::size_t ih = 0; ih < grid.size(); ++ih) {
        double h = grid[ih];
        double chosen = kNegInf, chosen_eps = kNegInf;
        std::vector<double> ex_x, ex_y;
        for (std::size_t ie = 0; ie < cfg.eps_schedule.size(); ++ie) {
            double eps = cfg.eps_schedule[ie];
            double best = kNegInf;
            for (int j = cfg.j1; j <= cfg.j2; ++j) {
                double n = hists[j].band(h, eps);
                if (cfg.zero_policy == ZeroPolicy::Floor &&
                    cfg.floor_B > h - eps && cfg.floor_B <= h + eps)
                    n += hists[j].zeros;
                if (n >= std::max(cfg.min_count, 1e-12))
                    best = std::max(best, std::log2(n) / j);
            }
            res.value_per_eps[ie][ih] = best;
            if (best > kNegInf) {
                chosen = best;  // schedule is descending: keeps smallest nonempty
                chosen_eps = eps;
                ex_x.push_back(eps);
                ex_y.push_back(best);
            }
        }
        // bands are nested in eps, so mass caught only by the widest band
        // sits farther than the second-widest half-width from h; the widest
        // eps acts as a stability spacer and never reports on its own
        if (cfg.eps_schedule.size() > 1 && chosen_eps == cfg.eps_schedule.front()) {
            chosen = kNegInf;
            chosen_eps = kNegInf;
        }
        res.eps_used[ih] = chosen_eps;
        if (ex_x.size() >= 2) {
            double slope = regression_slope(ex_x, ex_y);
            double meanx = 0, meany = 0;
            for (std::size_t i = 0; i < ex_x.size(); ++i) {
                meanx += ex_x[i];
                meany += ex_y[i];
            }
            meanx /= double(ex_x.size());
            meany /= double(ex_y.size());
            res.extrapolated[ih] = meany - slope * meanx;
        } else if (!ex_y.empty()) {
            res.extrapolated[ih] = ex_y.front();
        }

        if (cfg.rho_method == RhoMethod::BandMax) {
            res.rho.values.push_back(chosen);
        } else {
            // increasing-hull route; -inf where even the widest band is empty
            if (chosen == kNegInf) {
                res.rho.values.push_back(kNegInf);
            } else {
                double eps = cfg.eps_schedule.back();
                double v = hull_slope_stat(hists, h + eps, cfg, jmax, ex.hmin, lacunary);
                res.rho.values.push_back(v);
            }
        }
    }

    // rho at +infinity: sweep the cutoff A upward, zeros included
    double a0 = std::max(1e-3, ex.hmax);
    for (double mult : {1.2, 1.6, 2.4, 4.0, 8.0}) res.a_sweep.push_back(a0 * mult);
    for (double A : res.a_sweep) {
        double best = kNegInf;
        for (int j = cfg.j1; j <= cfg.j2; ++j) {
            double n = hists[j].finite - hists[j].count_le(A) + hists[j].zeros;
            if (n >= std::max(cfg.min_count, 1e-12))
                best = std::max(best, std::log2(n) / j);
        }
        res.rho_at_A.push_back(best);
    }
    res.rho.at_infinity = res.rho_at_A.back();
    return res;
}

LargeDeviationResult large_deviation(const LeaderField& lf, const EstimatorConfig& cfg) {
    return large_deviation(std::vector<const LeaderField*>{&lf}, cfg);
}

SpectrumCurve increasing_hull(const std::vector<const LeaderField*>& fields,
                              const EstimatorConfig& cfg_in) {
    int jmax = common_jmax(fields);
    EstimatorConfig cfg = cfg_in;
    cfg.finalize(jmax);
    auto hists = build_hists(fields, jmax);
    auto ex = pooled_hminmax(hists, cfg.j1, cfg.j2);

    SpectrumCurve nu;
    nu.kind = CurveKind::IncreasingHull;
    nu.grid = cfg.h_grid.empty() ? default_h_grid(ex) : cfg.h_grid;
    bool lacunary = false;
    for (int j = cfg.j1; j <= cfg.j2; ++j) lacunary |= hists[j].zeros > 0;
    double eps = cfg.eps_schedule.back();
    for (double h : nu.grid) {
        if (cfg.rho_method == RhoMethod::HullSlope) {
            nu.values.push_back(
                hull_slope_stat(hists, h + eps, cfg, jmax, ex.hmin, lacunary));
            continue;
        }
        double best = kNegInf, best_eps = kNegInf;
        for (double e : cfg.eps_schedule) {  // descending: smallest nonempty wins
            double v = kNegInf;
            for (int j = cfg.j1; j <= cfg.j2; ++j) {
                double n = hists[j].count_le(h + e);
                if (n >= std::max(cfg.min_count, 1e-12))
                    v = std::max(v, std::log2(n) / j);
            }
            if (v > kNegInf) {
                best = v;
                best_eps = e;
            }
        }
        if (cfg.eps_schedule.size() > 1 && best_eps == cfg.eps_schedule.front())
            best = kNegInf;  // widest band is a spacer, as in large_deviation
        nu.values.push_back(best);
    }
    return nu;
}

SpectrumCurve increasing_hull(const LeaderField& lf, const EstimatorConfig& cfg) {
    return increasing_hull(std::vector<const LeaderField*>{&lf}, cfg);
}

SpectrumCurve concave_hull(const SpectrumCurve& curve) {
    SpectrumCurve out;
    out.kind = curve.kind;
    out.grid = curve.grid;
    out.at_infinity = curve.at_infinity;

    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        if (curve.finite_at(i)) pts.emplace_back(curve.grid[i], curve.values[i]);
    if (pts.empty()) {
        out.values.assign(curve.grid.size(), kNegInf);
        return out;
    }

    // upper envelope, monotone chain over points already sorted in h
    std::vector<std::pair<double, double>> hull;
    auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                    const std::pair<double, double>& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    for (const auto& p : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0)
            hull.pop_back();
        hull.push_back(p);
    }

    double lo = pts.front().first, hi = pts.back().first;
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        double h = curve.grid[i];
        if (h < lo || h > hi) {
            out.values.push_back(kNegInf);
            continue;
        }
        auto it = std::lower_bound(hull.begin(), hull.end(), h,
                                   [](const auto& p, double x) { return p.first < x; });
        if (it == hull.begin()) {
            out.values.push_back(it->second);
        } else if (it == hull.end()) {
            out.values.push_back(hull.back().second);
        } else {
            auto [x1, y1] = *(it - 1);
            auto [x2, y2] = *it;
            double t = x2 > x1 ? (h - x1) / (x2 - x1) : 0.0;
            out.values.push_back(y1 + t * (y2 - y1));
        }
    }
    return out;
}

HMinMax hminmax(const LeaderField& lf, int j1, int j2) {
    if (j1 < 1 || j2 > lf.jmax || j1 > j2)
        throw std::invalid_argument("hminmax: bad scale window");
    auto hists = build_hists({&lf}, lf.jmax);
    auto ex = pooled_hminmax(hists, j1, j2);
    return {ex.hmin, ex.hmax};
}

}  // namespace mflab
