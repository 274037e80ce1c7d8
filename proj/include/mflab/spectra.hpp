#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mflab/field.hpp"

namespace mflab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class CurveKind {
    Legendre,
    LargeDeviation,
    IncreasingHull,
    OracleD,
    OracleRho,
    OracleL,
};

std::string curve_kind_name(CurveKind k);

// h -> value on a finite grid; -inf marks empty support. The value of the
// out-of-band point h = +infinity, when defined, sits in `at_infinity`.
struct SpectrumCurve {
    std::vector<double> grid;
    std::vector<double> values;
    CurveKind kind = CurveKind::LargeDeviation;
    double at_infinity = kNegInf;

    double max_finite() const;
    bool finite_at(std::size_t i) const { return values[i] > kNegInf; }
};

enum class ZeroPolicy { Exclude, Floor };

// How the large-deviation value at each h is read off the per-scale counts.
//   BandMax:   max_j log2 N_j / j at the smallest usable epsilon (the
//              direct limsup proxy; exact for the deterministic builds).
//   HullSlope: regression slope of the one-sided counts
//              #{d >= 2^{-(h+eps)j}} over the truncation-masked window;
//              the increasing-hull route used for the lacunary models.
enum class RhoMethod { BandMax, HullSlope };

struct EstimatorConfig {
    int j1 = 1, j2 = 0;               // scale window; j2 == 0 -> derive from jmax
    std::vector<double> p_grid;       // empty -> 41 points on [-10, 10]
    std::vector<double> h_grid;       // empty -> 121 points on [.9 Hmin, 1.1 Hmax]
    std::vector<double> eps_schedule = {0.4, 0.2, 0.1, 0.05};
    ZeroPolicy zero_policy = ZeroPolicy::Exclude;
    double floor_B = 12.0;            // exponent floor for ZeroPolicy::Floor
    RhoMethod rho_method = RhoMethod::BandMax;
    double min_count = 1.0;           // counts below this are noise
    bool weighted_fit = true;         // weight regression points by sqrt(count)
    bool truncation_mask = true;      // drop scales whose one-sided counts are
                                      // cut off by jmax (lacunary fields only)

    static EstimatorConfig defaults_for(int jmax);
    void finalize(int jmax);          // fill derived members
};

struct ScalingFunction {
    std::vector<double> p;
    std::vector<double> eta;          // windowed-min liminf proxy
    std::vector<double> slope;        // regression diagnostic
    std::vector<bool> partial_support; // zero leaders excluded at negative p
};

// log2 of S_j(p) = 2^{-j} sum_k d_{j,k}^p (log-sum-exp; never overflows).
// Returns -inf when the sum is empty. `partial` reports excluded zeros.
double structure_function_log2(const LeaderField& lf, double p, int j,
                               ZeroPolicy policy, double floor_B,
                               bool* partial = nullptr);

ScalingFunction scaling_function(const LeaderField& lf, const EstimatorConfig& cfg);

// Seed-averaged variant: S_j(p) is averaged across fields before the log.
ScalingFunction scaling_function(const std::vector<const LeaderField*>& fields,
                                 const EstimatorConfig& cfg);

// The h grid the estimators would derive for these fields (bracketed by the
// pooled leader exponent extremes).
std::vector<double> derive_h_grid(const std::vector<const LeaderField*>& fields,
                                  const EstimatorConfig& cfg);

// L(h) = inf_p (1 - eta(p) + h p) over the sampled p grid, clamped to -inf
// below -5.
SpectrumCurve legendre_spectrum(const ScalingFunction& sf,
                                const std::vector<double>& h_grid);

struct LargeDeviationResult {
    SpectrumCurve rho;
    // diagnostics: one curve of values per epsilon, epsilon used per h,
    // linear-in-eps extrapolation, and the rho(+infinity) sweep.
    std::vector<double> eps_schedule;
    std::vector<std::vector<double>> value_per_eps;
    std::vector<double> eps_used;
    std::vector<double> extrapolated;
    std::vector<double> a_sweep;
    std::vector<double> rho_at_A;
    std::size_t zero_cells = 0;
};

// Seed-averaged estimate: counts are accumulated across all fields before
// taking logs (expectation-level averaging).
LargeDeviationResult large_deviation(const std::vector<const LeaderField*>& fields,
                                     const EstimatorConfig& cfg);
LargeDeviationResult large_deviation(const LeaderField& lf, const EstimatorConfig& cfg);

// nu(h): one-sided counting #{d >= 2^{-(h+eps)j}}; equals the running max
// of rho up to grid tolerance.
SpectrumCurve increasing_hull(const std::vector<const LeaderField*>& fields,
                              const EstimatorConfig& cfg);
SpectrumCurve increasing_hull(const LeaderField& lf, const EstimatorConfig& cfg);

// Upper concave envelope over the finite support, -inf outside.
SpectrumCurve concave_hull(const SpectrumCurve& curve);

struct HMinMax {
    double hmin = 0.0;
    double hmax = 0.0;
};

// Extreme leader decay exponents by windowed regression of the per-scale
// min/max of -log2 d; brackets the h grid.
HMinMax hminmax(const LeaderField& lf, int j1, int j2);

// Least-squares slope of y against x (helper shared by the estimators).
double regression_slope(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& w = {});

}  // namespace mflab
