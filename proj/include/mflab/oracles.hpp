#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mflab/spectra.hpp"

namespace mflab {

// Everything needed to name a construction and its parameters.
struct GeneratorSpec {
    std::string construction;  // two_exponent, three_exponent, asymmetric_cantor,
                               // slow_oscillation, lws_cantor, duplicated_lws,
                               // duplicate
    double alpha = 0.5, beta = 1.0, gamma = 2.0;
    double eta = 0.5, C = 1.3, m = 2.0;
    std::int64_t r_num = 1, r_den = 3;
    int jmax = 16;
    int source_jmax = 0;                         // duplicate source depth; 0 = jmax
    std::uint64_t seed = 1;
    std::optional<double> background_gamma;      // background_fill exponent
    std::optional<std::string> duplicate_source; // construction duplicated by g_m
};

// Instantiate the construction this spec names (seeded builds use
// seed_override when given, spec.seed otherwise).
CoefficientField build_field(const GeneratorSpec& spec,
                             std::optional<std::uint64_t> seed_override = {});

bool is_random_construction(const GeneratorSpec& spec);

// Closed-form spectra sampled on a shared grid. failure_gap is the sup of
// rho - D over the joint finite support, or 1 when the supports differ.
struct OracleSpectra {
    SpectrumCurve D, rho, L;
    double failure_gap = 0.0;
};

OracleSpectra oracle(const GeneratorSpec& spec,
                     const std::vector<double>& h_grid = {});

// Default oracle grid: dense samples plus the exact support endpoints.
std::vector<double> oracle_grid(const GeneratorSpec& spec, int points = 121);

struct CompareConfig {
    double tol = 0.1;            // sup-distance threshold on joint support
    double support_tol = 0.45;   // allowed smear beyond the oracle support
    double mismatch_floor = 0.25; // estimate mass required to flag a mismatch
};

struct CompareReport {
    double sup_distance = 0.0;   // over grid points where both curves finite
    double witness_h = 0.0;
    double support_mismatch = 0.0; // largest flagged off-support estimate
    double mismatch_h = 0.0;
    bool valid = true;

    std::string verdict() const { return valid ? "VALID" : "INVALID"; }
};

// Formalism check of an estimated curve against an oracle curve on a common
// grid. INVALID when the sup distance exceeds tol or the estimate places
// mass >= mismatch_floor farther than support_tol from the oracle support.
CompareReport compare(const SpectrumCurve& estimate, const SpectrumCurve& oracle,
                      const CompareConfig& cfg = {});

}  // namespace mflab
