#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mflab {

// Exact rational on int64 with 128-bit cross products for comparisons.
// Denominators stay within q^n for the Cantor constructions used here
// (q <= 4, n <= 30), far from overflow.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;

    bool operator==(const Rational& o) const;
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const;

    double to_double() const { return double(num) / double(den); }
};

// Scale/translation address of the dyadic interval [k 2^-j, (k+1) 2^-j).
struct DyadicIndex {
    int j = 0;
    std::int64_t k = 0;

    bool operator==(const DyadicIndex& o) const { return j == o.j && k == o.k; }
    bool operator<(const DyadicIndex& o) const {
        return j != o.j ? j < o.j : k < o.k;
    }
};

// Closed interval with exact rational endpoints.
struct Interval {
    Rational a, b;
};

// One stage of a Cantor construction: pairwise disjoint closed intervals in [0,1].
struct IntervalSet {
    int stage = 0;
    std::vector<Interval> intervals;

    double total_length() const;
};

enum class CantorKind {
    Symmetric,        // dissection ratio r = p/q in (0, 1/2)
    AsymmetricQuarter, // remove the second quarter of each interval
    QuarterSymmetric,  // symmetric with r = 1/4
};

// How the stage index n_j is derived from the scale j.
// Natural: n_j = floor(j / log2(1/r)); FixedDivisor: n_j = floor(j / d).
struct StageSchedule {
    enum class Kind { Natural, FixedDivisor } kind = Kind::Natural;
    int divisor = 0;

    static StageSchedule natural() { return {Kind::Natural, 0}; }
    static StageSchedule fixed(int d) { return {Kind::FixedDivisor, d}; }
};

struct CantorSpec {
    CantorKind kind = CantorKind::Symmetric;
    std::int64_t r_num = 1;
    std::int64_t r_den = 3;
    StageSchedule schedule = StageSchedule::natural();

    static CantorSpec symmetric(std::int64_t p, std::int64_t q,
                                std::optional<StageSchedule> sched = {});
    static CantorSpec asymmetric_quarter();
    // The duplicated model: C(1/4) with n_j = floor(j/4).
    static CantorSpec quarter_symmetric_duplicated();

    int stage_index(int j) const;
};

// Closed-form Hausdorff dimension of the limit set.
double cantor_dimension(const CantorSpec& spec);

// Stage-n interval set; memoized per spec, endpoints exact.
const IntervalSet& cantor_stage(const CantorSpec& spec, int n);

// All scale-j cells contained in stage C_{n_j}.
std::vector<DyadicIndex> gamma_j(const CantorSpec& spec, int j);

// Quarter-symmetric model only: scale-j cells meeting the limit set K,
// computed as cells meeting stage C_{ceil(j/2)} (stage intervals taken
// half-open on the right so touching at a single endpoint does not count;
// this gives #R_j = 2^{j/2} exactly at j = 4n).
std::vector<DyadicIndex> r_j(int j);

// Does [k 2^-j, (k+1) 2^-j) intersect the limit Cantor set?
bool cantor_meets(const CantorSpec& spec, const DyadicIndex& cell);

// Cells of scale j contained in / meeting a stage set (exact arithmetic).
std::vector<DyadicIndex> cells_inside(const IntervalSet& stage, int j);
std::vector<DyadicIndex> cells_meeting(const IntervalSet& stage, int j);

}  // namespace mflab
