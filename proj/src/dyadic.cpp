#include "mflab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

namespace mflab {

namespace {

using i128 = __int128;

std::int64_t checked64(i128 v) {
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
        throw std::overflow_error("rational overflow");
    return std::int64_t(v);
}

std::int64_t floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return checked64(q);
}

std::int64_t ceil_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return checked64(q);
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) { num = -num; den = -den; }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
}

Rational Rational::operator+(const Rational& o) const {
    std::int64_t g = std::gcd(den, o.den);
    return Rational(checked64(i128(num) * (o.den / g) + i128(o.num) * (den / g)),
                    checked64(i128(den / g) * o.den));
}
Rational Rational::operator-(const Rational& o) const {
    std::int64_t g = std::gcd(den, o.den);
    return Rational(checked64(i128(num) * (o.den / g) - i128(o.num) * (den / g)),
                    checked64(i128(den / g) * o.den));
}
Rational Rational::operator*(const Rational& o) const {
    std::int64_t g1 = std::gcd(num < 0 ? -num : num, o.den);
    std::int64_t g2 = std::gcd(o.num < 0 ? -o.num : o.num, den);
    return Rational(checked64(i128(num / g1) * (o.num / g2)),
                    checked64(i128(den / g2) * (o.den / g1)));
}
bool Rational::operator==(const Rational& o) const {
    return i128(num) * o.den == i128(o.num) * den;
}
bool Rational::operator<(const Rational& o) const {
    return i128(num) * o.den < i128(o.num) * den;
}
bool Rational::operator<=(const Rational& o) const {
    return i128(num) * o.den <= i128(o.num) * den;
}

double IntervalSet::total_length() const {
    double s = 0.0;
    for (const auto& iv : intervals) s += (iv.b - iv.a).to_double();
    return s;
}

CantorSpec CantorSpec::symmetric(std::int64_t p, std::int64_t q,
                                 std::optional<StageSchedule> sched) {
    if (p <= 0 || q <= 0 || 2 * p >= q)
        throw std::invalid_argument("symmetric Cantor needs 0 < r < 1/2");
    std::int64_t g = std::gcd(p, q);
    CantorSpec s;
    s.kind = CantorKind::Symmetric;
    s.r_num = p / g;
    s.r_den = q / g;
    s.schedule = sched.value_or(StageSchedule::natural());
    return s;
}

CantorSpec CantorSpec::asymmetric_quarter() {
    CantorSpec s;
    s.kind = CantorKind::AsymmetricQuarter;
    s.r_num = 1;
    s.r_den = 4;
    s.schedule = StageSchedule::fixed(2);
    return s;
}

CantorSpec CantorSpec::quarter_symmetric_duplicated() {
    CantorSpec s;
    s.kind = CantorKind::QuarterSymmetric;
    s.r_num = 1;
    s.r_den = 4;
    s.schedule = StageSchedule::fixed(4);
    return s;
}

int CantorSpec::stage_index(int j) const {
    if (j < 0) throw std::invalid_argument("negative scale");
    if (schedule.kind == StageSchedule::Kind::FixedDivisor)
        return j / schedule.divisor;
    // natural schedule floor(j / log2(1/r)); exact when 1/r is a power of 2
    if (r_num == 1 && (r_den & (r_den - 1)) == 0) {
        int t = 0;
        for (std::int64_t v = r_den; v > 1; v >>= 1) ++t;
        return j / t;
    }
    return int(std::floor(double(j) / std::log2(double(r_den) / double(r_num))));
}

double cantor_dimension(const CantorSpec& spec) {
    if (spec.kind == CantorKind::AsymmetricQuarter)
        return std::log2((1.0 + std::sqrt(5.0)) / 2.0);
    return std::log(2.0) / std::log(double(spec.r_den) / double(spec.r_num));
}

namespace {

std::vector<Interval> subdivide(const CantorSpec& spec, const Interval& iv) {
    Rational len = iv.b - iv.a;
    if (spec.kind == CantorKind::AsymmetricQuarter) {
        Rational quarter = len * Rational(1, 4);
        Rational half = len * Rational(1, 2);
        return {{iv.a, iv.a + quarter}, {iv.a + half, iv.b}};
    }
    Rational r(spec.r_num, spec.r_den);
    Rational rl = len * r;
    return {{iv.a, iv.a + rl}, {iv.b - rl, iv.b}};
}

struct StageCache {
    std::mutex mu;
    std::map<std::tuple<int, std::int64_t, std::int64_t>, std::vector<IntervalSet>> stages;
};

StageCache& cache() {
    static StageCache c;
    return c;
}

}  // namespace

const IntervalSet& cantor_stage(const CantorSpec& spec, int n) {
    if (n < 0) throw std::invalid_argument("negative stage");
    auto& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto key = std::make_tuple(int(spec.kind), spec.r_num, spec.r_den);
    auto& vec = c.stages[key];
    if (vec.empty()) {
        IntervalSet s0;
        s0.stage = 0;
        s0.intervals = {{Rational(0, 1), Rational(1, 1)}};
        vec.push_back(std::move(s0));
    }
    while (int(vec.size()) <= n) {
        IntervalSet next;
        next.stage = int(vec.size());
        for (const auto& iv : vec.back().intervals)
            for (auto& child : subdivide(spec, iv))
                next.intervals.push_back(child);
        vec.push_back(std::move(next));
    }
    return vec[n];
}

std::vector<DyadicIndex> cells_inside(const IntervalSet& stage, int j) {
    std::vector<DyadicIndex> out;
    const i128 two_j = i128(1) << j;
    for (const auto& iv : stage.intervals) {
        std::int64_t k0 = ceil_div(i128(iv.a.num) * two_j, iv.a.den);
        std::int64_t k1 = floor_div(i128(iv.b.num) * two_j, iv.b.den) - 1;
        k0 = std::max<std::int64_t>(k0, 0);
        k1 = std::min<std::int64_t>(k1, checked64(two_j - 1));
        for (std::int64_t k = k0; k <= k1; ++k) out.push_back({j, k});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<DyadicIndex> cells_meeting(const IntervalSet& stage, int j) {
    // stage intervals taken half-open [a, b): a cell touching b alone is out
    std::vector<DyadicIndex> out;
    const i128 two_j = i128(1) << j;
    for (const auto& iv : stage.intervals) {
        std::int64_t k0 = floor_div(i128(iv.a.num) * two_j, iv.a.den);
        std::int64_t k1 = ceil_div(i128(iv.b.num) * two_j, iv.b.den) - 1;
        k0 = std::max<std::int64_t>(k0, 0);
        k1 = std::min<std::int64_t>(k1, checked64(two_j - 1));
        for (std::int64_t k = k0; k <= k1; ++k) out.push_back({j, k});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<DyadicIndex> gamma_j(const CantorSpec& spec, int j) {
    return cells_inside(cantor_stage(spec, spec.stage_index(j)), j);
}

std::vector<DyadicIndex> r_j(int j) {
    CantorSpec spec = CantorSpec::quarter_symmetric_duplicated();
    int n = (j + 1) / 2;
    return cells_meeting(cantor_stage(spec, n), j);
}

bool cantor_meets(const CantorSpec& spec, const DyadicIndex& cell) {
    // cell = [lo, hi) / 2^j; stage interval endpoints always belong to the
    // limit set, so recurse until an endpoint lands in the cell.
    Rational lo(cell.k, 1), hi(cell.k + 1, 1);
    Rational two_j(std::int64_t(1) << cell.j, 1);
    auto in_cell = [&](const Rational& x) {
        Rational s = x * two_j;
        return lo <= s && s < hi;
    };
    auto overlaps = [&](const Interval& iv) {
        // closed [a,b] against half-open [lo,hi)
        return iv.a * two_j < hi && lo <= iv.b * two_j;
    };
    std::vector<Interval> work = {{Rational(0, 1), Rational(1, 1)}};
    while (!work.empty()) {
        Interval iv = work.back();
        work.pop_back();
        if (!overlaps(iv)) continue;
        if (in_cell(iv.a) || in_cell(iv.b)) return true;
        for (auto& child : subdivide(spec, iv)) work.push_back(child);
    }
    return false;
}

}  // namespace mflab
