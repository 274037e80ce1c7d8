#include "mflab/field.hpp"

namespace mflab {

CoefficientField CoefficientField::zeros(int jmax) {
    CoefficientField f;
    f.jmax = jmax;
    f.code.resize(jmax + 1);
    for (int j = 0; j <= jmax; ++j)
        f.code[j].assign(std::size_t(1) << j, kZeroCode);
    return f;
}

std::size_t CoefficientField::cell_count() const {
    std::size_t n = 0;
    for (const auto& row : code) n += row.size();
    return n;
}

}  // namespace mflab
