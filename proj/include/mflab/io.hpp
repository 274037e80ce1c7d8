#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mflab/field.hpp"
#include "mflab/genspace.hpp"
#include "mflab/spectra.hpp"

namespace mflab {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Binary coefficient file: header {magic "MFLD", version u32, jmax u32,
// flags u32}, then for each scale j a dense array of 2^j u32 exponent slots
// (-log2 value in 16.16 fixed point, 0xFFFFFFFF = zero coefficient).
// Lossless for every construction here. flags bit 0 marks a leader field.
inline constexpr std::uint32_t kFieldFlagLeaders = 1u;

void write_field(const std::string& path, const CoefficientField& field,
                 std::uint32_t flags = 0);
CoefficientField read_field(const std::string& path, std::uint32_t* flags = nullptr);

// Sparse CSV alternative "j,k,neglog2"; missing cells are zero.
CoefficientField read_field_csv(const std::string& path);
void write_field_csv(const std::string& path, const CoefficientField& field);

// Reads either format, by sniffing the magic.
CoefficientField read_field_any(const std::string& path, std::uint32_t* flags = nullptr);

// SpectrumCurve CSV: header "h,value,kind"; -inf spelled "-inf". The
// h = +infinity point, when finite, is appended as h = "inf".
void write_curve_csv(const std::string& path, const SpectrumCurve& curve);
SpectrumCurve read_curve_csv(const std::string& path);

// Admissible sequence CSV. Written with header "j,log2sigma" (raw sigma
// overflows double at the scales used here); the reader also accepts
// "j,sigma" files with literal values.
void write_sequence_csv(const std::string& path, const AdmissibleSequence& seq);
AdmissibleSequence read_sequence_csv(const std::string& path);

}  // namespace mflab
