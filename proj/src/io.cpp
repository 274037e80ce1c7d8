#include "mflab/io.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mflab {

namespace {

constexpr char kMagic[4] = {'M', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kZeroSlot = 0xFFFFFFFFu;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw IoError("unexpected end of file");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
           (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

// stage everything in a temp file, then rename into place
class AtomicWriter {
  public:
    explicit AtomicWriter(const std::string& path)
        : path_(path), tmp_(path + ".tmp"), os_(tmp_, std::ios::binary) {
        if (!os_) throw IoError("cannot open " + tmp_ + " for writing");
    }
    std::ofstream& stream() { return os_; }
    void commit() {
        os_.close();
        if (!os_) throw IoError("write failed: " + tmp_);
        std::filesystem::rename(tmp_, path_);
    }

  private:
    std::string path_, tmp_;
    std::ofstream os_;
};

std::string format_value(double v) {
    if (v == kNegInf) return "-inf";
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

}  // namespace

void write_field(const std::string& path, const CoefficientField& field,
                 std::uint32_t flags) {
    AtomicWriter w(path);
    auto& os = w.stream();
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, std::uint32_t(field.jmax));
    put_u32(os, flags);
    for (int j = 0; j <= field.jmax; ++j) {
        for (ExpCode c : field.code[j]) {
            if (c == kZeroCode) {
                put_u32(os, kZeroSlot);
            } else {
                if (c < 0) throw IoError("negative exponent not representable in MFLD");
                put_u32(os, std::uint32_t(c));
            }
        }
    }
    w.commit();
}

CoefficientField read_field(const std::string& path, std::uint32_t* flags) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(path + ": not a MFLD file");
    std::uint32_t version = get_u32(is);
    if (version != kVersion) throw IoError(path + ": unsupported version");
    std::uint32_t jmax = get_u32(is);
    if (jmax > 30) throw IoError(path + ": jmax out of range");
    std::uint32_t fl = get_u32(is);
    if (flags) *flags = fl;
    CoefficientField f = CoefficientField::zeros(int(jmax));
    for (std::uint32_t j = 0; j <= jmax; ++j) {
        for (auto& c : f.code[j]) {
            std::uint32_t v = get_u32(is);
            if (v == kZeroSlot) {
                c = kZeroCode;
            } else if (v > std::uint32_t(std::numeric_limits<ExpCode>::max() - 1)) {
                throw IoError(path + ": invalid exponent slot");
            } else {
                c = ExpCode(v);
            }
        }
    }
    return f;
}

void write_field_csv(const std::string& path, const CoefficientField& field) {
    AtomicWriter w(path);
    auto& os = w.stream();
    os << "j,k,neglog2\n";
    os.precision(12);
    for (int j = 0; j <= field.jmax; ++j)
        for (std::int64_t k = 0; k < (std::int64_t(1) << j); ++k)
            if (field.code[j][k] != kZeroCode)
                os << j << ',' << k << ',' << code_to_exp(field.code[j][k]) << '\n';
    w.commit();
}

CoefficientField read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw IoError(path + ": empty file");
    struct Row {
        int j;
        std::int64_t k;
        double e;
    };
    std::vector<Row> rows;
    int jmax = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        Row r;
        char c1, c2;
        if (!(ss >> r.j >> c1 >> r.k >> c2 >> r.e) || c1 != ',' || c2 != ',')
            throw IoError(path + ": bad row '" + line + "'");
        if (r.j < 0 || r.j > 30 || r.k < 0 || r.k >= (std::int64_t(1) << r.j))
            throw IoError(path + ": index out of range in '" + line + "'");
        jmax = std::max(jmax, r.j);
        rows.push_back(r);
    }
    CoefficientField f = CoefficientField::zeros(jmax);
    for (const auto& r : rows) f.code[r.j][r.k] = exp_to_code(r.e);
    return f;
}

CoefficientField read_field_any(const std::string& path, std::uint32_t* flags) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[4] = {0, 0, 0, 0};
    is.read(magic, 4);
    is.close();
    if (std::memcmp(magic, kMagic, 4) == 0) return read_field(path, flags);
    if (flags) *flags = 0;
    return read_field_csv(path);
}

void write_curve_csv(const std::string& path, const SpectrumCurve& curve) {
    AtomicWriter w(path);
    auto& os = w.stream();
    os << "h,value,kind\n";
    os.precision(12);
    std::string kind = curve_kind_name(curve.kind);
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        os << curve.grid[i] << ',' << format_value(curve.values[i]) << ',' << kind << '\n';
    if (curve.at_infinity > kNegInf)
        os << "inf," << format_value(curve.at_infinity) << ',' << kind << '\n';
    w.commit();
}

SpectrumCurve read_curve_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("h,value", 0) != 0)
        throw IoError(path + ": not a spectrum CSV");
    SpectrumCurve curve;
    bool kind_set = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string hs, vs, ks;
        if (!std::getline(ss, hs, ',') || !std::getline(ss, vs, ',') ||
            !std::getline(ss, ks))
            throw IoError(path + ": bad row '" + line + "'");
        double v = vs == "-inf" ? kNegInf : std::stod(vs);
        if (!kind_set) {
            for (CurveKind k : {CurveKind::Legendre, CurveKind::LargeDeviation,
                                CurveKind::IncreasingHull, CurveKind::OracleD,
                                CurveKind::OracleRho, CurveKind::OracleL})
                if (curve_kind_name(k) == ks) curve.kind = k;
            kind_set = true;
        }
        if (hs == "inf") {
            curve.at_infinity = v;
        } else {
            curve.grid.push_back(std::stod(hs));
            curve.values.push_back(v);
        }
    }
    return curve;
}

void write_sequence_csv(const std::string& path, const AdmissibleSequence& seq) {
    AtomicWriter w(path);
    auto& os = w.stream();
    os << "j,log2sigma\n";
    os.precision(12);
    for (int j = 0; j <= seq.jmax; ++j) os << j << ',' << seq.log2_sigma[j] << '\n';
    w.commit();
}

AdmissibleSequence read_sequence_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::string header;
    if (!std::getline(is, header)) throw IoError(path + ": empty file");
    bool log_form = header.rfind("j,log2sigma", 0) == 0;
    if (!log_form && header.rfind("j,sigma", 0) != 0)
        throw IoError(path + ": expected 'j,sigma' or 'j,log2sigma' header");
    AdmissibleSequence seq;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        int j;
        char comma;
        double v;
        if (!(ss >> j >> comma >> v) || comma != ',')
            throw IoError(path + ": bad row '" + line + "'");
        if (j != int(seq.log2_sigma.size()))
            throw IoError(path + ": rows must list j = 0,1,2,... in order");
        if (!log_form) {
            if (v <= 0) throw IoError(path + ": sigma must be positive");
            v = std::log2(v);
        }
        seq.log2_sigma.push_back(v);
    }
    if (seq.log2_sigma.empty()) throw IoError(path + ": no rows");
    seq.jmax = int(seq.log2_sigma.size()) - 1;
    return seq;
}

}  // namespace mflab
