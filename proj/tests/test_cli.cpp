#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mflab/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* path = std::getenv("MFLAB_CLI");
    REQUIRE_MESSAGE(path != nullptr, "MFLAB_CLI must point at the mflab binary");
    return path;
}

struct Run {
    int exit_code;
    std::string out;
};

Run run(const std::string& args, const fs::path& cwd) {
    fs::path outfile = cwd / "cmd_output.txt";
    std::string cmd = "cd '" + cwd.string() + "' && '" + cli() + "' " + args +
                      " > '" + outfile.string() + "' 2>&1";
    int rc = std::system(cmd.c_str());
    std::ifstream is(outfile);
    std::ostringstream ss;
    ss << is.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("mflab_cli_" + std::to_string(rand()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
};

void write(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* kTwoExpCfg = R"({
  "generator": {"construction": "two_exponent", "alpha": 0.5, "beta": 1.0,
                 "eta": 0.5, "jmax": 12},
  "estimator": {"scale_window": [5, 11],
                 "h_grid": [0.4, 0.5, 0.75, 1.0, 1.1]},
  "compare": {"tol": 0.1}
})";

}  // namespace

TEST_CASE("generate is deterministic byte for byte") {
    TempDir tmp;
    write(tmp.dir / "cfg.json", kTwoExpCfg);
    auto r1 = run("generate --config cfg.json --out run1", tmp.dir);
    REQUIRE(r1.exit_code == 0);
    auto r2 = run("generate --config cfg.json --out run2", tmp.dir);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(tmp.dir / "run1/coeffs_two_exponent.mfld") ==
          slurp(tmp.dir / "run2/coeffs_two_exponent.mfld"));
}

TEST_CASE("precondition violations exit 2 and name the problem") {
    TempDir tmp;
    write(tmp.dir / "bad.json", R"({"generator": {"construction": "duplicated_lws",
        "alpha": 0.4, "eta": 0.8, "jmax": 8}, "seeds": [1]})");
    auto r = run("generate --config bad.json", tmp.dir);
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("eta") != std::string::npos);
}

TEST_CASE("missing input files exit 3") {
    TempDir tmp;
    auto r = run("spectrum nothere.mfld --which largedev", tmp.dir);
    CHECK(r.exit_code == 3);
}

TEST_CASE("full pipeline: generate, leaders, spectrum, compare, holder") {
    TempDir tmp;
    write(tmp.dir / "cfg.json", kTwoExpCfg);
    REQUIRE(run("generate --config cfg.json --out .", tmp.dir).exit_code == 0);
    REQUIRE(run("leaders coeffs_two_exponent.mfld --out lead.mfld", tmp.dir)
                .exit_code == 0);
    REQUIRE(run("spectrum coeffs_two_exponent.mfld --which largedev "
                "--config cfg.json --out est", tmp.dir)
                .exit_code == 0);
    CHECK(fs::exists(tmp.dir / "est_largedev.csv"));
    CHECK(fs::exists(tmp.dir / "est_diag.json"));

    auto curve = mflab::read_curve_csv((tmp.dir / "est_largedev.csv").string());
    REQUIRE(curve.grid.size() == 5);
    CHECK(curve.values[1] > 0.4);   // rho at alpha
    CHECK(curve.values[3] > 0.95);  // rho at beta

    auto cmp = run("compare est_largedev.csv --config cfg.json --out verdict.json",
                   tmp.dir);
    REQUIRE(cmp.exit_code == 0);
    CHECK(cmp.out.find("INVALID") != std::string::npos);
    CHECK(cmp.out.find("supDistance") != std::string::npos);

    // the same estimate tracks the oracle rho curve
    auto cmp_rho = run("compare est_largedev.csv --config cfg.json "
                       "--which-oracle rho", tmp.dir);
    REQUIRE(cmp_rho.exit_code == 0);
    CHECK(cmp_rho.out.find("VALID") != std::string::npos);

    // without a configured h grid the estimator derives one from the field
    auto derived = run("spectrum coeffs_two_exponent.mfld --which largedev "
                       "--scale-window 5:11 --out auto", tmp.dir);
    REQUIRE(derived.exit_code == 0);
    auto autocurve = mflab::read_curve_csv((tmp.dir / "auto_largedev.csv").string());
    CHECK(autocurve.grid.size() == 121);

    auto hold = run("holder coeffs_two_exponent.mfld --points 0.0,0.9 "
                    "--scale-window 5:11", tmp.dir);
    REQUIRE(hold.exit_code == 0);
    CHECK(hold.out.find("x,hhat") != std::string::npos);

    // spectrum --which holder routes to the same estimator
    auto hold2 = run("spectrum coeffs_two_exponent.mfld --which holder "
                     "--points 0.9 --scale-window 5:11", tmp.dir);
    CHECK(hold2.exit_code == 0);
    CHECK(hold2.out.find("1.0") != std::string::npos);

    // hull and legendre variants emit curves and plot data
    REQUIRE(run("spectrum coeffs_two_exponent.mfld --which hull "
                "--config cfg.json --out est", tmp.dir).exit_code == 0);
    CHECK(fs::exists(tmp.dir / "est_hull.csv"));
    REQUIRE(run("spectrum coeffs_two_exponent.mfld --which legendre "
                "--config cfg.json --out est", tmp.dir).exit_code == 0);
    CHECK(fs::exists(tmp.dir / "est_legendre.csv"));
    CHECK(fs::exists(tmp.dir / "est_legendre.dat"));
}

TEST_CASE("grid mismatch between estimate and configured grid exits 4") {
    TempDir tmp;
    write(tmp.dir / "cfg.json", kTwoExpCfg);
    REQUIRE(run("generate --config cfg.json --out .", tmp.dir).exit_code == 0);
    REQUIRE(run("spectrum coeffs_two_exponent.mfld --which largedev "
                "--config cfg.json --out est", tmp.dir).exit_code == 0);
    write(tmp.dir / "other.json", R"({
      "generator": {"construction": "two_exponent", "alpha": 0.5, "beta": 1.0,
                     "eta": 0.5, "jmax": 12},
      "estimator": {"h_grid": [0.1, 0.2]}})");
    auto r = run("compare est_largedev.csv --config other.json", tmp.dir);
    CHECK(r.exit_code == 4);
}

TEST_CASE("oracle command emits the three curves") {
    TempDir tmp;
    write(tmp.dir / "cfg.json", kTwoExpCfg);
    auto r = run("oracle --config cfg.json --out orc", tmp.dir);
    REQUIRE(r.exit_code == 0);
    for (const char* suffix : {"orc_oracleD.csv", "orc_oracleRho.csv", "orc_oracleL.csv"})
        CHECK(fs::exists(tmp.dir / suffix));
    CHECK(r.out.find("failureGap") != std::string::npos);
}

TEST_CASE("genspace commands") {
    TempDir tmp;
    REQUIRE(run("genspace make --alpha 0.5 --beta 1.0 --jmax 4096 --out seq.csv",
                tmp.dir).exit_code == 0);
    auto boyd = run("genspace boyd --seq seq.csv", tmp.dir);
    REQUIRE(boyd.exit_code == 0);
    CHECK(boyd.out.find("lower") != std::string::npos);

    write(tmp.dir / "cfg.json", kTwoExpCfg);
    REQUIRE(run("generate --config cfg.json --out .", tmp.dir).exit_code == 0);
    // the sequence is long enough for the jmax-12 field
    auto norm = run("genspace norm --seq seq.csv --input coeffs_two_exponent.mfld",
                    tmp.dir);
    REQUIRE(norm.exit_code == 0);
    CHECK(norm.out.find("norm") != std::string::npos);
    REQUIRE(run("genspace project --seq seq.csv --input coeffs_two_exponent.mfld "
                "-N 3 --out proj.mfld", tmp.dir).exit_code == 0);
    auto check = run("genspace check --seq seq.csv --input proj.mfld", tmp.dir);
    REQUIRE(check.exit_code == 0);
    CHECK(check.out.find("\"C\"") != std::string::npos);
}

TEST_CASE("seeded generation writes one file per seed") {
    TempDir tmp;
    write(tmp.dir / "cfg.json", R"({
      "generator": {"construction": "lws_cantor", "alpha": 0.5, "eta": 0.4,
                     "r": [1, 3], "jmax": 8},
      "seeds": [11, 12, 13]})");
    auto r = run("generate --config cfg.json --out fields", tmp.dir);
    REQUIRE(r.exit_code == 0);
    for (int s : {11, 12, 13})
        CHECK(fs::exists(tmp.dir / ("fields/coeffs_lws_cantor_seed" +
                                    std::to_string(s) + ".mfld")));
}
