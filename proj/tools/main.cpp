#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mflab/generators.hpp"
#include "mflab/io.hpp"
#include "mflab/leaders.hpp"
#include "mflab/oracles.hpp"
#include "mflab/spectra.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace mflab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitIo = 3;
constexpr int kExitMismatch = 4;

struct GridMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw IoError("config " + path + ": " + e.what());
    }
    return j;
}

void parse_ratio(const json& v, std::int64_t& num, std::int64_t& den) {
    if (v.is_array() && v.size() == 2) {
        num = v[0].get<std::int64_t>();
        den = v[1].get<std::int64_t>();
        return;
    }
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            num = std::stoll(s.substr(0, slash));
            den = std::stoll(s.substr(slash + 1));
            return;
        }
    }
    throw PreconditionError("r must be \"p/q\" or [p, q]");
}

GeneratorSpec parse_generator(const json& g) {
    GeneratorSpec spec;
    if (!g.contains("construction"))
        throw PreconditionError("generator.construction missing");
    spec.construction = g.at("construction").get<std::string>();
    if (spec.construction == "duplicate") {
        if (!g.contains("source"))
            throw PreconditionError("duplicate needs generator.source");
        GeneratorSpec src = parse_generator(g.at("source"));
        spec = src;
        spec.construction = "duplicate";
        spec.duplicate_source = src.construction;
        spec.source_jmax = src.jmax;
        spec.m = g.value("m", 2.0);
    }
    auto grab = [&](const char* key, double& slot) {
        if (g.contains(key)) slot = g.at(key).get<double>();
    };
    grab("alpha", spec.alpha);
    grab("beta", spec.beta);
    grab("gamma", spec.gamma);
    grab("eta", spec.eta);
    grab("C", spec.C);
    if (spec.construction != "duplicate") grab("m", spec.m);
    if (g.contains("r")) parse_ratio(g.at("r"), spec.r_num, spec.r_den);
    if (g.contains("jmax")) spec.jmax = g.at("jmax").get<int>();
    if (g.contains("seed")) spec.seed = g.at("seed").get<std::uint64_t>();
    if (g.contains("background_gamma"))
        spec.background_gamma = g.at("background_gamma").get<double>();
    return spec;
}

EstimatorConfig parse_estimator(const json& e) {
    EstimatorConfig cfg;
    if (e.contains("scale_window")) {
        cfg.j1 = e.at("scale_window").at(0).get<int>();
        cfg.j2 = e.at("scale_window").at(1).get<int>();
    }
    if (e.contains("eps_schedule"))
        cfg.eps_schedule = e.at("eps_schedule").get<std::vector<double>>();
    if (e.contains("p_grid")) cfg.p_grid = e.at("p_grid").get<std::vector<double>>();
    if (e.contains("h_grid")) cfg.h_grid = e.at("h_grid").get<std::vector<double>>();
    if (e.contains("zero_policy")) {
        std::string z = e.at("zero_policy").get<std::string>();
        if (z == "exclude") cfg.zero_policy = ZeroPolicy::Exclude;
        else if (z == "floor") cfg.zero_policy = ZeroPolicy::Floor;
        else throw PreconditionError("zero_policy must be exclude or floor");
    }
    if (e.contains("floor_B")) cfg.floor_B = e.at("floor_B").get<double>();
    if (e.contains("rho_method")) {
        std::string m = e.at("rho_method").get<std::string>();
        if (m == "bandmax") cfg.rho_method = RhoMethod::BandMax;
        else if (m == "hullslope") cfg.rho_method = RhoMethod::HullSlope;
        else throw PreconditionError("rho_method must be bandmax or hullslope");
    }
    if (e.contains("min_count")) cfg.min_count = e.at("min_count").get<double>();
    if (e.contains("weighted_fit")) cfg.weighted_fit = e.at("weighted_fit").get<bool>();
    return cfg;
}

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jmax;
    std::string scale_window;
    std::string eps_schedule;
    std::string out;

    json config;
    void load() {
        if (!config_path.empty()) config = load_json(config_path);
    }
    GeneratorSpec generator() {
        if (!config.contains("generator"))
            throw PreconditionError("config has no generator section");
        GeneratorSpec spec = parse_generator(config.at("generator"));
        if (jmax) spec.jmax = *jmax;
        if (seed) spec.seed = *seed;
        return spec;
    }
    EstimatorConfig estimator() {
        EstimatorConfig cfg;
        if (config.contains("estimator")) cfg = parse_estimator(config.at("estimator"));
        if (!scale_window.empty()) {
            auto colon = scale_window.find(':');
            if (colon == std::string::npos)
                throw PreconditionError("--scale-window wants j1:j2");
            cfg.j1 = std::stoi(scale_window.substr(0, colon));
            cfg.j2 = std::stoi(scale_window.substr(colon + 1));
        }
        if (!eps_schedule.empty()) {
            cfg.eps_schedule.clear();
            std::istringstream ss(eps_schedule);
            std::string tok;
            while (std::getline(ss, tok, ',')) cfg.eps_schedule.push_back(std::stod(tok));
            if (cfg.eps_schedule.empty())
                throw PreconditionError("--eps-schedule wants e1,e2,...");
        }
        return cfg;
    }
    std::vector<std::uint64_t> seeds() {
        if (seed) return {*seed};
        if (config.contains("seeds"))
            return config.at("seeds").get<std::vector<std::uint64_t>>();
        return {};
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_out = true) {
    cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
    cmd->add_option("--seed", opts.seed, "seed override");
    cmd->add_option("--jmax", opts.jmax, "finest scale override");
    cmd->add_option("--scale-window", opts.scale_window, "estimator window j1:j2");
    cmd->add_option("--eps-schedule", opts.eps_schedule, "epsilon schedule e1,e2,...");
    if (with_out) cmd->add_option("--out", opts.out, "output path or directory");
}

std::string field_filename(const GeneratorSpec& spec,
                           std::optional<std::uint64_t> seed) {
    std::string name = "coeffs_" + spec.construction;
    if (spec.duplicate_source) name += "_" + *spec.duplicate_source;
    if (seed) name += "_seed" + std::to_string(*seed);
    return name + ".mfld";
}

std::vector<LeaderField> load_leader_fields(const std::vector<std::string>& inputs) {
    std::vector<LeaderField> lfs;
    for (const auto& path : inputs) {
        std::uint32_t flags = 0;
        CoefficientField f = read_field_any(path, &flags);
        if (flags & kFieldFlagLeaders) {
            LeaderField lf;
            lf.jmax = f.jmax;
            lf.code = f.code;
            int margin = (f.jmax + 9) / 10;
            lf.truncation_bias.assign(f.jmax + 1, false);
            for (int j = std::max(0, f.jmax - margin + 1); j <= f.jmax; ++j)
                lf.truncation_bias[j] = true;
            lfs.push_back(std::move(lf));
        } else {
            lfs.push_back(compute_leaders(f));
        }
    }
    return lfs;
}

std::vector<const LeaderField*> pointers(const std::vector<LeaderField>& lfs) {
    std::vector<const LeaderField*> ptrs;
    for (const auto& lf : lfs) ptrs.push_back(&lf);
    return ptrs;
}

json curve_to_json(const SpectrumCurve& c) {
    json j;
    j["kind"] = curve_kind_name(c.kind);
    j["h"] = c.grid;
    json vals = json::array();
    for (double v : c.values)
        vals.push_back(v == kNegInf ? json("-inf") : json(v));
    j["value"] = vals;
    if (c.at_infinity > kNegInf) j["atInfinity"] = c.at_infinity;
    return j;
}

int cmd_generate(CommonOpts& opts) {
    GeneratorSpec spec = opts.generator();
    fs::path outdir = opts.out.empty() ? fs::path(".") : fs::path(opts.out);
    fs::create_directories(outdir);
    std::vector<std::uint64_t> seeds = opts.seeds();
    bool random = is_random_construction(spec);
    if (random && seeds.empty())
        throw PreconditionError("random construction needs --seed or config seeds");
    if (!random) {
        CoefficientField f = build_field(spec);
        fs::path p = outdir / field_filename(spec, {});
        write_field(p.string(), f);
        std::cout << p.string() << "\n";
        return kExitOk;
    }
    for (std::uint64_t s : seeds) {
        CoefficientField f = build_field(spec, s);
        fs::path p = outdir / field_filename(spec, s);
        write_field(p.string(), f);
        std::cout << p.string() << "\n";
    }
    return kExitOk;
}

int cmd_leaders(const std::string& input, CommonOpts& opts) {
    CoefficientField f = read_field_any(input);
    LeaderField lf = compute_leaders(f);
    CoefficientField out;
    out.jmax = lf.jmax;
    out.code = lf.code;
    std::string path = opts.out.empty() ? input + ".leaders" : opts.out;
    write_field(path, out, kFieldFlagLeaders);
    std::cout << path << "\n";
    return kExitOk;
}

int run_holder(const std::vector<std::string>& inputs, const std::string& points_arg,
               const std::string& points_file, CommonOpts& opts) {
    if (inputs.size() != 1)
        throw PreconditionError("holder wants exactly one input field");
    std::vector<double> points;
    if (!points_file.empty()) {
        std::ifstream is(points_file);
        if (!is) throw IoError("cannot open " + points_file);
        double x;
        while (is >> x) points.push_back(x);
    } else if (!points_arg.empty()) {
        std::istringstream ss(points_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) points.push_back(std::stod(tok));
    }
    if (points.empty()) throw PreconditionError("holder needs --points or --points-file");
    auto lfs = load_leader_fields(inputs);
    EstimatorConfig cfg = opts.estimator();
    cfg.finalize(lfs[0].jmax);

    std::ostringstream csv;
    csv << "x,hhat,slope,zero_leaders\n";
    csv.precision(12);
    for (double x : points) {
        HolderEstimate est = holder_estimate(x, lfs[0], cfg.j1, cfg.j2);
        csv << x << ',' << (est.all_zero ? std::string("inf") : std::to_string(est.hhat))
            << ',' << est.slope << ',' << est.zero_leaders << '\n';
    }
    if (opts.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream os(opts.out);
        if (!os) throw IoError("cannot open " + opts.out);
        os << csv.str();
        std::cout << opts.out << "\n";
    }
    return kExitOk;
}

int cmd_spectrum(const std::vector<std::string>& inputs, const std::string& which,
                 const std::string& points_arg, const std::string& points_file,
                 CommonOpts& opts) {
    if (which == "holder") return run_holder(inputs, points_arg, points_file, opts);
    if (inputs.empty()) throw PreconditionError("spectrum needs input fields");
    auto lfs = load_leader_fields(inputs);
    auto ptrs = pointers(lfs);
    EstimatorConfig cfg = opts.estimator();
    if (cfg.h_grid.empty()) cfg.h_grid = derive_h_grid(ptrs, cfg);

    std::string prefix = opts.out.empty() ? "spectrum" : opts.out;
    json diag;
    diag["inputs"] = inputs;
    EstimatorConfig final_cfg = cfg;
    final_cfg.finalize(lfs[0].jmax);
    diag["scaleWindow"] = {final_cfg.j1, final_cfg.j2};

    SpectrumCurve curve;
    if (which == "largedev") {
        auto res = large_deviation(ptrs, cfg);
        curve = res.rho;
        diag["epsSchedule"] = res.eps_schedule;
        diag["epsUsed"] = res.eps_used;
        diag["valuePerEps"] = res.value_per_eps;
        diag["extrapolated"] = res.extrapolated;
        diag["aSweep"] = res.a_sweep;
        diag["rhoAtA"] = res.rho_at_A;
        diag["zeroCells"] = res.zero_cells;
    } else if (which == "hull") {
        curve = increasing_hull(ptrs, cfg);
    } else if (which == "legendre") {
        ScalingFunction sf = scaling_function(ptrs, cfg);
        curve = legendre_spectrum(sf, cfg.h_grid);
        diag["pGrid"] = sf.p;
        diag["etaHat"] = sf.eta;
        diag["etaSlope"] = sf.slope;
    } else {
        throw PreconditionError("--which must be legendre, largedev, hull or holder");
    }
    std::string curve_path = prefix + "_" + which + ".csv";
    write_curve_csv(curve_path, curve);
    {
        // plain two-column plot data, finite points only
        std::ofstream dat(prefix + "_" + which + ".dat");
        if (!dat) throw IoError("cannot open " + prefix + "_" + which + ".dat");
        dat.precision(12);
        for (std::size_t i = 0; i < curve.grid.size(); ++i)
            if (curve.finite_at(i))
                dat << curve.grid[i] << ' ' << curve.values[i] << '\n';
    }
    std::ofstream os(prefix + "_diag.json");
    if (!os) throw IoError("cannot open " + prefix + "_diag.json");
    os << diag.dump(2) << "\n";
    std::cout << curve_path << "\n";
    return kExitOk;
}

int cmd_oracle(CommonOpts& opts) {
    GeneratorSpec spec = opts.generator();
    EstimatorConfig cfg = opts.estimator();
    OracleSpectra orc = oracle(spec, cfg.h_grid);
    std::string prefix = opts.out.empty() ? "oracle" : opts.out;
    write_curve_csv(prefix + "_oracleD.csv", orc.D);
    write_curve_csv(prefix + "_oracleRho.csv", orc.rho);
    write_curve_csv(prefix + "_oracleL.csv", orc.L);
    json j;
    j["failureGap"] = orc.failure_gap;
    j["files"] = {prefix + "_oracleD.csv", prefix + "_oracleRho.csv",
                  prefix + "_oracleL.csv"};
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_compare(const std::string& estimate_path, const std::string& which_oracle,
                CommonOpts& opts) {
    SpectrumCurve est = read_curve_csv(estimate_path);
    GeneratorSpec spec = opts.generator();
    EstimatorConfig ecfg = opts.estimator();
    if (!ecfg.h_grid.empty()) {
        if (ecfg.h_grid.size() != est.grid.size())
            throw GridMismatch("estimate grid does not match configured h_grid");
        for (std::size_t i = 0; i < est.grid.size(); ++i)
            if (std::abs(ecfg.h_grid[i] - est.grid[i]) > 1e-9)
                throw GridMismatch("estimate grid does not match configured h_grid");
    }
    OracleSpectra orc = oracle(spec, est.grid);
    const SpectrumCurve* target = &orc.D;
    if (which_oracle == "rho") target = &orc.rho;
    else if (which_oracle == "L") target = &orc.L;
    else if (which_oracle != "D")
        throw PreconditionError("--which-oracle must be D, rho or L");

    CompareConfig ccfg;
    if (opts.config.contains("compare")) {
        const json& c = opts.config.at("compare");
        ccfg.tol = c.value("tol", ccfg.tol);
        ccfg.support_tol = c.value("support_tol", ccfg.support_tol);
        ccfg.mismatch_floor = c.value("mismatch_floor", ccfg.mismatch_floor);
    }
    CompareReport rep;
    try {
        rep = compare(est, *target, ccfg);
    } catch (const std::invalid_argument& e) {
        throw GridMismatch(e.what());
    }
    json j;
    j["supDistance"] = rep.sup_distance;
    j["witnessH"] = rep.witness_h;
    j["verdict"] = rep.verdict();
    j["supportMismatch"] = rep.support_mismatch;
    j["mismatchH"] = rep.mismatch_h;
    j["oracleCurve"] = which_oracle;
    std::cout << j.dump(2) << "\n";
    if (!opts.out.empty()) {
        std::ofstream os(opts.out);
        if (!os) throw IoError("cannot open " + opts.out);
        os << j.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavelet-leader multifractal laboratory"};
    app.require_subcommand(1);

    CommonOpts g_gen, g_lead, g_spec, g_hold, g_orc, g_cmp, g_gs;
    std::string input_leaders;
    std::vector<std::string> inputs_spectrum, inputs_holder;
    std::string which = "largedev", points_arg, points_file, holder_points,
                holder_points_file;
    std::string estimate_path, which_oracle = "D";

    auto* c_gen = app.add_subcommand("generate", "build coefficient fields");
    add_common(c_gen, g_gen);

    auto* c_lead = app.add_subcommand("leaders", "compute wavelet leaders");
    c_lead->add_option("input", input_leaders, "coefficient file")->required();
    add_common(c_lead, g_lead);

    auto* c_spec = app.add_subcommand("spectrum", "estimate spectra");
    c_spec->add_option("inputs", inputs_spectrum, "coefficient/leader files")
        ->required();
    c_spec->add_option("--which", which, "legendre|largedev|hull|holder");
    c_spec->add_option("--points", points_arg, "points for --which holder");
    c_spec->add_option("--points-file", points_file, "points file for --which holder");
    add_common(c_spec, g_spec);

    auto* c_hold = app.add_subcommand("holder", "pointwise exponent estimates");
    c_hold->add_option("inputs", inputs_holder, "coefficient/leader file")->required();
    c_hold->add_option("--points", holder_points, "comma separated points");
    c_hold->add_option("--points-file", holder_points_file, "file of points");
    add_common(c_hold, g_hold);

    auto* c_orc = app.add_subcommand("oracle", "closed-form spectra");
    add_common(c_orc, g_orc);

    auto* c_cmp = app.add_subcommand("compare", "estimate vs oracle verdict");
    c_cmp->add_option("estimate", estimate_path, "estimated curve CSV")->required();
    c_cmp->add_option("--which-oracle", which_oracle, "D|rho|L (default D)");
    add_common(c_cmp, g_cmp);

    // genspace family
    auto* c_gs = app.add_subcommand("genspace", "admissible sequence tools");
    c_gs->require_subcommand(1);
    double gs_alpha = 0.5, gs_beta = 1.0;
    int gs_jmax = 1 << 14, gs_N = 2;
    std::string gs_seq, gs_input, gs_out;
    auto* gs_make = c_gs->add_subcommand("make", "oscillating admissible sequence");
    gs_make->add_option("--alpha", gs_alpha);
    gs_make->add_option("--beta", gs_beta);
    gs_make->add_option("--jmax", gs_jmax);
    gs_make->add_option("--out", gs_out)->required();
    auto* gs_boyd = c_gs->add_subcommand("boyd", "Boyd indices of a sequence");
    gs_boyd->add_option("--seq", gs_seq)->required();
    auto* gs_norm = c_gs->add_subcommand("norm", "Lambda-sigma norm of a field");
    gs_norm->add_option("--seq", gs_seq)->required();
    gs_norm->add_option("--input", gs_input)->required();
    auto* gs_proj = c_gs->add_subcommand("project", "C_N projection of a field");
    gs_proj->add_option("--seq", gs_seq)->required();
    gs_proj->add_option("--input", gs_input)->required();
    gs_proj->add_option("-N,--N", gs_N);
    gs_proj->add_option("--out", gs_out)->required();
    auto* gs_check = c_gs->add_subcommand("check", "two-sided leadersuite bound");
    gs_check->add_option("--seq", gs_seq)->required();
    gs_check->add_option("--input", gs_input)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitPrecondition;
    }

    try {
        if (*c_gen) {
            g_gen.load();
            return cmd_generate(g_gen);
        }
        if (*c_lead) {
            g_lead.load();
            return cmd_leaders(input_leaders, g_lead);
        }
        if (*c_spec) {
            g_spec.load();
            return cmd_spectrum(inputs_spectrum, which, points_arg, points_file, g_spec);
        }
        if (*c_hold) {
            g_hold.load();
            return run_holder(inputs_holder, holder_points, holder_points_file, g_hold);
        }
        if (*c_orc) {
            g_orc.load();
            return cmd_oracle(g_orc);
        }
        if (*c_cmp) {
            g_cmp.load();
            return cmd_compare(estimate_path, which_oracle, g_cmp);
        }
        if (*c_gs) {
            if (*gs_make) {
                AdmissibleSequence seq = make_oscillating(gs_alpha, gs_beta, gs_jmax);
                write_sequence_csv(gs_out, seq);
                std::cout << gs_out << "\n";
            } else if (*gs_boyd) {
                BoydIndices bi = boyd_indices(read_sequence_csv(gs_seq));
                json j{{"lower", bi.lower}, {"upper", bi.upper}};
                std::cout << j.dump(2) << "\n";
            } else if (*gs_norm) {
                double n = lambda_sigma_norm(read_field_any(gs_input),
                                             read_sequence_csv(gs_seq));
                json j{{"norm", n}};
                std::cout << j.dump(2) << "\n";
            } else if (*gs_proj) {
                CoefficientField f = cn_project(read_field_any(gs_input),
                                                read_sequence_csv(gs_seq), gs_N);
                write_field(gs_out, f);
                std::cout << gs_out << "\n";
            } else if (*gs_check) {
                LeaderSuiteBound b = leadersuite_check(read_field_any(gs_input),
                                                       read_sequence_csv(gs_seq));
                json j{{"C", b.C},
                       {"low", {{"j", b.j_low}, {"k", b.k_low}}},
                       {"high", {{"j", b.j_high}, {"k", b.k_high}}}};
                std::cout << j.dump(2) << "\n";
            }
            return kExitOk;
        }
    } catch (const GridMismatch& e) {
        std::cerr << "mflab: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const PreconditionError& e) {
        std::cerr << "mflab: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const IoError& e) {
        std::cerr << "mflab: " << e.what() << "\n";
        return kExitIo;
    } catch (const json::exception& e) {
        std::cerr << "mflab: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "mflab: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "mflab: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
