#include "specrank/cli.hpp"

#include "specrank/error.hpp"
#include "specrank/gen.hpp"
#include "specrank/io.hpp"
#include "specrank/kpm.hpp"
#include "specrank/ldos.hpp"
#include "specrank/oracle.hpp"
#include "specrank/parallel.hpp"
#include "specrank/threshold.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace specrank::cli {

namespace {

struct Common {
    std::string input;
    std::string method = "lanczos";
    std::size_t m = 50;
    std::size_t nv = 30;
    std::string damping = "jackson";
    std::uint64_t seed = 42;
    std::size_t grid = kDefaultGridPoints;
    double tol = kDefaultTol;
    std::string strategy = "valley";
    std::string distribution = "gaussian";
    unsigned threads = 0;
};

std::string fmt(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

ProbeDistribution parse_distribution(const std::string& s) {
    if (s == "gaussian") return ProbeDistribution::Gaussian;
    if (s == "rademacher") return ProbeDistribution::Rademacher;
    throw InvalidArgument("unknown probe distribution '" + s + "'");
}

void add_estimator_flags(CLI::App* app, Common& c) {
    app->add_option("--in", c.input, "Matrix Market input")->required();
    app->add_option("--method", c.method, "kpm or lanczos")->check(CLI::IsMember({"kpm", "lanczos"}));
    app->add_option("-m,--degree", c.m, "Chebyshev degree or Lanczos steps")->check(CLI::PositiveNumber);
    app->add_option("--nv", c.nv, "number of probe vectors")->check(CLI::PositiveNumber);
    app->add_option("--damping", c.damping, "jackson, sigma or none")
        ->check(CLI::IsMember({"jackson", "sigma", "lanczos-sigma", "none"}));
    app->add_option("--seed", c.seed, "probe seed");
    app->add_option("--grid", c.grid, "DOS sample count")->check(CLI::Range(16, 1 << 24));
    app->add_option("--distribution", c.distribution, "gaussian or rademacher")
        ->check(CLI::IsMember({"gaussian", "rademacher"}));
}

ProbeConfig probe_config(const Common& c) {
    return {.nv = c.nv, .distribution = parse_distribution(c.distribution), .seed = c.seed};
}

nlohmann::json nogap_diagnostics(const NoGapError& e) {
    const auto& d = e.diagnostics();
    nlohmann::json j = {{"error", "no-gap"},
                        {"message", e.what()},
                        {"tol", d.tol},
                        {"derivative", d.derivative},
                        {"drop_index", d.drop_index ? nlohmann::json(*d.drop_index) : nlohmann::json(nullptr)},
                        {"probe_eps", d.probe_eps}};
    j["dos"] = e.curve() ? to_json(*e.curve()) : nlohmann::json(nullptr);
    return j;
}

int report_nogap(const NoGapError& e, const std::string& path, std::ostream& err) {
    const auto j = nogap_diagnostics(e);
    err << "no gap found: " << e.what() << '\n';
    if (!path.empty()) {
        write_json(j, path);
        err << "diagnostics written to " << path << '\n';
    } else {
        err << j.dump() << '\n';
    }
    return kExitNoGap;
}

int cmd_rank(const Common& c, const std::optional<double>& eps, const std::string& report_path,
             bool include_dos, std::ostream& out, std::ostream& err) {
    const MatrixFile file = read_matrix_market(c.input);
    for (const auto& w : file.warnings) err << "warning: " << w << '\n';

    const ThresholdStrategy strategy = parse_strategy(c.strategy);
    RankEstimate est;
    try {
        if (c.method == "kpm") {
            KpmRankOptions o;
            o.degree = c.m;
            o.damping = parse_damping(c.damping);
            o.probes = probe_config(c);
            o.eps = eps;
            o.strategy = strategy;
            o.tol = c.tol;
            o.grid_points = c.grid;
            o.threads = c.threads;
            est = rank_kpm(file.op, o);
        } else {
            LanczosRankOptions o;
            o.steps = c.m;
            o.probes = probe_config(c);
            o.eps = eps;
            o.strategy = strategy;
            o.tol = c.tol;
            o.grid_points = c.grid;
            o.threads = c.threads;
            est = rank_lanczos(file.op, o);
        }
    } catch (const NoGapError& e) {
        return report_nogap(e, report_path, err);
    }

    out << "method: " << est.method << '\n'
        << "n: " << est.n << '\n'
        << "eps: " << fmt(est.eps, 10) << " (" << to_string(est.threshold.method) << ")\n"
        << "mean rank: " << fmt(est.mean(), 10) << '\n'
        << "standard error: " << fmt(est.series.standard_error()) << '\n'
        << "time bounds: " << fmt(est.timing.bounds) << " s\n"
        << "time estimate: " << fmt(est.timing.estimate) << " s\n"
        << "time threshold: " << fmt(est.timing.threshold) << " s\n"
        << "time count: " << fmt(est.timing.count) << " s\n";

    if (!report_path.empty()) {
        InputDescriptor input{c.input, file.op.dimension(), file.op.kind(), file.op.nnz(), file.warnings};
        MethodParameters params{c.method, c.m,          c.nv,     c.method == "kpm" ? c.damping : "none",
                                c.seed,   c.tol,        c.strategy, c.distribution,
                                eps};
        write_report(make_report(est, std::move(input), std::move(params), include_dos), report_path);
    }
    return kExitOk;
}

int cmd_dos(const Common& c, const std::string& out_path, const std::string& ritz_path, std::ostream& out,
            std::ostream& err) {
    const MatrixFile file = read_matrix_market(c.input);
    for (const auto& w : file.warnings) err << "warning: " << w << '\n';
    const auto probes = generate_probes(file.op.dimension(), probe_config(c));

    DosCurve curve;
    if (c.method == "kpm") {
        if (!ritz_path.empty()) throw InvalidArgument("--ritz-out needs --method lanczos");
        const auto bounds = spectrum_bounds(file.op, {.assume_psd = true});
        const auto op_b = shift_scale(file.op, bounds.lambda_min, bounds.lambda_max);
        const auto mom = chebyshev_moments(op_b, c.m, probes, c.threads);
        DampingKind damping = parse_damping(c.damping);
        if (damping == DampingKind::None) damping = DampingKind::Jackson;
        curve = evaluate_dos(mom, damping, c.grid);
    } else {
        const auto data = collect_ritz(file.op, c.m, probes, c.threads);
        curve = evaluate_dos_lanczos(data, c.grid);
        if (!ritz_path.empty()) write_json(to_json(data), ritz_path);
    }
    write_dos(curve, out_path, dos_format_for(out_path));
    out << "samples: " << curve.size() << '\n' << "integral: " << fmt(integrate(curve), 8) << '\n';
    return kExitOk;
}

int cmd_threshold(const std::string& dos_path, const std::string& ritz_path, const std::string& strategy_name,
                  double tol, const std::string& diag_path, std::ostream& out, std::ostream& err) {
    const ThresholdStrategy strategy = parse_strategy(strategy_name);
    ThresholdResult r;
    try {
        if (strategy == ThresholdStrategy::Tau) {
            if (ritz_path.empty()) throw InvalidArgument("--strategy tau needs --ritz (written by dos --ritz-out)");
            r = select_eps_tau(ritz_from_json(read_json(ritz_path)));
        } else {
            if (dos_path.empty()) throw InvalidArgument("--dos is required for the deriv and valley strategies");
            const DosCurve curve = read_dos(dos_path);
            try {
                r = strategy == ThresholdStrategy::Derivative ? select_eps_dos(curve, tol)
                                                                : select_eps_valley_midpoint(curve, tol);
            } catch (NoGapError& e) {
                e.attach_curve(curve);
                throw;
            }
        }
    } catch (const NoGapError& e) {
        return report_nogap(e, diag_path, err);
    }
    out << "eps: " << fmt(r.eps, 10) << '\n' << "method: " << to_string(r.method) << '\n';
    if (r.grid_index) out << "grid index: " << *r.grid_index << '\n';
    if (r.fell_back) out << "note: no valley, derivative rule used\n";
    return kExitOk;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::string s = text;
    for (char& ch : s)
        if (ch == ',') ch = ' ';
    std::istringstream ss(s);
    std::vector<double> v;
    std::string tok;
    while (ss >> tok) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError("not a number: '" + tok + "'", 0);
        }
    }
    return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical rank estimation from the spectral density"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (default: SPECRANK_THREADS or all cores)");

    Common rank_c, dos_c;

    auto* rank = app.add_subcommand("rank", "estimate the numerical rank");
    add_estimator_flags(rank, rank_c);
    std::optional<double> eps;
    std::string report_path;
    bool include_dos = false;
    rank->add_option("--eps", eps, "threshold; skips automatic selection");
    rank->add_option("--tol", rank_c.tol, "derivative tolerance (negative)");
    rank->add_option("--strategy", rank_c.strategy, "deriv, valley or tau")
        ->check(CLI::IsMember({"deriv", "valley", "tau"}));
    rank->add_option("--report", report_path, "JSON report path");
    rank->add_flag("--report-dos", include_dos, "include DOS samples in the report");

    auto* dos = app.add_subcommand("dos", "sample the spectral density");
    add_estimator_flags(dos, dos_c);
    std::string dos_out, ritz_out;
    dos->add_option("--out", dos_out, "output path (.csv or .json)")->required();
    dos->add_option("--ritz-out", ritz_out, "also write the Ritz data as JSON (lanczos)");

    auto* thr = app.add_subcommand("threshold", "select eps from a DOS curve or Ritz data");
    std::string thr_dos, thr_ritz, thr_strategy = "valley", thr_diag;
    double thr_tol = kDefaultTol;
    thr->add_option("--dos", thr_dos, "DOS file (.csv or .json)");
    thr->add_option("--ritz", thr_ritz, "Ritz data JSON (for tau)");
    thr->add_option("--strategy", thr_strategy, "deriv, valley or tau")
        ->check(CLI::IsMember({"deriv", "valley", "tau"}));
    thr->add_option("--tol", thr_tol, "derivative tolerance (negative)");
    thr->add_option("--diagnostics", thr_diag, "where to write no-gap diagnostics");

    auto* gen = app.add_subcommand("gen", "generate a synthetic matrix");
    SyntheticSpec spec;
    std::string family = "hadamard", gen_out, truth_out, eig_list, eig_file;
    gen->add_option("--family", family, "hadamard, matern1d, matern2d or planted")
        ->check(CLI::IsMember({"hadamard", "matern1d", "matern2d", "planted"}));
    gen->add_option("--n", spec.n, "hadamard dimension (power of two)");
    gen->add_option("--k", spec.k, "hadamard rank");
    gen->add_option("--sigma", spec.sigma, "hadamard noise level");
    gen->add_option("--seed", spec.seed, "generator seed");
    gen->add_option("--rows", spec.rows, "matern grid rows (1D point count)");
    gen->add_option("--cols", spec.cols, "matern grid columns (2D)");
    gen->add_option("--nu", spec.nu, "matern smoothness: 0.5, 1.5 or 2.5");
    gen->add_option("--length-scale", spec.length_scale, "matern length scale");
    gen->add_option("--eigs", eig_list, "planted eigenvalues, comma separated");
    gen->add_option("--eigs-file", eig_file, "planted eigenvalues, whitespace separated file");
    gen->add_flag("--rotate", spec.rotate, "planted: conjugate by random reflectors");
    gen->add_option("--out", gen_out, "Matrix Market output")->required();
    gen->add_option("--truth", truth_out, "ground-truth JSON (default: <out>.truth.json)");

    auto* orc = app.add_subcommand("oracle", "exact eigenvalues by dense decomposition");
    std::string orc_in;
    std::optional<double> orc_a, orc_b;
    std::size_t cap = kOracleCap;
    orc->add_option("--in", orc_in, "Matrix Market input")->required();
    orc->add_option("--a", orc_a, "interval lower end (exclusive)");
    orc->add_option("--b", orc_b, "interval upper end (inclusive)");
    orc->add_option("--cap", cap, "largest dimension accepted");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        if (!rev.empty()) rev.pop_back();  // program name
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (threads == 0) threads = default_thread_count();
        if (*rank) {
            rank_c.threads = threads;
            return cmd_rank(rank_c, eps, report_path, include_dos, out, err);
        }
        if (*dos) {
            dos_c.threads = threads;
            return cmd_dos(dos_c, dos_out, ritz_out, out, err);
        }
        if (*thr) return cmd_threshold(thr_dos, thr_ritz, thr_strategy, thr_tol, thr_diag, out, err);
        if (*gen) {
            if (family == "hadamard") spec.family = SyntheticFamily::HadamardLowRank;
            else if (family == "matern1d") spec.family = SyntheticFamily::Matern1D;
            else if (family == "matern2d") spec.family = SyntheticFamily::Matern2D;
            else spec.family = SyntheticFamily::PlantedSpectrum;
            if (spec.family == SyntheticFamily::PlantedSpectrum) {
                if (!eig_file.empty()) {
                    std::ifstream in(eig_file);
                    if (!in) throw IoError("cannot open " + eig_file);
                    std::stringstream buf;
                    buf << in.rdbuf();
                    spec.eigenvalues = parse_number_list(buf.str());
                } else {
                    spec.eigenvalues = parse_number_list(eig_list);
                }
            }
            const GeneratedMatrix g = generate(spec);
            const auto truth = to_json(g.truth);
            write_matrix_market(gen_out, g.op, "generated by specrank gen --family " + family);
            write_json(truth, truth_out.empty() ? gen_out + ".truth.json" : truth_out);
            out << "wrote " << gen_out << " (n = " << g.op.dimension() << ")\n";
            if (g.truth.true_rank) out << "true rank: " << *g.truth.true_rank << '\n';
            if (g.truth.snr_db) out << "snr (dB): " << fmt(*g.truth.snr_db) << '\n';
            return kExitOk;
        }
        if (*orc) {
            const MatrixFile file = read_matrix_market(orc_in);
            for (const auto& w : file.warnings) err << "warning: " << w << '\n';
            const ExactSpectrum s = dense_eigs(file.op, {.cap = cap});
            out << "n: " << s.size() << '\n'
                << "min: " << fmt(s.eigenvalues.front(), 12) << '\n'
                << "max: " << fmt(s.eigenvalues.back(), 12) << '\n';
            if (orc_a || orc_b) {
                const double a = orc_a.value_or(-std::numeric_limits<double>::infinity());
                const double b = orc_b.value_or(std::numeric_limits<double>::infinity());
                if (!(a < b)) throw InvalidArgument("oracle: need a < b");
                out << "count: " << exact_count(s, a, b) << '\n';
            }
            return kExitOk;
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const IoError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const CapExceededError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

int run(int argc, char** argv) {
    return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace specrank::cli
