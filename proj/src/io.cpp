#include "specrank/io.hpp"

#include "specrank/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace specrank {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

}  // namespace

MatrixFile parse_matrix_market(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty file", 1);
    ++lineno;

    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", lineno);
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix") throw ParseError("unsupported object '" + object + "'", lineno);
    if (format != "coordinate") throw ParseError("unsupported format '" + format + "' (coordinate only)", lineno);
    if (field != "real" && field != "integer")
        throw ParseError("unsupported field '" + field + "' (real or integer only)", lineno);
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);

    // Size line, after comments and blank lines.
    std::size_t rows = 0, cols = 0, entries = 0;
    for (;;) {
        if (!std::getline(in, line)) throw ParseError("missing size line", lineno + 1);
        ++lineno;
        if (blank(line) || line[0] == '%') continue;
        std::istringstream ss(line);
        long long r = -1, c = -1, e = -1;
        if (!(ss >> r >> c >> e) || r <= 0 || c <= 0 || e < 0)
            throw ParseError("malformed size line '" + line + "'", lineno);
        rows = static_cast<std::size_t>(r);
        cols = static_cast<std::size_t>(c);
        entries = static_cast<std::size_t>(e);
        break;
    }
    if (symmetry == "symmetric" && rows != cols) throw ParseError("symmetric matrix must be square", lineno);

    std::vector<Triplet> triplets;
    triplets.reserve(entries);
    while (triplets.size() < entries) {
        if (!std::getline(in, line))
            throw ParseError("expected " + std::to_string(entries) + " entries, found " +
                                 std::to_string(triplets.size()),
                             lineno + 1);
        ++lineno;
        if (blank(line) || line[0] == '%') continue;
        std::istringstream ss(line);
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(ss >> i >> j >> v)) throw ParseError("malformed entry '" + line + "'", lineno);
        if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows || static_cast<std::size_t>(j) > cols)
            throw ParseError("index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of bounds", lineno);
        triplets.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), v});
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!blank(line) && line[0] != '%') throw ParseError("unexpected data after the last entry", lineno);
    }

    MatrixFile file{LinearOperator::diagonal({0.0}), rows, cols, entries, symmetry, {}};
    if (field == "integer") file.warnings.push_back("integer field read as real");

    if (symmetry == "symmetric") {
        for (auto& t : triplets)
            if (t.col > t.row) std::swap(t.row, t.col);  // upper entries fold onto the lower triangle
        file.op = LinearOperator::sparse(rows, triplets, true);
        return file;
    }
    if (rows == cols) {
        try {
            file.op = LinearOperator::sparse(rows, triplets, false);
            return file;
        } catch (const InvalidArgument&) {
            file.warnings.push_back("square general matrix is not symmetric; using its Gram operator");
        }
    } else {
        file.warnings.push_back("rectangular " + std::to_string(rows) + "x" + std::to_string(cols) +
                                " matrix; using its Gram operator");
    }
    file.op = LinearOperator::gram(CsrMatrix::from_triplets(rows, cols, triplets));
    return file;
}

MatrixFile read_matrix_market(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const LinearOperator& op, const std::string& comment) {
    auto write_comment = [&] {
        std::istringstream cs(comment);
        std::string line;
        while (std::getline(cs, line)) out << '%' << line << '\n';
    };

    if (const auto* g = std::get_if<LinearOperator::Gram>(&op.payload())) {
        const CsrMatrix& x = *g->factor;
        out << "%%MatrixMarket matrix coordinate real general\n";
        write_comment();
        out << x.rows() << ' ' << x.cols() << ' ' << x.nnz() << '\n';
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t k = x.row_ptr()[i]; k < x.row_ptr()[i + 1]; ++k)
                out << i + 1 << ' ' << x.col_idx()[k] + 1 << ' ' << fmt17(x.values()[k]) << '\n';
        return;
    }

    const std::size_t n = op.dimension();
    std::vector<Triplet> lowerpart;
    if (const auto* d = std::get_if<LinearOperator::Diagonal>(&op.payload())) {
        for (std::size_t i = 0; i < n; ++i)
            if (d->values[i] != 0.0) lowerpart.push_back({i, i, d->values[i]});
    } else if (const auto* s = std::get_if<LinearOperator::SparseSymmetric>(&op.payload())) {
        const CsrMatrix& m = s->matrix;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k)
                if (m.col_idx()[k] <= i) lowerpart.push_back({i, m.col_idx()[k], m.values()[k]});
    } else {
        const auto dense = op.to_dense();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                if (dense[i * n + j] != 0.0) lowerpart.push_back({i, j, dense[i * n + j]});
    }
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    write_comment();
    out << n << ' ' << n << ' ' << lowerpart.size() << '\n';
    for (const auto& t : lowerpart) out << t.row + 1 << ' ' << t.col + 1 << ' ' << fmt17(t.value) << '\n';
}

void write_matrix_market(const std::filesystem::path& path, const LinearOperator& op, const std::string& comment) {
    auto out = open_out(path);
    write_matrix_market(out, op, comment);
    if (!out) throw IoError("write failed: " + path.string());
}

DosFormat dos_format_for(const std::filesystem::path& path) {
    return lower(path.extension().string()) == ".json" ? DosFormat::Json : DosFormat::Csv;
}

nlohmann::json to_json(const DosCurve& curve) {
    return {{"t", curve.t},
            {"phi", curve.phi},
            {"meta",
             {{"method", curve.meta.method},
              {"degree", curve.meta.degree},
              {"nv", curve.meta.nv},
              {"damping", to_string(curve.meta.damping)},
              {"blur", curve.meta.blur}}}};
}

DosCurve dos_from_json(const nlohmann::json& j) {
    try {
        DosCurve c;
        c.t = j.at("t").get<std::vector<double>>();
        c.phi = j.at("phi").get<std::vector<double>>();
        if (j.contains("meta")) {
            const auto& m = j.at("meta");
            c.meta.method = m.value("method", "");
            c.meta.degree = m.value("degree", std::size_t{0});
            c.meta.nv = m.value("nv", std::size_t{0});
            c.meta.damping = parse_damping(m.value("damping", "none"));
            c.meta.blur = m.value("blur", 0.0);
        }
        validate(c);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("DOS JSON: ") + e.what(), 0);
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("DOS JSON: ") + e.what(), 0);
    }
}

void write_dos_csv(std::ostream& out, const DosCurve& curve) {
    validate(curve);
    out << "t,phi\n";
    for (std::size_t i = 0; i < curve.size(); ++i) out << fmt17(curve.t[i]) << ',' << fmt17(curve.phi[i]) << '\n';
}

DosCurve parse_dos_csv(std::istream& in) {
    DosCurve c;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        if (!header) {
            if (lower(line) != "t,phi") throw ParseError("expected header 't,phi'", lineno);
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected two columns", lineno);
        try {
            std::size_t used = 0;
            const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
            c.t.push_back(std::stod(a, &used));
            if (used != a.size()) throw std::invalid_argument("trailing characters");
            c.phi.push_back(std::stod(b, &used));
            if (used != b.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ParseError("malformed number in '" + line + "'", lineno);
        }
    }
    if (!header) throw ParseError("empty DOS file", 0);
    try {
        validate(c);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), 0);
    }
    return c;
}

void write_dos(const DosCurve& curve, const std::filesystem::path& path, DosFormat format) {
    if (format == DosFormat::Json) {
        validate(curve);
        write_json(to_json(curve), path);
        return;
    }
    auto out = open_out(path);
    write_dos_csv(out, curve);
    if (!out) throw IoError("write failed: " + path.string());
}

DosCurve read_dos(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("DOS JSON: ") + e.what(), 0);
        }
        return dos_from_json(j);
    }
    std::istringstream ss(text);
    return parse_dos_csv(ss);
}

nlohmann::json to_json(const RitzData& data) {
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& p : data.per_probe) probes.push_back({{"theta", p.theta}, {"tau_sq", p.tau_sq}});
    std::vector<bool> truncated = data.truncated;
    return {{"n", data.n}, {"steps", data.steps}, {"probes", probes}, {"truncated", truncated}};
}

RitzData ritz_from_json(const nlohmann::json& j) {
    try {
        RitzData d;
        d.n = j.at("n").get<std::size_t>();
        d.steps = j.at("steps").get<std::size_t>();
        for (const auto& p : j.at("probes")) {
            RitzSpectrum s;
            s.theta = p.at("theta").get<std::vector<double>>();
            s.tau_sq = p.at("tau_sq").get<std::vector<double>>();
            if (s.theta.size() != s.tau_sq.size()) throw ParseError("Ritz JSON: theta/tau_sq length mismatch", 0);
            d.per_probe.push_back(std::move(s));
        }
        d.truncated = j.value("truncated", std::vector<bool>(d.per_probe.size(), false));
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("Ritz JSON: ") + e.what(), 0);
    }
}

nlohmann::json to_json(const GroundTruth& truth) {
    nlohmann::json j = {{"family", truth.family}, {"parameters", truth.parameters}};
    j["true_rank"] = truth.true_rank ? nlohmann::json(*truth.true_rank) : nlohmann::json(nullptr);
    j["snr_db"] = truth.snr_db ? nlohmann::json(*truth.snr_db) : nlohmann::json(nullptr);
    if (!truth.eigenvalues.empty()) {
        const auto& e = truth.eigenvalues;
        j["spectrum"] = {{"n", e.size()}, {"min", e.front()}, {"max", e.back()}};
    }
    return j;
}

ReportDocument make_report(const RankEstimate& estimate, InputDescriptor input, MethodParameters params,
                           bool include_dos) {
    ReportDocument r;
    r.input = std::move(input);
    r.params = std::move(params);
    r.window = estimate.window;
    r.threshold = {estimate.eps, to_string(estimate.threshold.method), estimate.threshold.grid_index,
                   estimate.threshold.valley, estimate.threshold.fell_back};
    r.per_probe = estimate.series.per_probe;
    r.running_mean = estimate.series.running_mean;
    r.mean = estimate.mean();
    r.standard_error = estimate.series.standard_error();
    r.timing = estimate.timing;
    if (include_dos && estimate.dos.size() > 0) r.dos = estimate.dos;
    return r;
}

nlohmann::json to_json(const ReportDocument& r) {
    using nlohmann::json;
    auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
    json valley = r.threshold.valley ? json::array({r.threshold.valley->first, r.threshold.valley->second})
                                     : json(nullptr);
    return {
        {"input",
         {{"source", r.input.source},
          {"n", r.input.n},
          {"kind", r.input.kind},
          {"nnz", r.input.nnz},
          {"warnings", r.input.warnings}}},
        {"parameters",
         {{"method", r.params.method},
          {"m", r.params.m},
          {"nv", r.params.nv},
          {"damping", r.params.damping},
          {"seed", r.params.seed},
          {"tol", r.params.tol},
          {"strategy", r.params.strategy},
          {"distribution", r.params.distribution},
          {"eps_override", opt(r.params.eps_override)}}},
        {"window", {{"lambda_min", r.window.lambda_min}, {"lambda_max", r.window.lambda_max}}},
        {"threshold",
         {{"eps", r.threshold.eps},
          {"method", r.threshold.method},
          {"grid_index", opt(r.threshold.grid_index)},
          {"valley", valley},
          {"fell_back", r.threshold.fell_back}}},
        {"rank",
         {{"per_probe", r.per_probe},
          {"running_mean", r.running_mean},
          {"mean", r.mean},
          {"standard_error", r.standard_error}}},
        {"timing",
         {{"bounds", r.timing.bounds},
          {"estimate", r.timing.estimate},
          {"threshold", r.timing.threshold},
          {"count", r.timing.count}}},
        {"dos", r.dos ? to_json(*r.dos) : json(nullptr)},
    };
}

ReportDocument report_from_json(const nlohmann::json& j) {
    try {
        ReportDocument r;
        const auto& in = j.at("input");
        r.input = {in.at("source").get<std::string>(), in.at("n").get<std::size_t>(), in.at("kind").get<std::string>(),
                   in.at("nnz").get<std::size_t>(), in.at("warnings").get<std::vector<std::string>>()};
        const auto& p = j.at("parameters");
        r.params.method = p.at("method").get<std::string>();
        r.params.m = p.at("m").get<std::size_t>();
        r.params.nv = p.at("nv").get<std::size_t>();
        r.params.damping = p.at("damping").get<std::string>();
        r.params.seed = p.at("seed").get<std::uint64_t>();
        r.params.tol = p.at("tol").get<double>();
        r.params.strategy = p.at("strategy").get<std::string>();
        r.params.distribution = p.at("distribution").get<std::string>();
        if (!p.at("eps_override").is_null()) r.params.eps_override = p.at("eps_override").get<double>();
        r.window = {j.at("window").at("lambda_min").get<double>(), j.at("window").at("lambda_max").get<double>()};
        const auto& t = j.at("threshold");
        r.threshold.eps = t.at("eps").get<double>();
        r.threshold.method = t.at("method").get<std::string>();
        if (!t.at("grid_index").is_null()) r.threshold.grid_index = t.at("grid_index").get<std::size_t>();
        if (!t.at("valley").is_null())
            r.threshold.valley = std::pair{t.at("valley")[0].get<double>(), t.at("valley")[1].get<double>()};
        r.threshold.fell_back = t.at("fell_back").get<bool>();
        const auto& k = j.at("rank");
        r.per_probe = k.at("per_probe").get<std::vector<double>>();
        r.running_mean = k.at("running_mean").get<std::vector<double>>();
        r.mean = k.at("mean").get<double>();
        r.standard_error = k.at("standard_error").get<double>();
        const auto& tm = j.at("timing");
        r.timing = {tm.at("bounds").get<double>(), tm.at("estimate").get<double>(), tm.at("threshold").get<double>(),
                    tm.at("count").get<double>()};
        if (!j.at("dos").is_null()) r.dos = dos_from_json(j.at("dos"));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report JSON: ") + e.what(), 0);
    }
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), 0);
    }
}

void write_report(const ReportDocument& report, const std::filesystem::path& path) {
    write_json(to_json(report), path);
}

}  // namespace specrank
