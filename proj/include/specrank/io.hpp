#pragma once

#include "specrank/dos.hpp"
#include "specrank/gen.hpp"
#include "specrank/linops.hpp"
#include "specrank/rank_estimate.hpp"
#include "specrank/ritz.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace specrank {

struct MatrixFile {
    LinearOperator op;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t entries = 0;  // stored entries as listed in the file
    std::string symmetry;     // "general" or "symmetric"
    std::vector<std::string> warnings;
};

/// Coordinate real/integer Matrix Market. Symmetric files expand the stored
/// triangle; square general files that are symmetric stay sparse; anything
/// else becomes a Gram operator on the smaller side with a warning.
/// Throws ParseError (with line number) or IoError.
MatrixFile parse_matrix_market(std::istream& in);
MatrixFile read_matrix_market(const std::filesystem::path& path);

/// Writes the lower triangle as a `symmetric` coordinate file with 17
/// significant digits. Gram operators emit their factor as `general`.
void write_matrix_market(std::ostream& out, const LinearOperator& op, const std::string& comment = {});
void write_matrix_market(const std::filesystem::path& path, const LinearOperator& op,
                         const std::string& comment = {});

enum class DosFormat { Csv, Json };

/// Csv for ".csv", Json for ".json"; anything else is Csv.
DosFormat dos_format_for(const std::filesystem::path& path);

nlohmann::json to_json(const DosCurve& curve);
DosCurve dos_from_json(const nlohmann::json& j);

void write_dos_csv(std::ostream& out, const DosCurve& curve);
DosCurve parse_dos_csv(std::istream& in);

void write_dos(const DosCurve& curve, const std::filesystem::path& path, DosFormat format);
/// Reads either format, sniffing the first non-blank character.
DosCurve read_dos(const std::filesystem::path& path);

nlohmann::json to_json(const RitzData& data);
RitzData ritz_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GroundTruth& truth);

struct InputDescriptor {
    std::string source;
    std::size_t n = 0;
    std::string kind;
    std::size_t nnz = 0;
    std::vector<std::string> warnings;
};

struct MethodParameters {
    std::string method;
    std::size_t m = 0;
    std::size_t nv = 0;
    std::string damping;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::string strategy;
    std::string distribution;
    std::optional<double> eps_override;
};

struct ThresholdSummary {
    double eps = 0.0;
    std::string method;
    std::optional<std::size_t> grid_index;
    std::optional<std::pair<double, double>> valley;
    bool fell_back = false;
};

/// Everything a rank run reports. Timing is kept in its own object so two
/// runs with the same seed differ only there.
struct ReportDocument {
    InputDescriptor input;
    MethodParameters params;
    SpectralWindow window;
    ThresholdSummary threshold;
    std::vector<double> per_probe;
    std::vector<double> running_mean;
    double mean = 0.0;
    double standard_error = 0.0;
    PhaseTiming timing;
    std::optional<DosCurve> dos;
};

ReportDocument make_report(const RankEstimate& estimate, InputDescriptor input, MethodParameters params,
                           bool include_dos);

nlohmann::json to_json(const ReportDocument& report);
ReportDocument report_from_json(const nlohmann::json& j);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

void write_report(const ReportDocument& report, const std::filesystem::path& path);

}  // namespace specrank
