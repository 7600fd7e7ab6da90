#pragma once

// Coincidence statistics: Poisson-propagated R and F, constant-fit flatness,
// and CSV/JSON export of delay-scan reports.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace teleclone::analysis {

struct ValueWithError {
    double value = 0.0;
    double sigma = 0.0;
    bool operator==(const ValueWithError&) const = default;
};

struct CoincidenceTally {
    double z_um = 0.0;
    double delay_fs = 0.0;
    double overlap = 0.0;
    std::uint64_t n_trials = 0;
    std::uint64_t c_clone = 0; // [D_A1, D_A2]
    std::uint64_t c_anti = 0;  // [D_A2, D_B]
    ValueWithError r_ratio;
    ValueWithError f_estimate;
    bool operator==(const CoincidenceTally&) const = default;
};

// Scan points with |delay| > min_delay_tau * tau_coh_fs form the baseline.
struct BaselineWindow {
    double tau_coh_fs = 80.0;
    double min_delay_tau = 3.0;
    bool contains(double delay_fs) const noexcept;
};

class BaselineUndefined : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AnalysisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// F = (2R + 1) / (2R + 2); rejects r <= 0.
double fidelity_from_r(double r);

// Propagates sigma_R through dF/dR = 1 / (2 (R + 1)^2). Accepts R = 0.
ValueWithError fidelity_with_error(ValueWithError r);

// R(z) = c_clone(z) / mean baseline c_clone, with independent Poisson errors
// on numerator and baseline sum: sigma_R^2 = R^2 (1/c + 1/B).
std::vector<ValueWithError> estimate_r(std::span<const CoincidenceTally> tallies, const BaselineWindow& window);

// Fills r_ratio and f_estimate of every tally in place.
void assign_estimates(std::span<CoincidenceTally> tallies, const BaselineWindow& window);

// Chi^2 per degree of freedom of a constant fit; the fitted mean serves as
// the Poisson variance of every point. Needs at least 3 points.
double flatness_chi2(std::span<const std::uint64_t> counts);

struct ScanMetadata {
    std::uint64_t seed = 0;
    std::uint64_t trials_per_z = 0;
    std::string input_phi;
    std::string ancilla_model;
    double tau_coh_fs = 0.0;
    double wavelength_nm = 0.0;
    double v_max = 1.0;
    double baseline_min_delay_tau = 3.0;
    bool operator==(const ScanMetadata&) const = default;
};

struct ScanRow {
    double z_um = 0.0;
    std::uint64_t c_clone = 0;
    std::uint64_t c_anti = 0;
    ValueWithError r;
    ValueWithError f;
    bool operator==(const ScanRow&) const = default;
};

struct ScanSummary {
    double peak_z_um = 0.0;
    ValueWithError peak_r;
    ValueWithError peak_f;
    double baseline_clone_rate = 0.0; // mean counts per baseline point
    double baseline_anti_rate = 0.0;
    std::optional<double> flatness_chi2_per_dof; // of c_anti; needs >= 3 points
    bool operator==(const ScanSummary&) const = default;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    ScanSummary summary;
    ScanMetadata metadata;
    bool operator==(const ScanReport&) const = default;
};

// Peak = the tally with the largest overlap. Tallies must carry estimates.
ScanReport make_report(std::span<const CoincidenceTally> tallies, ScanMetadata metadata,
                       const BaselineWindow& window);

enum class ReportFormat { Csv, Json };

std::optional<ReportFormat> parse_format(const std::string& name);

std::string to_csv(const ScanReport& report);
std::string to_json(const ScanReport& report);
ScanReport report_from_json(const std::string& text);

void export_report(const ScanReport& report, ReportFormat format, const std::filesystem::path& path);
ScanReport import_report_json(const std::filesystem::path& path);

void print_summary(std::ostream& os, const ScanReport& report);

// Shortest round-trip decimal form; stable across runs.
std::string format_double(double x);

} // namespace teleclone::analysis
