#include "teleclone/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace teleclone::analysis {

using nlohmann::json;

bool BaselineWindow::contains(double delay_fs) const noexcept
{
    return std::abs(delay_fs) > min_delay_tau * tau_coh_fs;
}

double fidelity_from_r(double r)
{
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw AnalysisError("amplification ratio must be positive and finite");
    }
    return (2.0 * r + 1.0) / (2.0 * r + 2.0);
}

ValueWithError fidelity_with_error(ValueWithError r)
{
    if (!(r.value >= 0.0) || !(r.sigma >= 0.0)) {
        throw AnalysisError("amplification ratio and its sigma must be nonnegative");
    }
    const double denom = 2.0 * (r.value + 1.0) * (r.value + 1.0);
    return {(2.0 * r.value + 1.0) / (2.0 * r.value + 2.0), r.sigma / denom};
}

std::vector<ValueWithError> estimate_r(std::span<const CoincidenceTally> tallies, const BaselineWindow& window)
{
    std::uint64_t baseline_sum = 0;
    std::size_t baseline_points = 0;
    for (const auto& t : tallies) {
        if (window.contains(t.delay_fs)) {
            baseline_sum += t.c_clone;
            ++baseline_points;
        }
    }
    if (baseline_points == 0) {
        throw BaselineUndefined("no scan point lies beyond " + format_double(window.min_delay_tau) +
                                " tau_coh; widen the z range so the baseline is defined");
    }
    if (baseline_sum == 0) {
        throw BaselineUndefined("baseline points recorded zero [D_A1,D_A2] coincidences; increase trials");
    }
    const double total = static_cast<double>(baseline_sum);
    const double mean = total / static_cast<double>(baseline_points);

    std::vector<ValueWithError> out;
    out.reserve(tallies.size());
    for (const auto& t : tallies) {
        const double c = static_cast<double>(t.c_clone);
        const double r = c / mean;
        // Written without 1/c so c = 0 stays finite.
        const double sigma = std::sqrt(c / (mean * mean) + r * r / total);
        out.push_back({r, sigma});
    }
    return out;
}

void assign_estimates(std::span<CoincidenceTally> tallies, const BaselineWindow& window)
{
    const auto rs = estimate_r(tallies, window);
    for (std::size_t i = 0; i < tallies.size(); ++i) {
        tallies[i].r_ratio = rs[i];
        tallies[i].f_estimate = fidelity_with_error(rs[i]);
    }
}

double flatness_chi2(std::span<const std::uint64_t> counts)
{
    if (counts.size() < 3) {
        throw AnalysisError("flatness fit needs at least 3 points");
    }
    double sum = 0.0;
    for (auto c : counts) {
        sum += static_cast<double>(c);
    }
    const double mean = sum / static_cast<double>(counts.size());
    if (mean == 0.0) {
        return 0.0;
    }
    double chi2 = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - mean;
        chi2 += d * d / mean;
    }
    return chi2 / static_cast<double>(counts.size() - 1);
}

ScanReport make_report(std::span<const CoincidenceTally> tallies, ScanMetadata metadata,
                       const BaselineWindow& window)
{
    ScanReport report;
    report.metadata = std::move(metadata);
    report.metadata.tau_coh_fs = window.tau_coh_fs;
    report.metadata.baseline_min_delay_tau = window.min_delay_tau;

    report.rows.reserve(tallies.size());
    for (const auto& t : tallies) {
        report.rows.push_back({t.z_um, t.c_clone, t.c_anti, t.r_ratio, t.f_estimate});
    }
    if (tallies.empty()) {
        return report;
    }

    const auto peak = std::max_element(tallies.begin(), tallies.end(),
                                       [](const auto& a, const auto& b) { return a.overlap < b.overlap; });
    report.summary.peak_z_um = peak->z_um;
    report.summary.peak_r = peak->r_ratio;
    report.summary.peak_f = peak->f_estimate;

    double clone_sum = 0.0;
    double anti_sum = 0.0;
    std::size_t n = 0;
    for (const auto& t : tallies) {
        if (window.contains(t.delay_fs)) {
            clone_sum += static_cast<double>(t.c_clone);
            anti_sum += static_cast<double>(t.c_anti);
            ++n;
        }
    }
    if (n > 0) {
        report.summary.baseline_clone_rate = clone_sum / static_cast<double>(n);
        report.summary.baseline_anti_rate = anti_sum / static_cast<double>(n);
    }
    if (tallies.size() >= 3) {
        std::vector<std::uint64_t> anti;
        anti.reserve(tallies.size());
        for (const auto& t : tallies) {
            anti.push_back(t.c_anti);
        }
        report.summary.flatness_chi2_per_dof = flatness_chi2(anti);
    }
    return report;
}

std::optional<ReportFormat> parse_format(const std::string& name)
{
    if (name == "csv") {
        return ReportFormat::Csv;
    }
    if (name == "json") {
        return ReportFormat::Json;
    }
    return std::nullopt;
}

std::string format_double(double x)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

std::string to_csv(const ScanReport& report)
{
    const auto& m = report.metadata;
    std::ostringstream os;
    os << "# seed=" << m.seed << '\n'
       << "# trials_per_z=" << m.trials_per_z << '\n'
       << "# input_phi=" << m.input_phi << '\n'
       << "# ancilla_model=" << m.ancilla_model << '\n'
       << "# tau_coh_fs=" << format_double(m.tau_coh_fs) << '\n'
       << "# wavelength_nm=" << format_double(m.wavelength_nm) << '\n'
       << "# v_max=" << format_double(m.v_max) << '\n'
       << "# baseline_min_delay_tau=" << format_double(m.baseline_min_delay_tau) << '\n'
       << "z_um,c_clone,c_anti,r,r_sigma,f,f_sigma\n";
    for (const auto& row : report.rows) {
        os << format_double(row.z_um) << ',' << row.c_clone << ',' << row.c_anti << ','
           << format_double(row.r.value) << ',' << format_double(row.r.sigma) << ','
           << format_double(row.f.value) << ',' << format_double(row.f.sigma) << '\n';
    }
    return os.str();
}

namespace {

json to_json_value(const ValueWithError& v) { return {{"value", v.value}, {"sigma", v.sigma}}; }

ValueWithError value_from_json(const json& j)
{
    return {j.at("value").get<double>(), j.at("sigma").get<double>()};
}

} // namespace

std::string to_json(const ScanReport& report)
{
    const auto& m = report.metadata;
    const auto& s = report.summary;
    json rows = json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"z_um", row.z_um},
                        {"c_clone", row.c_clone},
                        {"c_anti", row.c_anti},
                        {"r", to_json_value(row.r)},
                        {"f", to_json_value(row.f)}});
    }
    json doc = {
        {"metadata",
         {{"seed", m.seed},
          {"trials_per_z", m.trials_per_z},
          {"input_phi", m.input_phi},
          {"ancilla_model", m.ancilla_model},
          {"tau_coh_fs", m.tau_coh_fs},
          {"wavelength_nm", m.wavelength_nm},
          {"v_max", m.v_max},
          {"baseline_min_delay_tau", m.baseline_min_delay_tau}}},
        {"summary",
         {{"peak_z_um", s.peak_z_um},
          {"peak_r", to_json_value(s.peak_r)},
          {"peak_f", to_json_value(s.peak_f)},
          {"baseline_clone_rate", s.baseline_clone_rate},
          {"baseline_anti_rate", s.baseline_anti_rate},
          {"flatness_chi2_per_dof",
           s.flatness_chi2_per_dof ? json(*s.flatness_chi2_per_dof) : json(nullptr)}}},
        {"rows", rows},
    };
    return doc.dump(2) + "\n";
}

ScanReport report_from_json(const std::string& text)
{
    const json doc = json::parse(text);
    ScanReport report;
    const auto& m = doc.at("metadata");
    report.metadata.seed = m.at("seed").get<std::uint64_t>();
    report.metadata.trials_per_z = m.at("trials_per_z").get<std::uint64_t>();
    report.metadata.input_phi = m.at("input_phi").get<std::string>();
    report.metadata.ancilla_model = m.at("ancilla_model").get<std::string>();
    report.metadata.tau_coh_fs = m.at("tau_coh_fs").get<double>();
    report.metadata.wavelength_nm = m.at("wavelength_nm").get<double>();
    report.metadata.v_max = m.at("v_max").get<double>();
    report.metadata.baseline_min_delay_tau = m.at("baseline_min_delay_tau").get<double>();

    const auto& s = doc.at("summary");
    report.summary.peak_z_um = s.at("peak_z_um").get<double>();
    report.summary.peak_r = value_from_json(s.at("peak_r"));
    report.summary.peak_f = value_from_json(s.at("peak_f"));
    report.summary.baseline_clone_rate = s.at("baseline_clone_rate").get<double>();
    report.summary.baseline_anti_rate = s.at("baseline_anti_rate").get<double>();
    if (const auto& chi = s.at("flatness_chi2_per_dof"); !chi.is_null()) {
        report.summary.flatness_chi2_per_dof = chi.get<double>();
    }

    for (const auto& row : doc.at("rows")) {
        report.rows.push_back({row.at("z_um").get<double>(), row.at("c_clone").get<std::uint64_t>(),
                               row.at("c_anti").get<std::uint64_t>(), value_from_json(row.at("r")),
                               value_from_json(row.at("f"))});
    }
    return report;
}

void export_report(const ScanReport& report, ReportFormat format, const std::filesystem::path& path)
{
    const std::string body = format == ReportFormat::Csv ? to_csv(report) : to_json(report);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open report file '" + path.string() + "' for writing: " +
                                 std::strerror(errno));
    }
    out << body;
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing report file '" + path.string() + "'");
    }
}

ScanReport import_report_json(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open report file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return report_from_json(buf.str());
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed report '" + path.string() + "': " + e.what());
    }
}

void print_summary(std::ostream& os, const ScanReport& report)
{
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << std::setw(12) << "z_um" << std::setw(10) << "c_clone" << std::setw(10) << "c_anti" << std::setw(10) << "R"
       << std::setw(10) << "sigma_R" << std::setw(10) << "F" << std::setw(10) << "sigma_F" << '\n';
    os << std::fixed;
    for (const auto& row : report.rows) {
        os << std::setprecision(2) << std::setw(12) << row.z_um << std::setw(10) << row.c_clone << std::setw(10)
           << row.c_anti << std::setprecision(4) << std::setw(10) << row.r.value << std::setw(10) << row.r.sigma
           << std::setw(10) << row.f.value << std::setw(10) << row.f.sigma << '\n';
    }
    const auto& s = report.summary;
    os << std::setprecision(4) << "peak R = " << s.peak_r.value << " +/- " << s.peak_r.sigma << "  (z = "
       << std::setprecision(2) << s.peak_z_um << " um)\n"
       << std::setprecision(4) << "peak F = " << s.peak_f.value << " +/- " << s.peak_f.sigma << '\n'
       << std::setprecision(1) << "baseline rates: clone " << s.baseline_clone_rate << ", anti "
       << s.baseline_anti_rate << '\n';
    if (s.flatness_chi2_per_dof) {
        os << std::setprecision(3) << "anti-clone flatness chi2/dof = " << *s.flatness_chi2_per_dof << '\n';
    }
    os.flags(flags);
    os.precision(prec);
}

} // namespace teleclone::analysis
