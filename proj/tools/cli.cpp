#include "cli.hpp"

#include "teleclone/analysis.hpp"
#include "teleclone/circuit.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace teleclone::cli {

namespace {

using quantum::Complex;
using quantum::Qubit;
using nlohmann::json;

std::optional<double> parse_real(std::string_view s)
{
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return std::nullopt;
    }
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(x)) {
        return std::nullopt;
    }
    return x;
}

// "x", "yi", "x+yi", "x-yi", "i", "-i"
std::optional<Complex> parse_complex(std::string_view s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.back() != 'i') {
        auto re = parse_real(s);
        return re ? std::optional<Complex>(Complex{*re, 0.0}) : std::nullopt;
    }
    s.remove_suffix(1);
    std::size_t split = std::string_view::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    const std::string_view real_part = split == std::string_view::npos ? std::string_view{} : s.substr(0, split);
    const std::string_view imag_part = split == std::string_view::npos ? s : s.substr(split);

    double im = 0.0;
    if (imag_part.empty() || imag_part == "+") {
        im = 1.0;
    } else if (imag_part == "-") {
        im = -1.0;
    } else if (auto v = parse_real(imag_part)) {
        im = *v;
    } else {
        return std::nullopt;
    }
    double re = 0.0;
    if (!real_part.empty()) {
        auto v = parse_real(real_part);
        if (!v) {
            return std::nullopt;
        }
        re = *v;
    }
    return Complex{re, im};
}

std::string strip_spaces(std::string_view s)
{
    std::string out;
    std::copy_if(s.begin(), s.end(), std::back_inserter(out), [](char c) { return c != ' ' && c != '\t'; });
    return out;
}

std::string fmt12(double x)
{
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

std::string fmt_complex(Complex c) { return "(" + fmt12(c.real()) + "," + fmt12(c.imag()) + ")"; }

json qubit_json(const Qubit& q)
{
    return {{"alpha", {q.alpha().real(), q.alpha().imag()}}, {"beta", {q.beta().real(), q.beta().imag()}}};
}

void write_text(const std::string& path, const std::string& body)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    f << body;
    if (!f.flush()) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

struct GlobalOptions {
    std::uint64_t seed = photonic::kDefaultSeed;
    std::string out_path;
    std::string format;
    unsigned threads = 0;
};

int cmd_circuit_run(const std::string& phi_spec, const GlobalOptions& g, std::ostream& out, std::ostream& err)
{
    const auto phi = parse_phi_spec(phi_spec);
    if (!phi) {
        err << "error: cannot parse --phi '" << phi_spec << "' (use H, V, D, R or alpha,beta)\n";
        return kUsageError;
    }
    const auto res = circuit::run_teleunot(*phi);
    out << "phi_alpha=" << fmt_complex(phi->alpha()) << '\n'
        << "phi_beta=" << fmt_complex(phi->beta()) << '\n'
        << "p_teleport=" << fmt12(res.p_teleport) << '\n'
        << "p_clone=" << fmt12(res.p_clone) << '\n'
        << "f_clone=" << fmt12(res.f_clone_S) << '\n'
        << "f_clone_A=" << fmt12(res.f_clone_A) << '\n'
        << "f_unot=" << fmt12(res.f_unot_B) << '\n';
    if (!g.out_path.empty()) {
        json doc = {{"phi", qubit_json(*phi)},
                    {"p_teleport", res.p_teleport},
                    {"p_clone", res.p_clone},
                    {"teleported_state_B", qubit_json(res.teleported_state_B)},
                    {"f_clone_S", res.f_clone_S},
                    {"f_clone_A", res.f_clone_A},
                    {"f_unot_B", res.f_unot_B}};
        write_text(g.out_path, doc.dump(2) + "\n");
    }
    return kSuccess;
}

struct Stat {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    double worst_deviation = 0.0;
    void add(double x, double target)
    {
        min = std::min(min, x);
        max = std::max(max, x);
        sum += x;
        worst_deviation = std::max(worst_deviation, std::abs(x - target));
    }
};

int cmd_circuit_sweep(std::uint64_t n, const GlobalOptions& g, std::ostream& out, std::ostream& err)
{
    if (n < 1) {
        err << "error: --n must be >= 1\n";
        return kUsageError;
    }
    constexpr double kTolerance = 1e-9;
    const std::array<std::pair<const char*, double>, 4> quantities{
        {{"f_clone_S", 5.0 / 6.0}, {"f_clone_A", 5.0 / 6.0}, {"f_unot_B", 2.0 / 3.0}, {"p_teleport", 0.25}}};
    std::array<Stat, 4> stats{};
    for (std::uint64_t i = 0; i < n; ++i) {
        RandomStream rng(g.seed, i);
        const auto res = circuit::run_teleunot(circuit::haar_random_qubit(rng));
        const std::array<double, 4> values{res.f_clone_S, res.f_clone_A, res.f_unot_B, res.p_teleport};
        for (std::size_t q = 0; q < 4; ++q) {
            stats[q].add(values[q], quantities[q].second);
        }
    }

    double worst = 0.0;
    json summary = json::object();
    out << "samples=" << n << " seed=" << g.seed << '\n';
    out << std::left << std::setw(12) << "quantity" << std::setw(20) << "min" << std::setw(20) << "max"
        << std::setw(20) << "mean" << '\n';
    for (std::size_t q = 0; q < 4; ++q) {
        const double mean = stats[q].sum / static_cast<double>(n);
        out << std::setw(12) << quantities[q].first << std::setw(20) << fmt12(stats[q].min) << std::setw(20)
            << fmt12(stats[q].max) << std::setw(20) << fmt12(mean) << '\n';
        worst = std::max(worst, stats[q].worst_deviation);
        summary[quantities[q].first] = {{"min", stats[q].min}, {"max", stats[q].max}, {"mean", mean}};
    }
    out << std::right;
    const bool pass = worst <= kTolerance;
    std::ostringstream dev;
    dev << std::setprecision(3) << worst;
    out << (pass ? "PASS" : "FAIL") << " (max deviation " << dev.str() << ")\n";
    if (!g.out_path.empty()) {
        json doc = {{"samples", n}, {"seed", g.seed}, {"max_deviation", worst}, {"pass", pass}, {"stats", summary}};
        write_text(g.out_path, doc.dump(2) + "\n");
    }
    return pass ? kSuccess : kRuntimeFailure;
}

struct HomScanOptions {
    std::string config_path;
    std::optional<double> z_min;
    std::optional<double> z_max;
    std::optional<std::size_t> z_steps;
    std::optional<double> tau_coh_fs;
    std::optional<std::uint64_t> trials;
    std::optional<std::string> phi;
    std::optional<std::string> ancilla;
    std::optional<double> vmax;
};

int cmd_hom_scan(const HomScanOptions& o, bool seed_given, const GlobalOptions& g, std::ostream& out,
                 std::ostream& err)
{
    photonic::DelayScanConfig cfg = photonic::default_scan_config();
    bool z_from_file = false;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path, std::ios::binary);
        if (!in) {
            err << "error: cannot read config '" << o.config_path << "'\n";
            return kUsageError;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        cfg = config_from_json(buf.str());
        z_from_file = true;
    }

    if (o.tau_coh_fs) {
        cfg.tau_coh = *o.tau_coh_fs;
    }
    const bool z_flags = o.z_min || o.z_max || o.z_steps;
    if (z_flags || (o.tau_coh_fs && !z_from_file)) {
        const double half = photonic::stage_from_delay(5.0 * cfg.tau_coh);
        const std::size_t steps = o.z_steps.value_or(z_from_file ? cfg.z_values.size() : 21);
        cfg.z_values = photonic::linspace(o.z_min.value_or(-half), o.z_max.value_or(half), steps);
    }
    if (o.trials) {
        cfg.trials_per_z = *o.trials;
    }
    if (o.phi) {
        const auto phi = parse_phi_spec(*o.phi);
        if (!phi) {
            err << "error: cannot parse --phi '" << *o.phi << "'\n";
            return kUsageError;
        }
        cfg.input_phi = *phi;
        cfg.input_phi_label = *o.phi;
    }
    if (o.ancilla) {
        cfg.ancilla_model = photonic::parse_ancilla_model(*o.ancilla);
    }
    if (o.vmax) {
        cfg.v_max = *o.vmax;
    }
    if (seed_given || !z_from_file) {
        cfg.seed = g.seed;
    }

    if (auto problems = cfg.validate(); !problems.empty()) {
        throw photonic::ConfigError(std::move(problems));
    }

    auto format = analysis::ReportFormat::Csv;
    if (!g.format.empty()) {
        format = *analysis::parse_format(g.format);
    } else if (g.out_path.size() >= 5 && g.out_path.ends_with(".json")) {
        format = analysis::ReportFormat::Json;
    }

    const auto tallies = photonic::run_scan(cfg, g.threads);
    const auto report = analysis::make_report(tallies, cfg.metadata(), cfg.baseline_window());
    if (!g.out_path.empty()) {
        analysis::export_report(report, format, g.out_path);
    }
    analysis::print_summary(out, report);
    const auto& s = report.summary;
    out << "peak_R=" << fmt12(s.peak_r.value) << " sigma_R=" << fmt12(s.peak_r.sigma) << '\n'
        << "peak_F=" << fmt12(s.peak_f.value) << " sigma_F=" << fmt12(s.peak_f.sigma) << '\n';
    if (s.flatness_chi2_per_dof) {
        out << "flatness_chi2_per_dof=" << fmt12(*s.flatness_chi2_per_dof) << '\n';
    }
    return kSuccess;
}

int cmd_clone_fidelity(const std::string& r_text, std::ostream& out, std::ostream& err)
{
    const auto r = parse_real(strip_spaces(r_text));
    if (!r || !(*r > 0.0)) {
        err << "error: r must be a positive number, got '" << r_text << "'\n";
        return kUsageError;
    }
    out << "F=" << fmt12(analysis::fidelity_from_r(*r)) << '\n';
    return kSuccess;
}

} // namespace

std::optional<Qubit> parse_phi_spec(std::string_view spec)
{
    const std::string s = strip_spaces(spec);
    const double h = 1.0 / std::sqrt(2.0);
    if (s == "H") {
        return Qubit::zero();
    }
    if (s == "V") {
        return Qubit::one();
    }
    if (s == "D") {
        return Qubit::normalized(h, h);
    }
    if (s == "R") {
        return Qubit::normalized(h, Complex{0.0, h});
    }
    const auto comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos) {
        return std::nullopt;
    }
    const auto alpha = parse_complex(std::string_view(s).substr(0, comma));
    const auto beta = parse_complex(std::string_view(s).substr(comma + 1));
    if (!alpha || !beta || std::norm(*alpha) + std::norm(*beta) == 0.0) {
        return std::nullopt;
    }
    return Qubit::normalized(*alpha, *beta);
}

photonic::DelayScanConfig config_from_json(const std::string& text)
{
    static const std::array<std::string_view, 9> kFields{
        "z_values", "tau_coh", "wavelength", "trials_per_z", "input_phi",
        "seed", "ancilla_model", "v_max", "baseline_min_delay_tau"};
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw photonic::ConfigError({std::string("config: malformed JSON: ") + e.what()});
    }
    if (!doc.is_object()) {
        throw photonic::ConfigError({"config: top level must be an object"});
    }

    photonic::DelayScanConfig cfg = photonic::default_scan_config();
    std::vector<std::string> problems;
    for (const auto& [key, _] : doc.items()) {
        if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
            problems.push_back(key + ": unknown field");
        }
    }

    auto read = [&](const char* field, auto& target) {
        if (!doc.contains(field)) {
            return;
        }
        try {
            doc.at(field).get_to(target);
        } catch (const json::exception&) {
            problems.push_back(std::string(field) + ": wrong type");
        }
    };
    read("z_values", cfg.z_values);
    read("tau_coh", cfg.tau_coh);
    read("wavelength", cfg.wavelength);
    read("trials_per_z", cfg.trials_per_z);
    read("seed", cfg.seed);
    read("v_max", cfg.v_max);
    read("baseline_min_delay_tau", cfg.baseline_min_delay_tau);

    std::string phi_label;
    read("input_phi", phi_label);
    if (!phi_label.empty()) {
        if (auto phi = parse_phi_spec(phi_label)) {
            cfg.input_phi = *phi;
            cfg.input_phi_label = phi_label;
        } else {
            problems.push_back("input_phi: cannot parse '" + phi_label + "'");
        }
    }
    std::string ancilla;
    read("ancilla_model", ancilla);
    if (!ancilla.empty()) {
        try {
            cfg.ancilla_model = photonic::parse_ancilla_model(ancilla);
        } catch (const std::invalid_argument&) {
            problems.push_back("ancilla_model: expected linear-waveplate or haar");
        }
    }

    for (auto& p : cfg.validate()) {
        problems.push_back(std::move(p));
    }
    if (!problems.empty()) {
        throw photonic::ConfigError(std::move(problems));
    }
    return cfg;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Tele-UNOT network and beamsplitter cloning simulator", "teleclone"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed (default " + std::to_string(photonic::kDefaultSeed) + ")");
    app.add_option("--out", g.out_path, "Output file");
    app.add_option("--format", g.format, "Report format for hom-scan")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", g.threads, "Worker thread cap (0 = all cores); never changes results");

    auto* run_cmd = app.add_subcommand("circuit-run", "Run the gate-level network on one input qubit");
    std::string phi_spec = "H";
    run_cmd->add_option("--phi", phi_spec, "Input qubit: H, V, D, R or alpha,beta");

    auto* sweep_cmd = app.add_subcommand("circuit-sweep", "Run the network on Haar-random inputs");
    std::uint64_t sweep_n = 100;
    sweep_cmd->add_option("--n,-n", sweep_n, "Number of random inputs");

    auto* scan_cmd = app.add_subcommand("hom-scan", "Monte Carlo delay scan of the beamsplitter cloner");
    HomScanOptions scan;
    scan_cmd->add_option("--config", scan.config_path, "JSON scan configuration");
    scan_cmd->add_option("--z-min", scan.z_min, "First stage setting [um]");
    scan_cmd->add_option("--z-max", scan.z_max, "Last stage setting [um]");
    scan_cmd->add_option("--z-steps", scan.z_steps, "Number of stage settings");
    scan_cmd->add_option("--tau-coh-fs", scan.tau_coh_fs, "Coherence time [fs]");
    scan_cmd->add_option("--trials", scan.trials, "Trials per stage setting");
    scan_cmd->add_option("--phi", scan.phi, "Input polarization: H, V, D, R or alpha,beta");
    scan_cmd->add_option("--ancilla", scan.ancilla, "Ancilla ensemble")->check(CLI::IsMember({"linear", "haar"}));
    scan_cmd->add_option("--vmax", scan.vmax, "Mode-match ceiling on the overlap");

    auto* fid_cmd = app.add_subcommand("clone-fidelity", "Cloning fidelity F(R) = (2R+1)/(2R+2)");
    std::string r_text;
    fid_cmd->add_option("r", r_text, "Amplification ratio R")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    }

    try {
        if (run_cmd->parsed()) {
            return cmd_circuit_run(phi_spec, g, out, err);
        }
        if (sweep_cmd->parsed()) {
            return cmd_circuit_sweep(sweep_n, g, out, err);
        }
        if (scan_cmd->parsed()) {
            return cmd_hom_scan(scan, seed_opt->count() > 0, g, out, err);
        }
        if (fid_cmd->parsed()) {
            return cmd_clone_fidelity(r_text, out, err);
        }
    } catch (const photonic::ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const analysis::BaselineUndefined& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kUsageError;
}

} // namespace teleclone::cli
