#include "teleclone/photonic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace teleclone::photonic {

using quantum::Complex;

double delay_from_stage(double z_um) noexcept { return z_um / (2.0 * kSpeedOfLightUmPerFs); }

double stage_from_delay(double delay_fs) noexcept { return 2.0 * kSpeedOfLightUmPerFs * delay_fs; }

double overlap_from_delay(double z_um, double tau_coh_fs)
{
    if (!(tau_coh_fs > 0.0)) {
        throw std::invalid_argument("tau_coh must be positive");
    }
    const double x = delay_from_stage(z_um) / tau_coh_fs;
    return std::exp(-x * x);
}

const char* to_string(AncillaModel m) noexcept
{
    return m == AncillaModel::Haar ? "haar" : "linear-waveplate";
}

AncillaModel parse_ancilla_model(const std::string& name)
{
    if (name == "linear" || name == "linear-waveplate") {
        return AncillaModel::LinearWaveplate;
    }
    if (name == "haar") {
        return AncillaModel::Haar;
    }
    throw std::invalid_argument("unknown ancilla model '" + name + "' (expected linear or haar)");
}

Qubit sample_ancilla(RandomStream& rng, AncillaModel model)
{
    if (model == AncillaModel::LinearWaveplate) {
        const double chi = std::numbers::pi * rng.uniform();
        return Qubit::normalized(std::cos(chi), std::sin(chi));
    }
    const double cos_theta = 2.0 * rng.uniform() - 1.0;
    const double azimuth = 2.0 * std::numbers::pi * rng.uniform();
    return Qubit::normalized(std::sqrt(0.5 * (1.0 + cos_theta)), std::polar(std::sqrt(0.5 * (1.0 - cos_theta)), azimuth));
}

PhotonPair::PhotonPair(Qubit pol_s, Qubit pol_a, double overlap_v)
    : pol_s_(pol_s), pol_a_(pol_a), overlap_v_(overlap_v)
{
    if (!(overlap_v >= 0.0 && overlap_v <= 1.0)) {
        throw std::invalid_argument("overlap_v must lie in [0, 1]");
    }
}

Routing routing_of(Mode1Pols pols) noexcept
{
    switch (pols) {
    case Mode1Pols::None: return Routing::BothMode2;
    case Mode1Pols::Phi:
    case Mode1Pols::Perp: return Routing::SplitModes;
    default: return Routing::BothMode1;
    }
}

const char* to_string(Routing r) noexcept
{
    switch (r) {
    case Routing::BothMode1: return "both_mode1";
    case Routing::BothMode2: return "both_mode2";
    case Routing::SplitModes: return "split_modes";
    }
    return "?";
}

const char* to_string(Mode1Pols p) noexcept
{
    switch (p) {
    case Mode1Pols::None: return "{}";
    case Mode1Pols::Phi: return "{phi}";
    case Mode1Pols::Perp: return "{perp}";
    case Mode1Pols::PhiPhi: return "{phi,phi}";
    case Mode1Pols::PhiPerp: return "{phi,perp}";
    case Mode1Pols::PerpPerp: return "{perp,perp}";
    }
    return "?";
}

double BranchProbabilities::operator()(Routing routing) const noexcept
{
    double sum = 0.0;
    for (auto p : kAllMode1Pols) {
        if (routing_of(p) == routing) {
            sum += (*this)(p);
        }
    }
    return sum;
}

double BranchProbabilities::total() const noexcept
{
    double sum = 0.0;
    for (double p : p_) {
        sum += p;
    }
    return sum;
}

namespace {

// Output mode index = spatial * 4 + polarization * 2 + temporal, where
// polarization 0 = pol_S, 1 = orthogonal; temporal 0 = S's wavepacket.
constexpr int kModes = 8;
constexpr int spatial_of(int m) { return m / 4; }
constexpr int polarization_of(int m) { return (m / 2) % 2; }

Mode1Pols classify(int m, int n)
{
    const bool m1 = spatial_of(m) == 0;
    const bool n1 = spatial_of(n) == 0;
    if (m1 && n1) {
        const int perps = polarization_of(m) + polarization_of(n);
        return perps == 0 ? Mode1Pols::PhiPhi : (perps == 1 ? Mode1Pols::PhiPerp : Mode1Pols::PerpPerp);
    }
    if (!m1 && !n1) {
        return Mode1Pols::None;
    }
    const int pol = m1 ? polarization_of(m) : polarization_of(n);
    return pol == 0 ? Mode1Pols::Phi : Mode1Pols::Perp;
}

} // namespace

BranchProbabilities beamsplitter_branch_probabilities(const PhotonPair& pair)
{
    const double v = pair.overlap_v();
    const double w = std::sqrt(std::max(0.0, 1.0 - v * v));
    const Complex c_par = pair.pol_S().inner(pair.pol_A());
    const Complex c_perp = pair.pol_S().orthogonal().inner(pair.pol_A());

    const std::array<Complex, 4> internal_s{1.0, 0.0, 0.0, 0.0};
    const std::array<Complex, 4> internal_a{c_par * v, c_par * w, c_perp * v, c_perp * w};

    const double r = 1.0 / std::sqrt(2.0);
    std::array<Complex, kModes> out_s{};
    std::array<Complex, kModes> out_a{};
    for (int k = 0; k < 4; ++k) {
        out_s[k] = r * internal_s[k];
        out_s[4 + k] = r * internal_s[k];
        out_a[k] = r * internal_a[k];
        out_a[4 + k] = -r * internal_a[k];
    }

    BranchProbabilities table;
    for (int m = 0; m < kModes; ++m) {
        // a_m^+ a_m^+ |0> = sqrt2 |2_m>
        table.at(classify(m, m)) += 2.0 * std::norm(out_s[m] * out_a[m]);
        for (int n = m + 1; n < kModes; ++n) {
            table.at(classify(m, n)) += std::norm(out_s[m] * out_a[n] + out_s[n] * out_a[m]);
        }
    }
    return table;
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument([&] {
          std::string msg = "invalid scan configuration:";
          for (const auto& p : problems) {
              msg += "\n  " + p;
          }
          return msg;
      }()),
      problems_(std::move(problems))
{
}

std::vector<std::string> DelayScanConfig::validate() const
{
    std::vector<std::string> problems;
    if (z_values.empty()) {
        problems.emplace_back("z_values: must be nonempty");
    }
    if (!std::all_of(z_values.begin(), z_values.end(), [](double z) { return std::isfinite(z); })) {
        problems.emplace_back("z_values: entries must be finite");
    }
    if (!(tau_coh > 0.0) || !std::isfinite(tau_coh)) {
        problems.emplace_back("tau_coh: must be > 0");
    }
    if (!(wavelength > 0.0)) {
        problems.emplace_back("wavelength: must be > 0");
    }
    if (trials_per_z < 1) {
        problems.emplace_back("trials_per_z: must be >= 1");
    }
    if (trials_per_z > std::numeric_limits<std::uint32_t>::max()) {
        problems.emplace_back("trials_per_z: must be < 2^32");
    }
    if (!(v_max >= 0.0 && v_max <= 1.0)) {
        problems.emplace_back("v_max: must lie in [0, 1]");
    }
    if (!(baseline_min_delay_tau > 0.0)) {
        problems.emplace_back("baseline_min_delay_tau: must be > 0");
    }
    return problems;
}

double DelayScanConfig::overlap_at(double z_um) const { return v_max * overlap_from_delay(z_um, tau_coh); }

analysis::ScanMetadata DelayScanConfig::metadata() const
{
    analysis::ScanMetadata m;
    m.seed = seed;
    m.trials_per_z = trials_per_z;
    m.input_phi = input_phi_label;
    m.ancilla_model = to_string(ancilla_model);
    m.tau_coh_fs = tau_coh;
    m.wavelength_nm = wavelength;
    m.v_max = v_max;
    m.baseline_min_delay_tau = baseline_min_delay_tau;
    return m;
}

std::vector<double> linspace(double lo, double hi, std::size_t steps)
{
    std::vector<double> out;
    if (steps == 0) {
        return out;
    }
    if (steps == 1) {
        out.push_back(lo);
        return out;
    }
    out.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
        out.push_back(lo * (1.0 - t) + hi * t);
    }
    return out;
}

DelayScanConfig default_scan_config()
{
    DelayScanConfig cfg;
    const double half_width = stage_from_delay(5.0 * cfg.tau_coh);
    cfg.z_values = linspace(-half_width, half_width, 21);
    return cfg;
}

namespace {

Mode1Pols sample_content(const BranchProbabilities& table, double u)
{
    double acc = 0.0;
    Mode1Pols last = Mode1Pols::None;
    for (auto p : kAllMode1Pols) {
        const double pr = table(p);
        if (pr <= 0.0) {
            continue;
        }
        acc += pr;
        last = p;
        if (u < acc) {
            return p;
        }
    }
    return last; // u beyond the rounded total
}

// A phi photon is transmitted by PBS_C and split fairly by BS_C.
std::uint8_t route_phi(RandomStream& rng) { return rng.uniform() < 0.5 ? kDA1 : kDA2; }

} // namespace

DetectionEvent run_trial(const Qubit& phi, double z_um, const DelayScanConfig& cfg, RandomStream& rng)
{
    const Qubit ancilla = sample_ancilla(rng, cfg.ancilla_model);
    const PhotonPair pair(phi, ancilla, cfg.overlap_at(z_um));
    const auto table = beamsplitter_branch_probabilities(pair);

    DetectionEvent ev;
    ev.mode1_pols = sample_content(table, rng.uniform() * table.total());
    ev.routing = routing_of(ev.mode1_pols);
    switch (ev.mode1_pols) {
    case Mode1Pols::None: break;
    case Mode1Pols::Phi: ev.detector_hits = route_phi(rng); break;
    case Mode1Pols::Perp: ev.detector_hits = kDB; break;
    case Mode1Pols::PhiPhi: {
        const std::uint8_t first = route_phi(rng);
        ev.detector_hits = first | route_phi(rng);
        break;
    }
    case Mode1Pols::PhiPerp: ev.detector_hits = route_phi(rng) | kDB; break;
    case Mode1Pols::PerpPerp: ev.detector_hits = kDB; break;
    }
    return ev;
}

std::vector<CoincidenceTally> run_scan(const DelayScanConfig& cfg, unsigned threads)
{
    if (auto problems = cfg.validate(); !problems.empty()) {
        throw ConfigError(std::move(problems));
    }

    const std::size_t nz = cfg.z_values.size();
    std::vector<CoincidenceTally> tallies(nz);
    for (std::size_t k = 0; k < nz; ++k) {
        tallies[k].z_um = cfg.z_values[k];
        tallies[k].delay_fs = delay_from_stage(cfg.z_values[k]);
        tallies[k].overlap = cfg.overlap_at(cfg.z_values[k]);
        tallies[k].n_trials = cfg.trials_per_z;
    }

    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t blocks_per_z = (cfg.trials_per_z + kBlock - 1) / kBlock;
    const std::uint64_t total_blocks = blocks_per_z * nz;

    struct Partial {
        std::uint64_t clone = 0;
        std::uint64_t anti = 0;
    };
    std::vector<Partial> partials(total_blocks);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&] {
        for (std::uint64_t b = next.fetch_add(1); b < total_blocks; b = next.fetch_add(1)) {
            const std::uint64_t k = b / blocks_per_z;
            const std::uint64_t first = (b % blocks_per_z) * kBlock;
            const std::uint64_t last = std::min(first + kBlock, cfg.trials_per_z);
            Partial part;
            for (std::uint64_t t = first; t < last; ++t) {
                RandomStream rng(cfg.seed, k, static_cast<std::uint32_t>(t));
                const auto ev = run_trial(cfg.input_phi, cfg.z_values[k], cfg, rng);
                part.clone += ev.clone_coincidence() ? 1u : 0u;
                part.anti += ev.anti_coincidence() ? 1u : 0u;
            }
            partials[b] = part;
        }
    };

    unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    n_threads = static_cast<unsigned>(std::min<std::uint64_t>(n_threads, total_blocks));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
        worker();
    }

    for (std::uint64_t b = 0; b < total_blocks; ++b) {
        auto& t = tallies[b / blocks_per_z];
        t.c_clone += partials[b].clone;
        t.c_anti += partials[b].anti;
    }
    analysis::assign_estimates(tallies, cfg.baseline_window());
    return tallies;
}

Mode1State analytic_mode1_state(const Qubit& phi, double v)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("overlap v must lie in [0, 1]");
    }
    const double v2 = v * v;
    const double weight_clone = (1.0 + v2) / (2.0 + v2);
    const double weight_mixed = 1.0 / (2.0 + v2);

    const Eigen::Vector2cd a = phi.ket();
    const Eigen::Vector2cd b = phi.orthogonal().ket();
    auto kron = [](const Eigen::Vector2cd& x, const Eigen::Vector2cd& y) {
        Eigen::Vector4cd out;
        out << x(0) * y(0), x(0) * y(1), x(1) * y(0), x(1) * y(1);
        return out;
    };
    const Eigen::Vector4cd phiphi = kron(a, a);
    const Eigen::Vector4cd sym = (kron(a, b) + kron(b, a)) / std::sqrt(2.0);
    const Eigen::Vector4cd anti = (kron(a, b) - kron(b, a)) / std::sqrt(2.0);

    // phi/phi_perp component: time-mode distinguishability leaves weight
    // (1 - v^2)/2 on the antisymmetric polarization state.
    const Eigen::Matrix4cd mixed = 0.5 * (1.0 + v2) * sym * sym.adjoint() + 0.5 * (1.0 - v2) * anti * anti.adjoint();
    Eigen::Matrix4cd rho = weight_clone * phiphi * phiphi.adjoint() + weight_mixed * mixed;
    // Enforce exact Hermiticity against rounding.
    rho = 0.5 * (rho + rho.adjoint()).eval();

    DensityMatrix dm({"p1", "p2"}, rho);
    const double f = quantum::fidelity(quantum::partial_trace(dm, {"p1"}), phi);
    return Mode1State{std::move(dm), weight_clone, weight_mixed, f};
}

} // namespace teleclone::photonic
