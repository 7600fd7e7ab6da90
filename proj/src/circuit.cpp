#include "teleclone/circuit.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace teleclone::circuit {

using quantum::Complex;
using quantum::Gate;
using quantum::Labels;
namespace gates = quantum::gates;

const char* to_string(BellLabel b) noexcept
{
    switch (b) {
    case BellLabel::PsiMinus: return "Psi-";
    case BellLabel::PsiPlus: return "Psi+";
    case BellLabel::PhiMinus: return "Phi-";
    case BellLabel::PhiPlus: return "Phi+";
    }
    return "?";
}

PureState bell_state(BellLabel b, const Label& first, const Label& second)
{
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    switch (b) {
    case BellLabel::PsiMinus: v(1) = s; v(2) = -s; break;
    case BellLabel::PsiPlus: v(1) = s; v(2) = s; break;
    case BellLabel::PhiMinus: v(0) = s; v(3) = -s; break;
    case BellLabel::PhiPlus: v(0) = s; v(3) = s; break;
    }
    return PureState({first, second}, std::move(v));
}

std::pair<int, int> computational_image(BellLabel b) noexcept
{
    switch (b) {
    case BellLabel::PsiMinus: return {1, 1};
    case BellLabel::PsiPlus: return {0, 1};
    case BellLabel::PhiMinus: return {1, 0};
    case BellLabel::PhiPlus: return {0, 0};
    }
    return {0, 0};
}

PureState prepare_singlet(const Label& first, const Label& second)
{
    // |00> -X(second)-> |01> -H(first)-> (|01>+|11>)/sqrt2 -Z(first)-> (|01>-|11>)/sqrt2
    //      -CNOT(first->second)-> (|01>-|10>)/sqrt2
    const std::array<int, 2> zeros{0, 0};
    PureState state = PureState::basis({first, second}, zeros);
    state = apply_gate(state, gates::pauli_x(), {second});
    state = apply_gate(state, gates::hadamard(), {first});
    state = apply_gate(state, gates::pauli_z(), {first});
    return apply_gate(state, gates::cnot(), {first, second});
}

const Gate& bell_to_computational_gate()
{
    // CNOT(s->a) then H(s). This sequence already lands each Bell state on
    // its assigned basis state with phase +1, so no X corrections follow.
    static const Gate g = [] {
        const Labels reg{"s", "a"};
        Eigen::MatrixXcd u(4, 4);
        for (int col = 0; col < 4; ++col) {
            const std::array<int, 2> bits{col >> 1, col & 1};
            PureState e = PureState::basis(reg, bits);
            e = apply_gate(e, gates::cnot(), {"s", "a"});
            e = apply_gate(e, gates::hadamard(), {"s"});
            u.col(col) = e.amplitudes();
        }
        return Gate("BellToComputational", u);
    }();
    return g;
}

PureState bell_to_computational(const PureState& state, const Label& s, const Label& a)
{
    return apply_gate(state, bell_to_computational_gate(), {s, a});
}

PureState computational_to_bell(const PureState& state, const Label& s, const Label& a)
{
    static const Gate inverse = bell_to_computational_gate().inverse();
    return apply_gate(state, inverse, {s, a});
}

ProtocolOutcome run_teleunot(const Qubit& phi)
{
    const std::array<int, 1> zero{0};
    PureState state = tensor(tensor(PureState::from_qubit(kSignal, phi), prepare_singlet(kAncilla, kBob)),
                             PureState::basis({kFlag}, zero));

    state = bell_to_computational(state, kSignal, kAncilla);
    state = apply_gate(state, gates::toffoli(), {kSignal, kAncilla, kFlag});
    state = computational_to_bell(state, kSignal, kAncilla);

    const Projection teleport = project_qubit(state, kFlag, 1);
    const Projection clone = project_qubit(state, kFlag, 0);
    if (!teleport.state || !clone.state) {
        throw quantum::QuantumError("flag readout produced an empty branch");
    }

    const PureState teleported = discard_qubit(*teleport.state, kFlag, 1);
    const Qubit bob_teleported = principal_qubit(partial_trace(teleported, {kBob}));

    PureState clones = discard_qubit(*clone.state, kFlag, 0);
    DensityMatrix rho_s = partial_trace(clones, {kSignal});
    DensityMatrix rho_a = partial_trace(clones, {kAncilla});
    DensityMatrix rho_b = partial_trace(clones, {kBob});
    const double f_s = fidelity(rho_s, phi);
    const double f_a = fidelity(rho_a, phi);
    const double f_b = fidelity(rho_b, phi.orthogonal());

    return ProtocolOutcome{
        .p_teleport = teleport.probability,
        .p_clone = clone.probability,
        .teleported_state_B = bob_teleported,
        .clone_branch_state = std::move(clones),
        .rho_S = std::move(rho_s),
        .rho_A = std::move(rho_a),
        .rho_B = std::move(rho_b),
        .f_clone_S = f_s,
        .f_clone_A = f_a,
        .f_unot_B = f_b,
    };
}

Projection project_antisym_complement(const PureState& state)
{
    if (state.labels() != Labels{kSignal, kAncilla, kBob}) {
        throw quantum::DimensionMismatch("antisymmetric-complement projector needs a state over (S, A, B)");
    }
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Vector4cd singlet(0.0, s, -s, 0.0);
    const Eigen::Matrix4cd sa_projector = Eigen::Matrix4cd::Identity() - singlet * singlet.adjoint();
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(8, 8);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            full.block(2 * i, 2 * j, 2, 2) = sa_projector(i, j) * Eigen::Matrix2cd::Identity();
        }
    }

    Eigen::VectorXcd v = full * state.amplitudes();
    Projection result;
    result.probability = v.squaredNorm();
    if (result.probability >= quantum::kEmptyBranchProbability) {
        v /= std::sqrt(result.probability);
        result.state.emplace(state.labels(), std::move(v));
    }
    return result;
}

Qubit haar_random_qubit(RandomStream& rng)
{
    const double cos_theta = 2.0 * rng.uniform() - 1.0;
    const double azimuth = 2.0 * std::numbers::pi * rng.uniform();
    const double c = std::sqrt(0.5 * (1.0 + cos_theta));
    const double s = std::sqrt(0.5 * (1.0 - cos_theta));
    return Qubit::normalized(c, std::polar(s, azimuth));
}

} // namespace teleclone::circuit
