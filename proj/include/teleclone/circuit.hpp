#pragma once

// Gate-level Tele-UNOT network: singlet preparation, Bell-basis boxes,
// Toffoli flagging of the singlet component, and readout of the flag qubit.

#include "teleclone/quantum.hpp"
#include "teleclone/random.hpp"

#include <utility>

namespace teleclone::circuit {

using quantum::DensityMatrix;
using quantum::Label;
using quantum::Projection;
using quantum::PureState;
using quantum::Qubit;

// Register labels used by run_teleunot.
inline const Label kSignal = "S";
inline const Label kAncilla = "A";
inline const Label kBob = "B";
inline const Label kFlag = "F";

enum class BellLabel { PsiMinus, PsiPlus, PhiMinus, PhiPlus };

const char* to_string(BellLabel b) noexcept;

// Psi(+/-) = (|01> +/- |10>)/sqrt2, Phi(+/-) = (|00> +/- |11>)/sqrt2 on (first, second).
PureState bell_state(BellLabel b, const Label& first, const Label& second);

// Computational bits (s, a) that the Bell-to-computational box maps `b` to.
std::pair<int, int> computational_image(BellLabel b) noexcept;

PureState prepare_singlet(const Label& first, const Label& second);

// Two-qubit unitary of box (1), assembled from its gate sequence.
const quantum::Gate& bell_to_computational_gate();

PureState bell_to_computational(const PureState& state, const Label& s, const Label& a);
PureState computational_to_bell(const PureState& state, const Label& s, const Label& a);

struct ProtocolOutcome {
    double p_teleport = 0.0; // flag outcome 1
    double p_clone = 0.0;    // flag outcome 0
    Qubit teleported_state_B = Qubit::zero();
    PureState clone_branch_state; // over S, A, B with the flag removed
    DensityMatrix rho_S;
    DensityMatrix rho_A;
    DensityMatrix rho_B;
    double f_clone_S = 0.0;
    double f_clone_A = 0.0;
    double f_unot_B = 0.0;
};

ProtocolOutcome run_teleunot(const Qubit& phi);

// Applies (I_SA - |Psi-><Psi-|_SA) (x) I_B as an explicit 8x8 matrix to a
// state over exactly (S, A, B). Independent of the gate-level path.
Projection project_antisym_complement(const PureState& state);

// Bloch-uniform: cos(theta) ~ U[-1,1], azimuth ~ U[0, 2pi).
Qubit haar_random_qubit(RandomStream& rng);

} // namespace teleclone::circuit
