#pragma once

// Dense state-vector quantum mechanics over small labelled qubit registers.
//
// Amplitudes are indexed with the first-listed qubit as the most significant
// bit. Every public operation addresses qubits by label, never by position.

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace teleclone::quantum {

using Complex = std::complex<double>;
using Label = std::string;
using Labels = std::vector<Label>;

inline constexpr double kAlgebraicTol = 1e-12;
inline constexpr double kStateTol = 1e-9;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kEmptyBranchProbability = 1e-14;

class QuantumError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class LabelCollision : public QuantumError {
public:
    using QuantumError::QuantumError;
};

class UnknownLabel : public QuantumError {
public:
    using QuantumError::QuantumError;
};

class DimensionMismatch : public QuantumError {
public:
    using QuantumError::QuantumError;
};

// Normalized single-qubit state alpha|0> + beta|1> (|0> = H, |1> = V).
class Qubit {
public:
    Qubit(Complex alpha, Complex beta);

    // Rescales (alpha, beta) to unit norm; rejects the zero vector.
    static Qubit normalized(Complex alpha, Complex beta);
    static Qubit zero() { return {1.0, 0.0}; }
    static Qubit one() { return {0.0, 1.0}; }

    Complex alpha() const noexcept { return alpha_; }
    Complex beta() const noexcept { return beta_; }

    // -conj(beta)|0> + conj(alpha)|1>
    Qubit orthogonal() const noexcept;
    Complex inner(const Qubit& other) const noexcept; // <this|other>
    Eigen::Vector2cd ket() const { return {alpha_, beta_}; }

    bool operator==(const Qubit&) const = default;

private:
    struct Unchecked {};
    Qubit(Complex alpha, Complex beta, Unchecked) noexcept : alpha_(alpha), beta_(beta) {}

    Complex alpha_;
    Complex beta_;
};

class PureState {
public:
    PureState(Labels labels, Eigen::VectorXcd amplitudes);

    static PureState from_qubit(Label label, const Qubit& q);
    // Computational basis state; bits[i] is the value of labels[i].
    static PureState basis(Labels labels, std::span<const int> bits);

    std::size_t num_qubits() const noexcept { return labels_.size(); }
    const Labels& labels() const noexcept { return labels_; }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
    Complex amplitude(std::size_t index) const { return amplitudes_(static_cast<Eigen::Index>(index)); }

    bool has(const Label& label) const noexcept;
    std::size_t position(const Label& label) const; // throws UnknownLabel

private:
    Labels labels_;
    Eigen::VectorXcd amplitudes_;
};

class DensityMatrix {
public:
    DensityMatrix(Labels labels, Eigen::MatrixXcd entries);

    static DensityMatrix from_pure(const PureState& state);

    std::size_t num_qubits() const noexcept { return labels_.size(); }
    const Labels& labels() const noexcept { return labels_; }
    const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
    Complex trace() const { return entries_.trace(); }
    // <psi|rho|psi> for a state over the same labels in the same order.
    double expectation(const PureState& psi) const;

private:
    Labels labels_;
    Eigen::MatrixXcd entries_;
};

class Gate {
public:
    // Rejects non-unitary or mis-sized matrices; arity 1..3.
    Gate(std::string name, Eigen::MatrixXcd matrix);

    const std::string& name() const noexcept { return name_; }
    std::size_t arity() const noexcept { return arity_; }
    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    Gate inverse() const;

private:
    std::string name_;
    std::size_t arity_;
    Eigen::MatrixXcd matrix_;
};

namespace gates {
const Gate& hadamard();
const Gate& pauli_x();
const Gate& pauli_z();
const Gate& cnot();    // control = first target
const Gate& toffoli(); // controls = first two targets
} // namespace gates

struct Projection {
    double probability = 0.0;
    std::optional<PureState> state; // empty when probability < kEmptyBranchProbability
};

PureState tensor(const PureState& a, const PureState& b);
PureState apply_gate(const PureState& state, const Gate& gate, const Labels& targets);
Projection project_qubit(const PureState& state, const Label& label, int outcome);

// Removes a qubit that is (up to kStateTol) in the computational state `value`.
PureState discard_qubit(const PureState& state, const Label& label, int value);

// Result labels follow the input's order regardless of the order in `keep`.
DensityMatrix partial_trace(const PureState& state, const Labels& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const Labels& keep);

double fidelity(const DensityMatrix& rho, const Qubit& target);

// <a|b>; labels must match in the same order.
Complex inner_product(const PureState& a, const PureState& b);
bool equal_up_to_phase(const PureState& a, const PureState& b, double tol = kStateTol);

// Dominant eigenvector of a 1-qubit density matrix, as a Qubit.
Qubit principal_qubit(const DensityMatrix& rho);

} // namespace teleclone::quantum
