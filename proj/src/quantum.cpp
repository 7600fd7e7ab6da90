#include "teleclone/quantum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace teleclone::quantum {

namespace {

std::size_t dimension_for(std::size_t num_qubits) { return std::size_t{1} << num_qubits; }

void require_distinct(const Labels& labels)
{
    std::unordered_set<Label> seen;
    for (const auto& l : labels) {
        if (!seen.insert(l).second) {
            throw LabelCollision("repeated qubit label '" + l + "'");
        }
    }
}

// Bit shift of a qubit at `position` in an n-qubit register (first = MSB).
std::size_t shift_of(std::size_t position, std::size_t n) { return n - 1 - position; }

std::vector<std::size_t> positions_of(const Labels& register_labels, const Labels& wanted)
{
    std::vector<std::size_t> out;
    out.reserve(wanted.size());
    for (const auto& w : wanted) {
        auto it = std::find(register_labels.begin(), register_labels.end(), w);
        if (it == register_labels.end()) {
            throw UnknownLabel("unknown qubit label '" + w + "'");
        }
        out.push_back(static_cast<std::size_t>(it - register_labels.begin()));
    }
    return out;
}

// Splits the register into kept (in register order) and traced positions.
struct TraceSplit {
    std::vector<std::size_t> kept_shifts;
    std::vector<std::size_t> traced_shifts;
    Labels kept_labels;
};

TraceSplit split_register(const Labels& labels, const Labels& keep)
{
    if (keep.empty()) {
        throw QuantumError("partial trace needs a nonempty keep set");
    }
    require_distinct(keep);
    const auto keep_positions = positions_of(labels, keep);
    const std::size_t n = labels.size();
    TraceSplit split;
    for (std::size_t p = 0; p < n; ++p) {
        if (std::find(keep_positions.begin(), keep_positions.end(), p) != keep_positions.end()) {
            split.kept_shifts.push_back(shift_of(p, n));
            split.kept_labels.push_back(labels[p]);
        } else {
            split.traced_shifts.push_back(shift_of(p, n));
        }
    }
    return split;
}

// Scatters the bits of `value` (MSB first) onto the given register shifts.
std::size_t scatter(std::size_t value, const std::vector<std::size_t>& shifts)
{
    std::size_t out = 0;
    const std::size_t k = shifts.size();
    for (std::size_t i = 0; i < k; ++i) {
        if ((value >> (k - 1 - i)) & 1u) {
            out |= std::size_t{1} << shifts[i];
        }
    }
    return out;
}

std::size_t gather(std::size_t index, const std::vector<std::size_t>& shifts)
{
    std::size_t out = 0;
    for (auto s : shifts) {
        out = (out << 1) | ((index >> s) & 1u);
    }
    return out;
}

void check_density(const Eigen::MatrixXcd& m)
{
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kAlgebraicTol) {
        throw QuantumError("density matrix is not Hermitian");
    }
    if (std::abs(m.trace() - Complex{1.0, 0.0}) > kAlgebraicTol) {
        throw QuantumError("density matrix trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < kEigenvalueFloor) {
        throw QuantumError("density matrix has a negative eigenvalue");
    }
}

} // namespace

// --- Qubit ---

Qubit::Qubit(Complex alpha, Complex beta) : alpha_(alpha), beta_(beta)
{
    const double norm2 = std::norm(alpha) + std::norm(beta);
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kAlgebraicTol) {
        throw QuantumError("qubit amplitudes are not normalized");
    }
}

Qubit Qubit::normalized(Complex alpha, Complex beta)
{
    const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw QuantumError("qubit amplitudes must not both be zero");
    }
    return Qubit(alpha / norm, beta / norm, Unchecked{});
}

Qubit Qubit::orthogonal() const noexcept { return Qubit(-std::conj(beta_), std::conj(alpha_), Unchecked{}); }

Complex Qubit::inner(const Qubit& other) const noexcept
{
    return std::conj(alpha_) * other.alpha_ + std::conj(beta_) * other.beta_;
}

// --- PureState ---

PureState::PureState(Labels labels, Eigen::VectorXcd amplitudes)
    : labels_(std::move(labels)), amplitudes_(std::move(amplitudes))
{
    if (labels_.empty()) {
        throw QuantumError("state needs at least one qubit");
    }
    require_distinct(labels_);
    if (static_cast<std::size_t>(amplitudes_.size()) != dimension_for(labels_.size())) {
        throw DimensionMismatch("amplitude vector length is not 2^num_qubits");
    }
    if (std::abs(amplitudes_.norm() - 1.0) > kAlgebraicTol) {
        throw QuantumError("state vector is not normalized");
    }
}

PureState PureState::from_qubit(Label label, const Qubit& q)
{
    Eigen::VectorXcd v(2);
    v << q.alpha(), q.beta();
    return PureState({std::move(label)}, std::move(v));
}

PureState PureState::basis(Labels labels, std::span<const int> bits)
{
    if (bits.size() != labels.size()) {
        throw DimensionMismatch("basis state needs one bit per label");
    }
    std::size_t index = 0;
    for (int b : bits) {
        if (b != 0 && b != 1) {
            throw QuantumError("basis bits must be 0 or 1");
        }
        index = (index << 1) | static_cast<std::size_t>(b);
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension_for(labels.size())));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(labels), std::move(v));
}

bool PureState::has(const Label& label) const noexcept
{
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t PureState::position(const Label& label) const { return positions_of(labels_, {label}).front(); }

// --- DensityMatrix ---

DensityMatrix::DensityMatrix(Labels labels, Eigen::MatrixXcd entries)
    : labels_(std::move(labels)), entries_(std::move(entries))
{
    if (labels_.empty()) {
        throw QuantumError("density matrix needs at least one qubit");
    }
    require_distinct(labels_);
    const auto dim = static_cast<Eigen::Index>(dimension_for(labels_.size()));
    if (entries_.rows() != dim || entries_.cols() != dim) {
        throw DimensionMismatch("density matrix dimension is not 2^num_qubits");
    }
    check_density(entries_);
}

DensityMatrix DensityMatrix::from_pure(const PureState& state)
{
    return DensityMatrix(state.labels(), state.amplitudes() * state.amplitudes().adjoint());
}

double DensityMatrix::expectation(const PureState& psi) const
{
    if (psi.labels() != labels_) {
        throw DimensionMismatch("expectation needs a state over the same labels");
    }
    return (psi.amplitudes().adjoint() * entries_ * psi.amplitudes())(0, 0).real();
}

// --- Gate ---

Gate::Gate(std::string name, Eigen::MatrixXcd matrix) : name_(std::move(name)), arity_(0), matrix_(std::move(matrix))
{
    const auto dim = matrix_.rows();
    if (dim != matrix_.cols()) {
        throw DimensionMismatch("gate '" + name_ + "' matrix is not square");
    }
    for (std::size_t k = 1; k <= 3; ++k) {
        if (dim == static_cast<Eigen::Index>(dimension_for(k))) {
            arity_ = k;
        }
    }
    if (arity_ == 0) {
        throw DimensionMismatch("gate '" + name_ + "' must act on 1 to 3 qubits");
    }
    const Eigen::MatrixXcd defect = matrix_ * matrix_.adjoint() - Eigen::MatrixXcd::Identity(dim, dim);
    if (defect.cwiseAbs().maxCoeff() > kAlgebraicTol) {
        throw QuantumError("gate '" + name_ + "' is not unitary");
    }
}

Gate Gate::inverse() const { return Gate(name_ + "^-1", matrix_.adjoint()); }

namespace gates {

const Gate& hadamard()
{
    static const Gate g = [] {
        const double s = 1.0 / std::sqrt(2.0);
        Eigen::MatrixXcd m(2, 2);
        m << s, s, s, -s;
        return Gate("H", m);
    }();
    return g;
}

const Gate& pauli_x()
{
    static const Gate g = [] {
        Eigen::MatrixXcd m(2, 2);
        m << 0, 1, 1, 0;
        return Gate("X", m);
    }();
    return g;
}

const Gate& pauli_z()
{
    static const Gate g = [] {
        Eigen::MatrixXcd m(2, 2);
        m << 1, 0, 0, -1;
        return Gate("Z", m);
    }();
    return g;
}

const Gate& cnot()
{
    static const Gate g = [] {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
        m.block(2, 2, 2, 2) << 0, 1, 1, 0;
        return Gate("CNOT", m);
    }();
    return g;
}

const Gate& toffoli()
{
    static const Gate g = [] {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(8, 8);
        m.block(6, 6, 2, 2) << 0, 1, 1, 0;
        return Gate("Toffoli", m);
    }();
    return g;
}

} // namespace gates

// --- operations ---

PureState tensor(const PureState& a, const PureState& b)
{
    for (const auto& l : b.labels()) {
        if (a.has(l)) {
            throw LabelCollision("label '" + l + "' present in both factors");
        }
    }
    Labels labels = a.labels();
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    const auto na = a.amplitudes().size();
    const auto nb = b.amplitudes().size();
    Eigen::VectorXcd v(na * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        v.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
    }
    return PureState(std::move(labels), std::move(v));
}

PureState apply_gate(const PureState& state, const Gate& gate, const Labels& targets)
{
    if (targets.size() != gate.arity()) {
        throw DimensionMismatch("gate '" + gate.name() + "' expects " + std::to_string(gate.arity()) + " targets");
    }
    require_distinct(targets);
    const std::size_t n = state.num_qubits();
    std::vector<std::size_t> shifts;
    for (auto p : positions_of(state.labels(), targets)) {
        shifts.push_back(shift_of(p, n));
    }
    const std::size_t target_mask = scatter(dimension_for(targets.size()) - 1, shifts);
    const std::size_t sub_dim = dimension_for(targets.size());
    const auto& in = state.amplitudes();
    const auto& u = gate.matrix();

    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
    for (Eigen::Index i = 0; i < in.size(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const std::size_t row = gather(idx, shifts);
        const std::size_t base = idx & ~target_mask;
        Complex acc = 0.0;
        for (std::size_t col = 0; col < sub_dim; ++col) {
            acc += u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) *
                   in(static_cast<Eigen::Index>(base | scatter(col, shifts)));
        }
        out(i) = acc;
    }
    // Rounding drift only; the gate was checked unitary.
    out /= out.norm();
    return PureState(state.labels(), std::move(out));
}

Projection project_qubit(const PureState& state, const Label& label, int outcome)
{
    if (outcome != 0 && outcome != 1) {
        throw QuantumError("measurement outcome must be 0 or 1");
    }
    const std::size_t shift = shift_of(state.position(label), state.num_qubits());
    Eigen::VectorXcd v = state.amplitudes();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (((static_cast<std::size_t>(i) >> shift) & 1u) != static_cast<std::size_t>(outcome)) {
            v(i) = 0.0;
        }
    }
    Projection result;
    result.probability = v.squaredNorm();
    if (result.probability >= kEmptyBranchProbability) {
        v /= std::sqrt(result.probability);
        result.state.emplace(state.labels(), std::move(v));
    }
    return result;
}

PureState discard_qubit(const PureState& state, const Label& label, int value)
{
    if (value != 0 && value != 1) {
        throw QuantumError("qubit value must be 0 or 1");
    }
    if (state.num_qubits() < 2) {
        throw QuantumError("cannot discard the only qubit of a state");
    }
    const std::size_t n = state.num_qubits();
    const std::size_t shift = shift_of(state.position(label), n);
    Labels rest;
    for (const auto& l : state.labels()) {
        if (l != label) {
            rest.push_back(l);
        }
    }
    const auto& in = state.amplitudes();
    Eigen::VectorXcd out(static_cast<Eigen::Index>(dimension_for(n - 1)));
    double leaked = 0.0;
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < in.size(); ++i) {
        const std::size_t bit = (static_cast<std::size_t>(i) >> shift) & 1u;
        if (bit == static_cast<std::size_t>(value)) {
            out(k++) = in(i);
        } else {
            leaked += std::norm(in(i));
        }
    }
    if (leaked > kStateTol) {
        throw QuantumError("qubit '" + label + "' is not in the requested basis state");
    }
    out /= out.norm();
    return PureState(std::move(rest), std::move(out));
}

DensityMatrix partial_trace(const PureState& state, const Labels& keep)
{
    const auto split = split_register(state.labels(), keep);
    const auto kept_dim = dimension_for(split.kept_shifts.size());
    const auto traced_dim = dimension_for(split.traced_shifts.size());
    const auto& psi = state.amplitudes();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kept_dim),
                                                  static_cast<Eigen::Index>(kept_dim));
    for (std::size_t t = 0; t < traced_dim; ++t) {
        const std::size_t tb = scatter(t, split.traced_shifts);
        for (std::size_t i = 0; i < kept_dim; ++i) {
            const Complex ai = psi(static_cast<Eigen::Index>(scatter(i, split.kept_shifts) | tb));
            for (std::size_t j = 0; j < kept_dim; ++j) {
                const Complex aj = psi(static_cast<Eigen::Index>(scatter(j, split.kept_shifts) | tb));
                rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += ai * std::conj(aj);
            }
        }
    }
    return DensityMatrix(split.kept_labels, std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const Labels& keep)
{
    const auto split = split_register(rho.labels(), keep);
    const auto kept_dim = dimension_for(split.kept_shifts.size());
    const auto traced_dim = dimension_for(split.traced_shifts.size());
    const auto& m = rho.entries();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kept_dim),
                                                  static_cast<Eigen::Index>(kept_dim));
    for (std::size_t t = 0; t < traced_dim; ++t) {
        const std::size_t tb = scatter(t, split.traced_shifts);
        for (std::size_t i = 0; i < kept_dim; ++i) {
            const auto row = static_cast<Eigen::Index>(scatter(i, split.kept_shifts) | tb);
            for (std::size_t j = 0; j < kept_dim; ++j) {
                const auto col = static_cast<Eigen::Index>(scatter(j, split.kept_shifts) | tb);
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += m(row, col);
            }
        }
    }
    return DensityMatrix(split.kept_labels, std::move(out));
}

double fidelity(const DensityMatrix& rho, const Qubit& target)
{
    if (rho.num_qubits() != 1) {
        throw DimensionMismatch("fidelity against a qubit needs a 1-qubit density matrix");
    }
    const Eigen::Vector2cd ket = target.ket();
    const double f = (ket.adjoint() * rho.entries() * ket)(0, 0).real();
    return std::clamp(f, 0.0, 1.0);
}

Complex inner_product(const PureState& a, const PureState& b)
{
    if (a.labels() != b.labels()) {
        throw DimensionMismatch("inner product needs states over identical label order");
    }
    return a.amplitudes().dot(b.amplitudes());
}

bool equal_up_to_phase(const PureState& a, const PureState& b, double tol)
{
    return std::abs(std::abs(inner_product(a, b)) - 1.0) < tol;
}

Qubit principal_qubit(const DensityMatrix& rho)
{
    if (rho.num_qubits() != 1) {
        throw DimensionMismatch("principal_qubit needs a 1-qubit density matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.entries());
    const Eigen::VectorXcd v = solver.eigenvectors().col(1); // eigenvalues ascending
    return Qubit::normalized(v(0), v(1));
}

} // namespace teleclone::quantum
