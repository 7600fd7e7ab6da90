#include "teleclone/quantum.hpp"
#include "teleclone/random.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace teleclone::quantum;
using teleclone::RandomStream;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PureState random_state(const Labels& labels, RandomStream& rng)
{
    Eigen::VectorXcd v(Eigen::Index{1} << labels.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = Complex{rng.uniform() - 0.5, rng.uniform() - 0.5};
    }
    return PureState(labels, v / v.norm());
}

Eigen::VectorXcd vec(std::initializer_list<Complex> xs)
{
    Eigen::VectorXcd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (auto x : xs) {
        v(i++) = x;
    }
    return v;
}

} // namespace

TEST_CASE("qubit validation and orthogonal complement")
{
    CHECK_THROWS_AS(Qubit(1.0, 1.0), QuantumError);
    CHECK_THROWS_AS(Qubit::normalized(0.0, 0.0), QuantumError);
    const Qubit q = Qubit::normalized(Complex{0.3, 0.1}, Complex{-0.2, 0.7});
    CHECK(std::abs(q.inner(q.orthogonal())) < kAlgebraicTol);
    CHECK(std::abs(q.inner(q) - 1.0) < kAlgebraicTol);
}

TEST_CASE("tensor product")
{
    const std::array<int, 1> zero{0};
    const std::array<int, 1> one{1};
    const auto a = PureState::basis({"a"}, zero);
    const auto b = PureState::basis({"b"}, zero);
    CHECK(tensor(a, b).amplitudes().isApprox(vec({1, 0, 0, 0})));

    const auto plus = PureState::from_qubit("b", Qubit::normalized(1.0, 1.0));
    const auto t = tensor(PureState::basis({"a"}, one), plus);
    CHECK((t.amplitudes() - vec({0, 0, kInvSqrt2, kInvSqrt2})).norm() < kAlgebraicTol);
    CHECK(t.labels() == Labels{"a", "b"});

    // |0>_S (x) singlet_AB, hand-expanded
    const auto singlet = PureState({"A", "B"}, vec({0, kInvSqrt2, -kInvSqrt2, 0}));
    const auto sab = tensor(PureState::from_qubit("S", Qubit::zero()), singlet);
    CHECK((sab.amplitudes() - vec({0, kInvSqrt2, -kInvSqrt2, 0, 0, 0, 0, 0})).norm() < kAlgebraicTol);

    CHECK_THROWS_AS(tensor(a, a), LabelCollision);
}

TEST_CASE("state construction errors")
{
    CHECK_THROWS_AS(PureState({"a", "a"}, vec({1, 0, 0, 0})), LabelCollision);
    CHECK_THROWS_AS(PureState({"a"}, vec({1, 0, 0, 0})), DimensionMismatch);
    CHECK_THROWS_AS(PureState({"a"}, vec({1, 1})), QuantumError);
}

TEST_CASE("gate definitions")
{
    const std::array<int, 1> zero{0};
    const auto h0 = apply_gate(PureState::basis({"q"}, zero), gates::hadamard(), {"q"});
    CHECK((h0.amplitudes() - vec({kInvSqrt2, kInvSqrt2})).norm() < kAlgebraicTol);

    const std::array<int, 2> b10{1, 0};
    const auto c = apply_gate(PureState::basis({"c", "t"}, b10), gates::cnot(), {"c", "t"});
    CHECK(std::abs(c.amplitude(3) - 1.0) < kAlgebraicTol);

    // target order matters: control = first label given
    const std::array<int, 2> b01{0, 1};
    const auto c2 = apply_gate(PureState::basis({"c", "t"}, b01), gates::cnot(), {"t", "c"});
    CHECK(std::abs(c2.amplitude(3) - 1.0) < kAlgebraicTol);

    const std::array<int, 3> b110{1, 1, 0};
    const auto t = apply_gate(PureState::basis({"x", "y", "z"}, b110), gates::toffoli(), {"x", "y", "z"});
    CHECK(std::abs(t.amplitude(7) - 1.0) < kAlgebraicTol);

    const std::array<int, 3> b100{1, 0, 0};
    const auto t2 = apply_gate(PureState::basis({"x", "y", "z"}, b100), gates::toffoli(), {"x", "y", "z"});
    CHECK(std::abs(t2.amplitude(4) - 1.0) < kAlgebraicTol);
}

TEST_CASE("gate errors")
{
    Eigen::MatrixXcd m(2, 2);
    m << 1, 1, 0, 1;
    CHECK_THROWS_AS(Gate("bad", m), QuantumError);
    CHECK_THROWS_AS(Gate("big", Eigen::MatrixXcd::Identity(16, 16)), DimensionMismatch);

    const std::array<int, 2> b{0, 0};
    const auto s = PureState::basis({"a", "b"}, b);
    CHECK_THROWS_AS(apply_gate(s, gates::cnot(), {"a", "a"}), LabelCollision);
    CHECK_THROWS_AS(apply_gate(s, gates::cnot(), {"a", "zz"}), UnknownLabel);
    CHECK_THROWS_AS(apply_gate(s, gates::hadamard(), {"a", "b"}), DimensionMismatch);
}

TEST_CASE("norm preservation over random gate sequences")
{
    RandomStream rng(7);
    const Labels reg{"q0", "q1", "q2", "q3"};
    const std::array<const Gate*, 5> pool{&gates::hadamard(), &gates::pauli_x(), &gates::pauli_z(), &gates::cnot(),
                                          &gates::toffoli()};
    for (int trial = 0; trial < 20; ++trial) {
        PureState s = random_state(reg, rng);
        for (int step = 0; step < 50; ++step) {
            const Gate& g = *pool[static_cast<std::size_t>(rng.uniform() * pool.size())];
            Labels targets = reg;
            // Fisher-Yates on the first `arity` slots
            for (std::size_t i = 0; i < g.arity(); ++i) {
                const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(reg.size() - i));
                std::swap(targets[i], targets[j]);
            }
            targets.resize(g.arity());
            s = apply_gate(s, g, targets);
            REQUIRE(std::abs(s.amplitudes().norm() - 1.0) < kAlgebraicTol);
        }
    }
}

TEST_CASE("projective measurement")
{
    const auto plus = PureState::from_qubit("q", Qubit::normalized(1.0, 1.0));
    const auto p0 = project_qubit(plus, "q", 0);
    CHECK(p0.probability == doctest::Approx(0.5).epsilon(1e-14));
    REQUIRE(p0.state);
    CHECK(std::abs(p0.state->amplitude(0) - 1.0) < kAlgebraicTol);

    const auto zero = PureState::from_qubit("q", Qubit::zero());
    const auto p1 = project_qubit(zero, "q", 1);
    CHECK(p1.probability == 0.0);
    CHECK_FALSE(p1.state);

    RandomStream rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto s = random_state({"a", "b", "c"}, rng);
        for (const char* l : {"a", "b", "c"}) {
            const double total = project_qubit(s, l, 0).probability + project_qubit(s, l, 1).probability;
            REQUIRE(std::abs(total - 1.0) < kAlgebraicTol);
        }
    }
    CHECK_THROWS_AS(project_qubit(plus, "q", 2), QuantumError);
    CHECK_THROWS_AS(project_qubit(plus, "r", 0), UnknownLabel);
}

TEST_CASE("discard a collapsed qubit")
{
    const auto s = tensor(PureState::from_qubit("a", Qubit::normalized(1.0, Complex{0.0, 1.0})),
                          PureState::from_qubit("f", Qubit::one()));
    const auto rest = discard_qubit(s, "f", 1);
    CHECK(rest.labels() == Labels{"a"});
    CHECK(std::abs(rest.amplitude(1) - Complex{0.0, kInvSqrt2}) < kAlgebraicTol);
    CHECK_THROWS_AS(discard_qubit(s, "f", 0), QuantumError);
}

TEST_CASE("partial trace")
{
    const auto singlet = PureState({"A", "B"}, vec({0, kInvSqrt2, -kInvSqrt2, 0}));
    const auto rho = partial_trace(singlet, {"B"});
    CHECK((rho.entries() - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < kAlgebraicTol);
    CHECK_THROWS_AS(partial_trace(singlet, {}), QuantumError);
    CHECK_THROWS_AS(partial_trace(singlet, {"C"}), UnknownLabel);

    RandomStream rng(5);
    const Labels reg{"a", "b", "c", "d"};
    for (int i = 0; i < 30; ++i) {
        const auto s = random_state(reg, rng);
        const auto one_step = partial_trace(s, {"b", "d"});
        const auto two_step = partial_trace(partial_trace(s, {"a", "b", "d"}), {"d", "b"});
        REQUIRE(one_step.labels() == Labels{"b", "d"});
        REQUIRE(two_step.labels() == Labels{"b", "d"});
        REQUIRE((one_step.entries() - two_step.entries()).cwiseAbs().maxCoeff() < kAlgebraicTol);
        REQUIRE(std::abs(one_step.trace() - 1.0) < kAlgebraicTol);
        // pure-state and density-matrix routes agree
        const auto via_dm = partial_trace(DensityMatrix::from_pure(s), {"b", "d"});
        REQUIRE((via_dm.entries() - one_step.entries()).cwiseAbs().maxCoeff() < kAlgebraicTol);
    }
}

TEST_CASE("density matrix validation")
{
    Eigen::MatrixXcd m(2, 2);
    m << 0.5, 0.6, 0.6, 0.5; // eigenvalue -0.1
    CHECK_THROWS_AS(DensityMatrix({"q"}, m), QuantumError);
    m << 0.6, 0.0, 0.0, 0.6;
    CHECK_THROWS_AS(DensityMatrix({"q"}, m), QuantumError);
    m << 0.5, Complex(0.0, 0.1), Complex(0.0, 0.1), 0.5;
    CHECK_THROWS_AS(DensityMatrix({"q"}, m), QuantumError);
}

TEST_CASE("fidelity")
{
    const auto zero = DensityMatrix::from_pure(PureState::from_qubit("q", Qubit::zero()));
    CHECK(fidelity(zero, Qubit::zero()) == doctest::Approx(1.0).epsilon(1e-15));
    const DensityMatrix mixed({"q"}, 0.5 * Eigen::MatrixXcd::Identity(2, 2));
    RandomStream rng(3);
    for (int i = 0; i < 10; ++i) {
        const auto q = Qubit::normalized(Complex{rng.uniform() - 0.5, rng.uniform() - 0.5}, rng.uniform() - 0.5);
        CHECK(std::abs(fidelity(mixed, q) - 0.5) < kAlgebraicTol);
    }
    const DensityMatrix two({"a", "b"}, 0.25 * Eigen::MatrixXcd::Identity(4, 4));
    CHECK_THROWS_AS(fidelity(two, Qubit::zero()), DimensionMismatch);
}

TEST_CASE("principal qubit recovers a pure state up to phase")
{
    const auto q = Qubit::normalized(Complex{0.2, -0.4}, Complex{0.7, 0.1});
    const auto rho = DensityMatrix::from_pure(PureState::from_qubit("q", q));
    CHECK(std::abs(std::abs(principal_qubit(rho).inner(q)) - 1.0) < kStateTol);
}
