#include "teleclone/circuit.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace teleclone::circuit;
using teleclone::RandomStream;
using teleclone::quantum::Complex;
using teleclone::quantum::kAlgebraicTol;
using teleclone::quantum::kStateTol;
using teleclone::quantum::Labels;
namespace q = teleclone::quantum;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PureState qubit_state(const Label& l, Eigen::Vector2cd v) { return PureState({l}, Eigen::VectorXcd(v)); }

Eigen::Matrix2cd sigma_x()
{
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd sigma_z()
{
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

Eigen::Matrix2cd projector(const Qubit& x) { return x.ket() * x.ket().adjoint(); }

// Sum of c_k |bell_k>_SA |b_k>_B with unnormalized coefficients; returns the raw vector.
Eigen::VectorXcd bell_sum(std::initializer_list<std::tuple<Complex, BellLabel, Eigen::Vector2cd>> terms)
{
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
    for (const auto& [c, b, bob] : terms) {
        const auto t = q::tensor(bell_state(b, kSignal, kAncilla), qubit_state(kBob, bob));
        v += c * t.amplitudes();
    }
    return v;
}

std::vector<Qubit> haar_inputs(std::uint64_t seed, int n)
{
    std::vector<Qubit> out;
    for (int i = 0; i < n; ++i) {
        RandomStream rng(seed, static_cast<std::uint64_t>(i));
        out.push_back(haar_random_qubit(rng));
    }
    return out;
}

} // namespace

TEST_CASE("singlet preparation")
{
    const auto s = prepare_singlet("A", "B");
    Eigen::VectorXcd want(4);
    want << 0, kInvSqrt2, -kInvSqrt2, 0;
    CHECK(std::abs(std::abs(s.amplitudes().dot(want)) - 1.0) < kStateTol);
    CHECK(std::abs(q::inner_product(bell_state(BellLabel::PsiPlus, "A", "B"), s)) < kAlgebraicTol);
    const auto rho = q::partial_trace(s, {"B"});
    CHECK((rho.entries() - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < kAlgebraicTol);
}

TEST_CASE("bell-to-computational box maps each Bell state to its basis state")
{
    const auto& g = bell_to_computational_gate();
    const Eigen::MatrixXcd defect = g.matrix() * g.matrix().adjoint() - Eigen::MatrixXcd::Identity(4, 4);
    CHECK(defect.cwiseAbs().maxCoeff() < kAlgebraicTol);

    for (auto b : {BellLabel::PsiMinus, BellLabel::PsiPlus, BellLabel::PhiMinus, BellLabel::PhiPlus}) {
        CAPTURE(to_string(b));
        const auto [s_bit, a_bit] = computational_image(b);
        const std::array<int, 2> bits{s_bit, a_bit};
        const auto image = bell_to_computational(bell_state(b, "S", "A"), "S", "A");
        CHECK(q::equal_up_to_phase(image, PureState::basis({"S", "A"}, bits)));
        const auto back = computational_to_bell(PureState::basis({"S", "A"}, bits), "S", "A");
        CHECK(q::equal_up_to_phase(back, bell_state(b, "S", "A")));
    }
    CHECK(computational_image(BellLabel::PsiMinus) == std::pair{1, 1});
    CHECK(computational_image(BellLabel::PsiPlus) == std::pair{0, 1});
    CHECK(computational_image(BellLabel::PhiMinus) == std::pair{1, 0});
    CHECK(computational_image(BellLabel::PhiPlus) == std::pair{0, 0});
}

TEST_CASE("box (1) then box (2) is the identity on random states")
{
    const Labels reg{"S", "A", "B"};
    for (std::uint64_t i = 0; i < 200; ++i) {
        RandomStream rng(99, i);
        Eigen::VectorXcd v(8);
        for (Eigen::Index k = 0; k < 8; ++k) {
            v(k) = Complex{rng.uniform() - 0.5, rng.uniform() - 0.5};
        }
        const PureState s(reg, v / v.norm());
        const auto round = computational_to_bell(bell_to_computational(s, "S", "A"), "S", "A");
        REQUIRE((round.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() < kAlgebraicTol);
    }
}

TEST_CASE("network stages reproduce the hand-expanded branch states")
{
    const Qubit phi = Qubit::normalized(Complex{0.3, -0.2}, Complex{0.5, 0.6});
    const Eigen::Vector2cd p = phi.ket();
    const Eigen::Vector2cd zp = sigma_z() * p;
    const Eigen::Vector2cd xp = sigma_x() * p;
    const Eigen::Vector2cd zxp = sigma_z() * sigma_x() * p;

    // Input expansion. Our singlet sign gives -1/2 on the Phi+ (Z X phi) term.
    const auto input = q::tensor(PureState::from_qubit(kSignal, phi), prepare_singlet(kAncilla, kBob));
    const Eigen::VectorXcd eq4 = bell_sum({{-0.5, BellLabel::PsiMinus, p},
                                           {-0.5, BellLabel::PsiPlus, zp},
                                           {0.5, BellLabel::PhiMinus, xp},
                                           {-0.5, BellLabel::PhiPlus, zxp}});
    CHECK((input.amplitudes() - eq4).cwiseAbs().maxCoeff() < kAlgebraicTol);

    // After box (1) and the Toffoli: flag set only on the |11> component.
    const std::array<int, 1> zero{0};
    auto state = q::tensor(input, PureState::basis({kFlag}, zero));
    state = bell_to_computational(state, kSignal, kAncilla);
    state = q::apply_gate(state, q::gates::toffoli(), {kSignal, kAncilla, kFlag});
    auto ket = [](int s, int a, const Eigen::Vector2cd& bob, int f) {
        const std::array<int, 2> sa{s, a};
        const std::array<int, 1> fb{f};
        return q::tensor(q::tensor(PureState::basis({kSignal, kAncilla}, sa), qubit_state(kBob, bob)),
                         PureState::basis({kFlag}, fb))
            .amplitudes();
    };
    const Eigen::VectorXcd eq5 =
        -0.5 * ket(1, 1, p, 1) - 0.5 * ket(0, 1, zp, 0) + 0.5 * ket(1, 0, xp, 0) - 0.5 * ket(0, 0, zxp, 0);
    CHECK((state.amplitudes() - eq5).cwiseAbs().maxCoeff() < kAlgebraicTol);

    // After box (2) the flag qubit heralds the singlet branch.
    state = computational_to_bell(state, kSignal, kAncilla);
    const auto clone = project_qubit(state, kFlag, 0);
    const auto teleport = project_qubit(state, kFlag, 1);
    REQUIRE(clone.state);
    REQUIRE(teleport.state);
    CHECK(std::abs(teleport.probability - 0.25) < kAlgebraicTol);
    CHECK(std::abs(clone.probability - 0.75) < kAlgebraicTol);

    Eigen::VectorXcd eq7 = bell_sum({{-0.5, BellLabel::PsiPlus, zp},
                                     {0.5, BellLabel::PhiMinus, xp},
                                     {-0.5, BellLabel::PhiPlus, zxp}});
    eq7 /= eq7.norm();
    const auto branch = q::discard_qubit(*clone.state, kFlag, 0);
    CHECK(q::equal_up_to_phase(branch, PureState({kSignal, kAncilla, kBob}, eq7)));
}

TEST_CASE("run_teleunot on named inputs")
{
    const auto h = run_teleunot(Qubit::zero());
    CHECK(std::abs(h.p_teleport - 0.25) < kAlgebraicTol);
    CHECK(std::abs(h.p_clone - 0.75) < kAlgebraicTol);
    CHECK(std::abs(h.f_clone_S - 5.0 / 6.0) < kAlgebraicTol);
    CHECK(std::abs(h.f_clone_A - 5.0 / 6.0) < kAlgebraicTol);
    CHECK(std::abs(h.f_unot_B - 2.0 / 3.0) < kAlgebraicTol);

    const auto d = run_teleunot(Qubit::normalized(1.0, 1.0));
    CHECK(std::abs(d.f_clone_S - h.f_clone_S) < kAlgebraicTol);
    CHECK(std::abs(d.f_unot_B - h.f_unot_B) < kAlgebraicTol);

    const Qubit r = Qubit::normalized(1.0, Complex{0.0, 1.0});
    const auto out = run_teleunot(r);
    CHECK(std::abs(std::abs(out.teleported_state_B.inner(r)) - 1.0) < kStateTol);
}

TEST_CASE("reduced states match the optimal cloner and U-NOT")
{
    for (const auto& phi : haar_inputs(2024, 20)) {
        const auto out = run_teleunot(phi);
        const Eigen::Matrix2cd p = projector(phi);
        const Eigen::Matrix2cd pp = projector(phi.orthogonal());
        const Eigen::Matrix2cd rho_clone = 5.0 / 6.0 * p + 1.0 / 6.0 * pp;
        const Eigen::Matrix2cd rho_flip = 2.0 / 3.0 * pp + 1.0 / 3.0 * p;
        REQUIRE((out.rho_S.entries() - rho_clone).cwiseAbs().maxCoeff() < kAlgebraicTol);
        REQUIRE((out.rho_A.entries() - rho_clone).cwiseAbs().maxCoeff() < kAlgebraicTol);
        REQUIRE((out.rho_B.entries() - rho_flip).cwiseAbs().maxCoeff() < kAlgebraicTol);
    }
}

TEST_CASE("protocol invariants over Haar-random inputs")
{
    const auto singlet = bell_state(BellLabel::PsiMinus, kSignal, kAncilla);
    for (const auto& phi : haar_inputs(1, 100)) {
        const auto out = run_teleunot(phi);
        REQUIRE(std::abs(out.p_teleport + out.p_clone - 1.0) < kAlgebraicTol);
        REQUIRE(std::abs(out.p_teleport - 0.25) < kAlgebraicTol);
        REQUIRE(std::abs(out.f_clone_S - out.f_clone_A) < kAlgebraicTol);
        REQUIRE(std::abs(out.f_clone_S - 5.0 / 6.0) < kAlgebraicTol);
        REQUIRE(std::abs(out.f_unot_B - 2.0 / 3.0) < kAlgebraicTol);

        const auto oracle = project_antisym_complement(
            q::tensor(PureState::from_qubit(kSignal, phi), prepare_singlet(kAncilla, kBob)));
        REQUIRE(oracle.state);
        REQUIRE(std::abs(oracle.probability - 0.75) < kAlgebraicTol);
        REQUIRE(std::abs(q::inner_product(*oracle.state, out.clone_branch_state)) > 1.0 - kStateTol);

        const auto rho_sa = q::partial_trace(out.clone_branch_state, {kSignal, kAncilla});
        REQUIRE(rho_sa.expectation(singlet) < kAlgebraicTol);

        REQUIRE(std::abs(std::abs(out.teleported_state_B.inner(phi)) - 1.0) < kStateTol);
    }
}

TEST_CASE("antisymmetric-complement projector")
{
    const std::array<int, 1> zero{0};
    const auto b0 = PureState::basis({kBob}, zero);

    const auto killed = project_antisym_complement(q::tensor(bell_state(BellLabel::PsiMinus, kSignal, kAncilla), b0));
    CHECK(killed.probability < kAlgebraicTol);
    CHECK_FALSE(killed.state);

    const auto fixed_in = q::tensor(bell_state(BellLabel::PhiPlus, kSignal, kAncilla), b0);
    const auto fixed = project_antisym_complement(fixed_in);
    CHECK(std::abs(fixed.probability - 1.0) < kAlgebraicTol);
    REQUIRE(fixed.state);
    CHECK((fixed.state->amplitudes() - fixed_in.amplitudes()).cwiseAbs().maxCoeff() < kAlgebraicTol);

    CHECK_THROWS_AS(project_antisym_complement(prepare_singlet(kSignal, kAncilla)), q::DimensionMismatch);
}

TEST_CASE("haar_random_qubit")
{
    RandomStream a(42);
    RandomStream b(42);
    CHECK(haar_random_qubit(a) == haar_random_qubit(b));

    RandomStream rng(42);
    Eigen::Matrix2cd mean = Eigen::Matrix2cd::Zero();
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto x = haar_random_qubit(rng);
        REQUIRE(std::abs(std::norm(x.alpha()) + std::norm(x.beta()) - 1.0) < kAlgebraicTol);
        mean += projector(x);
    }
    mean /= n;
    CHECK((mean - 0.5 * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 0.01);
}
