// Commutant-frame checks: adapted orthonormal bases, commutant dimensions,
// the projection Q = G - proj_{C_B} G, and the Omega/K/S splitting with its
// frozen small-case oracles.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logvisc/commutant.hpp"
#include "logvisc/rng.hpp"
#include "logvisc/verify.hpp"

using namespace logvisc;

namespace {

template <int D>
SymTensor<D> random_spd_separated(Lcg64& rng) {
    // Well-separated positive spectrum in a random frame.
    const Mat<D>          r = eig_sym([&] {
                                  SymTensor<D> s{};
                                  for (int i = 0; i < D; ++i)
                                      for (int j = i; j < D; ++j)
                                          s.at(i, j) = rng.uniform(-1.0, 1.0);
                                  return s;
                              }())
                         .vectors;
    std::array<double, D> lam{};
    const double          base[3] = {1.0, 2.7, 6.5};
    for (int i = 0; i < D; ++i) lam[i] = base[i] * std::exp(rng.uniform(-0.2, 0.2));
    SymTensor<D> out{};
    for (int i = 0; i < D; ++i)
        for (int j = i; j < D; ++j) {
            double s = 0.0;
            for (int k = 0; k < D; ++k) s += lam[k] * r(i, k) * r(j, k);
            out.at(i, j) = s;
        }
    return out;
}

template <int D>
Mat<D> random_mat(Lcg64& rng) {
    Mat<D> m;
    for (int i = 0; i < D * D; ++i) m.a[i] = rng.uniform(-1.0, 1.0);
    return m;
}

} // namespace

TEST_CASE("build_frame: basis is orthonormal and spans all of R^{dxd}") {
    Lcg64 rng(101);
    for (int rep = 0; rep < 25; ++rep) {
        const auto b = random_spd_separated<3>(rng);
        const auto f = build_frame(b);
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                CHECK(inner(f.basis[i], f.basis[j]) ==
                      Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
    }
}

TEST_CASE("commutant dimension by spectrum multiplicity") {
    // Identity: the full symmetric space, d(d+1)/2.
    CHECK(build_frame(SymTensor<2>::identity()).commutant_dim() == 3);
    CHECK(build_frame(SymTensor<3>::identity()).commutant_dim() == 6);

    // Distinct spectrum: only the diagonal dyads commute.
    SymTensor<2> d2;
    d2.at(0, 0) = 4.0;
    d2.at(1, 1) = 1.0;
    CHECK(build_frame(d2).commutant_dim() == 2);

    SymTensor<3> d3;
    d3.at(0, 0) = 4.0;
    d3.at(1, 1) = 2.0;
    d3.at(2, 2) = 1.0;
    CHECK(build_frame(d3).commutant_dim() == 3);

    // One double eigenvalue in 3D: 2*3/2 + 1 = 4.
    SymTensor<3> dd;
    dd.at(0, 0) = 2.0;
    dd.at(1, 1) = 2.0;
    dd.at(2, 2) = 0.5;
    CHECK(build_frame(dd).commutant_dim() == 4);
    CHECK(commutant_dim(eig_sym(dd)) == 4);
}

TEST_CASE("project_Q: frozen oracles in the eigenframe") {
    // Distinct diagonal B: the eigenframe is the coordinate frame, each
    // cluster is a singleton, so only the diagonal of G is removed.
    SymTensor<2> b;
    b.at(0, 0) = 4.0;
    b.at(1, 1) = 1.0;
    Mat<2> g;
    g(0, 0) = 1.0;
    g(0, 1) = 2.0;
    g(1, 0) = 3.0;
    g(1, 1) = 4.0;
    const auto q = project_Q(b, g);
    CHECK(q(0, 0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(q(0, 1) == Catch::Approx(2.0).epsilon(1e-15));
    CHECK(q(1, 0) == Catch::Approx(3.0).epsilon(1e-15));
    CHECK(q(1, 1) == Catch::Approx(0.0).margin(1e-15));

    // B = I: the commutant is every symmetric matrix, so Q = antisym(G).
    const auto qa = project_Q(SymTensor<2>::identity(), g);
    CHECK(qa(0, 0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(qa(0, 1) == Catch::Approx(-0.5).epsilon(1e-15));
    CHECK(qa(1, 0) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(qa(1, 1) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("project_Q: orthogonality, contraction, and trace freedom") {
    Lcg64 rng(2222);
    for (int rep = 0; rep < 200; ++rep) {
        const auto b = random_spd_separated<3>(rng);
        const auto g = random_mat<3>(rng);
        const auto q = project_Q(b, g);

        // Q is orthogonal to the commutant: <Q, P> = 0 for the basis
        // elements P spanning C_B, and tr Q = 0 (I is in the commutant).
        const auto f = build_frame(b);
        for (int idx : f.commutant) CHECK(std::abs(inner(q, f.basis[idx])) < 1e-12);
        CHECK(std::abs(q.trace()) < 1e-12);

        // An orthogonal projection never increases the Frobenius norm.
        CHECK(frobenius(q) <= frobenius(g) + 1e-14);

        // Polynomials in B project to zero.
        const auto poly = to_mat(b) * to_mat(b) + 0.7 * to_mat(b) + 0.3 * Mat<3>::identity();
        CHECK(frobenius(project_Q(b, poly)) < 1e-11 * std::max(1.0, frobenius(poly)));
    }
}

TEST_CASE("decompose_grad: frozen 2x2 shear oracle") {
    // B = diag(4, 1), G = [[0,1],[0,0]].  With r = 4: K_10 = 1/(1-4) = -1/3,
    // K_01 = -4 K_10 = 4/3, Omega_01 = 1 - 4/3 = -1/3, S = 0.
    SymTensor<2> b;
    b.at(0, 0) = 4.0;
    b.at(1, 1) = 1.0;
    Mat<2> g;
    g(0, 1) = 1.0;
    const auto sp = decompose_grad(b, g);
    CHECK(sp.k(0, 1) == Catch::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(sp.k(1, 0) == Catch::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(sp.omega(0, 1) == Catch::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(sp.omega(1, 0) == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(frobenius(sp.s) < 1e-15);

    // Omega + K equals the commutant-complement projection.
    const auto q = project_Q(b, g);
    CHECK(frobenius(sp.omega + sp.k - q) < 1e-14);
}

TEST_CASE("decompose_grad: reconstruction and annihilator identities") {
    Lcg64 rng(31337);
    for (int rep = 0; rep < 200; ++rep) {
        const auto run = [&](auto dim_tag) {
            constexpr int D  = decltype(dim_tag)::value;
            const auto    b  = random_spd_separated<D>(rng);
            const auto    g  = random_mat<D>(rng);
            const auto    sp = decompose_grad(b, g);
            const double  gs = std::max(1.0, frobenius(g));

            // Omega + K + S = G.
            CHECK(frobenius(sp.omega + sp.k + to_mat(sp.s) - g) < 1e-12 * gs);
            // Omega antisymmetric.
            CHECK(frobenius(sp.omega + sp.omega.transposed()) < 1e-12 * gs);
            // K annihilates B: K B + B K^T = 0.
            const auto kb = sp.k * to_mat(b) + to_mat(b) * sp.k.transposed();
            CHECK(frobenius(kb) < 1e-10 * std::max(1.0, frobenius(to_mat(b)) * gs));
            // S commutes with B.
            const auto c = to_mat(sp.s) * to_mat(b) - to_mat(b) * to_mat(sp.s);
            CHECK(frobenius(c) < 1e-10 * std::max(1.0, frobenius(to_mat(b)) * gs));
            // Omega + K is the projection away from the commutant.
            CHECK(frobenius(sp.omega + sp.k - project_Q(b, g)) < 1e-10 * gs);
        };
        run(std::integral_constant<int, 2>{});
        run(std::integral_constant<int, 3>{});
    }
}

TEST_CASE("decompose_grad: degenerate spectra raise, project_Q stays defined") {
    Mat<2> g;
    g(0, 1) = 1.0;
    CHECK_THROWS_AS(decompose_grad(SymTensor<2>::identity(), g), DegenerateSplit);

    SymTensor<3> dd;
    dd.at(0, 0) = 2.0;
    dd.at(1, 1) = 2.0;
    dd.at(2, 2) = 0.5;
    Mat<3> g3;
    g3(0, 1) = 1.0;
    g3(2, 0) = -0.5;
    CHECK_THROWS_AS(decompose_grad(dd, g3), DegenerateSplit);

    // The projection is insensitive to the degeneracy.
    const auto q = project_Q(dd, g3);
    CHECK(std::abs(q.trace()) < 1e-13);
    CHECK(frobenius(q) <= frobenius(g3) + 1e-14);
}

TEST_CASE("verification suite: commutant") {
    const auto suite = verify::run_suite("commutant");
    for (const auto& c : suite.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
}
