// Tensor-core checks: frozen eigensystem/log oracles, exp/log round trips,
// determinant identities, and the matrix-calculus identities that the chart
// formulation leans on.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logvisc/rng.hpp"
#include "logvisc/tensor.hpp"

using namespace logvisc;

namespace {

// Random SPD tensor with unit determinant and well-separated eigenvalues:
// B = R diag(e^a, e^-a) R^T (2D) or exponents summing to zero (3D).
template <int D>
SymTensor<D> random_spd_unit_det(Lcg64& rng, double min_gap = 0.1) {
    std::array<double, D> expo{};
    if constexpr (D == 2) {
        const double a = rng.uniform(min_gap, 1.5);
        expo = {a, -a};
    } else {
        for (;;) {
            double e0 = rng.uniform(-1.5, 1.5), e1 = rng.uniform(-1.5, 1.5);
            double e2 = -(e0 + e1);
            std::array<double, 3> v{e0, e1, e2};
            std::sort(v.begin(), v.end(), std::greater<>());
            if (v[0] - v[1] > min_gap && v[1] - v[2] > min_gap && std::abs(v[0]) < 2.0 &&
                std::abs(v[2]) < 2.0) {
                expo = v;
                break;
            }
        }
    }
    // Random rotation from composed Givens rotations.
    Mat<D> r = Mat<D>::identity();
    for (int p = 0; p < D - 1; ++p)
        for (int q = p + 1; q < D; ++q) {
            const double th = rng.uniform(0.0, 6.283185307179586);
            Mat<D>       g  = Mat<D>::identity();
            g(p, p) = std::cos(th);
            g(q, q) = std::cos(th);
            g(p, q) = -std::sin(th);
            g(q, p) = std::sin(th);
            r = r * g;
        }
    SymTensor<D> lam;
    for (int i = 0; i < D; ++i) lam.at(i, i) = expo[i];
    return mat_exp_sym(congruence(r, lam));
}

template <int D>
Mat<D> random_mat(Lcg64& rng, double lo = -1.0, double hi = 1.0) {
    Mat<D> m;
    for (int i = 0; i < D * D; ++i) m.a[i] = rng.uniform(lo, hi);
    return m;
}

} // namespace

TEST_CASE("eig_sym: frozen 2x2 oracle [[2,1],[1,1]]") {
    SymTensor<2> b;
    b.at(0, 0) = 2.0;
    b.at(0, 1) = 1.0;
    b.at(1, 1) = 1.0;
    const auto dec = eig_sym(b);

    // Eigenvalues (3 +- sqrt 5)/2, descending.
    CHECK(dec.lambda[0] == Catch::Approx(2.618033988749895).epsilon(1e-14));
    CHECK(dec.lambda[1] == Catch::Approx(0.3819660112501051).epsilon(1e-14));

    // Eigenvectors with the sign convention applied.
    CHECK(dec.vectors(0, 0) == Catch::Approx(0.8506508083520399).margin(1e-14));
    CHECK(dec.vectors(1, 0) == Catch::Approx(0.5257311121191336).margin(1e-14));
    CHECK(dec.vectors(0, 1) == Catch::Approx(-0.5257311121191336).margin(1e-14));
    CHECK(dec.vectors(1, 1) == Catch::Approx(0.8506508083520399).margin(1e-14));

    CHECK(dec.n_clusters == 2);
}

TEST_CASE("mat_log_spd: frozen value for the unit-det shear state") {
    // B = [[2,1],[1,1]] = shear closed form at shear 1; log B is traceless
    // with entries ln((3+sqrt5)/2)/sqrt5 * [[1,2],[2,-1]].
    SymTensor<2> b;
    b.at(0, 0) = 2.0;
    b.at(0, 1) = 1.0;
    b.at(1, 1) = 1.0;
    const auto l = mat_log_spd(b);
    const double c = 0.43040894096400404;
    CHECK(l(0, 0) == Catch::Approx(c).epsilon(1e-13));
    CHECK(l(0, 1) == Catch::Approx(2.0 * c).epsilon(1e-13));
    CHECK(l(1, 1) == Catch::Approx(-c).epsilon(1e-13));
    CHECK(std::abs(l.trace()) < 1e-14);

    // The log eigenvalues are +-2 asinh(1/2).
    const auto ldec = eig_sym(l);
    CHECK(ldec.lambda[0] == Catch::Approx(2.0 * std::asinh(0.5)).epsilon(1e-13));
}

TEST_CASE("eig_sym: constructed 3x3 eigensystem is recovered") {
    // Build A = R diag(3,2,1) R^T from an explicit rotation; recovery of the
    // spectrum and frame is then independent of the solver under test.
    Lcg64 rng(777);
    for (int rep = 0; rep < 50; ++rep) {
        Mat<3> r = Mat<3>::identity();
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                const double th = rng.uniform(0.1, 6.0);
                Mat<3>       g  = Mat<3>::identity();
                g(p, p) = std::cos(th);
                g(q, q) = std::cos(th);
                g(p, q) = -std::sin(th);
                g(q, p) = std::sin(th);
                r = r * g;
            }
        SymTensor<3> lam;
        lam.at(0, 0) = 3.0;
        lam.at(1, 1) = 2.0;
        lam.at(2, 2) = 1.0;
        const auto  a   = congruence(r, lam);
        const auto  dec = eig_sym(a);
        CHECK(dec.lambda[0] == Catch::Approx(3.0).epsilon(1e-12));
        CHECK(dec.lambda[1] == Catch::Approx(2.0).epsilon(1e-12));
        CHECK(dec.lambda[2] == Catch::Approx(1.0).epsilon(1e-12));

        // Columns orthonormal and reconstructing A.
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double dot = 0.0;
                for (int k = 0; k < 3; ++k) dot += dec.vectors(k, i) * dec.vectors(k, j);
                CHECK(dot == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
            }
        SymTensor<3> lam2;
        for (int i = 0; i < 3; ++i) lam2.at(i, i) = dec.lambda[i];
        const auto recon = congruence(dec.vectors, lam2);
        CHECK(frobenius(recon - a) < 1e-12 * frobenius(a));
    }
}

TEST_CASE("eig_sym: degenerate spectrum is clustered") {
    SymTensor<3> b;
    b.at(0, 0) = 2.0;
    b.at(1, 1) = 2.0;
    b.at(2, 2) = 0.25;
    const auto dec = eig_sym(b);
    CHECK(dec.n_clusters == 2);
    CHECK(dec.cluster_id[0] == dec.cluster_id[1]);
    CHECK(dec.cluster_id[2] == 1);
    CHECK(dec.degenerate());

    // Separation just above the threshold (1e-8 * spectral radius) splits.
    SymTensor<3> c;
    c.at(0, 0) = 2.0;
    c.at(1, 1) = 2.0 - 1e-7;
    c.at(2, 2) = 0.25;
    CHECK(eig_sym(c).n_clusters == 3);
}

TEST_CASE("eig_sym: zero and identity tensors") {
    SymTensor<2> z;
    const auto   dz = eig_sym(z);
    CHECK(dz.lambda[0] == 0.0);
    CHECK(dz.n_clusters == 1);

    const auto di = eig_sym(SymTensor<3>::identity());
    CHECK(di.lambda[0] == 1.0);
    CHECK(di.n_clusters == 1);
    CHECK(frobenius(mat_log_spd(SymTensor<3>::identity())) == 0.0);
}

TEST_CASE("exp/log round trips on random unit-det SPD tensors") {
    Lcg64 rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        const auto b = random_spd_unit_det<2>(rng);
        CHECK(det(b) == Catch::Approx(1.0).epsilon(1e-12));
        const auto l  = mat_log_spd(b);
        const auto b2 = mat_exp_sym(l);
        CHECK(frobenius(b2 - b) < 1e-12 * std::max(1.0, frobenius(b)));
        CHECK(std::abs(l.trace()) < 1e-12);
    }
    for (int rep = 0; rep < 100; ++rep) {
        const auto b = random_spd_unit_det<3>(rng);
        const auto l = mat_log_spd(b);
        CHECK(std::abs(l.trace()) < 1e-12);
        CHECK(frobenius(mat_exp_sym(l) - b) < 1e-11 * std::max(1.0, frobenius(b)));
    }
}

TEST_CASE("mat_exp_general: det(exp G) = exp(tr G)") {
    Lcg64 rng(31415);
    for (int rep = 0; rep < 200; ++rep) {
        const auto g2 = random_mat<2>(rng, -2.0, 2.0);
        CHECK(det(mat_exp_general(g2)) == Catch::Approx(std::exp(g2.trace())).epsilon(1e-12));
        const auto g3 = random_mat<3>(rng, -1.5, 1.5);
        CHECK(det(mat_exp_general(g3)) == Catch::Approx(std::exp(g3.trace())).epsilon(1e-12));
    }
}

TEST_CASE("mat_exp_general: agrees with mat_exp_sym on symmetric input") {
    Lcg64 rng(99);
    for (int rep = 0; rep < 100; ++rep) {
        SymTensor<3> s;
        for (int i = 0; i < SymTensor<3>::ncomp; ++i) s.a[i] = rng.uniform(-1.0, 1.0);
        const auto es = mat_exp_sym(s);
        const auto eg = mat_exp_general(to_mat(s));
        CHECK(frobenius(eg - to_mat(es)) < 1e-13 * std::max(1.0, frobenius(eg)));
    }
}

TEST_CASE("mat_exp_general: rotation generator gives the rotation matrix") {
    const double theta = 0.7;
    Mat<2>       w;
    w(0, 1) = -theta;
    w(1, 0) = theta;
    const auto r = mat_exp_general(w);
    CHECK(r(0, 0) == Catch::Approx(std::cos(theta)).epsilon(1e-14));
    CHECK(r(0, 1) == Catch::Approx(-std::sin(theta)).epsilon(1e-14));
    CHECK(r(1, 0) == Catch::Approx(std::sin(theta)).epsilon(1e-14));
    CHECK(r(1, 1) == Catch::Approx(std::cos(theta)).epsilon(1e-14));
}

TEST_CASE("inverse_spd and failure modes") {
    Lcg64 rng(5150);
    for (int rep = 0; rep < 100; ++rep) {
        const auto b   = random_spd_unit_det<3>(rng);
        const auto bi  = inverse_spd(b);
        const auto eye = to_mat(b) * to_mat(bi);
        CHECK(frobenius(eye - Mat<3>::identity()) < 1e-11);
    }
    SymTensor<2> indef;
    indef.at(0, 0) = 1.0;
    indef.at(1, 1) = -1.0;
    CHECK_THROWS_AS(inverse_spd(indef), SolverError);
    CHECK_THROWS_AS(mat_log_spd(indef), SolverError);

    SymTensor<2> blown;
    blown.at(0, 0) = 400.0;
    blown.at(1, 1) = -400.0;
    CHECK_THROWS_AS(mat_exp_sym(blown), SolverError);
}

TEST_CASE("deviator, inner, congruence basics") {
    Lcg64 rng(8);
    for (int rep = 0; rep < 50; ++rep) {
        SymTensor<3> s;
        for (int i = 0; i < SymTensor<3>::ncomp; ++i) s.a[i] = rng.uniform(-3.0, 3.0);
        CHECK(std::abs(deviator(s).trace()) < 1e-13 * std::max(1.0, std::abs(s.trace())));

        // Packed inner product matches the dense one.
        SymTensor<3> t;
        for (int i = 0; i < SymTensor<3>::ncomp; ++i) t.a[i] = rng.uniform(-3.0, 3.0);
        CHECK(inner(s, t) == Catch::Approx(inner(to_mat(s), to_mat(t))).margin(1e-12));

        // det(E B E^T) = det(E)^2 det(B).
        const auto b = random_spd_unit_det<3>(rng);
        const auto e = random_mat<3>(rng);
        CHECK(det(congruence(e, b)) ==
              Catch::Approx(det(e) * det(e) * det(b)).margin(1e-10));
    }
    // unit_det_project: traceless chart, so exp lands exactly on det 1.
    SymTensor<2> l;
    l.at(0, 0) = 0.9;
    l.at(0, 1) = 0.5;
    l.at(1, 1) = -0.2;
    const auto lp = unit_det_project(l);
    CHECK(lp.trace() == 0.0);
    CHECK(det(mat_exp_sym(lp)) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(frobenius(unit_det_project(lp) - lp) == 0.0);
    CHECK(frobenius(unit_det_project(SymTensor<3>{})) == 0.0);
}

TEST_CASE("matrix-calculus identities hold at second order in h") {
    // Along smooth SPD paths C(t) = M(t) M(t)^T + I/2 with
    // M(t) = M0 + t M1 + sin(t) M2:
    //   (a) d/dt C^{-1} = -C^{-1} (dC/dt) C^{-1}
    //   (b) d/dt |log C|^2 / 2 = (dC/dt) : (C^{-1} log C)
    // Central differences at h and h/2 must show order >= 1.9.
    Lcg64 rng(424242);

    auto run_path = [&](auto dim_tag) {
        constexpr int D = decltype(dim_tag)::value;
        const auto m0 = random_mat<D>(rng), m1 = random_mat<D>(rng), m2 = random_mat<D>(rng);
        auto cpath = [&](double t) {
            const Mat<D> m = m0 + t * m1 + std::sin(t) * m2;
            SymTensor<D> c = sym_part(m * m.transposed());
            for (int i = 0; i < D; ++i) c.at(i, i) += 0.5;
            return c;
        };
        auto cdot = [&](double t) {
            const Mat<D> m  = m0 + t * m1 + std::sin(t) * m2;
            const Mat<D> md = m1 + std::cos(t) * m2;
            return sym_part(md * m.transposed() + m * md.transposed());
        };

        const double t0 = 0.3;
        auto fd_errors = [&](double h) {
            const auto cp = cpath(t0 + h), cm = cpath(t0 - h), c0 = cpath(t0);
            const auto dc = cdot(t0);

            const auto inv_fd = (1.0 / (2.0 * h)) * (inverse_spd(cp) - inverse_spd(cm));
            const auto ci     = inverse_spd(c0);
            const auto inv_an = -1.0 * sym_part(to_mat(ci) * to_mat(dc) * to_mat(ci));
            const double e1   = frobenius(inv_fd - inv_an);

            const auto   lp = mat_log_spd(cp), lm = mat_log_spd(cm), l0 = mat_log_spd(c0);
            const double lhs = (inner(lp, lp) - inner(lm, lm)) / (4.0 * h);
            const double rhs = inner(to_mat(dc), to_mat(ci) * to_mat(l0));
            const double e2  = std::abs(lhs - rhs);
            return std::pair<double, double>(e1, e2);
        };

        const auto [a1, b1] = fd_errors(1e-2);
        const auto [a2, b2] = fd_errors(5e-3);
        if (a1 > 1e-12) CHECK(std::log2(a1 / a2) > 1.9);
        if (b1 > 1e-12) CHECK(std::log2(b1 / b2) > 1.9);
    };

    for (int rep = 0; rep < 10; ++rep) {
        run_path(std::integral_constant<int, 2>{});
        run_path(std::integral_constant<int, 3>{});
    }
}
