// Dense small-matrix algebra for d in {2, 3}: symmetric tensors, a
// deterministic Jacobi eigensolver, and the matrix exp/log pair that moves
// tensors between the SPD cone and its chart of symmetric matrices.
//
// Conventions fixed here and relied on everywhere else:
//   * eigenvalues are returned in descending order;
//   * each eigenvector's sign is fixed by making its largest-magnitude
//     component positive (ties broken by the lowest index);
//   * near-equal eigenvalues are clustered transitively with threshold
//     eps_deg = 1e-8 * spectral radius;
//   * the inner product is A:C = tr(A C^T), so symmetric off-diagonal
//     components count twice.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "util.hpp"

namespace logvisc {

inline constexpr double kEpsPd       = 1e-14; // SPD floor for matrix log / inverse
inline constexpr double kEpsDegRel   = 1e-8;  // eigenvalue clustering, relative
inline constexpr double kJacobiTol   = 1e-14; // off-diagonal / on-diagonal ratio
inline constexpr int    kJacobiSweeps = 50;
inline constexpr double kExpArgMax   = 300.0; // |eigenvalue| ceiling for exp

// ---------------------------------------------------------------- Mat<D> ---

/// Dense row-major d-by-d matrix.
template <int D>
struct Mat {
    std::array<double, D * D> a{};

    double& operator()(int i, int j) { return a[i * D + j]; }
    double  operator()(int i, int j) const { return a[i * D + j]; }

    static Mat identity() {
        Mat m;
        for (int i = 0; i < D; ++i) m(i, i) = 1.0;
        return m;
    }

    Mat transposed() const {
        Mat t;
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double trace() const {
        double s = 0.0;
        for (int i = 0; i < D; ++i) s += (*this)(i, i);
        return s;
    }
};

template <int D>
inline Mat<D> operator+(const Mat<D>& x, const Mat<D>& y) {
    Mat<D> r;
    for (int i = 0; i < D * D; ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

template <int D>
inline Mat<D> operator-(const Mat<D>& x, const Mat<D>& y) {
    Mat<D> r;
    for (int i = 0; i < D * D; ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

template <int D>
inline Mat<D> operator*(double s, const Mat<D>& x) {
    Mat<D> r;
    for (int i = 0; i < D * D; ++i) r.a[i] = s * x.a[i];
    return r;
}

template <int D>
inline Mat<D> operator*(const Mat<D>& x, const Mat<D>& y) {
    Mat<D> r;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            double s = 0.0;
            for (int k = 0; k < D; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

/// A:C = tr(A C^T) = sum_ij A_ij C_ij.
template <int D>
inline double inner(const Mat<D>& x, const Mat<D>& y) {
    double s = 0.0;
    for (int i = 0; i < D * D; ++i) s += x.a[i] * y.a[i];
    return s;
}

template <int D>
inline double frobenius(const Mat<D>& x) {
    return std::sqrt(inner(x, x));
}

template <int D>
inline double det(const Mat<D>& m) {
    if constexpr (D == 2) {
        return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    } else {
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
}

// ---------------------------------------------------------- SymTensor<D> ---

/// Packed index of the (i, j) entry, i <= j, in row-major upper-triangular
/// storage: 2D -> [xx, xy, yy]; 3D -> [xx, xy, xz, yy, yz, zz].
template <int D>
constexpr int sym_index(int i, int j) {
    if (i > j) { const int t = i; i = j; j = t; }
    return i * (2 * D - i - 1) / 2 + j;
}

/// Symmetric d-by-d tensor, upper triangle stored.
template <int D>
struct SymTensor {
    static constexpr int ncomp = D * (D + 1) / 2;
    std::array<double, ncomp> a{};

    double  operator()(int i, int j) const { return a[sym_index<D>(i, j)]; }
    double& at(int i, int j) { return a[sym_index<D>(i, j)]; }

    static SymTensor identity() {
        SymTensor s;
        for (int i = 0; i < D; ++i) s.at(i, i) = 1.0;
        return s;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < D; ++i) t += (*this)(i, i);
        return t;
    }
};

template <int D>
inline SymTensor<D> operator+(const SymTensor<D>& x, const SymTensor<D>& y) {
    SymTensor<D> r;
    for (int i = 0; i < SymTensor<D>::ncomp; ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

template <int D>
inline SymTensor<D> operator-(const SymTensor<D>& x, const SymTensor<D>& y) {
    SymTensor<D> r;
    for (int i = 0; i < SymTensor<D>::ncomp; ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

template <int D>
inline SymTensor<D> operator*(double s, const SymTensor<D>& x) {
    SymTensor<D> r;
    for (int i = 0; i < SymTensor<D>::ncomp; ++i) r.a[i] = s * x.a[i];
    return r;
}

template <int D>
inline Mat<D> to_mat(const SymTensor<D>& s) {
    Mat<D> m;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) m(i, j) = s(i, j);
    return m;
}

/// Symmetric part (M + M^T)/2 packed into a SymTensor.
template <int D>
inline SymTensor<D> sym_part(const Mat<D>& m) {
    SymTensor<D> s;
    for (int i = 0; i < D; ++i)
        for (int j = i; j < D; ++j) s.at(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

/// Antisymmetric part (M - M^T)/2.
template <int D>
inline Mat<D> asym_part(const Mat<D>& m) {
    return 0.5 * (m - m.transposed());
}

/// A:C with symmetric packing (off-diagonal terms count twice).
template <int D>
inline double inner(const SymTensor<D>& x, const SymTensor<D>& y) {
    double s = 0.0;
    for (int i = 0; i < D; ++i)
        for (int j = i; j < D; ++j) {
            const double w = (i == j) ? 1.0 : 2.0;
            s += w * x(i, j) * y(i, j);
        }
    return s;
}

template <int D>
inline double frobenius(const SymTensor<D>& x) {
    return std::sqrt(inner(x, x));
}

/// Trace-free part, A - (tr A / d) I.
template <int D>
inline SymTensor<D> deviator(const SymTensor<D>& x) {
    SymTensor<D> r = x;
    const double m = x.trace() / D;
    for (int i = 0; i < D; ++i) r.at(i, i) -= m;
    return r;
}

template <int D>
inline double det(const SymTensor<D>& s) {
    if constexpr (D == 2) {
        return s(0, 0) * s(1, 1) - s(0, 1) * s(0, 1);
    } else {
        return s(0, 0) * (s(1, 1) * s(2, 2) - s(1, 2) * s(1, 2)) -
               s(0, 1) * (s(0, 1) * s(2, 2) - s(1, 2) * s(0, 2)) +
               s(0, 2) * (s(0, 1) * s(1, 2) - s(1, 1) * s(0, 2));
    }
}

/// Inverse of a symmetric positive-definite tensor (adjugate over
/// determinant).  Inputs that fail the positive-definite check are a hard
/// error: the caller is holding a tensor that left the admissible cone.
template <int D>
inline SymTensor<D> inverse_spd(const SymTensor<D>& s) {
    const double d0 = s(0, 0);
    const double dt = det(s);
    bool spd = d0 > 0.0 && dt > 0.0;
    if constexpr (D == 3) {
        spd = spd && (s(0, 0) * s(1, 1) - s(0, 1) * s(0, 1)) > 0.0;
    }
    if (!spd)
        throw SolverError("inverse_spd: matrix is not positive definite (det = " +
                          std::to_string(dt) + ")");
    SymTensor<D> r;
    if constexpr (D == 2) {
        r.at(0, 0) = s(1, 1) / dt;
        r.at(0, 1) = -s(0, 1) / dt;
        r.at(1, 1) = s(0, 0) / dt;
    } else {
        r.at(0, 0) = (s(1, 1) * s(2, 2) - s(1, 2) * s(1, 2)) / dt;
        r.at(0, 1) = (s(0, 2) * s(1, 2) - s(0, 1) * s(2, 2)) / dt;
        r.at(0, 2) = (s(0, 1) * s(1, 2) - s(0, 2) * s(1, 1)) / dt;
        r.at(1, 1) = (s(0, 0) * s(2, 2) - s(0, 2) * s(0, 2)) / dt;
        r.at(1, 2) = (s(0, 2) * s(0, 1) - s(0, 0) * s(1, 2)) / dt;
        r.at(2, 2) = (s(0, 0) * s(1, 1) - s(0, 1) * s(0, 1)) / dt;
    }
    return r;
}

/// Congruence E S E^T, symmetrized to kill round-off asymmetry.
template <int D>
inline SymTensor<D> congruence(const Mat<D>& e, const SymTensor<D>& s) {
    return sym_part(e * to_mat(s) * e.transposed());
}

// ----------------------------------------------------- spectral machinery ---

/// Eigen-decomposition of a symmetric tensor.  `vectors` holds orthonormal
/// eigenvectors as columns, matching `lambda` (descending).  `cluster_id`
/// maps each eigenvalue slot to its near-degenerate group (0, 1, ... in
/// descending order); distinct ids are separated by more than eps_deg.
template <int D>
struct SpectralDecomp {
    std::array<double, D> lambda{};
    Mat<D>                vectors;
    std::array<int, D>    cluster_id{};
    int                   n_clusters = 1;

    bool degenerate() const { return n_clusters < D; }
};

/// Cyclic Jacobi eigensolver.  Deterministic: fixed sweep order, fixed
/// rotation convention, tolerance `off-diagonal <= 1e-14 * on-diagonal`
/// (Frobenius), at most 50 sweeps.  Descending eigenvalues; sign convention
/// as in the file header.
template <int D>
inline SpectralDecomp<D> eig_sym(const SymTensor<D>& s) {
    Mat<D> a = to_mat(s);
    Mat<D> v = Mat<D>::identity();

    auto off_norm = [&a]() {
        double o = 0.0;
        for (int i = 0; i < D; ++i)
            for (int j = i + 1; j < D; ++j) o += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(o);
    };
    auto diag_norm = [&a]() {
        double o = 0.0;
        for (int i = 0; i < D; ++i) o += a(i, i) * a(i, i);
        return std::sqrt(o);
    };

    int sweep = 0;
    while (off_norm() > kJacobiTol * std::max(diag_norm(), std::numeric_limits<double>::min())) {
        if (++sweep > kJacobiSweeps)
            throw SolverError("eig_sym: Jacobi failed to converge in 50 sweeps");
        for (int p = 0; p < D - 1; ++p)
            for (int q = p + 1; q < D; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;

                // A <- J^T A J with the Givens rotation J in the (p,q) plane.
                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int k = 0; k < D; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(p, k) = a(k, p);
                    a(k, q) = sn * akp + c * akq;
                    a(q, k) = a(k, q);
                }
                for (int k = 0; k < D; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
    }

    SpectralDecomp<D> dec;
    std::array<int, D> order{};
    for (int i = 0; i < D; ++i) order[i] = i;
    // Insertion sort by descending eigenvalue (stable).
    for (int i = 1; i < D; ++i) {
        const int oi = order[i];
        int       j  = i - 1;
        while (j >= 0 && a(order[j], order[j]) < a(oi, oi)) {
            order[j + 1] = order[j];
            --j;
        }
        order[j + 1] = oi;
    }
    for (int i = 0; i < D; ++i) {
        const int src  = order[i];
        dec.lambda[i]  = a(src, src);
        // Sign fix: the largest-magnitude component (lowest index on ties)
        // is made positive.
        int    imax = 0;
        double vmax = std::abs(v(0, src));
        for (int k = 1; k < D; ++k) {
            if (std::abs(v(k, src)) > vmax) {
                vmax = std::abs(v(k, src));
                imax = k;
            }
        }
        const double sgn = v(imax, src) < 0.0 ? -1.0 : 1.0;
        for (int k = 0; k < D; ++k) dec.vectors(k, i) = sgn * v(k, src);
    }

    double rad = 0.0;
    for (int i = 0; i < D; ++i) rad = std::max(rad, std::abs(dec.lambda[i]));
    const double eps_deg = kEpsDegRel * rad;
    int          cid     = 0;
    dec.cluster_id[0]    = 0;
    for (int i = 1; i < D; ++i) {
        if (dec.lambda[i - 1] - dec.lambda[i] > eps_deg) ++cid;
        dec.cluster_id[i] = cid;
    }
    dec.n_clusters = cid + 1;
    return dec;
}

/// Assemble R diag(f(lambda)) R^T from a decomposition.
template <int D, class F>
inline SymTensor<D> assemble_from_eigen(const SpectralDecomp<D>& dec, F&& f) {
    SymTensor<D> out;
    for (int i = 0; i < D; ++i)
        for (int j = i; j < D; ++j) {
            double s = 0.0;
            for (int k = 0; k < D; ++k)
                s += dec.vectors(i, k) * f(dec.lambda[k]) * dec.vectors(j, k);
            out.at(i, j) = s;
        }
    return out;
}

/// Matrix logarithm of a symmetric positive-definite tensor.  Eigenvalues
/// at or below the positive-definite floor (1e-14) are a hard error.
template <int D>
inline SymTensor<D> mat_log_spd(const SymTensor<D>& s) {
    const SpectralDecomp<D> dec = eig_sym(s);
    if (dec.lambda[D - 1] <= kEpsPd)
        throw SolverError("mat_log_spd: matrix is not positive definite (min eigenvalue = " +
                          std::to_string(dec.lambda[D - 1]) + ")");
    return assemble_from_eigen(dec, [](double x) { return std::log(x); });
}

/// Matrix exponential of a symmetric tensor via its eigensystem.  Eigenvalue
/// magnitudes above 300 indicate a blown-up state and are a hard error.
template <int D>
inline SymTensor<D> mat_exp_sym(const SymTensor<D>& s) {
    const SpectralDecomp<D> dec = eig_sym(s);
    if (std::abs(dec.lambda[0]) > kExpArgMax || std::abs(dec.lambda[D - 1]) > kExpArgMax)
        throw SolverError("mat_exp_sym: eigenvalue magnitude exceeds 300; state has blown up");
    return assemble_from_eigen(dec, [](double x) { return std::exp(x); });
}

/// Matrix exponential of a general (not necessarily symmetric) matrix by
/// scaling-and-squaring with a Taylor core.  The argument is scaled to
/// Frobenius norm <= 1/2 and the series truncated at order 14, which leaves
/// a remainder below 1e-14 relative; the result is then squared back.
template <int D>
inline Mat<D> mat_exp_general(const Mat<D>& g) {
    const double nrm = frobenius(g);
    if (!(nrm == nrm))
        throw SolverError("mat_exp_general: NaN input");
    int s = 0;
    double scale = 1.0;
    while (nrm * scale > 0.5 && s < 64) {
        scale *= 0.5;
        ++s;
    }
    const Mat<D> a = scale * g;

    Mat<D> term = Mat<D>::identity();
    Mat<D> sum  = Mat<D>::identity();
    for (int k = 1; k <= 14; ++k) {
        term = (1.0 / k) * (term * a);
        sum  = sum + term;
    }
    for (int k = 0; k < s; ++k) sum = sum * sum;
    return sum;
}

/// Unit-determinant projection in chart coordinates: drop the trace of the
/// log-strain, so that exp of the result has determinant exactly 1.  This is
/// deviator() under its constraint-enforcing role; exposed as an explicit
/// repair tool only — the transport steppers never call it behind the
/// caller's back.
template <int D>
inline SymTensor<D> unit_det_project(const SymTensor<D>& l) {
    return deviator(l);
}

} // namespace logvisc
