// Eigenframe machinery around a fixed SPD tensor B: the orthonormal matrix
// basis adapted to B's eigenvectors, the commutant subspace of symmetric
// matrices commuting with B, the orthogonal projection Q of a velocity
// gradient away from that commutant, and the splitting
//     grad u = Omega + K + S,
// with Omega antisymmetric, S symmetric and commuting with B, and K in the
// annihilator { M : M B + B M^T = 0 }.  Everything is computed in the
// eigenframe and rotated back.
#pragma once

#include <string>
#include <vector>

#include "tensor.hpp"

namespace logvisc {

/// Raised by decompose_grad when B has (near-)repeated eigenvalues: the
/// annihilator solve divides by eigenvalue gaps and the K/Omega split stops
/// being unique.
struct DegenerateSplit : SolverError {
    using SolverError::SolverError;
};

/// Orthonormal basis of d x d matrices adapted to B's eigenframe, plus the
/// index set spanning the commutant C_B of symmetric matrices commuting
/// with B.  Basis order: the d dyads b_i (x) b_i; then symmetric pairs
/// (b_i (x) b_j + b_j (x) b_i)/sqrt2 for i < j; then antisymmetric pairs
/// (b_i (x) b_j - b_j (x) b_i)/sqrt2 for i < j.
template <int D>
struct CommutantFrame {
    SpectralDecomp<D>   decomp;
    std::array<Mat<D>, D * D> basis{};
    std::vector<int>    commutant; // indices into `basis` spanning C_B

    int commutant_dim() const { return static_cast<int>(commutant.size()); }
};

template <int D>
inline CommutantFrame<D> build_frame(const SymTensor<D>& b) {
    CommutantFrame<D> f;
    f.decomp = eig_sym(b);
    const Mat<D>& r = f.decomp.vectors;

    auto column = [&](int i) {
        Vec<D> v{};
        for (int k = 0; k < D; ++k) v[k] = r(k, i);
        return v;
    };
    auto dyad = [&](const Vec<D>& x, const Vec<D>& y) {
        Mat<D> m;
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) m(i, j) = x[i] * y[j];
        return m;
    };

    int slot = 0;
    for (int i = 0; i < D; ++i) {
        f.basis[slot] = dyad(column(i), column(i));
        f.commutant.push_back(slot);
        ++slot;
    }
    const double inv_sqrt2 = 0.7071067811865476;
    for (int i = 0; i < D; ++i)
        for (int j = i + 1; j < D; ++j) {
            const Mat<D> eij = dyad(column(i), column(j));
            const Mat<D> eji = dyad(column(j), column(i));
            f.basis[slot] = inv_sqrt2 * (eij + eji);
            // A symmetric pair lies in the commutant iff both eigenvalues
            // belong to the same near-degenerate cluster.
            if (f.decomp.cluster_id[i] == f.decomp.cluster_id[j]) f.commutant.push_back(slot);
            ++slot;
        }
    for (int i = 0; i < D; ++i)
        for (int j = i + 1; j < D; ++j) {
            const Mat<D> eij = dyad(column(i), column(j));
            const Mat<D> eji = dyad(column(j), column(i));
            f.basis[slot] = inv_sqrt2 * (eij - eji);
            ++slot;
        }
    return f;
}

/// Dimension of C_B given the clustering: sum over clusters of m(m+1)/2.
template <int D>
inline int commutant_dim(const SpectralDecomp<D>& dec) {
    int dim = 0;
    for (int c = 0; c < dec.n_clusters; ++c) {
        int m = 0;
        for (int i = 0; i < D; ++i)
            if (dec.cluster_id[i] == c) ++m;
        dim += m * (m + 1) / 2;
    }
    return dim;
}

/// Orthogonal projection of G away from the commutant of B:
/// Q = G - proj_{C_B} G.  In the eigenframe this zeroes the symmetric part
/// of every within-cluster block (the diagonal included), so tr Q = 0
/// exactly up to round-off.  Well defined for degenerate B.
template <int D>
inline Mat<D> project_Q(const SymTensor<D>& b, const Mat<D>& g) {
    const SpectralDecomp<D> dec = eig_sym(b);
    const Mat<D>&           r   = dec.vectors;
    Mat<D>                  gp  = r.transposed() * g * r;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            if (dec.cluster_id[i] != dec.cluster_id[j]) continue;
            if (i == j) {
                gp(i, i) = 0.0;
            } else if (i < j) {
                const double s = 0.5 * (gp(i, j) + gp(j, i));
                gp(i, j) -= s;
                gp(j, i) -= s;
            }
        }
    return r * gp * r.transposed();
}

/// Result of the grad-u splitting at a single tensor.
template <int D>
struct GradSplit {
    Mat<D>       omega; // antisymmetric
    Mat<D>       k;     // K B + B K^T = 0
    SymTensor<D> s;     // symmetric, commutes with B
};

/// Split G = Omega + K + S relative to a non-degenerate B.  In B's
/// eigenframe (eigenvalues b_i): S is the diagonal of G; for each pair
/// i < j with ratio r = b_i / b_j, writing g = G - S,
///     K_ji = (g_ij + g_ji) / (1 - r),   K_ij = -r K_ji,
///     Omega_ij = g_ij - K_ij = -Omega_ji,
/// which is the unique solution of Omega + K = g with the annihilator
/// constraint K_ij = -(b_i/b_j) K_ji.  Repeated eigenvalues (within
/// eps_deg = 1e-8 * spectral radius) raise DegenerateSplit.
template <int D>
inline GradSplit<D> decompose_grad(const SymTensor<D>& b, const Mat<D>& g) {
    const SpectralDecomp<D> dec = eig_sym(b);
    if (dec.degenerate())
        throw DegenerateSplit("decompose_grad: repeated eigenvalues (gap below 1e-8 of "
                              "spectral radius); the Omega/K split is not unique");
    const Mat<D>& r  = dec.vectors;
    const Mat<D>  gp = r.transposed() * g * r;

    Mat<D> omega, k;
    SymTensor<D> s;
    for (int i = 0; i < D; ++i) s.at(i, i) = gp(i, i);
    for (int i = 0; i < D; ++i)
        for (int j = i + 1; j < D; ++j) {
            const double ratio = dec.lambda[i] / dec.lambda[j];
            const double kji   = (gp(i, j) + gp(j, i)) / (1.0 - ratio);
            const double kij   = -ratio * kji;
            k(j, i)     = kji;
            k(i, j)     = kij;
            omega(i, j) = gp(i, j) - kij;
            omega(j, i) = -omega(i, j);
        }

    GradSplit<D> out;
    out.omega = r * omega * r.transposed();
    out.k     = r * k * r.transposed();
    out.s     = congruence(r, s);
    return out;
}

} // namespace logvisc
