#pragma once

// Small dense Hermitian linear algebra on fixed-size complex matrices.
//
// The eigensolver first splits the matrix into exactly decoupled blocks
// (connected components of its nonzero pattern). Blocks of size 1 and 2 are
// solved in closed form; larger blocks go to Eigen's SelfAdjointEigenSolver.
// Block-diagonal inputs (Bell-diagonal states, pinched states) therefore cost
// a handful of flops while arbitrary dense inputs take the general path.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace qkdrate {

using cplx = std::complex<double>;

template <int N>
using CMatrix = Eigen::Matrix<cplx, N, N>;

template <int N>
using RVector = Eigen::Matrix<double, N, 1>;

using Matrix4c = CMatrix<4>;
using Matrix8c = CMatrix<8>;

/// Eigenvalues below -kPsdRejectTol make a matrix "not PSD"; anything above
/// it that is negative is clamped to 0 before taking square roots.
inline constexpr double kPsdRejectTol = 1e-8;
/// Smallest eigenvalue a DensityMatrix may have.
inline constexpr double kDensityEigenTol = 1e-10;

template <int N>
struct HermitianEigen {
  RVector<N> values;   // ascending
  CMatrix<N> vectors;  // column k belongs to values(k)
};

namespace detail {

template <int N>
std::array<int, N> component_labels(const CMatrix<N>& a) {
  std::array<int, N> parent{};
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      if (a(i, j) != cplx(0.0) || a(j, i) != cplx(0.0)) {
        const int ri = find(i);
        const int rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  std::array<int, N> label{};
  for (int i = 0; i < N; ++i) label[i] = find(i);
  return label;
}

// Eigenpairs of [[a, b], [conj(b), d]] with a, d real. Ascending order.
inline void eigen_2x2(double a, cplx b, double d, std::array<double, 2>& values,
                      std::array<std::array<cplx, 2>, 2>& vecs) {
  const double mean = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double radius = std::hypot(half_diff, std::abs(b));
  values = {mean - radius, mean + radius};
  for (int k = 0; k < 2; ++k) {
    const double lambda = values[k];
    // Two algebraically equivalent kernel vectors; keep the better conditioned one.
    std::array<cplx, 2> u{b, cplx(lambda - a)};
    std::array<cplx, 2> w{cplx(lambda - d), std::conj(b)};
    const double nu = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
    const double nw = std::sqrt(std::norm(w[0]) + std::norm(w[1]));
    if (nu >= nw) {
      vecs[k] = {u[0] / nu, u[1] / nu};
    } else {
      vecs[k] = {w[0] / nw, w[1] / nw};
    }
  }
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix. Hermiticity is assumed, not
/// checked; the closed-form 2x2 path reads the upper triangle.
template <int N>
HermitianEigen<N> hermitian_eigen(const CMatrix<N>& a, bool compute_vectors = true) {
  const auto label = detail::component_labels<N>(a);

  std::array<double, N> values{};
  CMatrix<N> vectors = CMatrix<N>::Zero();

  std::array<bool, N> done{};
  for (int root = 0; root < N; ++root) {
    if (done[root]) continue;
    std::array<int, N> idx{};
    int size = 0;
    for (int i = 0; i < N; ++i) {
      if (label[i] == label[root]) {
        idx[size++] = i;
        done[i] = true;
      }
    }
    if (size == 1) {
      const int i = idx[0];
      values[i] = a(i, i).real();
      vectors(i, i) = 1.0;
    } else if (size == 2) {
      const int i = idx[0];
      const int j = idx[1];
      std::array<double, 2> ev{};
      std::array<std::array<cplx, 2>, 2> vec{};
      detail::eigen_2x2(a(i, i).real(), a(i, j), a(j, j).real(), ev, vec);
      values[i] = ev[0];
      values[j] = ev[1];
      vectors(i, i) = vec[0][0];
      vectors(j, i) = vec[0][1];
      vectors(i, j) = vec[1][0];
      vectors(j, j) = vec[1][1];
    } else {
      Eigen::MatrixXcd sub(size, size);
      for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) sub(r, c) = a(idx[r], idx[c]);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
          sub, compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
      if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eigen: eigensolver did not converge");
      }
      for (int k = 0; k < size; ++k) {
        values[idx[k]] = solver.eigenvalues()(k);
        if (compute_vectors) {
          for (int r = 0; r < size; ++r) vectors(idx[r], idx[k]) = solver.eigenvectors()(r, k);
        }
      }
    }
  }

  std::array<int, N> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return values[x] < values[y]; });

  HermitianEigen<N> out;
  for (int k = 0; k < N; ++k) {
    out.values(k) = values[order[k]];
    if (compute_vectors) out.vectors.col(k) = vectors.col(order[k]);
  }
  if (!compute_vectors) out.vectors.setZero();
  return out;
}

template <int N>
double min_eigenvalue(const CMatrix<N>& a) {
  return hermitian_eigen<N>(a, false).values(0);
}

/// Clamps PSD noise to zero. Throws std::domain_error for eigenvalues below
/// -kPsdRejectTol.
double clamp_psd_eigenvalue(double lambda);

/// Principal square root of a PSD Hermitian matrix.
template <int N>
CMatrix<N> psd_sqrt(const CMatrix<N>& a) {
  const auto eig = hermitian_eigen<N>(a, true);
  RVector<N> roots;
  for (int k = 0; k < N; ++k) roots(k) = std::sqrt(clamp_psd_eigenvalue(eig.values(k)));
  return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

/// Tr sqrt(a) for PSD Hermitian a.
template <int N>
double trace_sqrt_psd(const CMatrix<N>& a) {
  const auto values = hermitian_eigen<N>(a, false).values;
  double sum = 0.0;
  for (int k = 0; k < N; ++k) sum += std::sqrt(clamp_psd_eigenvalue(values(k)));
  return sum;
}

/// Largest |a - a^dagger| entry.
template <int N>
double hermiticity_defect(const CMatrix<N>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace qkdrate
