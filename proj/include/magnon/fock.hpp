#pragma once

// Truncated two-mode bosonic Fock space.
//
// States |m1, m2> with m1 + m2 <= n_max are grouped into blocks of fixed total
// quanta N = m1 + m2. Block N holds N + 1 states ordered by descending m1:
//   (N,0), (N-1,1), ..., (0,N)
// and blocks are laid out contiguously for N = 0..n_max, so the flat index of
// (m1, m2) is N(N+1)/2 + m2. This ordering is part of the CSV/JSON contract.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "magnon/errors.hpp"

namespace magnon {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

struct FockIndex {
  int m1 = 0;
  int m2 = 0;

  constexpr int total() const { return m1 + m2; }
  friend constexpr bool operator==(const FockIndex&, const FockIndex&) = default;
};

inline std::string to_string(const FockIndex& idx) {
  return "(" + std::to_string(idx.m1) + "," + std::to_string(idx.m2) + ")";
}

/// Compact ket label such as "11" or "20"; used for CSV headers and plot legends.
inline std::string ket_label(const FockIndex& idx) {
  return std::to_string(idx.m1) + std::to_string(idx.m2);
}

enum class Mode { one, two };
enum class Ladder { lowering, raising };

class FockBasis {
 public:
  explicit FockBasis(int n_max = 2) : n_max_(n_max) {
    if (n_max < 0) throw ContractViolation("FockBasis: n_max must be >= 0");
  }

  int n_max() const { return n_max_; }
  int num_blocks() const { return n_max_ + 1; }
  std::size_t dimension() const { return block_offset(n_max_ + 1); }

  static constexpr std::size_t block_size(int n) { return static_cast<std::size_t>(n) + 1; }
  static constexpr std::size_t block_offset(int n) {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
  }

  bool contains(const FockIndex& idx) const {
    return idx.m1 >= 0 && idx.m2 >= 0 && idx.total() <= n_max_;
  }

  std::size_t index(const FockIndex& idx) const {
    if (!contains(idx)) {
      throw IndexError("Fock state " + to_string(idx) + " outside basis with n_max=" +
                       std::to_string(n_max_));
    }
    return block_offset(idx.total()) + static_cast<std::size_t>(idx.m2);
  }

  FockIndex state(std::size_t flat) const {
    if (flat >= dimension()) throw IndexError("flat index out of range");
    int n = 0;
    while (block_offset(n + 1) <= flat) ++n;
    const int m2 = static_cast<int>(flat - block_offset(n));
    return {n - m2, m2};
  }

  /// Position of a state inside its own block.
  static constexpr std::size_t position_in_block(const FockIndex& idx) {
    return static_cast<std::size_t>(idx.m2);
  }

  std::vector<FockIndex> states() const {
    std::vector<FockIndex> out;
    out.reserve(dimension());
    for (int n = 0; n <= n_max_; ++n)
      for (int m2 = 0; m2 <= n; ++m2) out.push_back({n - m2, m2});
    return out;
  }

  friend bool operator==(const FockBasis&, const FockBasis&) = default;

 private:
  int n_max_;
};

inline FockBasis build_basis(int n_max = 2) { return FockBasis(n_max); }

template <typename Real>
class StateVector {
 public:
  StateVector(FockBasis basis, CVector<Real> amplitudes)
      : basis_(basis), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != basis_.dimension())
      throw ContractViolation("StateVector: amplitude count does not match basis dimension");
  }

  /// Basis vector |idx>.
  static StateVector fock(const FockBasis& basis, const FockIndex& idx) {
    CVector<Real> amps = CVector<Real>::Zero(static_cast<Eigen::Index>(basis.dimension()));
    amps(static_cast<Eigen::Index>(basis.index(idx))) = Real(1);
    return StateVector(basis, std::move(amps));
  }

  const FockBasis& basis() const { return basis_; }
  const CVector<Real>& amplitudes() const { return amplitudes_; }
  CVector<Real>& amplitudes() { return amplitudes_; }

  Complex<Real> amplitude(const FockIndex& idx) const {
    return amplitudes_(static_cast<Eigen::Index>(basis_.index(idx)));
  }

  auto block(int n) const {
    return amplitudes_.segment(static_cast<Eigen::Index>(FockBasis::block_offset(n)),
                               static_cast<Eigen::Index>(FockBasis::block_size(n)));
  }
  auto block(int n) {
    return amplitudes_.segment(static_cast<Eigen::Index>(FockBasis::block_offset(n)),
                               static_cast<Eigen::Index>(FockBasis::block_size(n)));
  }

  Real norm() const { return amplitudes_.norm(); }

 private:
  FockBasis basis_;
  CVector<Real> amplitudes_;
};

struct FockTerm {
  FockIndex index;
  std::complex<double> amplitude;
};

/// Normalized superposition of the given terms; repeated indices add up.
template <typename Real = double>
StateVector<Real> make_state(const FockBasis& basis, const std::vector<FockTerm>& terms) {
  CVector<Real> amps = CVector<Real>::Zero(static_cast<Eigen::Index>(basis.dimension()));
  for (const auto& t : terms) {
    amps(static_cast<Eigen::Index>(basis.index(t.index))) +=
        Complex<Real>(static_cast<Real>(t.amplitude.real()), static_cast<Real>(t.amplitude.imag()));
  }
  const Real n = amps.norm();
  if (!(n > Real(0))) throw DegenerateStateError("make_state: zero state cannot be normalized");
  return StateVector<Real>(basis, amps / n);
}

/// |c_j|^2 for every basis state, in flat order.
template <typename Real>
RVector<Real> populations(const StateVector<Real>& state) {
  return state.amplitudes().cwiseAbs2();
}

template <typename Real>
Real population(const StateVector<Real>& state, const FockIndex& idx) {
  return std::norm(state.amplitude(idx));
}

/// Block-diagonal operator on a FockBasis; block N is (N+1)x(N+1).
template <typename Real>
class BlockOperator {
 public:
  using Block = CMatrix<Real>;

  BlockOperator(FockBasis basis, std::vector<Block> blocks, bool hermitian)
      : basis_(basis), blocks_(std::move(blocks)), hermitian_(hermitian) {
    if (static_cast<int>(blocks_.size()) != basis_.num_blocks())
      throw ContractViolation("BlockOperator: wrong number of blocks");
    for (int n = 0; n < basis_.num_blocks(); ++n) {
      const auto size = static_cast<Eigen::Index>(FockBasis::block_size(n));
      if (blocks_[n].rows() != size || blocks_[n].cols() != size)
        throw ContractViolation("BlockOperator: block " + std::to_string(n) + " has wrong shape");
    }
  }

  static BlockOperator zero(const FockBasis& basis, bool hermitian = true) {
    std::vector<Block> blocks;
    for (int n = 0; n < basis.num_blocks(); ++n) {
      const auto s = static_cast<Eigen::Index>(FockBasis::block_size(n));
      blocks.push_back(Block::Zero(s, s));
    }
    return BlockOperator(basis, std::move(blocks), hermitian);
  }

  static BlockOperator identity(const FockBasis& basis) {
    std::vector<Block> blocks;
    for (int n = 0; n < basis.num_blocks(); ++n) {
      const auto s = static_cast<Eigen::Index>(FockBasis::block_size(n));
      blocks.push_back(Block::Identity(s, s));
    }
    return BlockOperator(basis, std::move(blocks), true);
  }

  const FockBasis& basis() const { return basis_; }
  bool hermitian() const { return hermitian_; }
  const Block& block(int n) const { return blocks_.at(static_cast<std::size_t>(n)); }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// Dense matrix over flat indices (zeros off the block diagonal).
  CMatrix<Real> dense() const {
    const auto dim = static_cast<Eigen::Index>(basis_.dimension());
    CMatrix<Real> out = CMatrix<Real>::Zero(dim, dim);
    for (int n = 0; n < basis_.num_blocks(); ++n) {
      const auto off = static_cast<Eigen::Index>(FockBasis::block_offset(n));
      out.block(off, off, blocks_[n].rows(), blocks_[n].cols()) = blocks_[n];
    }
    return out;
  }

  StateVector<Real> apply(const StateVector<Real>& psi) const {
    if (!(psi.basis() == basis_)) throw ContractViolation("BlockOperator::apply: basis mismatch");
    CVector<Real> out(psi.amplitudes().size());
    for (int n = 0; n < basis_.num_blocks(); ++n) {
      const auto off = static_cast<Eigen::Index>(FockBasis::block_offset(n));
      out.segment(off, blocks_[n].rows()).noalias() =
          blocks_[n] * psi.amplitudes().segment(off, blocks_[n].cols());
    }
    return StateVector<Real>(basis_, std::move(out));
  }

  BlockOperator adjoint() const {
    std::vector<Block> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(b.adjoint());
    return BlockOperator(basis_, std::move(out), hermitian_);
  }

  /// max_ij |A_ij - conj(A_ji)| over all blocks.
  Real hermiticity_error() const {
    Real worst = 0;
    for (const auto& b : blocks_) worst = std::max(worst, (b - b.adjoint()).cwiseAbs().maxCoeff());
    return worst;
  }

  /// max_ij |(U^dagger U - I)_ij| over all blocks.
  Real unitarity_error() const {
    Real worst = 0;
    for (const auto& b : blocks_) {
      const Block d = b.adjoint() * b - Block::Identity(b.rows(), b.cols());
      worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
    return worst;
  }

  friend BlockOperator operator*(const BlockOperator& a, const BlockOperator& b) {
    if (!(a.basis_ == b.basis_)) throw ContractViolation("BlockOperator product: basis mismatch");
    std::vector<Block> out;
    out.reserve(a.blocks_.size());
    for (std::size_t n = 0; n < a.blocks_.size(); ++n) out.push_back(a.blocks_[n] * b.blocks_[n]);
    return BlockOperator(a.basis_, std::move(out), false);
  }

  friend BlockOperator operator+(const BlockOperator& a, const BlockOperator& b) {
    if (!(a.basis_ == b.basis_)) throw ContractViolation("BlockOperator sum: basis mismatch");
    std::vector<Block> out;
    out.reserve(a.blocks_.size());
    for (std::size_t n = 0; n < a.blocks_.size(); ++n) out.push_back(a.blocks_[n] + b.blocks_[n]);
    return BlockOperator(a.basis_, std::move(out), a.hermitian_ && b.hermitian_);
  }

 private:
  FockBasis basis_;
  std::vector<Block> blocks_;
  bool hermitian_;
};

/// Ladder operator over flat indices. Elements whose target lies above the
/// cutoff are not stored; `dropped` counts them. Number-conserving products
/// never touch dropped rows, so a non-zero count only matters for callers
/// that raise the total quanta.
template <typename Real>
struct ModeOperator {
  Eigen::SparseMatrix<std::complex<Real>> matrix;
  std::size_t dropped = 0;
};

template <typename Real = double>
ModeOperator<Real> mode_operator_elements(const FockBasis& basis, Mode which, Ladder kind) {
  using std::sqrt;
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  std::vector<Eigen::Triplet<std::complex<Real>>> triplets;
  std::size_t dropped = 0;
  for (const auto& src : basis.states()) {
    const int m = which == Mode::one ? src.m1 : src.m2;
    const int step = kind == Ladder::raising ? 1 : -1;
    if (kind == Ladder::lowering && m == 0) continue;
    FockIndex dst = src;
    (which == Mode::one ? dst.m1 : dst.m2) += step;
    if (!basis.contains(dst)) {
      ++dropped;
      continue;
    }
    const Real elem = kind == Ladder::raising ? sqrt(static_cast<Real>(m + 1)) : sqrt(static_cast<Real>(m));
    triplets.emplace_back(static_cast<Eigen::Index>(basis.index(dst)),
                          static_cast<Eigen::Index>(basis.index(src)), elem);
  }
  ModeOperator<Real> out;
  out.matrix.resize(dim, dim);
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.dropped = dropped;
  return out;
}

/// The two halves of the exchange term: m1^dagger m2 and m2^dagger m1. Kept
/// separate so a complex coupling can weight them with g and conj(g).
template <typename Real>
struct HopOperator {
  BlockOperator<Real> raise1_lower2;
  BlockOperator<Real> raise2_lower1;

  BlockOperator<Real> hermitian_sum() const {
    std::vector<CMatrix<Real>> blocks;
    for (std::size_t n = 0; n < raise1_lower2.blocks().size(); ++n)
      blocks.push_back(raise1_lower2.blocks()[n] + raise2_lower1.blocks()[n]);
    return BlockOperator<Real>(raise1_lower2.basis(), std::move(blocks), true);
  }
};

/// Element of m1^dagger m2 from block position k (m1 = N-k, m2 = k) to k-1.
template <typename Real>
Real hop_element(int n, int k) {
  using std::sqrt;
  return sqrt(static_cast<Real>(n - k + 1) * static_cast<Real>(k));
}

template <typename Real = double>
HopOperator<Real> hop_operator(const FockBasis& basis) {
  std::vector<CMatrix<Real>> up, down;
  for (int n = 0; n < basis.num_blocks(); ++n) {
    const auto s = static_cast<Eigen::Index>(FockBasis::block_size(n));
    CMatrix<Real> b = CMatrix<Real>::Zero(s, s);
    for (int k = 1; k <= n; ++k) b(k - 1, k) = hop_element<Real>(n, k);
    down.push_back(b.adjoint());
    up.push_back(std::move(b));
  }
  return {BlockOperator<Real>(basis, std::move(up), false),
          BlockOperator<Real>(basis, std::move(down), false)};
}

}  // namespace magnon
