#pragma once

#include <Eigen/Dense>

namespace gcl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Largest dimension handled by stack-allocated scratch vectors.
inline constexpr int kMaxDim = 64;

/// Stack-backed vector for hot loops; never touches the heap.
using ScratchVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// An n x n matrix U with U^T U = I to within 1e-12 per entry.
///
/// Construction from an arbitrary matrix validates the invariant. Givens
/// updates keep the matrix orthogonal up to rounding; a re-orthonormalization
/// pass runs automatically after a fixed number of updates.
class OrthogonalMatrix {
  public:
    static constexpr double kTolerance = 1e-12;

    OrthogonalMatrix() = default;
    explicit OrthogonalMatrix(Matrix entries);

    static OrthogonalMatrix identity(int n);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& matrix() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

    OrthogonalMatrix transpose() const;
    OrthogonalMatrix operator*(const OrthogonalMatrix& rhs) const;

    /// Max |(U^T U - I)_ij|.
    double orthogonality_error() const;

    /// U <- U * V_(i,j)^(alpha), V the planar rotation of givens().
    void apply_givens_right(int i, int j, double alpha);

    /// Householder QR with sign fix; returns the nearest orthogonal factor.
    void reorthonormalize();

  private:
    struct Trusted {};
    OrthogonalMatrix(Matrix entries, Trusted) : entries_(std::move(entries)) {}
    friend OrthogonalMatrix orthogonal_from_qr(const Matrix& a);

    Matrix entries_;
    int updates_since_cleanup_ = 0;
};

/// Q factor of A = QR with columns of Q multiplied by sign(R_ii).
OrthogonalMatrix orthogonal_from_qr(const Matrix& a);

/// Planar rotation by alpha in the (e_i, e_j) plane:
/// (Vx)_i = x_i cos a - x_j sin a, (Vx)_j = x_i sin a + x_j cos a.
OrthogonalMatrix givens(int n, int i, int j, double alpha);

/// Signed permutation test: exactly one entry of +-1 per row and column.
bool is_signed_permutation(const Matrix& m, double tol = 1e-12);

} // namespace gcl
