#include <cmath>
#include <sstream>

#include "gcl/errors.hpp"
#include "gcl/linalg.hpp"

namespace gcl {

namespace {
constexpr int kCleanupInterval = 64;
}

OrthogonalMatrix::OrthogonalMatrix(Matrix entries) : entries_(std::move(entries))
{
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw ContractViolation("orthogonal matrix must be square and nonempty");
    }
    const double err = orthogonality_error();
    if (!(err <= kTolerance)) {
        std::ostringstream os;
        os << "matrix is not orthogonal: max |U^T U - I| = " << err;
        throw ContractViolation(os.str());
    }
}

OrthogonalMatrix OrthogonalMatrix::identity(int n)
{
    return OrthogonalMatrix(Matrix::Identity(n, n), Trusted{});
}

OrthogonalMatrix OrthogonalMatrix::transpose() const
{
    return OrthogonalMatrix(entries_.transpose(), Trusted{});
}

OrthogonalMatrix OrthogonalMatrix::operator*(const OrthogonalMatrix& rhs) const
{
    if (rhs.dim() != dim()) {
        throw ContractViolation("orthogonal product: dimension mismatch");
    }
    return OrthogonalMatrix(entries_ * rhs.entries_, Trusted{});
}

double OrthogonalMatrix::orthogonality_error() const
{
    const Matrix gram = entries_.transpose() * entries_;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

void OrthogonalMatrix::apply_givens_right(int i, int j, double alpha)
{
    if (i == j || i < 0 || j < 0 || i >= dim() || j >= dim()) {
        throw ContractViolation("givens update: need distinct in-range indices");
    }
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    for (int r = 0; r < dim(); ++r) {
        const double ui = entries_(r, i);
        const double uj = entries_(r, j);
        entries_(r, i) = c * ui + s * uj;
        entries_(r, j) = -s * ui + c * uj;
    }
    if (++updates_since_cleanup_ >= kCleanupInterval) {
        reorthonormalize();
    }
}

void OrthogonalMatrix::reorthonormalize()
{
    // Sign-fixed QR leaves an already-orthogonal matrix unchanged up to rounding.
    *this = orthogonal_from_qr(entries_);
}

OrthogonalMatrix orthogonal_from_qr(const Matrix& a)
{
    const Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
    const Matrix& r = qr.matrixQR();
    for (int k = 0; k < a.cols(); ++k) {
        if (r(k, k) < 0.0) {
            q.col(k) *= -1.0;
        }
    }
    return OrthogonalMatrix(std::move(q), OrthogonalMatrix::Trusted{});
}

OrthogonalMatrix givens(int n, int i, int j, double alpha)
{
    if (i == j) {
        throw ContractViolation("givens: i and j must differ");
    }
    if (i < 0 || j < 0 || i >= n || j >= n) {
        throw ContractViolation("givens: index out of range");
    }
    OrthogonalMatrix v = OrthogonalMatrix::identity(n);
    v.apply_givens_right(i, j, alpha);
    return v;
}

bool is_signed_permutation(const Matrix& m, double tol)
{
    if (m.rows() != m.cols()) {
        return false;
    }
    for (int r = 0; r < m.rows(); ++r) {
        int big = 0;
        for (int c = 0; c < m.cols(); ++c) {
            const double a = std::abs(m(r, c));
            if (std::abs(a - 1.0) <= tol) {
                ++big;
            } else if (a > tol) {
                return false;
            }
        }
        if (big != 1) {
            return false;
        }
    }
    return true;
}

} // namespace gcl
