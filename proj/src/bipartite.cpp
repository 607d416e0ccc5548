#include "qedist/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace qedist {

namespace {

Eigen::SelfAdjointEigenSolver<CMatrix> eig(const CMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(m);
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

// ---- HermitianOperator -----------------------------------------------------

HermitianOperator::HermitianOperator(int d_a, int d_b, CMatrix entries, double tol)
    : d_a_(d_a), d_b_(d_b), m_(std::move(entries)) {
  if (d_a < 1 || d_b < 1) throw DimensionError("local dimensions must be positive");
  const int n = d_a * d_b;
  if (m_.rows() != n || m_.cols() != n) {
    throw DimensionError("matrix shape " + std::to_string(m_.rows()) + "x" +
                         std::to_string(m_.cols()) + " does not match d_a*d_b = " +
                         std::to_string(n));
  }
  const double dev = max_abs(m_ - m_.adjoint());
  if (!(dev <= tol)) {
    throw InputError("matrix is not Hermitian (max |X - X^†| = " + std::to_string(dev) + ")");
  }
  m_ = (0.5 * (m_ + m_.adjoint())).eval();
}

HermitianOperator HermitianOperator::zero(int d_a, int d_b) {
  return HermitianOperator(d_a, d_b, CMatrix::Zero(d_a * d_b, d_a * d_b));
}

HermitianOperator HermitianOperator::identity(int d_a, int d_b) {
  return HermitianOperator(d_a, d_b, CMatrix::Identity(d_a * d_b, d_a * d_b));
}

double HermitianOperator::trace() const { return m_.trace().real(); }

RVector HermitianOperator::eigenvalues() const { return eig(m_).eigenvalues(); }

double HermitianOperator::min_eigenvalue() const { return eigenvalues().minCoeff(); }
double HermitianOperator::max_eigenvalue() const { return eigenvalues().maxCoeff(); }

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (o.d_a_ != d_a_ || o.d_b_ != d_b_) throw DimensionError("operator dimensions differ");
  return HermitianOperator(d_a_, d_b_, m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  if (o.d_a_ != d_a_ || o.d_b_ != d_b_) throw DimensionError("operator dimensions differ");
  return HermitianOperator(d_a_, d_b_, m_ - o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const {
  return HermitianOperator(d_a_, d_b_, m_ * s);
}

// ---- DensityOperator -------------------------------------------------------

DensityOperator::DensityOperator(HermitianOperator op, double psd_tol, double trace_tol)
    : op_(std::move(op)) {
  const double tr = op_.trace();
  if (!(std::abs(tr - 1.0) <= trace_tol)) {
    throw InputError("density operator trace is " + std::to_string(tr) + ", expected 1");
  }
  const double lmin = op_.min_eigenvalue();
  if (!(lmin >= -psd_tol)) {
    throw InputError("density operator is not positive semidefinite (min eigenvalue " +
                     std::to_string(lmin) + ")");
  }
}

DensityOperator::DensityOperator(int d_a, int d_b, CMatrix entries)
    : DensityOperator(HermitianOperator(d_a, d_b, std::move(entries))) {}

// ---- SchmidtVector ---------------------------------------------------------

SchmidtVector::SchmidtVector(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  if (c_.empty()) throw InputError("Schmidt vector must be non-empty");
  double norm2 = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (!(c_[i] >= 0.0)) throw InputError("Schmidt coefficients must be non-negative");
    if (i > 0 && c_[i] > c_[i - 1]) throw InputError("Schmidt coefficients must be non-increasing");
    norm2 += c_[i] * c_[i];
  }
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9) {
    throw InputError("Schmidt vector must have unit l2 norm");
  }
}

SchmidtVector SchmidtVector::from_squared(std::span<const double> squares) {
  std::vector<double> c;
  c.reserve(squares.size());
  double total = 0.0;
  for (double s : squares) {
    if (!(s >= 0.0)) throw InputError("squared Schmidt coefficients must be non-negative");
    total += s;
  }
  if (!(total > 0.0)) throw InputError("squared Schmidt coefficients sum to zero");
  for (double s : squares) c.push_back(std::sqrt(s / total));
  std::sort(c.begin(), c.end(), std::greater<>());
  return SchmidtVector(std::move(c));
}

// ---- PureState -------------------------------------------------------------

PureState::PureState(int d_a, int d_b, CVector amplitudes)
    : d_a_(d_a), d_b_(d_b), psi_(std::move(amplitudes)) {
  if (d_a < 1 || d_b < 1) throw DimensionError("local dimensions must be positive");
  if (psi_.size() != d_a * d_b) throw DimensionError("amplitude vector length must be d_a*d_b");
  if (std::abs(psi_.norm() - 1.0) > 1e-9) throw InputError("pure state must be normalized");
}

DensityOperator PureState::projector() const {
  return DensityOperator(d_a_, d_b_, psi_ * psi_.adjoint());
}

// ---- operations ------------------------------------------------------------

CMatrix partial_transpose(const CMatrix& x, int d_a, int d_b) {
  const int n = d_a * d_b;
  if (x.rows() != n || x.cols() != n) throw DimensionError("partial_transpose: shape mismatch");
  CMatrix y(n, n);
  for (int ia = 0; ia < d_a; ++ia)
    for (int ib = 0; ib < d_b; ++ib)
      for (int ja = 0; ja < d_a; ++ja)
        for (int jb = 0; jb < d_b; ++jb)
          y(ia * d_b + jb, ja * d_b + ib) = x(ia * d_b + ib, ja * d_b + jb);
  return y;
}

HermitianOperator partial_transpose(const HermitianOperator& x) {
  return HermitianOperator(x.d_a(), x.d_b(), partial_transpose(x.matrix(), x.d_a(), x.d_b()));
}

double inner(const CMatrix& x, const CMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionError("inner: shape mismatch");
  return (x.conjugate().cwiseProduct(y)).sum().real();
}

double inner(const HermitianOperator& x, const HermitianOperator& y) {
  return inner(x.matrix(), y.matrix());
}

double trace_norm(const HermitianOperator& x) { return x.eigenvalues().cwiseAbs().sum(); }

double operator_norm(const HermitianOperator& x) {
  return x.eigenvalues().cwiseAbs().maxCoeff();
}

HermitianOperator bipartite_tensor(const HermitianOperator& x, const HermitianOperator& y) {
  const int a1 = x.d_a(), b1 = x.d_b(), a2 = y.d_a(), b2 = y.d_b();
  const int da = a1 * a2, db = b1 * b2, n = da * db;
  // kron order (a1 b1 a2 b2) -> target order (a1 a2 b1 b2)
  std::vector<int> perm(n);
  for (int i1 = 0; i1 < a1; ++i1)
    for (int j1 = 0; j1 < b1; ++j1)
      for (int i2 = 0; i2 < a2; ++i2)
        for (int j2 = 0; j2 < b2; ++j2) {
          const int src = ((i1 * b1 + j1) * a2 + i2) * b2 + j2;
          perm[src] = (i1 * a2 + i2) * db + (j1 * b2 + j2);
        }
  const int nx = x.dim(), ny = y.dim();
  CMatrix out(n, n);
  for (int r1 = 0; r1 < nx; ++r1)
    for (int c1 = 0; c1 < nx; ++c1) {
      const cplx v = x.matrix()(r1, c1);
      for (int r2 = 0; r2 < ny; ++r2)
        for (int c2 = 0; c2 < ny; ++c2)
          out(perm[r1 * ny + r2], perm[c1 * ny + c2]) = v * y.matrix()(r2, c2);
    }
  return HermitianOperator(da, db, std::move(out));
}

SchmidtDecomposition schmidt_decompose(const PureState& psi) {
  const int da = psi.d_a(), db = psi.d_b();
  CMatrix reshaped(da, db);
  for (int ia = 0; ia < da; ++ia)
    for (int ib = 0; ib < db; ++ib) reshaped(ia, ib) = psi.amplitudes()(ia * db + ib);
  Eigen::JacobiSVD<CMatrix> svd(reshaped, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  std::vector<double> c(s.data(), s.data() + s.size());
  const double norm = std::sqrt(std::inner_product(c.begin(), c.end(), c.begin(), 0.0));
  for (double& v : c) v /= norm;
  // JacobiSVD sorts decreasing; guard against ties reordering by rounding.
  std::sort(c.begin(), c.end(), std::greater<>());
  return {SchmidtVector(std::move(c)), svd.matrixU(), svd.matrixV().conjugate()};
}

std::pair<HermitianOperator, HermitianOperator> positive_negative_parts(const HermitianOperator& x) {
  const auto es = eig(x.matrix());
  const RVector& ev = es.eigenvalues();
  const CMatrix& v = es.eigenvectors();
  const RVector pos = ev.cwiseMax(0.0);
  const RVector neg = (-ev).cwiseMax(0.0);
  CMatrix p = v * pos.asDiagonal() * v.adjoint();
  CMatrix n = v * neg.asDiagonal() * v.adjoint();
  return {HermitianOperator(x.d_a(), x.d_b(), std::move(p), 1e-8),
          HermitianOperator(x.d_a(), x.d_b(), std::move(n), 1e-8)};
}

namespace {

std::pair<CMatrix, CMatrix> split_support(const DensityOperator& rho, double rank_tol) {
  RVector ev;
  CMatrix vecs;
  if (rho.matrix().imag().cwiseAbs().maxCoeff() == 0.0) {
    // keeps the bases real for real input
    Eigen::SelfAdjointEigenSolver<RMatrix> es(rho.matrix().real());
    ev = es.eigenvalues();
    vecs = es.eigenvectors().cast<cplx>();
  } else {
    const auto es = eig(rho.matrix());
    ev = es.eigenvalues();
    vecs = es.eigenvectors();
  }
  const double cut = rank_tol * std::max(ev.maxCoeff(), 0.0);
  std::vector<int> sup, ker;
  for (int i = 0; i < ev.size(); ++i) (ev(i) > cut ? sup : ker).push_back(i);
  const int n = rho.dim();
  CMatrix s(n, static_cast<int>(sup.size())), k(n, static_cast<int>(ker.size()));
  for (std::size_t i = 0; i < sup.size(); ++i) s.col(i) = vecs.col(sup[i]);
  for (std::size_t i = 0; i < ker.size(); ++i) k.col(i) = vecs.col(ker[i]);
  return {s, k};
}

}  // namespace

HermitianOperator support_projector(const DensityOperator& rho, double rank_tol) {
  const CMatrix s = split_support(rho, rank_tol).first;
  return HermitianOperator(rho.d_a(), rho.d_b(), s * s.adjoint(), 1e-8);
}

int support_rank(const DensityOperator& rho, double rank_tol) {
  return static_cast<int>(split_support(rho, rank_tol).first.cols());
}

CMatrix kernel_basis(const DensityOperator& rho, double rank_tol) {
  return split_support(rho, rank_tol).second;
}

HermitianOperator negative_eigenprojector(const HermitianOperator& x, double tol) {
  const auto es = eig(x.matrix());
  CMatrix p = CMatrix::Zero(x.dim(), x.dim());
  for (int i = 0; i < x.dim(); ++i) {
    if (es.eigenvalues()(i) < -tol) {
      p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    }
  }
  return HermitianOperator(x.d_a(), x.d_b(), std::move(p), 1e-8);
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("fidelity: dimension mismatch");
  const auto es = eig(rho.matrix());
  const RVector sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix root = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().adjoint();
  CMatrix m = root * sigma.matrix() * root;
  m = (0.5 * (m + m.adjoint())).eval();
  const double s = eig(m).eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(s * s, 0.0, 1.0);
}

HermitianOperator isotropic_twirl(const HermitianOperator& x) {
  if (x.d_a() != x.d_b()) throw DimensionError("isotropic_twirl requires d_a = d_b");
  const int d = x.d_a();
  const int n = d * d;
  const CVector phi = max_entangled_vector(d);
  const CMatrix psi = phi * phi.adjoint();
  const double overlap = inner(psi, x.matrix());
  const double tr = x.trace();
  CMatrix out = overlap * psi;
  if (d > 1) out += (tr - overlap) / (n - 1.0) * (CMatrix::Identity(n, n) - psi);
  return HermitianOperator(d, d, std::move(out), 1e-8);
}

// ---- named states ----------------------------------------------------------

CVector max_entangled_vector(int d) {
  if (d < 1) throw DimensionError("max_entangled: d must be positive");
  CVector v = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

DensityOperator max_entangled(int d) {
  const CVector v = max_entangled_vector(d);
  return DensityOperator(d, d, v * v.adjoint());
}

DensityOperator isotropic_state(int d, double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw InputError("isotropic parameter f must lie in [0,1]");
  if (d < 2) throw DimensionError("isotropic states need d >= 2");
  const int n = d * d;
  const CVector v = max_entangled_vector(d);
  const CMatrix psi = v * v.adjoint();
  CMatrix m = f * psi + (1.0 - f) / (n - 1.0) * (CMatrix::Identity(n, n) - psi);
  return DensityOperator(d, d, std::move(m));
}

DensityOperator max_correlated_state(const CMatrix& rho_tilde) {
  const int d = static_cast<int>(rho_tilde.rows());
  if (rho_tilde.cols() != d) throw DimensionError("max_correlated_state: square matrix required");
  DensityOperator check(HermitianOperator(d, 1, rho_tilde));
  (void)check;
  CMatrix m = CMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i * d + i, j * d + j) = rho_tilde(i, j);
  return DensityOperator(d, d, std::move(m));
}

std::optional<CMatrix> max_correlated_image(const HermitianOperator& rho, double tol) {
  if (rho.d_a() != rho.d_b()) return std::nullopt;
  const int d = rho.d_a();
  const int n = d * d;
  CMatrix img(d, d);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const bool diag_r = r / d == r % d;
      const bool diag_c = c / d == c % d;
      if (diag_r && diag_c) {
        img(r / d, c / d) = rho.matrix()(r, c);
      } else if (std::abs(rho.matrix()(r, c)) > tol) {
        return std::nullopt;
      }
    }
  return img;
}

bool is_isotropic(const DensityOperator& rho, double tol) {
  if (rho.d_a() != rho.d_b() || rho.d_a() < 2) return false;
  return max_abs(isotropic_twirl(rho.op()).matrix() - rho.matrix()) <= tol;
}

// ---- random states ---------------------------------------------------------

namespace {

CMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = cplx(re, im);
    }
  return g;
}

CMatrix normalized_gram(const CMatrix& g) {
  CMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return (0.5 * (m + m.adjoint())).eval();
}

}  // namespace

PureState random_pure_state(int d_a, int d_b, std::uint64_t seed) {
  if (d_a < 1 || d_b < 1) throw DimensionError("random_pure_state: invalid dims");
  std::mt19937_64 rng(seed);
  CVector v = ginibre(d_a * d_b, 1, rng).col(0);
  v /= v.norm();
  return PureState(d_a, d_b, std::move(v));
}

CMatrix random_unitary(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const CMatrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const cplx diag = r(i, i);
    const double a = std::abs(diag);
    if (a > 0) q.col(i) *= diag / a;
  }
  return q;
}

DensityOperator random_state(const RandomSpec& spec) {
  if (spec.d_a < 1 || spec.d_b < 1) throw DimensionError("random_state: invalid dims");
  std::mt19937_64 rng(spec.seed);
  const int n = spec.d_a * spec.d_b;
  switch (spec.kind) {
    case RandomKind::haar_pure:
      return random_pure_state(spec.d_a, spec.d_b, spec.seed).projector();
    case RandomKind::ginibre_mixed: {
      const int r = spec.rank.value_or(n);
      if (r < 1 || r > n) throw DimensionError("random_state: rank out of range");
      return DensityOperator(spec.d_a, spec.d_b, normalized_gram(ginibre(n, r, rng)));
    }
    case RandomKind::isotropic: {
      if (spec.d_a != spec.d_b) throw DimensionError("isotropic states need d_a = d_b");
      double f = 0.0;
      if (spec.f) {
        f = *spec.f;
      } else {
        f = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      }
      return isotropic_state(spec.d_a, f);
    }
    case RandomKind::max_correlated: {
      if (spec.d_a != spec.d_b) throw DimensionError("max-correlated states need d_a = d_b");
      const int d = spec.d_a;
      const int r = spec.rank.value_or(d);
      if (r < 1 || r > d) throw DimensionError("random_state: rank out of range");
      return max_correlated_state(normalized_gram(ginibre(d, r, rng)));
    }
  }
  throw InputError("random_state: unknown kind");
}

}  // namespace qedist
