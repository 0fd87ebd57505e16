#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "error.hpp"

namespace cutfem {

Scaled diag_scale(const SpMat& B) {
  Scaled s;
  const Eigen::VectorXd diag = B.diagonal();
  s.d.resize(diag.size());
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    require(diag[i] > 0 && std::isfinite(diag[i]), ErrorCode::Solver,
            "nonpositive diagonal entry " + std::to_string(i) + ": the system is degenerate (missing stabilization?)");
    s.d[i] = 1.0 / std::sqrt(diag[i]);
  }
  s.matrix = apply_scaling(B, s.d);
  return s;
}

SpMat apply_scaling(const SpMat& B, const Eigen::VectorXd& d) {
  SpMat out = B;
  for (int c = 0; c < out.outerSize(); ++c)
    for (SpMat::InnerIterator it(out, c); it; ++it) it.valueRef() *= d[it.row()] * d[it.col()];
  return out;
}

namespace {

// Column-major accumulation of b - B x with long double entries.
std::vector<long double> residual_ld(const SpMat& B, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  std::vector<long double> r(static_cast<std::size_t>(b.size()));
  for (Eigen::Index i = 0; i < b.size(); ++i) r[static_cast<std::size_t>(i)] = b[i];
  for (int c = 0; c < B.outerSize(); ++c)
    for (SpMat::InnerIterator it(B, c); it; ++it)
      r[static_cast<std::size_t>(it.row())] -= static_cast<long double>(it.value()) * x[c];
  return r;
}

}  // namespace

Eigen::VectorXd residual_extended(const SpMat& B, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const auto r = residual_ld(B, x, b);
  Eigen::VectorXd out(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) out[i] = static_cast<double>(r[static_cast<std::size_t>(i)]);
  return out;
}

double energy_defect(const SpMat& B, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const auto r = residual_ld(B, x, b);
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < x.size(); ++i) s -= x[i] * r[static_cast<std::size_t>(i)];
  return static_cast<double>(s);
}

double relative_residual(const SpMat& B, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double r = (B * x - b).norm();
  const double nb = b.norm();
  return nb > 0 ? r / nb : r;
}

bool SymmetricSolver::factorize(const SpMat& B) {
  use_lu_ = false;
  ldlt_.compute(B);
  ok_ = ldlt_.info() == Eigen::Success;
  if (ok_) {
    const auto& D = ldlt_.vectorD();
    for (Eigen::Index i = 0; i < D.size() && ok_; ++i) ok_ = D[i] != 0.0 && std::isfinite(D[i]);
  }
  if (!ok_) {
    lu_.analyzePattern(B);
    lu_.factorize(B);
    ok_ = lu_.info() == Eigen::Success;
    use_lu_ = ok_;
  }
  return ok_;
}

Eigen::VectorXd SymmetricSolver::solve(const Eigen::VectorXd& b) const {
  require(ok_, ErrorCode::Solver, "solve with a failed factorization");
  if (use_lu_) return const_cast<Eigen::SparseLU<SpMat>&>(lu_).solve(b);
  return ldlt_.solve(b);
}

double backward_error(const SpMat& B, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(B.rows());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SpMat::InnerIterator it(B, k); it; ++it) rows[it.row()] += std::abs(it.value());
  const double bnorm = rows.size() ? rows.maxCoeff() : 0.0;
  const double den = bnorm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  const double r = (B * x - b).lpNorm<Eigen::Infinity>();
  return den > 0 ? r / den : r;
}

Eigen::VectorXd solve_spd(const SpMat& B, const Eigen::VectorXd& b, double tol) {
  require(B.rows() == B.cols() && B.rows() == b.size(), ErrorCode::InvalidArgument, "dimension mismatch in solve");
  // Symmetric diagonal scaling evens out rows of very different stiffness
  // (embedded fibres next to the bulk) before factorizing.
  Eigen::VectorXd d = Eigen::VectorXd::Ones(B.rows());
  if (B.rows() > 0 && B.diagonal().minCoeff() > 0.0) d = B.diagonal().cwiseSqrt().cwiseInverse();
  const SpMat S = apply_scaling(B, d);
  SymmetricSolver solver;
  require(solver.factorize(S), ErrorCode::Solver, "factorization failed (matrix singular?)");
  auto apply_inverse = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return d.cwiseProduct(solver.solve(d.cwiseProduct(r)));
  };
  Eigen::VectorXd x = apply_inverse(b);
  double res = relative_residual(B, x, b);
  for (int it = 0; it < 3 && !(res <= tol); ++it) {
    x += apply_inverse(residual_extended(B, x, b));
    res = relative_residual(B, x, b);
  }
  if (!(res <= tol)) {
    const double be = backward_error(B, x, b);
    require(be <= tol && x.allFinite(), ErrorCode::Solver,
            "linear solve did not converge (relative residual " + std::to_string(res) + ", backward error " +
                std::to_string(be) + ")");
  }
  require(x.allFinite(), ErrorCode::Solver, "linear solve produced non-finite values");
  return x;
}

namespace {

using Apply = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LanczosResult {
  Eigen::VectorXd theta;    // wanted Ritz values, descending
  Eigen::MatrixXd vectors;  // matching Ritz vectors, B-normalized
  int steps = 0;
};

// Lanczos with full reorthogonalization for an operator self-adjoint in the
// inner product <x, y> = x^T B y (B = identity when `inner` is empty). Returns
// the k algebraically largest Ritz pairs. `Y` holds B-orthonormal vectors that
// are projected out of the Krylov space.
LanczosResult lanczos(const Apply& op, const Apply& inner, Eigen::Index n, int k, double tol, int max_basis,
                      unsigned seed, const Eigen::MatrixXd* Y, const Eigen::MatrixXd* BY, bool want_vectors,
                      const std::function<bool(const LanczosResult&)>& accept) {
  const Eigen::Index ndefl = Y ? Y->cols() : 0;
  const int cap = static_cast<int>(std::min<Eigen::Index>(n - ndefl, max_basis));
  require(k >= 1 && k <= cap, ErrorCode::InvalidArgument, "requested more eigenpairs than the problem admits");
  auto Bx = [&](const Eigen::VectorXd& x) { return inner ? inner(x) : x; };
  auto deflate = [&](Eigen::VectorXd& x) {
    if (Y) x -= (*Y) * (BY->transpose() * x);
  };

  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  auto random_vector = [&] {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
  };

  Eigen::MatrixXd V(n, cap + 1);
  std::vector<double> alpha;
  std::vector<double> beta;
  auto orthogonalize = [&](Eigen::VectorXd& w, int upto) {
    for (int pass = 0; pass < 2; ++pass) {
      deflate(w);
      const Eigen::VectorXd Bw = Bx(w);
      w -= V.leftCols(upto) * (V.leftCols(upto).transpose() * Bw);
    }
  };

  Eigen::VectorXd v = random_vector();
  orthogonalize(v, 0);
  v /= std::sqrt(v.dot(Bx(v)));
  V.col(0) = v;

  LanczosResult out;
  for (int j = 0; j < cap; ++j) {
    Eigen::VectorXd w = op(V.col(j));
    deflate(w);
    const double a = V.col(j).dot(Bx(w));
    w -= a * V.col(j);
    if (j > 0) w -= beta.back() * V.col(j - 1);
    orthogonalize(w, j + 1);
    const double b = std::sqrt(std::max(0.0, w.dot(Bx(w))));
    alpha.push_back(a);

    const int m = j + 1;
    const bool breakdown = b <= 1e-13 * (std::abs(a) + (beta.empty() ? 0.0 : std::abs(beta.back())));
    if (m >= k && (m % 5 == 0 || m == cap || breakdown)) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      const Eigen::VectorXd& th = es.eigenvalues();  // ascending
      bool converged = true;
      out.theta.resize(k);
      if (want_vectors) out.vectors.resize(n, k);
      for (int i = 0; i < k; ++i) {
        const int idx = m - 1 - i;
        const double est = breakdown ? 0.0 : std::abs(b * es.eigenvectors()(m - 1, idx));
        converged = converged && est <= tol * std::abs(th[idx]);
        out.theta[i] = th[idx];
        if (want_vectors) {
          Eigen::VectorXd x = V.leftCols(m) * es.eigenvectors().col(idx);
          x /= std::sqrt(x.dot(Bx(x)));
          out.vectors.col(i) = x;
        }
      }
      out.steps = m;
      const bool good = accept ? (converged || m % 10 == 0 || breakdown) && accept(out) : converged;
      if (good || m == cap) return out;
    }
    if (m == cap) break;
    if (breakdown) {
      // Invariant subspace: continue with a fresh direction.
      Eigen::VectorXd r = random_vector();
      orthogonalize(r, m);
      beta.push_back(0.0);
      V.col(m) = r / std::sqrt(r.dot(Bx(r)));
    } else {
      beta.push_back(b);
      V.col(m) = w / b;
    }
  }
  return out;
}

double trace_ratio(const SpMat& A, const SpMat& M) {
  const double ta = A.diagonal().cwiseAbs().sum();
  const double tm = M.diagonal().cwiseAbs().sum();
  return tm > 0 ? ta / tm : 1.0;
}

void fill_residuals(const SpMat& A, const SpMat& M, EigenResult& r) {
  r.residuals.resize(r.values.size());
  for (Eigen::Index i = 0; i < r.values.size(); ++i) {
    const Eigen::VectorXd Au = A * r.vectors.col(i);
    const Eigen::VectorXd Mu = M * r.vectors.col(i);
    const double lam = r.values[i];
    const double denom = Au.norm() + std::abs(lam) * Mu.norm();
    r.residuals[i] = denom > 0 ? (Au - lam * Mu).norm() / denom : 0.0;
  }
}

EigenResult dense_eigs(const SpMat& A, const SpMat& M, const EigenOptions& opt, const Eigen::MatrixXd* Y, double sigma) {
  const Eigen::MatrixXd Ad = Eigen::MatrixXd(A);
  const Eigen::MatrixXd Md = Eigen::MatrixXd(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Md);
  require(es.info() == Eigen::Success, ErrorCode::Solver, "dense generalized eigensolver failed");
  std::vector<Eigen::Index> keep;
  const Eigen::MatrixXd MY = Y ? Eigen::MatrixXd(Md * (*Y)) : Eigen::MatrixXd();
  for (Eigen::Index i = 0; i < es.eigenvalues().size() && static_cast<int>(keep.size()) < opt.k; ++i) {
    if (es.eigenvalues()[i] < sigma) continue;
    if (Y && (MY.transpose() * es.eigenvectors().col(i)).norm() > 0.5) continue;
    keep.push_back(i);
  }
  require(static_cast<int>(keep.size()) == opt.k, ErrorCode::Solver, "not enough eigenvalues above the shift");
  EigenResult r;
  r.values.resize(opt.k);
  r.vectors.resize(A.rows(), opt.k);
  for (int i = 0; i < opt.k; ++i) {
    r.values[i] = es.eigenvalues()[keep[static_cast<std::size_t>(i)]];
    r.vectors.col(i) = es.eigenvectors().col(keep[static_cast<std::size_t>(i)]);
  }
  r.sigma = sigma;
  fill_residuals(A, M, r);
  return r;
}

}  // namespace

Eigen::MatrixXd m_orthonormalize(const Eigen::MatrixXd& Y, const SpMat& M) {
  Eigen::MatrixXd Q = Y;
  for (Eigen::Index j = 0; j < Q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) Q.col(j) -= Q.col(i).dot(M * Q.col(j)) * Q.col(i);
    }
    const double nrm = std::sqrt(Q.col(j).dot(M * Q.col(j)));
    require(nrm > 0, ErrorCode::Solver, "deflation basis is rank deficient");
    Q.col(j) /= nrm;
  }
  return Q;
}

EigenResult generalized_eigs(const SpMat& A, const SpMat& M, const EigenOptions& opt, const Eigen::MatrixXd* deflation) {
  require(A.rows() == A.cols() && M.rows() == M.cols() && A.rows() == M.rows(), ErrorCode::InvalidArgument,
          "eigenproblem dimension mismatch");
  require(opt.k >= 1, ErrorCode::InvalidArgument, "need k >= 1 eigenpairs");
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd Y;
  if (deflation && deflation->cols() > 0) Y = m_orthonormalize(*deflation, M);
  const bool deflate = Y.cols() > 0;
  double sigma = opt.sigma ? *opt.sigma : (deflate ? -1e-6 * trace_ratio(A, M) : 0.0);

  const bool dense = opt.method == EigenMethod::Dense || (opt.method == EigenMethod::Auto && n <= 600);
  if (dense) {
    // Without an explicit shift all eigenvalues above the deflated space are eligible.
    return dense_eigs(A, M, opt, deflate ? &Y : nullptr, opt.sigma ? sigma : -std::numeric_limits<double>::infinity());
  }

  SymmetricSolver solver;
  for (int attempt = 0; attempt < 5; ++attempt) {
    const SpMat K = A - sigma * M;
    if (solver.factorize(K)) break;
    // Shift hit the spectrum: move it down.
    sigma = sigma - (1e-6 + 1e-3 * std::abs(sigma)) * trace_ratio(A, M) * (attempt + 1);
  }
  require(solver.ok(), ErrorCode::Solver, "shifted factorization failed for every shift tried");

  const Eigen::MatrixXd MY = deflate ? Eigen::MatrixXd(M * Y) : Eigen::MatrixXd();
  const Apply op = [&](const Eigen::VectorXd& x) { return solver.solve(M * x); };
  const Apply inner = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(M * x); };
  EigenResult r;
  auto to_result = [&](const LanczosResult& lr) {
    std::vector<std::pair<double, Eigen::Index>> order;
    for (Eigen::Index i = 0; i < lr.theta.size(); ++i) order.emplace_back(sigma + 1.0 / lr.theta[i], i);
    std::sort(order.begin(), order.end());
    r.values.resize(opt.k);
    r.vectors.resize(n, opt.k);
    for (int i = 0; i < opt.k; ++i) {
      r.values[i] = order[static_cast<std::size_t>(i)].first;
      r.vectors.col(i) = lr.vectors.col(order[static_cast<std::size_t>(i)].second);
    }
    r.iterations = lr.steps;
    r.sigma = sigma;
    fill_residuals(A, M, r);
  };
  const auto accept = [&](const LanczosResult& lr) {
    to_result(lr);
    return (r.residuals.array() <= opt.tol).all();
  };
  const LanczosResult lr = lanczos(op, inner, n, opt.k, opt.tol, opt.max_basis, opt.seed,
                                   deflate ? &Y : nullptr, deflate ? &MY : nullptr, true, accept);
  to_result(lr);
  return r;
}

Eigen::MatrixXd rigid_body_basis(const FESpace& space, const SpMat& M) {
  Vec2 c{};
  for (int n = 0; n < space.num_nodes(); ++n) c += space.node_position(n);
  c *= 1.0 / space.num_nodes();
  Eigen::MatrixXd Y(space.num_dofs(), 3);
  Y.col(0) = space.interpolate([](const Vec2&) { return Vec2{1.0, 0.0}; });
  Y.col(1) = space.interpolate([](const Vec2&) { return Vec2{0.0, 1.0}; });
  Y.col(2) = space.interpolate([&](const Vec2& x) { return Vec2{-(x.y - c.y), x.x - c.x}; });
  return m_orthonormalize(Y, M);
}

Eigen::VectorXd solve_deflated(const SpMat& A, const SpMat& M, const Eigen::MatrixXd& Yin, const Eigen::VectorXd& f,
                               double tol) {
  const Eigen::MatrixXd Y = m_orthonormalize(Yin, M);
  const Eigen::MatrixXd MY = M * Y;
  // Remove the part of the load that the kernel cannot balance.
  const Eigen::VectorXd g = f - MY * (Y.transpose() * f);
  auto project = [&](Eigen::VectorXd x) {
    x -= Y * (MY.transpose() * x);
    return x;
  };
  const SpMat K = A + (1e-6 * trace_ratio(A, M)) * M;
  SymmetricSolver pre;
  require(pre.factorize(K), ErrorCode::Solver, "preconditioner factorization failed");
  const double gn = g.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(f.size());
  if (gn == 0.0) return x;
  Eigen::VectorXd r = g;
  Eigen::VectorXd z = project(pre.solve(r));
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd q = A * p;
    const double alpha = rz / p.dot(q);
    x += alpha * p;
    r -= alpha * q;
    if (r.norm() <= tol * gn) return project(x);
    z = project(pre.solve(r));
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  fail(ErrorCode::Solver, "deflated solve did not converge");
}

Condition condition_estimate(const SpMat& B, ConditionMethod method) {
  Condition c;
  const Eigen::Index n = B.rows();
  require(n > 0 && B.cols() == n, ErrorCode::InvalidArgument, "condition estimate needs a square matrix");
  const bool dense = method == ConditionMethod::Dense || (method == ConditionMethod::Auto && n <= 2000);
  if (dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(B), Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, ErrorCode::Solver, "dense symmetric eigensolver failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    c.indefinite = ev[0] < 0.0 && ev[n - 1] > 0.0;
    c.lambda_min = ev.cwiseAbs().minCoeff();
    c.lambda_max = ev.cwiseAbs().maxCoeff();
  } else {
    // Extreme magnitudes from both ends of the spectrum of B and of B^-1.
    auto extremes = [&](const Apply& op, unsigned seed) {
      const Apply neg = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(-op(x)); };
      const double hi = lanczos(op, {}, n, 1, 1e-6, 300, seed, nullptr, nullptr, false, {}).theta[0];
      const double lo = -lanczos(neg, {}, n, 1, 1e-6, 300, seed + 1, nullptr, nullptr, false, {}).theta[0];
      return std::pair{lo, hi};
    };
    const auto [bl, bh] = extremes([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(B * x); }, 7u);
    c.lambda_max = std::max(std::abs(bl), std::abs(bh));
    c.indefinite = bl < 0.0 && bh > 0.0;
    SymmetricSolver solver;
    if (!solver.factorize(B)) {
      c.lambda_min = 0.0;
    } else {
      const auto [il, ih] = extremes([&](const Eigen::VectorXd& x) { return solver.solve(x); }, 11u);
      const double th = std::max(std::abs(il), std::abs(ih));
      c.lambda_min = th > 0 && std::isfinite(th) ? 1.0 / th : 0.0;
    }
  }
  if (!(c.lambda_min > 0) || !(c.lambda_max > 0)) {
    c.singular = true;
    c.kappa = std::numeric_limits<double>::infinity();
    c.log10 = 300.0;
    return c;
  }
  c.log10 = std::log10(c.lambda_max) - std::log10(c.lambda_min);
  c.kappa = c.log10 >= 300.0 ? std::numeric_limits<double>::infinity() : std::pow(10.0, c.log10);
  c.singular = c.log10 >= 300.0;
  return c;
}

}  // namespace cutfem
