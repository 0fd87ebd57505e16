#include "forms.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace cutfem {

void Material::validate() const {
  require(E > 0 && std::isfinite(E), ErrorCode::InvalidArgument, "Young's modulus must be positive");
  require(rho > 0 && std::isfinite(rho), ErrorCode::InvalidArgument, "density must be positive");
  require(nu >= 0 && nu < 0.5, ErrorCode::InvalidArgument, "Poisson ratio must lie in [0, 0.5)");
}

Stabilization Stabilization::defaults(const Material& m, int p) {
  Stabilization s;
  s.beta = 1000.0 * p * p;
  s.gamma_m = m.rho * 1e-4;
  s.gamma_a = (2.0 * m.mu() + m.lambda()) * 1e-4;
  return s;
}

void Pattern::add_group(std::span<const int> dofs) {
  for (int c : dofs) {
    auto& col = cols_[static_cast<std::size_t>(c)];
    col.insert(col.end(), dofs.begin(), dofs.end());
    if (col.size() > 4096) {
      std::sort(col.begin(), col.end());
      col.erase(std::unique(col.begin(), col.end()), col.end());
    }
  }
}

SpMat Pattern::build() const {
  const auto n = static_cast<Eigen::Index>(cols_.size());
  SpMat m(n, n);
  Eigen::VectorXi sizes(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    auto& col = cols_[static_cast<std::size_t>(c)];
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
    sizes[c] = static_cast<int>(col.size());
  }
  m.reserve(sizes);
  for (Eigen::Index c = 0; c < n; ++c)
    for (int r : cols_[static_cast<std::size_t>(c)]) m.insert(r, c) = 0.0;
  m.makeCompressed();
  return m;
}

void scatter(SpMat& m, std::span<const int> dofs, const Eigen::MatrixXd& local) {
  const int* inner = m.innerIndexPtr();
  const int* outer = m.outerIndexPtr();
  double* values = m.valuePtr();
  for (std::size_t b = 0; b < dofs.size(); ++b) {
    const int c = dofs[b];
    const int* begin = inner + outer[c];
    const int* end = inner + outer[c + 1];
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      const double v = local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (v == 0.0) continue;
      const int* it = std::lower_bound(begin, end, dofs[a]);
      if (it == end || *it != dofs[a]) fail(ErrorCode::Internal, "scatter outside the sparsity pattern");
      values[it - inner] += v;
    }
  }
}

namespace {

std::vector<int> face_dofs(const FESpace& space, const Face& f) {
  std::vector<int> d = space.cell_dofs(f.left);
  const std::vector<int> r = space.cell_dofs(f.right);
  d.insert(d.end(), r.begin(), r.end());
  return d;
}

}  // namespace

Eigen::MatrixXd strain_matrix(const Eigen::MatrixXd& grad) {
  const Eigen::Index n = grad.cols();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    B(0, 2 * k) = grad(0, k);
    B(1, 2 * k + 1) = grad(1, k);
    B(2, 2 * k) = grad(1, k);
    B(2, 2 * k + 1) = grad(0, k);
  }
  return B;
}

Eigen::MatrixXd traction_matrix(const Eigen::MatrixXd& grad, const Vec2& n, const Material& mat) {
  const Eigen::Matrix3d D = constitutive(mat);
  const Eigen::MatrixXd B = strain_matrix(grad);
  const Eigen::MatrixXd S = D * B;  // stress (sxx, syy, sxy) per DOF
  Eigen::MatrixXd T(2, S.cols());
  T.row(0) = n.x * S.row(0) + n.y * S.row(2);
  T.row(1) = n.x * S.row(2) + n.y * S.row(1);
  return T;
}

Eigen::MatrixXd vector_basis(const Eigen::VectorXd& phi) {
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(2, 2 * phi.size());
  for (Eigen::Index k = 0; k < phi.size(); ++k) {
    N(0, 2 * k) = phi[k];
    N(1, 2 * k + 1) = phi[k];
  }
  return N;
}

Eigen::Matrix3d constitutive(const Material& mat) {
  const double l = mat.lambda();
  const double m = mat.mu();
  Eigen::Matrix3d D;
  D << l + 2 * m, l, 0, l, l + 2 * m, 0, 0, 0, m;
  return D;
}

SpMat bulk_pattern(const FESpace& space) {
  Pattern pat(space.num_dofs());
  const auto& mesh = space.mesh();
  for (std::size_t c = 0; c < mesh.cells().size(); ++c) pat.add_group(space.cell_dofs(static_cast<int>(c)));
  for (const Face& f : mesh.faces())
    if (f.stabilized) pat.add_group(face_dofs(space, f));
  return pat.build();
}

CellRules build_cell_rules(const FESpace& space, int q_volume, int q_boundary) {
  const int p = space.order();
  CellRules r;
  r.q_volume = q_volume >= 0 ? q_volume : 2 * p;
  r.q_boundary = q_boundary >= 0 ? q_boundary : (space.family() == ElementFamily::Quad ? 4 * p : 2 * p);
  const auto& mesh = space.mesh();
  r.cells.reserve(mesh.cells().size());
  for (std::size_t c = 0; c < mesh.cells().size(); ++c)
    r.cells.push_back(cell_rule(mesh, static_cast<int>(c), r.q_volume, r.q_boundary));
  return r;
}

SpMat assemble_mass(const FESpace& space, const CellRules& rules, double rho) {
  SpMat m = bulk_pattern(space);
  const auto& cells = space.mesh().cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const int ci = static_cast<int>(c);
    const RefBasis& rb = space.basis(ci);
    const QuadRule& q = rules.cells[c].volume;
    Eigen::MatrixXd ms = Eigen::MatrixXd::Zero(rb.size(), rb.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
      const Eigen::VectorXd phi = rb.eval(q.points[k].x, q.points[k].y);
      ms.noalias() += (rho * q.weights[k]) * phi * phi.transpose();
    }
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * rb.size(), 2 * rb.size());
    for (int a = 0; a < rb.size(); ++a)
      for (int b = 0; b < rb.size(); ++b) {
        local(2 * a, 2 * b) = ms(a, b);
        local(2 * a + 1, 2 * b + 1) = ms(a, b);
      }
    scatter(m, space.cell_dofs(ci), local);
  }
  return m;
}

SpMat assemble_ghost_penalty(const FESpace& space, FaceSet which) {
  SpMat m = bulk_pattern(space);
  const auto& mesh = space.mesh();
  const int p = space.order();
  const double h = mesh.h();
  const Gauss1D& g = gauss_1d(p + 1);
  const int nb = space.nodes_per_cell();
  std::vector<double> dl(static_cast<std::size_t>(nb));
  std::vector<double> dr(static_cast<std::size_t>(nb));
  for (const Face& f : mesh.faces()) {
    if (!f.stabilized) continue;
    if (which == FaceSet::DirichletOnly && !f.dirichlet) continue;
    if (which == FaceSet::NeumannOnly && f.dirichlet) continue;
    const ActiveCell& L = mesh.cells()[static_cast<std::size_t>(f.left)];
    const ActiveCell& R = mesh.cells()[static_cast<std::size_t>(f.right)];
    const Vec2 la = mesh.to_local(f.left, f.a);
    const Vec2 lb = mesh.to_local(f.left, f.b);
    const Vec2 shift{static_cast<double>(L.i - R.i), static_cast<double>(L.j - R.j)};
    const double len = norm(f.b - f.a);
    // Scalar jump matrix, replicated per component below.
    Eigen::MatrixXd js = Eigen::MatrixXd::Zero(2 * nb, 2 * nb);
    Eigen::VectorXd jump(2 * nb);
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      const Vec2 pl = la + (0.5 * (g.x[k] + 1.0)) * (lb - la);
      const Vec2 pr = pl + shift;
      const double w = 0.5 * g.w[k] * len;
      for (int l = 1; l <= p; ++l) {
        space.normal_derivative(f.left, pl, f.local_normal, l, dl);
        space.normal_derivative(f.right, pr, f.local_normal, l, dr);
        for (int a = 0; a < nb; ++a) {
          jump[a] = -dl[static_cast<std::size_t>(a)];
          jump[nb + a] = dr[static_cast<std::size_t>(a)];
        }
        js.noalias() += (w * std::pow(h, 2 * l + 1)) * jump * jump.transpose();
      }
    }
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(4 * nb, 4 * nb);
    for (int a = 0; a < 2 * nb; ++a)
      for (int b = 0; b < 2 * nb; ++b) {
        local(2 * a, 2 * b) = js(a, b);
        local(2 * a + 1, 2 * b + 1) = js(a, b);
      }
    scatter(m, face_dofs(space, f), local);
  }
  return m;
}

double ghost_penalty_value(const FESpace& space, const Eigen::VectorXd& v, FaceSet which) {
  require(v.size() == space.num_dofs(), ErrorCode::InvalidArgument, "vector size does not match the space");
  const auto& mesh = space.mesh();
  const int p = space.order();
  const double h = mesh.h();
  const Gauss1D& g = gauss_1d(p + 1);
  const int nb = space.nodes_per_cell();
  std::vector<double> dl(static_cast<std::size_t>(nb));
  std::vector<double> dr(static_cast<std::size_t>(nb));
  double sum = 0.0;
  for (const Face& f : mesh.faces()) {
    if (!f.stabilized) continue;
    if (which == FaceSet::DirichletOnly && !f.dirichlet) continue;
    if (which == FaceSet::NeumannOnly && f.dirichlet) continue;
    const ActiveCell& L = mesh.cells()[static_cast<std::size_t>(f.left)];
    const ActiveCell& R = mesh.cells()[static_cast<std::size_t>(f.right)];
    const Vec2 la = mesh.to_local(f.left, f.a);
    const Vec2 lb = mesh.to_local(f.left, f.b);
    const Vec2 shift{static_cast<double>(L.i - R.i), static_cast<double>(L.j - R.j)};
    const double len = norm(f.b - f.a);
    const auto nl = space.cell_nodes(f.left);
    const auto nr = space.cell_nodes(f.right);
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      const Vec2 pl = la + (0.5 * (g.x[k] + 1.0)) * (lb - la);
      const Vec2 pr = pl + shift;
      const double w = 0.5 * g.w[k] * len;
      for (int l = 1; l <= p; ++l) {
        space.normal_derivative(f.left, pl, f.local_normal, l, dl);
        space.normal_derivative(f.right, pr, f.local_normal, l, dr);
        for (int c = 0; c < 2; ++c) {
          double jl = 0.0, jr = 0.0;
          for (int a = 0; a < nb; ++a) {
            jl += dl[static_cast<std::size_t>(a)] * v[FESpace::dof(nl[static_cast<std::size_t>(a)], c)];
            jr += dr[static_cast<std::size_t>(a)] * v[FESpace::dof(nr[static_cast<std::size_t>(a)], c)];
          }
          sum += w * std::pow(h, 2 * l + 1) * (jr - jl) * (jr - jl);
        }
      }
    }
  }
  return sum;
}

SpMat assemble_elastic(const FESpace& space, const CellRules& rules, const Material& mat) {
  SpMat m = bulk_pattern(space);
  const Eigen::Matrix3d D = constitutive(mat);
  const auto& cells = space.mesh().cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const int ci = static_cast<int>(c);
    const QuadRule& q = rules.cells[c].volume;
    const int n2 = 2 * space.nodes_per_cell();
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n2, n2);
    for (std::size_t k = 0; k < q.size(); ++k) {
      const BasisPoint bp = space.evaluate(ci, q.points[k]);
      const Eigen::MatrixXd B = strain_matrix(bp.grad);
      local.noalias() += q.weights[k] * (B.transpose() * D * B);
    }
    scatter(m, space.cell_dofs(ci), local);
  }
  return m;
}

SpMat assemble_nitsche_boundary(const FESpace& space, const CellRules& rules, const Material& mat, double beta) {
  require(beta > 0, ErrorCode::InvalidArgument, "Nitsche penalty must be positive");
  SpMat m = bulk_pattern(space);
  const double h = space.mesh().h();
  const double mu = mat.mu();
  const double lam = mat.lambda();
  const auto& cells = space.mesh().cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const QuadRule& q = rules.cells[c].boundary;
    if (q.size() == 0) continue;
    const int ci = static_cast<int>(c);
    const int n2 = 2 * space.nodes_per_cell();
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n2, n2);
    bool any = false;
    for (std::size_t k = 0; k < q.size(); ++k) {
      if (q.kinds[k] != SegmentKind::DomainDirichlet) continue;
      any = true;
      const Vec2 n = q.normals[k];
      const BasisPoint bp = space.evaluate(ci, q.points[k]);
      const Eigen::MatrixXd N = vector_basis(bp.value);
      const Eigen::MatrixXd T = traction_matrix(bp.grad, n, mat);
      Eigen::Matrix2d P;
      P << 2 * mu + lam * n.x * n.x, lam * n.x * n.y, lam * n.x * n.y, 2 * mu + lam * n.y * n.y;
      local.noalias() -= q.weights[k] * (N.transpose() * T + T.transpose() * N);
      local.noalias() += (q.weights[k] * beta / h) * (N.transpose() * P * N);
    }
    if (any) scatter(m, space.cell_dofs(ci), local);
  }
  return m;
}

Eigen::VectorXd assemble_load(const FESpace& space, const CellRules& rules, const Material& mat, double beta,
                              const LoadData& data) {
  Eigen::VectorXd L = Eigen::VectorXd::Zero(space.num_dofs());
  const auto& mesh = space.mesh();
  const double h = mesh.h();
  const double mu = mat.mu();
  const double lam = mat.lambda();
  for (std::size_t c = 0; c < mesh.cells().size(); ++c) {
    const int ci = static_cast<int>(c);
    const int n2 = 2 * space.nodes_per_cell();
    Eigen::VectorXd local = Eigen::VectorXd::Zero(n2);
    if (data.f) {
      const QuadRule& q = rules.cells[c].volume;
      for (std::size_t k = 0; k < q.size(); ++k) {
        const Vec2 f = data.f(mesh.to_physical(ci, q.points[k]));
        const Eigen::VectorXd phi = space.basis(ci).eval(q.points[k].x, q.points[k].y);
        for (Eigen::Index a = 0; a < phi.size(); ++a) {
          local[2 * a] += q.weights[k] * phi[a] * f.x;
          local[2 * a + 1] += q.weights[k] * phi[a] * f.y;
        }
      }
    }
    const QuadRule& qb = rules.cells[c].boundary;
    for (std::size_t k = 0; k < qb.size(); ++k) {
      const Vec2 x = mesh.to_physical(ci, qb.points[k]);
      if (qb.kinds[k] == SegmentKind::DomainNeumann) {
        if (!data.g_n) continue;
        const Vec2 g = data.g_n(x, qb.normals[k]);
        const Eigen::VectorXd phi = space.basis(ci).eval(qb.points[k].x, qb.points[k].y);
        for (Eigen::Index a = 0; a < phi.size(); ++a) {
          local[2 * a] += qb.weights[k] * phi[a] * g.x;
          local[2 * a + 1] += qb.weights[k] * phi[a] * g.y;
        }
      } else if (qb.kinds[k] == SegmentKind::DomainDirichlet && data.g_d) {
        const Vec2 g = data.g_d(x);
        const Vec2 n = qb.normals[k];
        const BasisPoint bp = space.evaluate(ci, qb.points[k]);
        const Eigen::MatrixXd N = vector_basis(bp.value);
        const Eigen::MatrixXd T = traction_matrix(bp.grad, n, mat);
        const Eigen::Vector2d gv(g.x, g.y);
        const double gn = dot(g, n);
        const Eigen::Vector2d pg(2 * mu * g.x + lam * gn * n.x, 2 * mu * g.y + lam * gn * n.y);
        local.noalias() -= qb.weights[k] * (T.transpose() * gv);
        local.noalias() += (qb.weights[k] * beta / h) * (N.transpose() * pg);
      }
    }
    const auto dofs = space.cell_dofs(ci);
    for (std::size_t a = 0; a < dofs.size(); ++a) L[dofs[a]] += local[static_cast<Eigen::Index>(a)];
  }
  return L;
}

SpMat stabilized_stiffness(const FESpace& space, const SpMat& a, const Stabilization& stab) {
  if (!stab.ghost) return a;
  const double h = space.mesh().h();
  if (stab.variant == GhostVariant::Uniform) {
    return a + (stab.gamma_a / (h * h)) * assemble_ghost_penalty(space, FaceSet::All);
  }
  return a + stab.gamma_a * assemble_ghost_penalty(space, FaceSet::NeumannOnly) +
         (stab.gamma_a / (h * h)) * assemble_ghost_penalty(space, FaceSet::DirichletOnly);
}

System assemble_system(const FESpace& space, const CellRules& rules, const Material& mat, const Stabilization& stab,
                       const LoadData& data) {
  mat.validate();
  require(stab.beta > 0, ErrorCode::InvalidArgument, "Nitsche penalty must be positive");
  System s;
  s.M = assemble_mass(space, rules, mat.rho);
  s.a = assemble_elastic(space, rules, mat);
  s.J = assemble_ghost_penalty(space, FaceSet::All);
  s.Mh = stab.ghost ? SpMat(s.M + stab.gamma_m * s.J) : s.M;
  s.Ah = stabilized_stiffness(space, s.a, stab);
  if (space.mesh().boundary().has_dirichlet()) s.Ah += assemble_nitsche_boundary(space, rules, mat, stab.beta);
  s.L = assemble_load(space, rules, mat, stab.beta, data);
  return s;
}

double energy(const SpMat& a, const Eigen::VectorXd& u) { return u.dot(a * u); }

namespace {

template <class F>
double integrate_cells(const FESpace& space, const CellRules& rules, F&& integrand) {
  double s = 0.0;
  for (std::size_t c = 0; c < rules.cells.size(); ++c) {
    const QuadRule& q = rules.cells[c].volume;
    for (std::size_t k = 0; k < q.size(); ++k) s += q.weights[k] * integrand(static_cast<int>(c), q.points[k]);
  }
  (void)space;
  return s;
}

}  // namespace

double l2_error(const FESpace& space, const CellRules& rules, const Eigen::VectorXd& u, const VectorField& exact) {
  const auto& mesh = space.mesh();
  const double s = integrate_cells(space, rules, [&](int c, const Vec2& loc) {
    const Vec2 d = space.value(u, c, loc) - exact(mesh.to_physical(c, loc));
    return dot(d, d);
  });
  return std::sqrt(std::max(0.0, s));
}

double l2_norm(const FESpace& space, const CellRules& rules, const Eigen::VectorXd& u) {
  const double s = integrate_cells(space, rules, [&](int c, const Vec2& loc) {
    const Vec2 v = space.value(u, c, loc);
    return dot(v, v);
  });
  return std::sqrt(std::max(0.0, s));
}

Eigen::Vector3d stress(const FESpace& space, const Material& mat, const Eigen::VectorXd& u, int cell, const Vec2& local) {
  const Eigen::Matrix2d g = space.gradient(u, cell, local);
  const Eigen::Vector3d eps(g(0, 0), g(1, 1), g(0, 1) + g(1, 0));
  return constitutive(mat) * eps;
}

double von_mises(const Eigen::Vector3d& s, double nu) {
  const double sxx = s[0];
  const double syy = s[1];
  const double sxy = s[2];
  const double szz = nu * (sxx + syy);
  const double j2 = 0.5 * ((sxx - syy) * (sxx - syy) + (syy - szz) * (syy - szz) + (szz - sxx) * (szz - sxx)) +
                    3.0 * sxy * sxy;
  return std::sqrt(std::max(0.0, j2));
}

}  // namespace cutfem
