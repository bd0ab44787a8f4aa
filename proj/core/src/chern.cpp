#include "gkflow/chern.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gkflow/complex_structure.hpp"
#include "gkflow/connection.hpp"
#include "gkflow/forms.hpp"

namespace gkflow {

namespace {
constexpr double kTorsionSign = -1.0;  // coefficient of ½ dω(J·,·,·)
constexpr double kRhoSign = 1.0;       // coefficient of ½ tr(J∘R^C)
using cd = std::complex<double>;
}  // namespace

TensorField chern_connection(const Metric& g, const TensorField& j) {
  const int n = g.dim();
  TensorField lc = levi_civita(g);
  TensorField lower = contract_slot(lc, 2, g.tensor(), Index::Lower);
  TensorField dw = exterior_derivative(kahler_form(g, j, 1e300));
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  for (std::size_t pt = 0; pt < g.num_points(); ++pt) {
    auto jv = j.at(pt);
    auto dv = dw.at(pt);
    auto o = lower.at(pt);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double acc = 0.0;
          for (int p = 0; p < n; ++p) acc += jv[i * n + p] * dv[p * n2 + a * n + b];
          o[(i * n + a) * n + b] += kTorsionSign * 0.5 * acc;
        }
  }
  return contract_slot(lower, 2, g.inverse(), Index::Upper);
}

TensorField chern_ricci_form(const Metric& g, const TensorField& j) {
  const int n = g.dim();
  TensorField rc = riemann_from_connection(chern_connection(g, j));
  TensorField rho = TensorField::form(g.backend(), 2);
  for (std::size_t pt = 0; pt < g.num_points(); ++pt) {
    auto rv = rc.at(pt);
    auto jv = j.at(pt);
    auto o = rho.at(pt);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
          for (int l = 0; l < n; ++l) acc += jv[l * n + a] * rv[((x * n + y) * n + a) * n + l];
        o[x * n + y] = kRhoSign * 0.5 * acc;
      }
  }
  return rho;
}

Eigen::MatrixXcd unitary_frame(std::span<const double> g, std::span<const double> j, int dim) {
  const int m = dim / 2;
  Eigen::MatrixXd gm(dim, dim), a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      gm(r, c) = g[r * dim + c];
      a(r, c) = j[c * dim + r];  // (JV)^r = V^c J_c^r
    }
  const cd I(0.0, 1.0);
  Eigen::MatrixXcd proj = 0.5 * (Eigen::MatrixXcd::Identity(dim, dim) - I * a.cast<cd>());
  auto herm = [&](const Eigen::VectorXcd& u, const Eigen::VectorXcd& w) {
    return (u.transpose() * gm.cast<cd>() * w.conjugate())(0, 0);
  };
  Eigen::MatrixXcd frame(dim, m);
  std::vector<Eigen::VectorXcd> cand;
  for (int c = 0; c < dim; ++c) cand.push_back(proj.col(c));
  for (int k = 0; k < m; ++k) {
    int best = -1;
    double best_norm = -1.0;
    for (int c = 0; c < dim; ++c) {
      Eigen::VectorXcd u = cand[c];
      for (int q = 0; q < k; ++q) u -= herm(u, frame.col(q)) * frame.col(q);
      const double nn = std::real(herm(u, u));
      if (nn > best_norm * (1.0 + 1e-12)) {
        best_norm = nn;
        best = c;
      }
    }
    Eigen::VectorXcd u = cand[best];
    for (int q = 0; q < k; ++q) u -= herm(u, frame.col(q)) * frame.col(q);
    u /= std::sqrt(std::real(herm(u, u)));
    int piv = 0;
    for (int r = 1; r < dim; ++r)
      if (std::abs(u(r)) > std::abs(u(piv)) * (1.0 + 1e-12)) piv = r;
    u *= std::conj(u(piv)) / std::abs(u(piv));
    frame.col(k) = u;
  }
  return frame;
}

double ChernQuantities::static_residual() const {
  double w = 0.0;
  for (const auto& p : points) w = std::max(w, (p.s - p.q).cwiseAbs().maxCoeff());
  return w;
}

double ChernQuantities::surface_identity_residual() const {
  double w = 0.0;
  for (const auto& p : points) {
    const int m = static_cast<int>(p.q.rows());
    Eigen::MatrixXcd d = p.q - 0.5 * p.t_norm2 * Eigen::MatrixXcd::Identity(m, m);
    w = std::max(w, d.cwiseAbs().maxCoeff());
  }
  return w;
}

ChernQuantities chern_quantities(const Metric& g, const TensorField& j, double integrability_tol,
                                 std::span<const std::size_t> points) {
  const int n = g.dim();
  if (n % 2) throw std::invalid_argument("chern_quantities: odd real dimension");
  std::vector<std::size_t> sel(points.begin(), points.end());
  if (sel.empty()) {
    sel.resize(g.num_points());
    for (std::size_t p = 0; p < sel.size(); ++p) sel[p] = p;
  }
  double nij = 0.0;
  {
    TensorField nt = nijenhuis(j);
    for (std::size_t p : sel)
      for (double v : nt.at(p)) nij = std::max(nij, std::abs(v));
  }
  if (nij > integrability_tol) {
    std::ostringstream os;
    os << "chern_quantities: J is not integrable (Nijenhuis " << nij << ")";
    throw IncompatibleStructureError(os.str(), nij);
  }
  const int m = n / 2;
  TensorField gamma = chern_connection(g, j);
  TensorField rc = riemann_from_connection(gamma);
  TensorField tor = torsion(gamma);
  ChernQuantities out;
  out.q_min_eigenvalue = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd gm(n, n);
  for (std::size_t pt : sel) {
    if (pt >= g.num_points()) throw std::out_of_range("chern_quantities: point index out of range");
    auto gv = g.tensor().at(pt);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) gm(r, c) = gv[r * n + c];
    Eigen::MatrixXcd v = unitary_frame(gv, j.at(pt), n);
    Eigen::MatrixXcd vb = v.conjugate();
    Eigen::MatrixXcd gvb = gm.cast<cd>() * vb;  // column l: g_{d e} conj(v_l)^e
    auto rv = rc.at(pt);
    auto tv = tor.at(pt);
    ChernPoint cp;
    cp.s = Eigen::MatrixXcd::Zero(m, m);
    cp.q = Eigen::MatrixXcd::Zero(m, m);
    cp.t.assign(static_cast<std::size_t>(m) * m * m, cd(0.0));
    // S_{k l̄} = sum_i g(R(v_i, v̄_i) v_k, v̄_l)
    for (int i = 0; i < m; ++i) {
      // endomorphism R(v_i, v̄_i): E^d_c
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const cd w = v(a, i) * vb(b, i);
          if (w == cd(0.0)) continue;
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) e(d, c) += w * rv[((a * n + b) * n + c) * n + d];
        }
      Eigen::MatrixXcd ev = e * v;  // columns R(v_i, v̄_i) v_k
      cp.s += ev.transpose() * gvb;
    }
    // T_{i k n̄} = g(T(v_i, v_k), v̄_n)
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) {
        Eigen::VectorXcd w = Eigen::VectorXcd::Zero(n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const cd c = v(a, i) * v(b, k);
            if (c == cd(0.0)) continue;
            for (int d = 0; d < n; ++d) w(d) += c * tv[(a * n + b) * n + d];
          }
        Eigen::VectorXcd tl = gvb.transpose() * w;
        for (int q = 0; q < m; ++q) cp.t[(i * m + k) * m + q] = tl(q);
      }
    for (int i = 0; i < m; ++i)
      for (int jj = 0; jj < m; ++jj) {
        cd acc = 0.0;
        for (int k = 0; k < m; ++k)
          for (int q = 0; q < m; ++q) acc += cp.t[(i * m + k) * m + q] * std::conj(cp.t[(jj * m + k) * m + q]);
        cp.q(i, jj) = acc;
      }
    for (const auto& z : cp.t) cp.t_norm2 += std::norm(z);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        for (int q = 0; q < m; ++q)
          out.torsion_antisymmetry_defect =
              std::max(out.torsion_antisymmetry_defect,
                       std::abs(cp.t[(i * m + k) * m + q] + cp.t[(k * m + i) * m + q]));
    out.q_hermitian_defect = std::max(out.q_hermitian_defect, (cp.q - cp.q.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (cp.q + cp.q.adjoint()));
    out.q_min_eigenvalue = std::min(out.q_min_eigenvalue, es.eigenvalues().minCoeff());
    out.points.push_back(std::move(cp));
  }
  return out;
}

}  // namespace gkflow
