#include "bpgd/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace bpgd {

namespace {

void require_symmetric(const Mat& M, const char* name) {
  const double scale = 1.0 + M.cwiseAbs().maxCoeff();
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
}

double min_eigenvalue(const Mat& M) {
  Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat affine_eval(const std::vector<Mat>& coeff, const Vec& p) {
  Mat out = coeff[0];
  for (int i = 0; i < p.size(); ++i) out += p[i] * coeff[i + 1];
  return out;
}

}  // namespace

Mat ParametrizedModel::eval_A(const Vec& p) const { return affine_eval(A, p); }
Mat ParametrizedModel::eval_B(const Vec& p) const { return affine_eval(B, p); }

Vec ParametrizedModel::eval_e(const Vec& p) const {
  Vec out = e[0];
  for (int i = 0; i < p.size(); ++i) out += p[i] * e[i + 1];
  return out;
}

ParametrizedModel make_model(int n, int m, int l, int N, Vec x0,
                             std::vector<Mat> A, std::vector<Mat> B, std::vector<Vec> e,
                             Mat Q, Mat R, Mat S) {
  if (n <= 0 || m <= 0 || l < 0 || N <= 0) {
    throw std::invalid_argument("model: n, m, N must be positive and l nonnegative");
  }
  if (x0.size() != n) throw std::invalid_argument("model: x0 must have length n");
  const auto check_list = [&](const auto& list, int rows, int cols, const char* name) {
    if (static_cast<int>(list.size()) != l + 1) {
      throw std::invalid_argument(std::string("model: ") + name + " needs exactly l+1 coefficients");
    }
    for (const auto& M : list) {
      if (M.rows() != rows || M.cols() != cols) {
        throw std::invalid_argument(std::string("model: ") + name + " coefficient dimension mismatch");
      }
    }
  };
  check_list(A, n, n, "A");
  check_list(B, n, m, "B");
  if (static_cast<int>(e.size()) != l + 1) {
    throw std::invalid_argument("model: e needs exactly l+1 coefficients");
  }
  for (const auto& v : e) {
    if (v.size() != n) throw std::invalid_argument("model: e coefficient dimension mismatch");
  }
  if (Q.rows() != n || Q.cols() != n || S.rows() != n || S.cols() != n) {
    throw std::invalid_argument("model: Q and S must be n x n");
  }
  if (R.rows() != m || R.cols() != m) throw std::invalid_argument("model: R must be m x m");
  require_symmetric(Q, "Q");
  require_symmetric(R, "R");
  require_symmetric(S, "S");
  if (min_eigenvalue(R) <= 0) throw std::invalid_argument("model: R must be positive definite");
  if (min_eigenvalue(Q) < -1e-10) throw std::invalid_argument("model: Q must be positive semidefinite");
  if (min_eigenvalue(S) < -1e-10) throw std::invalid_argument("model: S must be positive semidefinite");

  ParametrizedModel model;
  model.n = n;
  model.m = m;
  model.l = l;
  model.N = N;
  model.x0 = std::move(x0);
  model.A = std::move(A);
  model.B = std::move(B);
  model.e = std::move(e);
  model.Q = std::move(Q);
  model.R = std::move(R);
  model.S = std::move(S);
  return model;
}

ParametrizedModel special_case(const Mat& A, const Mat& B, const Mat& E,
                               const Mat& Q, const Mat& R, const Mat& S,
                               int N, const Vec& x0) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  const int l = static_cast<int>(E.cols());
  if (E.rows() != n) throw std::invalid_argument("special_case: E must have n rows");

  std::vector<Mat> As(l + 1, Mat::Zero(n, n));
  std::vector<Mat> Bs(l + 1, Mat::Zero(n, m));
  std::vector<Vec> es(l + 1, Vec::Zero(n));
  As[0] = A;
  Bs[0] = B;
  for (int i = 0; i < l; ++i) es[i + 1] = E.col(i);

  ParametrizedModel model = make_model(n, m, l, N, x0, std::move(As), std::move(Bs),
                                       std::move(es), Q, R, S);
  model.analytic_param_gradient = true;
  model.E = E;
  return model;
}

CondensedQP condense(const ParametrizedModel& model, const Vec& p) {
  if (p.size() != model.l) throw std::invalid_argument("condense: p must have length l");
  const int n = model.n, m = model.m, N = model.N;
  const Mat A = model.eval_A(p);
  const Mat B = model.eval_B(p);
  const Vec e = model.eval_e(p);

  // Stacked prediction over x_1..x_N: x = Ahat x0 + Bhat u + ehat.
  Mat Ahat = Mat::Zero(N * n, n);
  Mat Bhat = Mat::Zero(N * n, N * m);
  Vec ehat = Vec::Zero(N * n);
  Mat Apow = A;  // A^{k+1} for row k
  for (int k = 0; k < N; ++k) {
    Ahat.middleRows(k * n, n) = Apow;
    if (k == 0) {
      Bhat.block(0, 0, n, m) = B;
      ehat.head(n) = e;
    } else {
      Bhat.block(k * n, 0, n, k * m) = A * Bhat.block((k - 1) * n, 0, n, k * m);
      Bhat.block(k * n, k * m, n, m) = B;
      ehat.segment(k * n, n) = A * ehat.segment((k - 1) * n, n) + e;
    }
    if (k + 1 < N) Apow = A * Apow;
  }

  Mat Qbar = Mat::Zero(N * n, N * n);
  for (int k = 0; k < N - 1; ++k) Qbar.block(k * n, k * n, n, n) = model.Q;
  Qbar.block((N - 1) * n, (N - 1) * n, n, n) = model.S;

  const Vec w = Ahat * model.x0 + ehat;  // state stack at u = 0

  CondensedQP qp;
  qp.H = 0.5 * (Bhat.transpose() * Qbar * Bhat);
  for (int k = 0; k < N; ++k) qp.H.block(k * m, k * m, m, m) += 0.5 * model.R;
  qp.H = 0.5 * (qp.H + qp.H.transpose()).eval();
  qp.g = Bhat.transpose() * (Qbar * w);
  qp.c = 0.5 * w.dot(Qbar * w) + 0.5 * model.x0.dot(model.Q * model.x0);
  qp.at_p = p;
  return qp;
}

double eval_cost_rollout(const ParametrizedModel& model, const Vec& p, const Vec& u) {
  if (p.size() != model.l) throw std::invalid_argument("rollout: p must have length l");
  if (u.size() != static_cast<Eigen::Index>(model.N) * model.m) {
    throw std::invalid_argument("rollout: u must have length N*m");
  }
  const Mat A = model.eval_A(p);
  const Mat B = model.eval_B(p);
  const Vec e = model.eval_e(p);

  Vec x = model.x0;
  double cost = 0.0;
  for (int k = 0; k < model.N; ++k) {
    const Vec uk = u.segment(k * model.m, model.m);
    cost += 0.5 * (x.dot(model.Q * x) + uk.dot(model.R * uk));
    x = A * x + B * uk + e;
  }
  cost += 0.5 * x.dot(model.S * x);
  return cost;
}

Vec grad_u(const CondensedQP& qp, const Vec& u) {
  if (u.size() != qp.g.size()) throw std::invalid_argument("grad_u: dimension mismatch");
  return 2.0 * (qp.H * u) + qp.g;
}

Vec grad_p(const ParametrizedModel& model, const Vec& p, const Vec& u) {
  if (p.size() != model.l) throw std::invalid_argument("grad_p: p must have length l");
  if (u.size() != static_cast<Eigen::Index>(model.N) * model.m) {
    throw std::invalid_argument("grad_p: u must have length N*m");
  }
  const int l = model.l;
  Vec g = Vec::Zero(l);
  if (l == 0) return g;

  if (model.analytic_param_gradient) {
    // grad = Ehat' Qbar (Ahat x0 + Bhat u + Ehat p), accumulated along the
    // trajectory without forming the stacked matrices.
    const Mat A = model.A[0];
    const Mat B = model.B[0];
    Vec x = model.x0;
    Mat Erow = Mat::Zero(model.n, l);
    for (int k = 1; k <= model.N; ++k) {
      const Vec uk = u.segment((k - 1) * model.m, model.m);
      x = A * x + B * uk + model.E * p;
      Erow = A * Erow + model.E;
      const Mat& W = (k == model.N) ? model.S : model.Q;
      g += Erow.transpose() * (W * x);
    }
    return g;
  }

  for (int i = 0; i < l; ++i) {
    const double h = std::max(1e-6, 1e-6 * std::abs(p[i]));
    Vec pp = p, pm = p;
    pp[i] += h;
    pm[i] -= h;
    g[i] = (condense(model, pp).eval(u) - condense(model, pm).eval(u)) / (2.0 * h);
  }
  return g;
}

}  // namespace bpgd
