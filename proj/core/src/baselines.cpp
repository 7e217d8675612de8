#include "tpgdet/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "tpgdet/errors.hpp"
#include "tpgdet/linalg.hpp"

namespace tpgdet {

void IwsoavConfig::validate(std::size_t) const {
  if (!(alpha > 0.0)) throw ConfigError("iwsoav: alpha must be > 0");
  if (!(gamma > 0.0)) throw ConfigError("iwsoav: gamma must be > 0");
  if (epsilon < 0.0 || epsilon >= 1.0) throw ConfigError("iwsoav: epsilon must be in [0,1)");
  if (theta < epsilon || theta > 2.0 - epsilon)
    throw ConfigError("iwsoav: theta must be in [epsilon, 2-epsilon]");
  if (k_itr < 1) throw ConfigError("iwsoav: k_itr must be >= 1");
  if (l_outer < 1) throw ConfigError("iwsoav: l_outer must be >= 1");
}

Vector mmse_detect(const Matrix& h, std::span<const double> y, double sigma_w2) {
  const LinearEstimator est = lmmse_matrix(h, sigma_w2 / 2.0);
  Vector s(h.cols());
  matvec(est.w, y, s);
  return hard_decision(s);
}

Trajectory plain_pg(const Matrix& a, std::span<const double> y, double gamma, double xi,
                    int t_max) {
  if (gamma < 0.0) throw ConfigError("plain_pg: gamma must be >= 0");
  if (!(xi > 0.0)) throw ConfigError("plain_pg: xi must be > 0");
  if (t_max < 1) throw ConfigError("plain_pg: t_max must be >= 1");
  if (y.size() != a.rows()) throw ShapeMismatch("plain_pg: y length != rows of a");

  const std::size_t n = a.cols(), m = a.rows();
  Trajectory traj;
  traj.t_run = t_max;
  traj.r.reserve(t_max);
  traj.s.reserve(t_max);

  Vector s(n, 0.0), e(m), g(n), r(n);
  for (int t = 1; t <= t_max; ++t) {
    matvec(a, s, e);
    for (std::size_t i = 0; i < m; ++i) e[i] = y[i] - e[i];
    matvec_t(a, e, g);
    for (std::size_t j = 0; j < n; ++j) r[j] = s[j] + gamma * g[j];
    for (std::size_t j = 0; j < n; ++j) s[j] = std::tanh(xi * r[j]);
    traj.r.push_back(r);
    traj.s.push_back(s);
  }
  return traj;
}

Vector soav_prox(std::span<const double> v, const WsoavWeights& w, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("soav_prox: gamma must be > 0");
  if (v.size() != w.w_plus.size()) throw ShapeMismatch("soav_prox: weight length mismatch");
  Vector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double dj = w.d(j);
    const double z = v[j];
    if (z < -1.0 - gamma)
      out[j] = z + gamma;
    else if (z < -1.0 - dj * gamma)
      out[j] = -1.0;
    else if (z < 1.0 - dj * gamma)
      out[j] = z + dj * gamma;
    else if (z < 1.0 + gamma)
      out[j] = 1.0;
    else
      out[j] = z - gamma;
  }
  return out;
}

WsoavSolver::WsoavSolver(const Matrix& h, std::span<const double> y, double alpha, double gamma)
    : h_(h), gamma_(gamma) {
  const std::size_t n = h.cols();
  const double ag = alpha * gamma;
  Matrix gram(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < h.rows(); ++i) acc += h(i, a) * h(i, b);
      const double val = ag * acc + (a == b ? 1.0 : 0.0);
      gram(a, b) = val;
      gram(b, a) = val;
    }
  inv_ = Cholesky(gram).inverse();
  hty_scaled_.resize(n);
  matvec_t(h, y, hty_scaled_);
  for (auto& v : hty_scaled_) v *= ag;
}

Vector WsoavSolver::solve(const WsoavWeights& w, const IwsoavConfig& cfg) const {
  const std::size_t n = h_.cols();
  if (w.w_plus.size() != n) throw ShapeMismatch("wsoav: weight length mismatch");

  Vector r = cfg.r0.value_or(Vector(n, 0.0));
  if (r.size() != n) throw ShapeMismatch("wsoav: r0 length mismatch");

  Vector z(n), rhs(n), prox_arg(n);
  for (int t = 1; t <= cfg.k_itr; ++t) {
    for (std::size_t j = 0; j < n; ++j) rhs[j] = r[j] + hty_scaled_[j];
    matvec(inv_, rhs, z);
    for (std::size_t j = 0; j < n; ++j) prox_arg[j] = 2.0 * z[j] - r[j];
    const Vector prox = soav_prox(prox_arg, w, gamma_);
    for (std::size_t j = 0; j < n; ++j) r[j] += cfg.theta * (prox[j] - z[j]);
  }
  return z;
}

Vector wsoav_solve(const Matrix& h, std::span<const double> y, const WsoavWeights& w,
                   const IwsoavConfig& cfg) {
  cfg.validate(h.cols());
  return WsoavSolver(h, y, cfg.alpha, cfg.gamma).solve(w, cfg);
}

WsoavWeights llr_weights(const Matrix& h, std::span<const double> y,
                         std::span<const double> s_hat, double sigma_w2) {
  const std::size_t big_m = h.rows(), big_n = h.cols();
  if (y.size() != big_m || s_hat.size() != big_n) throw ShapeMismatch("llr_weights: bad shapes");

  Vector clipped(big_n);
  for (std::size_t j = 0; j < big_n; ++j) clipped[j] = std::clamp(s_hat[j], -1.0, 1.0);

  Vector mu(big_m, 0.0), var(big_m, sigma_w2 / 2.0);
  for (std::size_t i = 0; i < big_m; ++i) {
    const double* hi = h.row(i);
    double mu_i = 0.0, var_i = 0.0;
    for (std::size_t k = 0; k < big_n; ++k) {
      mu_i += hi[k] * clipped[k];
      var_i += hi[k] * hi[k] * (1.0 - clipped[k] * clipped[k]);
    }
    mu[i] += mu_i;
    var[i] += var_i;
  }

  WsoavWeights w;
  w.w_plus.resize(big_n);
  for (std::size_t j = 0; j < big_n; ++j) {
    double llr = 0.0;
    for (std::size_t i = 0; i < big_m; ++i) {
      const double hij = h(i, j);
      double den = var[i] - hij * hij * (1.0 - clipped[j] * clipped[j]);
      if (den <= 0.0) {
        den = 1e-12;
        ++w.degenerate_count;
      }
      llr += 2.0 * hij * (y[i] - (mu[i] - hij * clipped[j])) / den;
    }
    // overflow-safe logistic, clamped into the open interval (0,1)
    double wp;
    if (llr >= 0.0) {
      wp = 1.0 / (1.0 + std::exp(-llr));
    } else {
      const double e = std::exp(llr);
      wp = e / (1.0 + e);
    }
    constexpr double lo = 1e-300;
    const double hi_bound = std::nextafter(1.0, 0.0);
    w.w_plus[j] = std::clamp(wp, lo, hi_bound);
  }
  return w;
}

Vector iwsoav_detect(const Matrix& h, std::span<const double> y, double sigma_w2,
                     const IwsoavConfig& cfg) {
  cfg.validate(h.cols());
  const WsoavSolver solver(h, y, cfg.alpha, cfg.gamma);
  Vector s_hat(h.cols(), 0.0);
  for (int l = 0; l < cfg.l_outer; ++l) {
    const WsoavWeights w = (l == 0 && cfg.uniform_first_weights)
                               ? WsoavWeights::uniform(h.cols())
                               : llr_weights(h, y, s_hat, sigma_w2);
    s_hat = solver.solve(w, cfg);
  }
  return hard_decision(s_hat);
}

double wsoav_objective(const Matrix& h, std::span<const double> y, const WsoavWeights& w,
                       double alpha, std::span<const double> z) {
  double obj = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j)
    obj += w.w_plus[j] * std::abs(z[j] - 1.0) + w.w_minus(j) * std::abs(z[j] + 1.0);
  Vector hz(h.rows());
  matvec(h, z, hz);
  double fid = 0.0;
  for (std::size_t i = 0; i < hz.size(); ++i) {
    const double d = y[i] - hz[i];
    fid += d * d;
  }
  return obj + 0.5 * alpha * fid;
}

}  // namespace tpgdet
