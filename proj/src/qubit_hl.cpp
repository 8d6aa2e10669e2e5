#include "wgqed/qubit_hl.hpp"

#include <stdexcept>
#include <string>

#include "wgqed/kernels.hpp"

namespace wgqed {

Vec initial_graded_state(const GradedLayout& layout) {
  const int n = layout.n_sites();
  const std::size_t p = layout.packed_size();
  Vec x(static_cast<Eigen::Index>(p * n));
  for (int l = 0; l < n; ++l) layout.pack(lowering_operator(l + 1, n).dense(), x.data() + p * l);
  return x;
}

void hl_rhs_graded(const GradedLayout& layout, const DelayKernel& kernel, const Vec& x,
                   const std::vector<const Vec*>& delayed, Vec& dx) {
  const int n = layout.n_sites();
  const std::size_t p = layout.packed_size();
  Vec s(static_cast<Eigen::Index>(p));
  for (int l = 0; l < n; ++l) {
    s.setZero();
    bool any = false;
    cplx* out = dx.data() + p * l;
    for (const auto& term : kernel.terms) {
      if (term.target != l) continue;
      if (term.local) {
        kernels::zaxpy(p, -term.weight, x.data() + p * term.source, out);
        continue;
      }
      const Vec* src = delayed[term.lag];
      if (!src) continue;
      kernels::zaxpy(p, term.weight, src->data() + p * term.source, s.data());
      any = true;
    }
    if (!any) continue;
    // sigma^z_l acts on the (w-1) sector of S_w; there it equals 2 B^dagger B - 1
    // with B the (w-1) -> (w-2) block of sigma_l.
    const cplx* sig = x.data() + p * l;
    for (int w = 1; w <= n; ++w) {
      auto sw = layout.block(s.data(), w);
      auto dw = layout.block(out, w);
      dw -= sw;
      if (w >= 2) {
        auto b = layout.block(sig, w - 1);
        const Mat tmp = b * sw;
        dw.noalias() += 2.0 * b.adjoint() * tmp;
      }
    }
  }
}

std::vector<Mat> hl_rhs_dense(const DelayKernel& kernel, const std::vector<Mat>& sigma,
                              const std::vector<std::vector<Mat>>& delayed_sigma,
                              const std::vector<bool>& active) {
  const int n = kernel.n;
  const Eigen::Index d = sigma.front().rows();
  std::vector<Mat> out(n, Mat::Zero(d, d));
  for (int l = 0; l < n; ++l) {
    Mat s = Mat::Zero(d, d);
    for (const auto& term : kernel.terms) {
      if (term.target != l) continue;
      if (term.local) {
        out[l] -= term.weight * sigma[term.source];
      } else if (active[term.lag]) {
        s += term.weight * delayed_sigma[term.lag][term.source];
      }
    }
    out[l] += z_from_lowering(sigma[l]) * s;
  }
  return out;
}

DelayedSystem qubit_hl_system(const GradedLayout& layout, const DelayKernel& kernel) {
  DelayedSystem sys;
  sys.dim = static_cast<Eigen::Index>(layout.packed_size() * layout.n_sites());
  sys.delays = kernel.delays;
  sys.rhs = [&layout, kernel](double, const Vec& x, const std::vector<const Vec*>& delayed, Vec& dx) {
    hl_rhs_graded(layout, kernel, x, delayed, dx);
  };
  return sys;
}

DelayedSystem qubit_hl_dense_system(const DelayKernel& kernel) {
  const int n = kernel.n;
  const Eigen::Index d = Eigen::Index{1} << n;
  DelayedSystem sys;
  sys.dim = d * d * n;
  sys.delays = kernel.delays;
  sys.rhs = [kernel, n, d](double, const Vec& x, const std::vector<const Vec*>& delayed, Vec& dx) {
    auto unflatten = [&](const Vec& v) {
      std::vector<Mat> m(n);
      for (int l = 0; l < n; ++l) m[l] = Eigen::Map<const Mat>(v.data() + d * d * l, d, d);
      return m;
    };
    std::vector<std::vector<Mat>> lagged(delayed.size());
    std::vector<bool> active(delayed.size());
    for (std::size_t k = 0; k < delayed.size(); ++k) {
      active[k] = delayed[k] != nullptr;
      if (active[k]) lagged[k] = unflatten(*delayed[k]);
    }
    const auto der = hl_rhs_dense(kernel, unflatten(x), lagged, active);
    for (int l = 0; l < n; ++l) Eigen::Map<Mat>(dx.data() + d * d * l, d, d) = der[l];
  };
  return sys;
}

QubitHLRun solve_qubit_hl(const ArrayConfig& cfg, const EmitterState& psi0, double t_end, double dt,
                          const QubitHLOptions& opt) {
  if (cfg.emitter_kind != EmitterKind::TwoLevel) throw std::invalid_argument("solve_qubit_hl: config is not two-level");
  const int n = cfg.n_emitters;
  if (n > opt.max_sites)
    throw std::invalid_argument("solve_qubit_hl: N = " + std::to_string(n) + " exceeds the site cap " +
                                std::to_string(opt.max_sites));
  const Eigen::Index d = Eigen::Index{1} << n;
  if (psi0.size() != d) throw std::invalid_argument("solve_qubit_hl: initial state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("solve_qubit_hl: initial state not normalized");

  const auto kernel = build_kernel(cfg, t_end, opt.link);
  IntegrationOptions io;
  io.interpolation = opt.interpolation;
  io.stride = 0;

  QubitHLRun run;
  run.projected.n = n;
  run.projected.interpolation = opt.interpolation;
  const std::size_t stride = opt.stride == 0 ? 1 : opt.stride;

  if (opt.storage == OperatorStorage::Graded) {
    const GradedLayout layout(n);
    const std::size_t p = layout.packed_size();
    const auto sys = qubit_hl_system(layout, kernel);
    const auto observe = [&](std::size_t step, double t, const Vec& x) {
      if (step % stride != 0) return;
      Mat u(d, n);
      for (int l = 0; l < n; ++l) u.col(l) = layout.apply(x.data() + p * l, psi0);
      run.projected.t.push_back(t);
      run.projected.u.push_back(std::move(u));
      if (opt.keep_operators) run.operators.push_back(x);
    };
    run.steps = integrate(sys, initial_graded_state(layout), t_end, dt, io, observe).steps;
  } else {
    const auto sys = qubit_hl_dense_system(kernel);
    Vec x0(sys.dim);
    for (int l = 0; l < n; ++l) Eigen::Map<Mat>(x0.data() + d * d * l, d, d) = lowering_operator(l + 1, n).dense();
    const auto observe = [&](std::size_t step, double t, const Vec& x) {
      if (step % stride != 0) return;
      Mat u(d, n);
      for (int l = 0; l < n; ++l) u.col(l) = Eigen::Map<const Mat>(x.data() + d * d * l, d, d) * psi0;
      run.projected.t.push_back(t);
      run.projected.u.push_back(std::move(u));
      if (opt.keep_operators) run.operators.push_back(x);
    };
    run.steps = integrate(sys, x0, t_end, dt, io, observe).steps;
  }
  return run;
}

}  // namespace wgqed
