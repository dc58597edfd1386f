#include "qcmc/gss.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace qcmc {

namespace {

// safeguarded Newton with bisection fallback on a bracketing interval
double solve_scalar(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw ComputeError("scalar solve: root not bracketed");
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = f(x);
        if (std::abs(fx) == 0.0 || (hi - lo) < tol * std::max(1.0, std::abs(x))) return x;
        if (flo * fx < 0.0) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
        // Newton step from a secant slope, kept inside the bracket
        const double slope = (fhi - flo) / (hi - lo);
        double next = x - fx / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

}  // namespace

void ProjectionBoundInput::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("projection bound: beta > 0 required");
    if (!(p_b > 0.0 && p_b < 1.0)) throw ValidationError("projection bound: p_b must be in (0,1)");
    if (gap && !(*gap > 0.0)) throw ValidationError("projection bound: gap bound must be > 0");
}

double projection_bound(const ProjectionBoundInput& in) {
    in.validate();
    const double alpha = in.alpha_b();
    const double general = std::log1p(1.0 / (std::numbers::e * alpha)) / (2.0 * in.beta);
    if (in.gap) {
        const double threshold = 1.0 + std::log1p(std::exp(-1.0) / alpha);
        if (2.0 * in.beta * *in.gap >= threshold) {
            const double decay = std::exp(-2.0 * in.beta * *in.gap);
            return std::min(general, decay * *in.gap / (alpha + decay));
        }
    }
    return general;
}

void Theorem1Params::check(double h_tot, double p_b) const {
    const KernelParams kp = kernel();
    kp.validate();
    if (!(tau >= beta)) throw ComputeError("Theorem-1 invariant violated: tau < beta");
    // worst-case dE = 1/beta from Step 1
    const double gg = gamma_g(kp, 1.0 / beta);
    if (gg > x * (1.0 + 1e-9)) throw ComputeError("Theorem-1 invariant violated: gamma_G > x");
    const double gt = kp.gamma_t();
    if (std::abs(gt - x) > 1e-9 * x) throw ComputeError("Theorem-1 invariant violated: gamma_T != x");
    const double amp = std::pow(amplification_factor(h_tot, t_trunc / static_cast<double>(n_t)),
                                static_cast<double>(n_t));
    if (amp > c_max * (1.0 + 1e-9)) throw ComputeError("Theorem-1 invariant violated: C_A^N_t > C_max");
    const double ns_expect = 4.0 * std::pow(c_max, 4) / (kappa * delta * delta);
    if (std::abs(n_s - ns_expect) > 1e-9 * ns_expect)
        throw ComputeError("Theorem-1 invariant violated: N_s formula");
    if (!(epsilon > 0.0 && epsilon < p_b))
        throw ComputeError("Theorem-1 invariant violated: epsilon outside (0, p_b)");
    if (std::abs(delta - epsilon / 3.0) > 1e-12 * epsilon)
        throw ComputeError("Theorem-1 invariant violated: delta != epsilon/3");
}

Theorem1Params theorem1_params(double beta, double eta, double kappa,
                               const EnergyEstimate& estimate, double p_b, double h_tot,
                               double c_max) {
    if (!(beta > 0.0)) throw ValidationError("theorem1_params: beta > 0 required");
    if (!(eta > 0.0)) throw ValidationError("theorem1_params: eta > 0 required");
    if (!(kappa > 0.0 && kappa < 1.0)) throw ValidationError("theorem1_params: kappa in (0,1) required");
    if (!(p_b > 0.0 && p_b < 1.0)) throw ValidationError("theorem1_params: p_b in (0,1) required");
    if (!(estimate.delta_e >= 0.0)) throw ValidationError("theorem1_params: delta_e >= 0 required");
    if (!(h_tot > 0.0)) throw ValidationError("theorem1_params: h_tot > 0 required");
    if (!(c_max > 1.0)) throw ValidationError("theorem1_params: C_max must exceed 1");

    Theorem1Params p;
    p.beta = beta;
    p.eta = eta;
    p.kappa = kappa;
    p.c_max = c_max;

    // Step 1: E0 below the lowest compatible ground energy by 1/beta
    p.e0 = estimate.e_hat - estimate.delta_e - 1.0 / beta;

    // Step 2: eta = 2 eps / (D p_b - eps), D = e^{-2 beta (2 dE + 1/beta)}
    const double d_factor = std::exp(-2.0 * beta * (2.0 * estimate.delta_e + 1.0 / beta));
    const double eps_cap = d_factor * p_b;
    p.epsilon = solve_scalar([&](double e) { return eta * (eps_cap - e) - 2.0 * e; }, 0.0, eps_cap,
                             1e-12);

    // Step 3: delta = eps/3 and x(2+x) = eps/3
    p.delta = p.epsilon / 3.0;
    p.x = solve_scalar([&](double v) { return v * (2.0 + v) - p.epsilon / 3.0; }, 0.0,
                       std::sqrt(p.epsilon), 1e-14);

    // Step 4
    p.tau = std::max(beta, beta * std::sqrt(2.0 * std::log(1.0 / p.x)));

    // Step 5: T with gamma_T = x exactly
    const double log_arg = std::numbers::sqrt2 * p.tau / (std::sqrt(std::numbers::pi) * p.x * beta);
    if (!(log_arg > 1.0))
        throw ValidationError("theorem1_params: eta too large, no truncation time satisfies gamma_T = x");
    p.t_trunc = std::sqrt(2.0 * p.tau * p.tau * std::log(log_arg));

    // Step 6: smallest N_t with C_A(T/N_t)^{N_t} <= C_max
    auto amp = [&](long long n) {
        return std::pow(amplification_factor(h_tot, p.t_trunc / static_cast<double>(n)),
                        static_cast<double>(n));
    };
    long long lo = 1, hi = 1;
    const long long cap = 1LL << 40;
    while (amp(hi) > c_max) {
        hi *= 2;
        if (hi > cap) throw ComputeError("theorem1_params: no N_t satisfies the C_max equation below 2^40");
    }
    while (lo < hi) {
        const long long mid = lo + (hi - lo) / 2;
        if (amp(mid) <= c_max) hi = mid;
        else lo = mid + 1;
    }
    p.n_t = lo;

    // Step 7
    p.n_s = 4.0 * std::pow(c_max, 4) / (kappa * p.delta * p.delta);

    p.check(h_tot, p_b);
    return p;
}

std::string GssResult::report() const {
    std::ostringstream os;
    os.precision(12);
    os << "iter beta e0 tau T n_t n_s estimate delta_e\n";
    for (const auto& it : trace)
        os << it.index << " " << it.beta << " " << it.e0 << " " << it.tau << " " << it.t_trunc
           << " " << it.n_t << " " << it.n_s << " " << it.estimate << " " << it.delta_e << "\n";
    os << "final " << e_hat << " +- " << delta_e << "\n";
    return os.str();
}

namespace {

// smallest beta with projection_bound(beta) <= target
double choose_beta(double target, double p_b, std::optional<double> gap) {
    const double alpha = p_b / (1.0 - p_b);
    // the general bound hits the target exactly at ln(1+1/(e alpha))/(2 target)
    double beta = std::log1p(1.0 / (std::numbers::e * alpha)) / (2.0 * target);
    if (gap) {
        auto bound_at = [&](double b) { return projection_bound({b, p_b, gap}); };
        double lo = 1e-9, hi = beta;
        if (bound_at(hi) <= target) {
            while (hi - lo > 1e-9 * hi) {
                const double mid = 0.5 * (lo + hi);
                if (bound_at(mid) <= target) hi = mid;
                else lo = mid;
            }
            beta = hi;
        }
    }
    return beta;
}

}  // namespace

GssResult iterative_gss(const Hamiltonian& h, const StateVector& psi0, int n_i, double p_b,
                        double kappa, std::optional<double> gap, const GssOptions& options) {
    if (n_i < 1) throw ValidationError("iterative_gss: N_i >= 1 required");
    if (!(p_b > 0.0 && p_b < 1.0)) throw ValidationError("iterative_gss: p_b in (0,1) required");
    if (!(kappa > 0.0 && kappa < 1.0)) throw ValidationError("iterative_gss: kappa in (0,1) required");
    options.evolver.validate();

    const double h_tot = h.h_tot();
    const ObservableDecomposition obs = ObservableDecomposition::from_hamiltonian(h);
    GssResult result;
    result.e_hat = 0.0;
    result.delta_e = h_tot;
    Rng rng(options.seed);

    for (int i = 1; i <= n_i; ++i) {
        const double beta = choose_beta(0.5 * result.delta_e, p_b, gap);
        const double eta = result.delta_e / (4.0 * h_tot);
        Theorem1Params params = theorem1_params(beta, eta, kappa / n_i,
                                                {result.e_hat, result.delta_e}, p_b, h_tot,
                                                options.c_max);
        EvolverSpec evolver = options.evolver;
        if (evolver.kind == EvolverSpec::Kind::Lor)
            evolver.n_t = static_cast<int>(std::min<long long>(params.n_t, 1 << 30));

        double value;
        if (options.deterministic) {
            value = quadrature_its(psi0, h, obs, params.kernel(), evolver, options.grid_refine);
        } else {
            long n_s;
            if (options.n_s_override) {
                n_s = *options.n_s_override;
            } else if (params.n_s > 2e9) {
                throw ComputeError("iterative_gss: Theorem-1 sample size " +
                                   std::to_string(params.n_s) +
                                   " is impractical; use deterministic mode or n_s_override");
            } else {
                n_s = static_cast<long>(std::ceil(params.n_s));
            }
            Rng iter_rng = rng.derive(static_cast<std::uint64_t>(i));
            value = estimate_its(psi0, h, obs, params.kernel(), n_s, 1, evolver,
                                 options.shot_model, iter_rng)
                        .value;
        }

        result.e_hat = value;
        result.delta_e *= 0.75;
        result.trace.push_back({i, beta, params.e0, params.tau, params.t_trunc, params.n_t,
                                params.n_s, value, result.delta_e});
    }
    return result;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw ValidationError("uniform grid needs hi > lo and >= 2 points");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    return g;
}

namespace {

// golden-section minimisation on [lo, hi]
double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol,
                  double* arg_out) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (arg_out) *arg_out = mid;
    return fm;
}

E0ScanResult scan_impl(const std::function<double(double)>& energy,
                       const std::function<bool(double)>& resolvable,
                       const std::vector<double>& e0_grid, double h_tot) {
    if (e0_grid.size() < 3) throw ValidationError("E0 grid needs at least 3 points");
    E0ScanResult result;
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    for (std::size_t i = 0; i < e0_grid.size(); ++i) {
        if (!resolvable(e0_grid[i])) {
            ++result.excluded_points;
            continue;
        }
        const double v = energy(e0_grid[i]);
        if (v < best) {
            best = v;
            best_idx = static_cast<int>(i);
        }
    }
    if (best_idx < 0) throw ComputeError("E0 scan: denominator unresolved on the whole grid");
    const double lo = e0_grid[std::max(0, best_idx - 1)];
    const double hi = e0_grid[std::min<int>(static_cast<int>(e0_grid.size()) - 1, best_idx + 1)];
    double arg = e0_grid[best_idx];
    double refined = best;
    if (hi > lo) refined = golden_min(energy, lo, hi, 1e-10 * std::max(1.0, h_tot), &arg);
    if (refined <= best) {
        result.e_min = refined;
        result.e0_star = arg;
    } else {
        result.e_min = best;
        result.e0_star = e0_grid[best_idx];
    }
    return result;
}

}  // namespace

E0ScanResult e0_scan_gss(const EvolutionGrid& grid, double beta, double tau,
                         const std::vector<double>& e0_grid) {
    const double h_tot = grid.hamiltonian().h_tot();
    const double den_floor = 1e-13;
    auto energy = [&](double e0) { return grid.its_energy(beta, tau, e0); };
    auto resolvable = [&](double e0) { return grid.denominator(beta, tau, e0) > den_floor; };
    return scan_impl(energy, resolvable, e0_grid, h_tot);
}

E0ScanResult e0_scan_gss(const SampleCache& numerator, const SampleCache& denominator,
                         const std::vector<double>& e0_grid) {
    auto den_with_error = [&](double e0) {
        // re-phased denominator mean and standard error of its real part
        const std::size_t n = denominator.records.size();
        double mean = 0.0, m2 = 0.0;
        std::size_t count = 0;
        for (const auto& r : denominator.records) {
            const double phase = e0 * (r.t - r.t_prime) + r.theta_s - r.theta_sp;
            const cplx v = r.sgn * std::exp(cplx{0.0, phase}) * cplx{r.mu_r_sum, r.mu_i_sum} /
                           static_cast<double>(denominator.m_s);
            ++count;
            const double d = v.real() - mean;
            mean += d / static_cast<double>(count);
            m2 += d * (v.real() - mean);
        }
        const double pref = denominator.a_o * denominator.norm_sq;
        const double var = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
        return std::pair<double, double>(pref * mean,
                                         pref * std::sqrt(var / static_cast<double>(n)));
    };
    auto energy = [&](double e0) {
        return numerator.estimate(e0).real() / denominator.estimate(e0).real();
    };
    auto resolvable = [&](double e0) {
        const auto [den, se] = den_with_error(e0);
        return std::abs(den) >= 10.0 * se;
    };
    return scan_impl(energy, resolvable, e0_grid, numerator.a_o);
}

std::vector<double> qsd_default_betas(double t_figure, int d) {
    if (d < 2) throw ValidationError("QSD needs at least 2 subspace times");
    std::vector<double> betas(d);
    for (int a = 1; a <= d; ++a) betas[a - 1] = a * t_figure / d;
    return betas;
}

QsdResult qsd_energy(const EvolutionGrid& grid, const std::vector<double>& betas, double tau,
                     const std::vector<double>& e0_grid, double eig_threshold) {
    if (betas.size() < 2) throw ValidationError("QSD needs at least 2 subspace times");
    const int d = static_cast<int>(betas.size());
    std::vector<Eigen::VectorXcd> coeff_cache;

    QsdResult best;
    best.energy = std::numeric_limits<double>::infinity();
    bool any = false;
    std::string last_failure;
    for (double e0 : e0_grid) {
        coeff_cache.clear();
        coeff_cache.reserve(d);
        for (double beta : betas) coeff_cache.push_back(grid.coefficients(beta, tau, e0));
        Eigen::MatrixXcd a(d, d), b(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                a(i, j) = (coeff_cache[i].adjoint() * grid.overlap_gram() * coeff_cache[j]).value();
                b(i, j) = (coeff_cache[i].adjoint() * grid.hamiltonian_gram() * coeff_cache[j]).value();
            }
        }
        a = 0.5 * (a + a.adjoint()).eval();
        b = 0.5 * (b + b.adjoint()).eval();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
        if (es.info() != Eigen::Success) continue;
        int kept = 0;
        for (int i = 0; i < d; ++i)
            if (es.eigenvalues()(i) > eig_threshold) ++kept;
        if (kept == 0) {
            last_failure = "all overlap eigenvalues below the truncation threshold";
            continue;
        }
        Eigen::MatrixXcd v(d, kept);
        int col = 0;
        for (int i = 0; i < d; ++i) {
            if (es.eigenvalues()(i) > eig_threshold) {
                v.col(col) = es.eigenvectors().col(i) / std::sqrt(es.eigenvalues()(i));
                ++col;
            }
        }
        Eigen::MatrixXcd h_eff = v.adjoint() * b * v;
        h_eff = 0.5 * (h_eff + h_eff.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(h_eff);
        if (es2.info() != Eigen::Success) continue;
        const double energy = es2.eigenvalues().minCoeff();
        any = true;
        if (energy < best.energy) {
            best.energy = energy;
            best.e0_star = e0;
            best.kept_dimension = kept;
        }
    }
    if (!any)
        throw ComputeError("QSD failed on the whole E0 grid" +
                           (last_failure.empty() ? std::string()
                                                 : (": " + last_failure)));
    return best;
}

}  // namespace qcmc
