#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <vector>

#include "fracvi/penalized.hpp"
#include "fracvi/primal_dual.hpp"
#include "fracvi/problem.hpp"
#include "fracvi/report.hpp"

namespace fracvi {

/// Worker cap for study fan-out: FRACVI_THREADS if set and positive, else the
/// hardware concurrency.
int worker_limit();

/// Runs jobs[i]() for every i with at most worker_limit() in flight; results
/// keep the job order.
template <class T>
std::vector<T> run_parallel(const std::vector<std::function<T()>>& jobs) {
  const std::size_t cap = static_cast<std::size_t>(std::max(1, worker_limit()));
  std::vector<T> out;
  out.reserve(jobs.size());
  if (cap == 1) {
    for (const auto& job : jobs) out.push_back(job());
    return out;
  }
  for (std::size_t begin = 0; begin < jobs.size(); begin += cap) {
    std::vector<std::future<T>> batch;
    for (std::size_t i = begin; i < std::min(jobs.size(), begin + cap); ++i)
      batch.push_back(std::async(std::launch::async, jobs[i]));
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

struct VerifyOptions {
  PenaltySchedule schedule;
  std::uint64_t seed = 1;
  bool corrupt_penalty = false;
};

/// Copy of spec with new data; the grid, mask, coefficients and obstacle are shared.
ProblemSpec with_data(const ProblemSpec& spec, const ScalarField& f_sharp, const VectorField& f_vec);
ProblemSpec with_obstacle(const ProblemSpec& spec, const ScalarField& g);
ProblemSpec with_sigma(const ProblemSpec& spec, double sigma);

struct DataStabilityResult {
  EstimateCheck sobolev_form;  // H^sigma difference vs (C_*/a_*)||df_#||_{2#} + ||df||_2 / a_*
  EstimateCheck l1_form;       // vs a_p ||df_#||_1^(p/(2p-2)) + b_1 ||df||_1^(1/2)
  EstimateCheck gamma_form;    // potential difference vs (1 + a^*/a_*)(C_* ||df_#|| + ||df||)
  double c_star = 0.0;
  double c_p = 0.0;
  double p = 0.0;
  double a_p = 0.0;
  double b_1 = 0.0;
};

/// Solves with spec's data and with (f_sharp + d_sharp, f + d_vec).
DataStabilityResult check_data_stability(const ProblemSpec& spec, const ScalarField& d_sharp, const VectorField& d_vec,
                                         const VerifyOptions& options);

struct GStabilityResult {
  ConvergenceStudy study;  // parameter delta, error ||u - u_hat||_{H^sigma}
  std::vector<double> normalized;  // error / sqrt(delta)
  bool inactive = false;
};

/// g_hat = g + delta for delta in fractions * g_star.
GStabilityResult check_g_stability(const ProblemSpec& spec, const VerifyOptions& options,
                                   const std::vector<double>& fractions = {0.2, 0.1, 0.05, 0.025});

/// Multiplier L^1 bound, dual-norm bound of lambda D u (random unit fields and
/// the exact sup), the f_sharp = 0 bound and absolute complementarity.
std::vector<EstimateCheck> check_multiplier_bounds(const SolveReport& report, const ProblemSpec& spec,
                                                   std::uint64_t seed, int samples = 100);

struct SobolevCheck {
  double c_p = 0.0;
  EstimateCheck check;
};

/// Measured interpolation constant over random smooth fields (200 by default).
SobolevCheck check_sobolev(const DomainMask& mask, double sigma, double p, std::uint64_t seed, int samples = 200);

/// C_p on successive refinements of the same box and domain; passes when every
/// consecutive relative change is at most 10%.
ConvergenceStudy sobolev_refinement(int dim, const std::vector<int>& ns, double half_length,
                                    const std::function<DomainMask(const Grid&)>& domain, double sigma, double p,
                                    std::uint64_t seed, int samples = 200);

/// Measure of { |D^sigma u|^2 - g^2 > sqrt(eps) } per level, its monotone decay,
/// slope against eps, and the bound a_* C_sigma^2 sqrt(eps) / (2 g_*^2).
ConvergenceStudy study_epsilon_decay(const ProblemSpec& spec, const VerifyOptions& options);
/// Same study from an existing report.
ConvergenceStudy epsilon_decay_from(const SolveReport& report, const ProblemSpec& spec, double minimum_slope = 0.4);

struct SigmaStudyResult {
  ConvergenceStudy l2;       // relative l2 error versus the sigma = 1 solution
  ConvergenceStudy h_half;   // relative H^s error, s = 1/2
  std::vector<SolveReport> reports;
  SolveReport local;
  std::vector<std::vector<double>> panel_pairings;  // per sigma: <lambda, phi_i>
  std::vector<double> successive_differences;
};

/// sigma ladder plus the local solution at sigma = 1; spec must have f_sharp = 0.
SigmaStudyResult study_sigma_limit(const ProblemSpec& spec, const VerifyOptions& options,
                                   const std::vector<double>& ladder = {0.6, 0.7, 0.8, 0.9, 0.95, 0.99},
                                   double sigma_tol = 5e-2, bool keep_fields = true);

struct IdentityStudyResult {
  ConvergenceStudy riesz;     // ||I_a h - h||_inf / ||h||_inf over the alpha ladder
  ConvergenceStudy gradient;  // ||D^s w - Dw||_inf / ||Dw||_inf over the sigma ladder
};

/// Gaussian h = exp(-x^2) for the potential, raised cosine (C^1) for the gradient.
IdentityStudyResult study_identity_approx(const Grid& grid, const std::vector<double>& alphas = {0.4, 0.2, 0.1, 0.05},
                                          const std::vector<double>& sigmas = {0.9, 0.95, 0.99},
                                          double amplitude = 1.0);

/// int A Du.D(v-u) - <f', v-u> >= -vi_tol along v = u + theta (w - u) for
/// random w with |D^sigma w| <= g; lhs is the most negative value found,
/// negated.
EstimateCheck check_discrete_vi(const ProblemSpec& spec, const ScalarField& u, std::uint64_t seed, int directions = 50);

/// |<lambda, phi psi>| <= <lambda, |phi|^p>^(1/p) <lambda, |psi|^p'>^(1/p') for
/// random bounded phi, psi and p in {2, 3}.
std::vector<EstimateCheck> check_holder_charges(const ScalarField& lambda, std::uint64_t seed, int samples = 20);

/// Two solves from different initial guesses differ by < 10 picard_tol in
/// relative h_sigma.
EstimateCheck check_uniqueness(const ProblemSpec& spec, const SolveReport& reference, const VerifyOptions& options);

/// Relative h_sigma distance between two solutions.
double relative_h_sigma_distance(const ScalarField& a, const ScalarField& b, double sigma);

/// Penalized against primal-dual within tol relative h_sigma.
EstimateCheck check_cross_solver(const SolveReport& penalized, const SolveReport& primal_dual, double sigma,
                                 double tol = 5e-3);

/// Per level, the largest |int kappa D u_eps . D v - int D gamma . D v| over the
/// test panel v, with gamma the potential of the final solution.
std::vector<double> potential_pairing_gaps(const SolveReport& report, const ProblemSpec& spec);

}  // namespace fracvi
